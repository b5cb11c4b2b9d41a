#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace glance::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Verbosity comes from GLANCE_LOG={error,info,debug}; default is error.
inline Level level() {
  static const Level lvl = [] {
    const char* env = std::getenv("GLANCE_LOG");
    if (env == nullptr) return Level::error;
    const std::string s(env);
    if (s == "debug") return Level::debug;
    if (s == "info") return Level::info;
    return Level::error;
  }();
  return lvl;
}

inline void error(const std::string& msg) {
  std::fprintf(stderr, "[glance] error: %s\n", msg.c_str());
}

inline void info(const std::string& msg) {
  if (level() >= Level::info) std::fprintf(stderr, "[glance] %s\n", msg.c_str());
}

inline void debug(const std::string& msg) {
  if (level() >= Level::debug) std::fprintf(stderr, "[glance] %s\n", msg.c_str());
}

}  // namespace glance::log
