#include "glance/logic.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "glance/error.hpp"
#include "glance/rng.hpp"
#include "json.hpp"

namespace glance {

const std::array<GateCoeffs, kGateCount> kGateBasis = {{
    {0, 0, 0, 0},    // ZERO
    {0, 0, 0, 1},    // AND          a*b
    {0, 1, 0, -1},   // A_AND_NOT_B  a - a*b
    {0, 1, 0, 0},    // A
    {0, 0, 1, -1},   // NOT_A_AND_B  b - a*b
    {0, 0, 1, 0},    // B
    {0, 1, 1, -2},   // XOR          a + b - 2ab
    {0, 1, 1, -1},   // OR           a + b - ab
    {1, -1, -1, 1},  // NOR
    {1, -1, -1, 2},  // XNOR
    {1, 0, -1, 0},   // NOT_B
    {1, 0, -1, 1},   // A_OR_NOT_B
    {1, -1, 0, 0},   // NOT_A
    {1, -1, 0, 1},   // NOT_A_OR_B
    {1, 0, 0, -1},   // NAND
    {1, 0, 0, 0},    // ONE
}};

const std::array<const char*, kGateCount> kGateNames = {
    "ZERO", "AND",  "A_AND_NOT_B", "A",     "NOT_A_AND_B", "B",     "XOR",  "OR",
    "NOR",  "XNOR", "NOT_B",       "A_OR_NOT_B", "NOT_A",  "NOT_A_OR_B", "NAND", "ONE"};

double gate_value(int gate, double a, double b) {
  const GateCoeffs& g = kGateBasis[gate];
  return g.c0 + g.ca * a + g.cb * b + g.cab * a * b;
}

namespace {

void track_out(Tape& tape, const TensorRef& out, bool parents_tracked,
               std::function<void()> back) {
  if (!parents_tracked) return;
  out->requires_grad = true;
  out->ensure_grad();
  tape.record(out, std::move(back));
}

// Row-wise softmax of the gate logits, computed outside the tape; the fused
// gate_mix backward differentiates through it analytically.
std::vector<double> gate_weights(const Tensor& logits) {
  std::vector<double> w(logits.values.size());
  for (int t = 0; t < logits.rows; ++t) {
    double mx = logits.at(t, 0);
    for (int g = 1; g < kGateCount; ++g) mx = std::max(mx, logits.at(t, g));
    double denom = 0.0;
    for (int g = 0; g < kGateCount; ++g) {
      const double e = std::exp(logits.at(t, g) - mx);
      w[static_cast<std::size_t>(t) * kGateCount + g] = e;
      denom += e;
    }
    for (int g = 0; g < kGateCount; ++g) {
      w[static_cast<std::size_t>(t) * kGateCount + g] /= denom;
    }
  }
  return w;
}

void check_layer(const LogicLayerParams& params) {
  if (params.num_neurons < 1 || params.input_width < 1 ||
      static_cast<int>(params.wiring.size()) != params.num_neurons || !params.gate_logits ||
      params.gate_logits->rows != params.num_neurons ||
      params.gate_logits->cols != kGateCount) {
    throw validation_error("logic layer parameters are inconsistent");
  }
  for (const auto& [a, b] : params.wiring) {
    if (a < 0 || a >= params.input_width || b < 0 || b >= params.input_width) {
      throw validation_error("logic wiring index out of range for input width " +
                             std::to_string(params.input_width));
    }
  }
}

}  // namespace

LogicLayerParams make_logic_layer(int num_neurons, int input_width, std::uint64_t seed) {
  if (num_neurons < 1) throw validation_error("logic layer needs at least one neuron");
  if (input_width < 1) throw validation_error("logic layer needs a positive input width");
  LogicLayerParams params;
  params.num_neurons = num_neurons;
  params.input_width = input_width;
  Rng rng(seed);
  params.wiring.reserve(num_neurons);
  for (int t = 0; t < num_neurons; ++t) {
    const int a = static_cast<int>(rng.next_below(input_width));
    int b = a;
    if (input_width > 1) {
      b = static_cast<int>(rng.next_below(input_width - 1));
      if (b >= a) ++b;  // uniform over the other columns
    }
    params.wiring.emplace_back(a, b);
  }
  // Zero logits start every neuron at the uniform gate mixture.
  params.gate_logits = param(num_neurons, kGateCount,
                             std::vector<double>(static_cast<std::size_t>(num_neurons) * kGateCount, 0.0));
  return params;
}

TensorRef gate_mix(Tape& tape, const TensorRef& squashed, const LogicLayerParams& params) {
  check_layer(params);
  if (squashed->cols != params.input_width) {
    throw validation_error("gate_mix: input has " + std::to_string(squashed->cols) +
                           " columns but the layer is wired for " +
                           std::to_string(params.input_width));
  }
  const int n = squashed->rows;
  const int L = params.num_neurons;
  const TensorRef logits = params.gate_logits;
  const std::vector<double> w = gate_weights(*logits);
  const std::vector<std::pair<int, int>> wiring = params.wiring;

  // Collapse each neuron's gate mixture into four multilinear coefficients.
  std::vector<double> c0(L), ca(L), cb(L), cab(L);
  for (int t = 0; t < L; ++t) {
    for (int g = 0; g < kGateCount; ++g) {
      const double wg = w[static_cast<std::size_t>(t) * kGateCount + g];
      c0[t] += wg * kGateBasis[g].c0;
      ca[t] += wg * kGateBasis[g].ca;
      cb[t] += wg * kGateBasis[g].cb;
      cab[t] += wg * kGateBasis[g].cab;
    }
  }

  TensorRef out = tensor(n, L);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < L; ++t) {
      const double a = squashed->at(i, wiring[t].first);
      const double b = squashed->at(i, wiring[t].second);
      out->at(i, t) = c0[t] + ca[t] * a + cb[t] * b + cab[t] * a * b;
    }
  }

  track_out(tape, out, squashed->requires_grad || logits->requires_grad,
            [squashed, logits, out, wiring, w, ca, cb, cab, n, L] {
              for (int i = 0; i < n; ++i) {
                for (int t = 0; t < L; ++t) {
                  const double g_out = out->grad[static_cast<std::size_t>(i) * L + t];
                  if (g_out == 0.0) continue;
                  const int pa = wiring[t].first, pb = wiring[t].second;
                  const double a = squashed->at(i, pa);
                  const double b = squashed->at(i, pb);
                  if (squashed->requires_grad) {
                    squashed->grad[static_cast<std::size_t>(i) * squashed->cols + pa] +=
                        g_out * (ca[t] + cab[t] * b);
                    squashed->grad[static_cast<std::size_t>(i) * squashed->cols + pb] +=
                        g_out * (cb[t] + cab[t] * a);
                  }
                  if (logits->requires_grad) {
                    const double mixed = out->at(i, t);
                    for (int g = 0; g < kGateCount; ++g) {
                      const double wg = w[static_cast<std::size_t>(t) * kGateCount + g];
                      logits->grad[static_cast<std::size_t>(t) * kGateCount + g] +=
                          g_out * wg * (gate_value(g, a, b) - mixed);
                    }
                  }
                }
              }
            });
  return out;
}

TensorRef logic_forward(Tape& tape, const TensorRef& h, const LogicLayerParams& params) {
  return gate_mix(tape, sigmoid(tape, h), params);
}

TensorRef entropy_rows(Tape& tape, const TensorRef& p) {
  TensorRef out = tensor(p->rows, 1);
  for (int i = 0; i < p->rows; ++i) {
    double h = 0.0;
    for (int c = 0; c < p->cols; ++c) {
      const double v = p->at(i, c);
      if (v > 0.0) h -= v * std::log(v);
    }
    out->at(i, 0) = h;
  }
  track_out(tape, out, p->requires_grad, [p, out] {
    for (int i = 0; i < p->rows; ++i) {
      const double g = out->grad[i];
      if (g == 0.0) continue;
      for (int c = 0; c < p->cols; ++c) {
        const double v = p->at(i, c);
        if (v > 0.0) {
          p->grad[static_cast<std::size_t>(i) * p->cols + c] -= g * (std::log(v) + 1.0);
        }
      }
    }
  });
  return out;
}

TensorRef logic_loss(Tape& tape, const LogicLayerParams& params) {
  check_layer(params);
  const TensorRef p = softmax_rows(tape, params.gate_logits);
  return scale(tape, mean(tape, entropy_rows(tape, p)), 1.0 / std::log(16.0));
}

std::vector<HardNeuron> harden(const LogicLayerParams& params) {
  check_layer(params);
  std::vector<HardNeuron> neurons;
  neurons.reserve(params.num_neurons);
  for (int t = 0; t < params.num_neurons; ++t) {
    int best = 0;
    for (int g = 1; g < kGateCount; ++g) {
      if (params.gate_logits->at(t, g) > params.gate_logits->at(t, best)) best = g;
    }
    neurons.push_back({best, params.wiring[t].first, params.wiring[t].second});
  }
  return neurons;
}

std::string harden_json(const LogicLayerParams& params) {
  nlohmann::json doc;
  doc["neurons"] = nlohmann::json::array();
  for (const HardNeuron& n : harden(params)) {
    doc["neurons"].push_back({{"gate", kGateNames[n.gate]}, {"inputs", {n.a, n.b}}});
  }
  return doc.dump();
}

std::vector<double> hard_eval(const std::vector<HardNeuron>& neurons,
                              const std::vector<double>& inputs) {
  std::vector<double> out;
  out.reserve(neurons.size());
  for (const HardNeuron& n : neurons) {
    if (n.a < 0 || n.a >= static_cast<int>(inputs.size()) || n.b < 0 ||
        n.b >= static_cast<int>(inputs.size())) {
      throw validation_error("hard_eval: wiring index out of range");
    }
    out.push_back(gate_value(n.gate, inputs[n.a], inputs[n.b]));
  }
  return out;
}

}  // namespace glance
