#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glance/tensor.hpp"

namespace glance {

// The 16 two-input Boolean gates in a fixed order. Each real-valued
// relaxation is the multilinear interpolation of the gate's truth table,
//   gate(a, b) = c0 + ca*a + cb*b + cab*a*b,
// which agrees with the discrete gate on {0,1}^2 and maps [0,1]^2 into [0,1].
inline constexpr int kGateCount = 16;

struct GateCoeffs {
  double c0, ca, cb, cab;
};

extern const std::array<GateCoeffs, kGateCount> kGateBasis;
extern const std::array<const char*, kGateCount> kGateNames;  // "ZERO", "AND", ...

double gate_value(int gate, double a, double b);

// A layer of two-input soft logic neurons. Each neuron reads a fixed pair of
// input columns (wired uniformly at random from the seed, distinct whenever
// the input has at least two columns) and mixes all 16 gate relaxations with
// softmax(gate_logits) weights. Only gate_logits is learnable.
struct LogicLayerParams {
  int num_neurons = 0;
  int input_width = 0;
  std::vector<std::pair<int, int>> wiring;  // (a_idx, b_idx) per neuron
  TensorRef gate_logits;                    // [num_neurons x 16]
};

LogicLayerParams make_logic_layer(int num_neurons, int input_width, std::uint64_t seed);

// Soft gate mixture on inputs already in [0,1]:
//   out[i][t] = sum_g softmax(gate_logits[t])[g] * gate_g(s[i][a_t], s[i][b_t]).
// Differentiable in both `squashed` and gate_logits.
TensorRef gate_mix(Tape& tape, const TensorRef& squashed, const LogicLayerParams& params);

// Squashes h through sigmoid, then applies the gate mixture: l = L(h).
TensorRef logic_forward(Tape& tape, const TensorRef& h, const LogicLayerParams& params);

// Row-wise Shannon entropy -sum_k p_k ln p_k of a row-stochastic matrix,
// returned as an [n x 1] column. Zero-probability entries contribute zero.
TensorRef entropy_rows(Tape& tape, const TensorRef& p);

// Mean normalized gate-distribution entropy over neurons, in [0,1]:
// 0 when every neuron has collapsed onto one gate, 1 at uniform mixtures.
TensorRef logic_loss(Tape& tape, const LogicLayerParams& params);

// Discrete snapshot of the layer: per neuron the argmax gate (ties go to the
// lowest gate index) and its wiring.
struct HardNeuron {
  int gate;
  int a;
  int b;
};

std::vector<HardNeuron> harden(const LogicLayerParams& params);

// JSON form used by the CLI: {"neurons":[{"gate":"XOR","inputs":[3,17]},...]}
std::string harden_json(const LogicLayerParams& params);

// Evaluates the hardened circuit on one input row in the squashed domain.
std::vector<double> hard_eval(const std::vector<HardNeuron>& neurons,
                              const std::vector<double>& inputs);

}  // namespace glance
