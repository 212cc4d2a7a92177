#pragma once

// A single ReLU neuron, max(0, w . x + b), trained by full-batch gradient
// descent on mean squared error.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mcalc/expr.hpp"

namespace mcalc {

struct NeuronModel {
  std::vector<double> w;
  double b = 0.0;

  friend bool operator==(const NeuronModel&, const NeuronModel&) = default;
};

struct Dataset {
  std::vector<std::vector<double>> X;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return X.empty() ? 0 : X.front().size(); }
  /// Throws ShapeMismatch unless N >= 1, rows have one length and |y| == N.
  void validate() const;
};

struct TrainConfig {
  double eta = 0.05;
  int epochs = 200;
  std::uint64_t seed = 42;
  bool fold_bias = false;
  /// Starting bias. At exactly zero every pre-activation starts on the kink,
  /// where the gradient is zero, so training would never move.
  double init_bias = 0.01;
};

struct Gradients {
  std::vector<double> dw;
  double db = 0.0;
};

double activation(const NeuronModel& m, std::span<const double> x);
/// (x, 1) when w . x + b > 0, otherwise zeros; the kink counts as inactive.
Gradients activation_grad(const NeuronModel& m, std::span<const double> x);

double loss(const NeuronModel& m, const Dataset& d);
/// Per-sample case split: active samples contribute (2/N) e_i x_i and
/// (2/N) e_i with e_i = w . x_i + b - y_i; inactive samples contribute zero.
Gradients loss_gradients(const NeuronModel& m, const Dataset& d);

NeuronModel sgd_step(const NeuronModel& m, const Dataset& d, double eta);

/// [w, b].
std::vector<double> fold_bias(const NeuronModel& m);
/// Inverse of fold_bias.
NeuronModel unfold_bias(std::span<const double> w_hat);
/// [x, 1].
std::vector<double> augment_input(std::span<const double> x);
Dataset augment(const Dataset& d);

struct TrainResult {
  NeuronModel model;
  /// Loss after each epoch's step.
  std::vector<double> trace;
};

/// Full-batch gradient descent from w = 0 and b = cfg.init_bias. With
/// fold_bias the augmented weights are trained and the result unfolded.
/// Throws Diverged when the loss stops being finite.
TrainResult train(const Dataset& d, const TrainConfig& cfg);

/// Synthetic data: x uniform in [0.5, 1.5]^3, y = w* . x + b* with
/// w* = [1, -0.5, 2] and b* = 0.5, so every activation is positive.
Dataset fixture(std::uint64_t seed, std::size_t samples = 32);
inline const std::vector<double> kFixtureWeights = {1.0, -0.5, 2.0};
inline constexpr double kFixtureBias = 0.5;

/// CSV with header "x1,...,xn,y". Throws CsvError with the line number.
Dataset read_csv(std::istream& in);
Dataset load_csv(const std::string& path);
void write_csv(std::ostream& out, const Dataset& d);

/// The loss as an expression in a vector variable `w` and a scalar `b`,
/// with the dataset baked in as constants.
Expr loss_expression(const Dataset& d);

}  // namespace mcalc
