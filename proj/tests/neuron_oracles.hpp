#pragma once

// Random neuron problems and a finite-difference gradient written directly
// against loss(), independent of the library's own checker.

#include <algorithm>
#include <cmath>
#include <random>

#include "mcalc/neuron.hpp"

namespace neuron_oracle {

struct Draw {
  mcalc::NeuronModel model;
  mcalc::Dataset data;
};

inline double min_margin(const Draw& d) {
  double m = INFINITY;
  for (const auto& x : d.data.X) {
    double z = d.model.b;
    for (std::size_t j = 0; j < x.size(); ++j) z += d.model.w[j] * x[j];
    m = std::min(m, std::abs(z));
  }
  return m;
}

// Random model and dataset with every pre-activation at least 1e-3 from the kink.
inline Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> count(1, 8);
  for (;;) {
    Draw d;
    const int n = dim(rng);
    const int N = count(rng);
    for (int j = 0; j < n; ++j) d.model.w.push_back(u(rng));
    d.model.b = u(rng);
    for (int i = 0; i < N; ++i) {
      std::vector<double> x(n);
      for (double& v : x) v = u(rng);
      d.data.X.push_back(std::move(x));
      d.data.y.push_back(u(rng));
    }
    if (min_margin(d) > 1e-3) return d;
  }
}

// Central differences of loss over (w, b), step 1e-6 * max(1, |p|).
inline mcalc::Gradients numeric_gradients(const mcalc::NeuronModel& m, const mcalc::Dataset& d) {
  mcalc::Gradients g{std::vector<double>(m.w.size()), 0.0};
  for (std::size_t j = 0; j < m.w.size(); ++j) {
    mcalc::NeuronModel probe = m;
    const double h = 1e-6 * std::max(1.0, std::abs(m.w[j]));
    probe.w[j] = m.w[j] + h;
    const double up = mcalc::loss(probe, d);
    probe.w[j] = m.w[j] - h;
    g.dw[j] = (up - mcalc::loss(probe, d)) / (2 * h);
  }
  mcalc::NeuronModel probe = m;
  const double h = 1e-6 * std::max(1.0, std::abs(m.b));
  probe.b = m.b + h;
  const double up = mcalc::loss(probe, d);
  probe.b = m.b - h;
  g.db = (up - mcalc::loss(probe, d)) / (2 * h);
  return g;
}

}  // namespace neuron_oracle
