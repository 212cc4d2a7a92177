#include "mcalc/neuron.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "mcalc/parser.hpp"

namespace mcalc {

namespace {

double pre_activation(const NeuronModel& m, std::span<const double> x) {
  if (x.size() != m.w.size()) {
    throw ShapeMismatch("input has " + std::to_string(x.size()) + " features, model has " +
                        std::to_string(m.w.size()));
  }
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += m.w[i] * x[i];
  return z + m.b;
}

void check_model(const NeuronModel& m, const Dataset& d) {
  d.validate();
  if (d.dim() != m.w.size()) {
    throw ShapeMismatch("dataset has " + std::to_string(d.dim()) + " features, model has " +
                        std::to_string(m.w.size()));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

}  // namespace

void Dataset::validate() const {
  if (y.empty()) throw ShapeMismatch("dataset is empty");
  if (X.size() != y.size()) throw ShapeMismatch("dataset has " + std::to_string(X.size()) + " inputs and " +
                                                std::to_string(y.size()) + " targets");
  const std::size_t n = X.front().size();
  if (n == 0) throw ShapeMismatch("dataset inputs are empty");
  for (const auto& x : X) {
    if (x.size() != n) throw ShapeMismatch("dataset rows have different lengths");
  }
}

double activation(const NeuronModel& m, std::span<const double> x) { return std::max(0.0, pre_activation(m, x)); }

Gradients activation_grad(const NeuronModel& m, std::span<const double> x) {
  if (pre_activation(m, x) > 0.0) return {std::vector<double>(x.begin(), x.end()), 1.0};
  return {std::vector<double>(x.size(), 0.0), 0.0};
}

double loss(const NeuronModel& m, const Dataset& d) {
  check_model(m, d);
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = d.y[i] - activation(m, d.X[i]);
    total += r * r;
  }
  return total / static_cast<double>(d.size());
}

Gradients loss_gradients(const NeuronModel& m, const Dataset& d) {
  check_model(m, d);
  const double scale = 2.0 / static_cast<double>(d.size());
  Gradients g{std::vector<double>(m.w.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double z = pre_activation(m, d.X[i]);
    if (!(z > 0.0)) continue;
    const double e = z - d.y[i];
    for (std::size_t j = 0; j < m.w.size(); ++j) g.dw[j] += scale * e * d.X[i][j];
    g.db += scale * e;
  }
  return g;
}

NeuronModel sgd_step(const NeuronModel& m, const Dataset& d, double eta) {
  if (!(eta > 0.0)) throw DomainError("learning rate must be positive");
  const Gradients g = loss_gradients(m, d);
  NeuronModel next = m;
  for (std::size_t j = 0; j < next.w.size(); ++j) next.w[j] -= eta * g.dw[j];
  next.b -= eta * g.db;
  return next;
}

std::vector<double> fold_bias(const NeuronModel& m) {
  std::vector<double> w = m.w;
  w.push_back(m.b);
  return w;
}

NeuronModel unfold_bias(std::span<const double> w_hat) {
  if (w_hat.empty()) throw ShapeMismatch("folded weights are empty");
  return {std::vector<double>(w_hat.begin(), w_hat.end() - 1), w_hat.back()};
}

std::vector<double> augment_input(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  out.push_back(1.0);
  return out;
}

Dataset augment(const Dataset& d) {
  Dataset out{{}, d.y};
  for (const auto& x : d.X) out.X.push_back(augment_input(x));
  return out;
}

TrainResult train(const Dataset& d, const TrainConfig& cfg) {
  d.validate();
  if (!(cfg.eta > 0.0)) throw DomainError("learning rate must be positive");
  if (cfg.epochs < 0) throw DomainError("epoch count must not be negative");
  NeuronModel start{std::vector<double>(d.dim(), 0.0), cfg.init_bias};
  TrainResult result{start, {}};
  if (cfg.fold_bias) {
    // Bias lives in the last weight; the model's own bias stays at zero.
    const Dataset folded = augment(d);
    NeuronModel m{fold_bias(start), 0.0};
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
      const Gradients g = loss_gradients(m, folded);
      for (std::size_t j = 0; j < m.w.size(); ++j) m.w[j] -= cfg.eta * g.dw[j];
      const double l = loss(m, folded);
      if (!std::isfinite(l)) throw Diverged(epoch);
      result.trace.push_back(l);
    }
    result.model = unfold_bias(m.w);
    return result;
  }
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    result.model = sgd_step(result.model, d, cfg.eta);
    const double l = loss(result.model, d);
    if (!std::isfinite(l)) throw Diverged(epoch);
    result.trace.push_back(l);
  }
  return result;
}

Dataset fixture(std::uint64_t seed, std::size_t samples) {
  // Explicit 53-bit mapping so the data is the same on every standard library.
  std::mt19937_64 gen(seed);
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  Dataset d;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> x(kFixtureWeights.size());
    for (double& v : x) v = 0.5 + uniform();
    double z = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) z += kFixtureWeights[j] * x[j];
    d.X.push_back(std::move(x));
    d.y.push_back(z + kFixtureBias);
  }
  return d;
}

Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  Dataset d;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (columns == 0) {
      if (fields.size() < 2) throw CsvError("header needs at least one feature column and y", line_no);
      for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
        if (fields[i] != "x" + std::to_string(i + 1)) {
          throw CsvError("expected header column 'x" + std::to_string(i + 1) + "', found '" +
                             std::string(fields[i]) + "'", line_no);
        }
      }
      if (fields.back() != "y") throw CsvError("last header column must be 'y'", line_no);
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw CsvError("expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()),
                     line_no);
    }
    std::vector<double> row;
    for (auto f : fields) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw CsvError("not a number: '" + std::string(f) + "'", line_no);
      }
      row.push_back(v);
    }
    d.y.push_back(row.back());
    row.pop_back();
    d.X.push_back(std::move(row));
  }
  if (columns == 0) throw CsvError("missing header", line_no);
  if (d.y.empty()) throw CsvError("no samples", line_no);
  return d;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& d) {
  d.validate();
  for (std::size_t j = 0; j < d.dim(); ++j) out << "x" << j + 1 << ",";
  out << "y\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.X[i]) out << format_number(v) << ",";
    out << format_number(d.y[i]) << "\n";
  }
}

Expr loss_expression(const Dataset& d) {
  d.validate();
  const Expr w = var("w", Shape::vector(d.dim()));
  const Expr b = var("b");
  std::optional<Expr> total;
  for (std::size_t i = 0; i < d.size(); ++i) {
    Expr residual = sub(constant(d.y[i]), max0(add(dot(w, constant_vec(d.X[i])), b)));
    Expr term = pow(residual, 2.0);
    total = total ? add(*total, term) : term;
  }
  return mul(constant(1.0 / static_cast<double>(d.size())), *total);
}

}  // namespace mcalc
