#include "attrition/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "attrition/error.hpp"
#include "attrition/simd/kernels.hpp"

namespace attrition {

std::string_view to_string(LinearKind k) noexcept { return k == LinearKind::logistic ? "logistic" : "linear_svm"; }

LinearKind parse_linear_kind(std::string_view s) {
  if (s == "logistic" || s == "lr") return LinearKind::logistic;
  if (s == "linear_svm" || s == "svm") return LinearKind::linear_svm;
  throw UsageError("unknown model kind '" + std::string(s) + "'");
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::vector<double> linear_predictor(const Dataset& data, std::span<const double> w, double b) {
  std::vector<double> z(data.rows(), b);
  for (std::size_t j = 0; j < data.features(); ++j) simd::axpy(w[j], data.columns[j], z);
  return z;
}

LinearModel fit_logistic(const Dataset& data, double C, const LinearOptions& opt) {
  const std::size_t n = data.rows(), d = data.features();
  const auto D = static_cast<Eigen::Index>(d);
  std::vector<double> w(d, 0.0), grad, trial(d);
  double b = 0.0;
  // Start the bias at the prior log-odds.
  const double pos = static_cast<double>(data.positives());
  if (pos > 0 && pos < static_cast<double>(n)) b = std::log(pos / (static_cast<double>(n) - pos));

  LinearModel model;
  model.kind = LinearKind::logistic;
  model.C = C;
  double f = logistic_objective(data, w, b, C, &grad);
  std::vector<double> p(n), s(n), sx(n);
  for (int it = 0; it < opt.max_iter; ++it) {
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    model.stationarity = gnorm;
    model.iterations = it;
    if (gnorm < opt.tol) break;

    const std::vector<double> z = linear_predictor(data, w, b);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      s[i] = p[i] * (1.0 - p[i]);
    }
    // Hessian in (w, b) order: Xᵀ S X + I/C on the weight block.
    Eigen::MatrixXd H(D + 1, D + 1);
    for (std::size_t j = 0; j < d; ++j) {
      simd::mul(s, data.columns[j], sx);
      const auto J = static_cast<Eigen::Index>(j);
      for (std::size_t k = 0; k <= j; ++k) {
        const auto K = static_cast<Eigen::Index>(k);
        H(J, K) = H(K, J) = simd::dot(sx, data.columns[k]);
      }
      H(J, J) += 1.0 / C;
      H(J, D) = H(D, J) = simd::sum(sx);
    }
    H(D, D) = simd::sum(s);
    Eigen::VectorXd g(D + 1);
    for (std::size_t j = 0; j <= d; ++j) g(static_cast<Eigen::Index>(j)) = grad[j];
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      // Saturated probabilities can zero the bias curvature; fall back to a ridge.
      H.diagonal().array() += 1e-8;
      step = H.ldlt().solve(g);
    }
    // Backtracking (Armijo) along the Newton direction. Close to the optimum
    // the decrease drops below the rounding of f; a step is then accepted if
    // f is unchanged within rounding and the gradient shrinks.
    const double slope = -g.dot(step);
    const double f_noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    double t = 1.0, f_new = f;
    std::vector<double> grad_new;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] - t * step(static_cast<Eigen::Index>(j));
      const double b_new = b - t * step(D);
      f_new = logistic_objective(data, trial, b_new, C, &grad_new);
      double gnorm_new = 0.0;
      for (double v : grad_new) gnorm_new += v * v;
      accepted = f_new <= f + 1e-4 * t * slope || (f_new <= f + f_noise && std::sqrt(gnorm_new) < gnorm);
      if (accepted) {
        w = trial;
        b = b_new;
      } else {
        t *= 0.5;
      }
    }
    if (!accepted) break;  // no progress possible at double precision
    f = f_new;
    grad = std::move(grad_new);
    model.iterations = it + 1;
  }
  double gnorm = 0.0;
  for (double g : grad) gnorm += g * g;
  model.stationarity = std::sqrt(gnorm);
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

// Dual coordinate descent for the L1-loss SVM with the bias folded in as a
// constant feature.
LinearModel fit_svm(const Dataset& data, double C, const LinearOptions& opt) {
  const std::size_t n = data.rows(), d = data.features();
  std::vector<double> rows(n * (d + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) rows[i * (d + 1) + j] = data.columns[j][i];
    rows[i * (d + 1) + d] = 1.0;
  }
  std::vector<double> y(n), alpha(n, 0.0), qii(n), w(d + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = data.labels[i] ? 1.0 : -1.0;
    const std::span<const double> xi(rows.data() + i * (d + 1), d + 1);
    qii[i] = simd::dot(xi, xi);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x5eed);

  LinearModel model;
  model.kind = LinearKind::linear_svm;
  model.C = C;
  for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      const std::span<const double> xi(rows.data() + i * (d + 1), d + 1);
      const double G = y[i] * simd::dot(w, xi) - 1.0;
      double pg = G;
      if (alpha[i] <= 0.0) pg = std::min(G, 0.0);
      else if (alpha[i] >= C) pg = std::max(G, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0 && qii[i] > 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - G / qii[i], 0.0, C);
        simd::axpy((alpha[i] - old) * y[i], xi, w);
      }
    }
    model.iterations = epoch + 1;
    model.stationarity = n ? pg_max - pg_min : 0.0;
    if (model.stationarity < opt.svm_tol) break;
  }
  model.bias = w[d];
  w.pop_back();
  model.weights = std::move(w);
  return model;
}

}  // namespace

double logistic_objective(const Dataset& data, std::span<const double> weights, double bias, double C,
                          std::vector<double>* gradient) {
  const std::size_t n = data.rows(), d = data.features();
  const std::vector<double> z = linear_predictor(data, weights, bias);
  double loss = 0.0;
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    loss += softplus(z[i]) - data.labels[i] * z[i];
    residual[i] = sigmoid(z[i]) - data.labels[i];
  }
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  if (gradient) {
    gradient->assign(d + 1, 0.0);
    for (std::size_t j = 0; j < d; ++j) (*gradient)[j] = simd::dot(data.columns[j], residual) + weights[j] / C;
    (*gradient)[d] = simd::sum(residual);
  }
  return loss + reg / (2.0 * C);
}

LinearModel fit_linear(const Dataset& data, LinearKind kind, double C, const LinearOptions& options) {
  if (!(C > 0.0)) throw UsageError("regularisation C must be positive");
  if (data.rows() == 0) throw DataError("cannot fit a model on an empty dataset");
  require_finite(data);
  return kind == LinearKind::logistic ? fit_logistic(data, C, options) : fit_svm(data, C, options);
}

std::vector<double> LinearModel::decision(const Dataset& data) const {
  if (data.features() != weights.size()) throw SchemaError("model and dataset disagree on feature count");
  return linear_predictor(data, weights, bias);
}

std::vector<double> LinearModel::scores(const Dataset& data) const {
  std::vector<double> z = decision(data);
  for (double& v : z) v = sigmoid(v);
  return z;
}

Standardizer Standardizer::fit(const Dataset& data) {
  Standardizer s;
  const auto n = static_cast<double>(data.rows());
  for (const auto& col : data.columns) {
    const double mean = n > 0 ? simd::sum(col) / n : 0.0;
    const double var = n > 1 ? simd::sum_sq_dev(col, mean) / (n - 1.0) : 0.0;
    const double sd = std::sqrt(var);
    s.means.push_back(mean);
    s.sds.push_back(sd > 0.0 ? sd : 1.0);
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.features() != means.size()) throw SchemaError("standardizer and dataset disagree on feature count");
  Dataset out = data;
  for (std::size_t j = 0; j < out.features(); ++j) {
    for (double& v : out.columns[j]) v = (v - means[j]) / sds[j];
  }
  return out;
}

Dataset balance(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.rows(); ++i) (data.labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw DataError("balancing needs both classes");
  auto& majority = pos.size() > neg.size() ? pos : neg;
  const auto& minority = pos.size() > neg.size() ? neg : pos;
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(minority.size());
  std::vector<std::size_t> keep(pos);
  keep.insert(keep.end(), neg.begin(), neg.end());
  std::sort(keep.begin(), keep.end());
  return data.subset(keep);
}

}  // namespace attrition
