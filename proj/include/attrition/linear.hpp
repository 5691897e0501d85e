#pragma once

// L2-regularised linear classifiers, z-scoring, and majority undersampling.

#include <cstdint>
#include <string_view>
#include <vector>

#include "attrition/dataset.hpp"

namespace attrition {

enum class LinearKind { logistic, linear_svm };

std::string_view to_string(LinearKind k) noexcept;
LinearKind parse_linear_kind(std::string_view s);  // throws UsageError

struct LinearModel {
  LinearKind kind = LinearKind::logistic;
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  int iterations = 0;
  double stationarity = 0.0;  // final gradient norm (logistic) or projected-gradient gap (SVM)

  // w·x + b for every row.
  std::vector<double> decision(const Dataset& data) const;
  // σ(w·x + b): a probability for logistic, a monotone score for the SVM with
  // the 0.5 threshold at the separating hyperplane.
  std::vector<double> scores(const Dataset& data) const;
};

struct LinearOptions {
  double tol = 1e-6;
  int max_iter = 200;         // Newton iterations (logistic)
  int max_epochs = 2000;      // dual coordinate descent sweeps (SVM)
  double svm_tol = 1e-4;
};

// logistic:   minimise Σ log(1 + e^{−ỹ z}) + ‖w‖² / (2C), bias unpenalised, by
//             damped Newton to ‖∇‖ < tol.
// linear_svm: minimise ½‖w̃‖² + C Σ max(0, 1 − ỹ z) by dual coordinate descent
//             on the bias-augmented features.
// Throws DataError on non-finite features, UsageError on C <= 0.
LinearModel fit_linear(const Dataset& data, LinearKind kind, double C, const LinearOptions& options = {});

// Value and gradient of the logistic objective (bias last), for verification.
double logistic_objective(const Dataset& data, std::span<const double> weights, double bias, double C,
                          std::vector<double>* gradient = nullptr);

// z-score with statistics from the data it was fitted on. Constant columns are
// centred but not scaled.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> sds;

  static Standardizer fit(const Dataset& data);
  Dataset apply(const Dataset& data) const;
};

// Undersamples the majority class without replacement to the minority size.
// Minority rows are kept as is; output rows keep their original relative order.
// Throws DataError if either class is absent.
Dataset balance(const Dataset& data, std::uint64_t seed);

}  // namespace attrition
