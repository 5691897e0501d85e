#pragma once

// Multivariate Cox proportional-hazards regression on week-granular dropout
// times with right censoring at the last course week. Only relative hazards
// are estimated; the baseline hazard cancels out of the partial likelihood.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "attrition/featurize.hpp"

namespace attrition {

struct SurvivalRecord {
  std::string student_id;
  int duration = 0;    // week of dropout, or W when censored
  bool event = false;  // dropout observed
  std::vector<double> covariates;
};

struct CovariateSpec {
  std::string name;
  std::vector<std::string> features;
  GraphKind graph_kind = GraphKind::type1;
};

// "No grade": every profile feature. "Social": the six graph features.
CovariateSpec no_grade_model(PlatformProfile profile, GraphKind kind);
CovariateSpec social_model(GraphKind kind);

// End-of-course covariates for every non-staff active student. A student whose
// last active week L satisfies L <= W - 2 has an observed dropout at L + 1;
// everyone else is censored at W. Throws DataError on an empty cohort and
// SchemaError if a feature is not available for the course profile.
std::vector<SurvivalRecord> to_survival_records(const CourseData& data, const CourseConfig& config,
                                                const CovariateSpec& spec);

struct Standardized {
  std::vector<SurvivalRecord> records;
  std::vector<double> means;
  std::vector<double> sds;
};

// z-scores each covariate with the sample (n − 1) standard deviation. Throws
// ZeroVarianceError naming the offending covariate (from `names` when given)
// and DataError for fewer than two records.
Standardized standardize(std::span<const SurvivalRecord> records, std::span<const std::string> names = {});

enum class TieMethod { efron, breslow };

struct PartialLikelihood {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // of the log-likelihood (negative semi-definite)
};

// Cox partial likelihood over a fixed set of records. Records are regrouped by
// duration once; evaluation is O(n·p²) through the dense kernels.
class CoxProblem {
 public:
  explicit CoxProblem(std::span<const SurvivalRecord> records);

  std::size_t dimension() const noexcept { return p_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t event_count() const noexcept { return events_; }

  PartialLikelihood evaluate(std::span<const double> beta, TieMethod ties) const;

 private:
  struct TimeGroup {
    std::size_t begin;      // first record with this duration
    std::size_t event_end;  // events occupy [begin, event_end)
    std::size_t end;
  };
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::size_t events_ = 0;
  std::vector<std::vector<double>> columns_;  // sorted by (duration, event first)
  std::vector<TimeGroup> groups_;             // ascending duration
};

struct CoxOptions {
  TieMethod ties = TieMethod::efron;
  double tol = 1e-8;  // on max |Δβ|
  int max_iter = 50;
};

struct CoxFit {
  std::vector<double> beta;
  std::vector<double> se;
  std::vector<double> hr;
  std::vector<double> p;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> covariate_means;
  std::vector<double> covariate_sds;
  std::vector<double> loglik_trace;  // one entry per accepted iterate, starting at β = 0
};

// Newton–Raphson from β = 0 with step halving. Throws NoEventsError when no
// record has an event and SingularHessianError when the information matrix is
// not positive definite (e.g. collinear covariates).
CoxFit cox_fit(std::span<const SurvivalRecord> records, const CoxOptions& options = {});

// Standardises, fits and stores the standardisation statistics on the fit.
CoxFit cox_fit_standardized(std::span<const SurvivalRecord> records, std::span<const std::string> names,
                            const CoxOptions& options = {});

struct HazardRow {
  std::string feature;
  double mean = 0.0;
  double sd = 0.0;
  double hr = 0.0;
  double se = 0.0;
  double p = 0.0;
  std::string stars;
};

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, else empty.
std::string significance_stars(double p);

std::vector<HazardRow> hazard_report(const CoxFit& fit, std::span<const std::string> feature_names);

// feature,mean,sd,hr,se,p,stars
std::string hazard_csv(const std::vector<HazardRow>& rows);

}  // namespace attrition
