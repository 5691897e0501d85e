#include "attrition/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"
#include "attrition/simd/kernels.hpp"

namespace attrition {

CovariateSpec no_grade_model(PlatformProfile profile, GraphKind kind) {
  return {"no_grade", feature_names_for(profile), kind};
}

CovariateSpec social_model(GraphKind kind) { return {"social", social_feature_names(), kind}; }

std::vector<SurvivalRecord> to_survival_records(const CourseData& data, const CourseConfig& config,
                                                const CovariateSpec& spec) {
  const int W = config.num_weeks;
  const WeeklyFeatureTable table = assemble_weekly(data, config, W, spec.graph_kind);
  if (table.size() == 0) throw DataError("survival cohort is empty");
  std::vector<std::size_t> cols;
  for (const auto& f : spec.features) cols.push_back(table.feature_index(f));

  const auto last = last_active_week(data, config);
  std::vector<SurvivalRecord> out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    SurvivalRecord r;
    r.student_id = table.students[i];
    const int L = last.at(r.student_id);
    r.event = L <= W - 2;
    r.duration = r.event ? L + 1 : W;
    for (std::size_t c : cols) r.covariates.push_back(table.rows[i][c]);
    out.push_back(std::move(r));
  }
  return out;
}

Standardized standardize(std::span<const SurvivalRecord> records, std::span<const std::string> names) {
  if (records.size() < 2) throw DataError("standardisation needs at least two records");
  const std::size_t n = records.size();
  const std::size_t p = records.front().covariates.size();
  Standardized out;
  out.records.assign(records.begin(), records.end());
  out.means.resize(p);
  out.sds.resize(p);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = records[i].covariates.at(j);
    const double mean = simd::sum(col) / static_cast<double>(n);
    const double sd = std::sqrt(simd::sum_sq_dev(col, mean) / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      throw ZeroVarianceError(j < names.size() ? names[j] : "covariate " + std::to_string(j));
    }
    out.means[j] = mean;
    out.sds[j] = sd;
    for (auto& r : out.records) r.covariates[j] = (r.covariates[j] - mean) / sd;
  }
  return out;
}

// ---------------------------------------------------------------------------

CoxProblem::CoxProblem(std::span<const SurvivalRecord> records) : n_(records.size()) {
  if (records.empty()) throw DataError("Cox model needs at least one record");
  p_ = records.front().covariates.size();
  std::vector<std::size_t> order(n_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].duration != records[b].duration) return records[a].duration < records[b].duration;
    return records[a].event && !records[b].event;
  });
  columns_.assign(p_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    const auto& r = records[order[i]];
    if (r.covariates.size() != p_) throw DataError("ragged covariate vectors");
    for (std::size_t j = 0; j < p_; ++j) {
      if (!std::isfinite(r.covariates[j])) throw DataError("non-finite covariate for " + r.student_id);
      columns_[j][i] = r.covariates[j];
    }
  }
  for (std::size_t i = 0; i < n_;) {
    const int t = records[order[i]].duration;
    TimeGroup g{i, i, i};
    while (g.end < n_ && records[order[g.end]].duration == t) {
      if (records[order[g.end]].event) g.event_end = g.end + 1;
      ++g.end;
    }
    events_ += g.event_end - g.begin;
    groups_.push_back(g);
    i = g.end;
  }
}

PartialLikelihood CoxProblem::evaluate(std::span<const double> beta, TieMethod ties) const {
  PartialLikelihood out;
  out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
  out.hessian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));

  std::vector<double> eta(n_, 0.0);
  for (std::size_t j = 0; j < p_; ++j) simd::axpy(beta[j], columns_[j], eta);
  // exp(eta − shift) keeps the risk sums finite; each event's log term then
  // carries the shift back.
  const double shift = *std::max_element(eta.begin(), eta.end());
  std::vector<double> w(n_);
  for (std::size_t i = 0; i < n_; ++i) w[i] = std::exp(eta[i] - shift);
  std::vector<std::vector<double>> wx(p_, std::vector<double>(n_));
  for (std::size_t j = 0; j < p_; ++j) simd::mul(w, columns_[j], wx[j]);

  const auto P = static_cast<Eigen::Index>(p_);
  auto range_sums = [&](std::size_t b, std::size_t e, double& s0, Eigen::VectorXd& s1, Eigen::MatrixXd& s2) {
    const std::size_t len = e - b;
    s0 = simd::sum(std::span<const double>(w).subspan(b, len));
    for (Eigen::Index j = 0; j < P; ++j) {
      const std::span<const double> wxj = std::span<const double>(wx[j]).subspan(b, len);
      s1(j) = simd::sum(wxj);
      for (Eigen::Index k = 0; k <= j; ++k) {
        s2(j, k) = simd::dot(wxj, std::span<const double>(columns_[k]).subspan(b, len));
        s2(k, j) = s2(j, k);
      }
    }
  };

  double risk0 = 0.0;
  Eigen::VectorXd risk1 = Eigen::VectorXd::Zero(P), g1(P), d1(P), num1(P);
  Eigen::MatrixXd risk2 = Eigen::MatrixXd::Zero(P, P), g2(P, P), d2(P, P);
  double g0 = 0.0, d0 = 0.0;

  for (std::size_t gi = groups_.size(); gi-- > 0;) {
    const TimeGroup& g = groups_[gi];
    range_sums(g.begin, g.end, g0, g1, g2);
    risk0 += g0;
    risk1 += g1;
    risk2 += g2;
    const std::size_t d = g.event_end - g.begin;
    if (d == 0) continue;
    range_sums(g.begin, g.event_end, d0, d1, d2);
    for (std::size_t i = g.begin; i < g.event_end; ++i) out.loglik += eta[i];
    for (Eigen::Index j = 0; j < P; ++j) {
      out.gradient(j) += simd::sum(std::span<const double>(columns_[j]).subspan(g.begin, d));
    }
    for (std::size_t l = 0; l < d; ++l) {
      const double f = ties == TieMethod::efron ? static_cast<double>(l) / static_cast<double>(d) : 0.0;
      const double den = risk0 - f * d0;
      num1 = risk1 - f * d1;
      out.loglik -= std::log(den) + shift;
      out.gradient -= num1 / den;
      out.hessian -= (risk2 - f * d2) / den - num1 * num1.transpose() / (den * den);
    }
  }
  return out;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> information_factor(const Eigen::MatrixXd& hessian) {
  const Eigen::MatrixXd info = -hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw SingularHessianError("Cox information matrix is singular (collinear or degenerate covariates)");
  }
  return llt;
}

}  // namespace

CoxFit cox_fit(std::span<const SurvivalRecord> records, const CoxOptions& options) {
  const CoxProblem problem(records);
  if (problem.event_count() == 0) throw NoEventsError("no observed events");
  const std::size_t p = problem.dimension();

  CoxFit fit;
  std::vector<double> beta(p, 0.0), trial(p);
  PartialLikelihood cur = problem.evaluate(beta, options.ties);
  fit.loglik_trace.push_back(cur.loglik);

  for (int it = 1; it <= options.max_iter; ++it) {
    const auto llt = information_factor(cur.hessian);
    Eigen::VectorXd step = llt.solve(cur.gradient);
    PartialLikelihood next;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = beta[j] + step(static_cast<Eigen::Index>(j));
      next = problem.evaluate(trial, options.ties);
      if (std::isfinite(next.loglik) && next.loglik >= cur.loglik) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    fit.iterations = it;
    if (!accepted) {
      // No ascent direction left at double precision: β is the optimum.
      fit.converged = true;
      break;
    }
    beta = trial;
    cur = std::move(next);
    fit.loglik_trace.push_back(cur.loglik);
    if (step.cwiseAbs().maxCoeff() < options.tol) {
      fit.converged = true;
      break;
    }
  }

  const auto llt = information_factor(cur.hessian);
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
  fit.beta = beta;
  fit.loglik = cur.loglik;
  fit.se.resize(p);
  fit.hr.resize(p);
  fit.p.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    fit.se[j] = std::sqrt(cov(jj, jj));
    fit.hr[j] = std::exp(beta[j]);
    fit.p[j] = std::erfc(std::abs(beta[j] / fit.se[j]) / std::sqrt(2.0));
  }
  return fit;
}

CoxFit cox_fit_standardized(std::span<const SurvivalRecord> records, std::span<const std::string> names,
                            const CoxOptions& options) {
  const Standardized z = standardize(records, names);
  CoxFit fit = cox_fit(z.records, options);
  fit.covariate_means = z.means;
  fit.covariate_sds = z.sds;
  return fit;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::vector<HazardRow> hazard_report(const CoxFit& fit, std::span<const std::string> feature_names) {
  std::vector<HazardRow> rows;
  for (std::size_t j = 0; j < fit.beta.size(); ++j) {
    HazardRow r;
    r.feature = j < feature_names.size() ? feature_names[j] : "x" + std::to_string(j + 1);
    r.mean = j < fit.covariate_means.size() ? fit.covariate_means[j] : 0.0;
    r.sd = j < fit.covariate_sds.size() ? fit.covariate_sds[j] : 1.0;
    r.hr = std::exp(fit.beta[j]);
    r.se = fit.se[j];
    r.p = fit.p[j];
    r.stars = significance_stars(r.p);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string hazard_csv(const std::vector<HazardRow>& rows) {
  std::ostringstream out;
  out << "feature,mean,sd,hr,se,p,stars\n";
  for (const auto& r : rows) {
    out << csv::escape(r.feature) << ',' << csv::fixed6(r.mean) << ',' << csv::fixed6(r.sd) << ','
        << csv::fixed6(r.hr) << ',' << csv::fixed6(r.se) << ',' << csv::fixed6(r.p) << ',' << r.stars << '\n';
  }
  return out.str();
}

}  // namespace attrition
