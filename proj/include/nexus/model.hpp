#pragma once

// Model types shared by the sampler, the posterior summaries and the CLI:
// the multi-group dataset, hyperparameters, chain state and the
// sample-size-corrected prior rates.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "nexus/error.hpp"

namespace nexus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Canonical pair ordering.
//
// Both variable pairs (i<j over p variables) and group pairs (c<c' over C
// groups) are stored in flat arrays, lexicographic in (first, second):
// (0,1), (0,2), ..., (0,k-1), (1,2), ...
// ---------------------------------------------------------------------------

constexpr std::size_t num_pairs(std::size_t k) noexcept { return k < 2 ? 0 : k * (k - 1) / 2; }

constexpr std::size_t pair_index(std::size_t a, std::size_t b, std::size_t k) noexcept {
  if (a > b) std::swap(a, b);
  return a * k - a * (a + 1) / 2 + (b - a - 1);
}

struct IndexPair {
  std::size_t first;
  std::size_t second;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

inline IndexPair pair_from_index(std::size_t e, std::size_t k) {
  std::size_t a = 0;
  std::size_t row = k - 1;
  while (e >= row) {
    e -= row;
    ++a;
    --row;
  }
  return {a, a + 1 + e};
}

// All pairs of a k-set in canonical order.
inline std::vector<IndexPair> all_pairs(std::size_t k) {
  std::vector<IndexPair> out;
  out.reserve(num_pairs(k));
  for (std::size_t a = 0; a + 1 < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) out.push_back({a, b});
  return out;
}

// ---------------------------------------------------------------------------
// PanDataset
// ---------------------------------------------------------------------------

struct DataGroup {
  std::string label;
  Matrix data;  // n_c x p
};

// C groups observed on a common, identically ordered variable set. Columns
// are centered on construction; unit-variance scaling is optional.
class PanDataset {
 public:
  PanDataset() = default;

  PanDataset(std::vector<DataGroup> groups, std::vector<std::string> variable_names,
             bool scale_columns = false)
      : groups_(std::move(groups)), names_(std::move(variable_names)) {
    if (groups_.empty()) throw IngestionError("dataset needs at least one group");
    const auto p = static_cast<std::size_t>(groups_.front().data.cols());
    if (p < 2) throw IngestionError("dataset needs at least two variables");
    if (names_.empty())
      for (std::size_t j = 0; j < p; ++j) names_.push_back("V" + std::to_string(j + 1));
    if (names_.size() != p)
      throw IngestionError("variable name count " + std::to_string(names_.size()) +
                           " does not match column count " + std::to_string(p));
    for (auto& g : groups_) {
      if (static_cast<std::size_t>(g.data.cols()) != p)
        throw IngestionError("group '" + g.label + "' has " + std::to_string(g.data.cols()) +
                             " columns, expected " + std::to_string(p));
      if (g.data.rows() < 2)
        throw IngestionError("group '" + g.label + "' has fewer than 2 samples");
      if (!g.data.allFinite())
        throw IngestionError("group '" + g.label + "' contains non-finite values");
      g.data.rowwise() -= g.data.colwise().mean();
      if (scale_columns) {
        for (Eigen::Index j = 0; j < g.data.cols(); ++j) {
          const double sd = std::sqrt(g.data.col(j).squaredNorm() /
                                      static_cast<double>(g.data.rows() - 1));
          if (sd > 0.0) g.data.col(j) /= sd;
        }
      }
    }
  }

  std::size_t num_groups() const noexcept { return groups_.size(); }
  std::size_t num_variables() const noexcept { return names_.size(); }
  const std::vector<DataGroup>& groups() const noexcept { return groups_; }
  const DataGroup& group(std::size_t c) const { return groups_.at(c); }
  const std::vector<std::string>& variable_names() const noexcept { return names_; }

  std::vector<double> sample_sizes() const {
    std::vector<double> n;
    n.reserve(groups_.size());
    for (const auto& g : groups_) n.push_back(static_cast<double>(g.data.rows()));
    return n;
  }

  // S_c = X_c^T X_c
  Matrix scatter(std::size_t c) const {
    const auto& x = groups_.at(c).data;
    Matrix s = Matrix::Zero(x.cols(), x.cols());
    s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    return s.selfadjointView<Eigen::Lower>();
  }

  // Dataset restricted to one group (used by the independent baseline).
  PanDataset subset(std::size_t c) const {
    PanDataset out;
    out.groups_ = {groups_.at(c)};
    out.names_ = names_;
    return out;
  }

 private:
  std::vector<DataGroup> groups_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Hyperparameters
// ---------------------------------------------------------------------------

struct Hyperparameters {
  double alpha1 = 1.0;
  double beta1 = 1.0;
  double alpha2 = 0.1;
  double beta2 = 1.0;
  double alpha_gamma = 1.0;
  double beta_gamma = 1.0;
  double delta = 0.5;
  double kappa = 0.05;
  std::size_t n_iterations = 20000;
  std::size_t n_burnin = 5000;
  std::uint64_t seed = 1;
  bool independent_mode = false;

  // Simulation-study settings, with the rate scales tied to the mean sample size.
  static Hyperparameters simulation_defaults(double mean_n) {
    Hyperparameters h;
    h.alpha1 = 1.0;
    h.alpha2 = 0.1;
    h.beta1 = 0.1 * mean_n * mean_n;
    h.beta2 = mean_n * mean_n;
    h.alpha_gamma = 1.0;
    h.beta_gamma = 1.0;
    return h;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be a positive finite real");
    };
    positive(alpha1, "alpha1");
    positive(beta1, "beta1");
    positive(alpha2, "alpha2");
    positive(beta2, "beta2");
    positive(alpha_gamma, "alpha_gamma");
    positive(beta_gamma, "beta_gamma");
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0,1]");
    if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in (0,1)");
    if (n_iterations == 0) throw DomainError("n_iterations must be positive");
    if (n_burnin == 0 || n_burnin >= n_iterations)
      throw DomainError("n_burnin must be positive and smaller than n_iterations");
  }

  std::size_t n_retained() const noexcept { return n_iterations - n_burnin; }
};

// ---------------------------------------------------------------------------
// Chain state
// ---------------------------------------------------------------------------

struct PenaltyState {
  std::vector<double> lambda1_sq;  // one per group
  std::vector<double> lambda2_sq;  // one per group pair, canonical order
  double gamma = 1.0;
};

// tau_sq[c * m + e] and omega_sq[pair * m + e] with m = p(p-1)/2.
struct LatentScales {
  std::vector<double> tau_sq;
  std::vector<double> omega_sq;
};

struct ChainState {
  std::vector<Matrix> thetas;
  LatentScales latents;
  PenaltyState penalties;
};

// ---------------------------------------------------------------------------
// Sample-size-corrected prior rates
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// n_c^e = nbar^delta * n_c^(1 - delta)
inline std::vector<double> effective_sample_sizes(const std::vector<double>& n, double delta) {
  if (n.empty()) throw DomainError("sample size list is empty");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0,1]");
  for (double v : n)
    if (!(v >= 1.0)) throw DomainError("sample sizes must be at least 1");
  const double nbar = mean_of(n);
  std::vector<double> out;
  out.reserve(n.size());
  for (double v : n) out.push_back(std::pow(nbar, delta) * std::pow(v, 1.0 - delta));
  return out;
}

struct PriorRates {
  std::vector<double> beta1_c;   // per group
  std::vector<double> beta2_cc;  // per group pair, canonical order
};

inline PriorRates hyperprior_rates(const std::vector<double>& n_eff, double beta1, double beta2) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) throw DomainError("beta1 and beta2 must be positive");
  for (double v : n_eff)
    if (!(v > 0.0)) throw DomainError("effective sample sizes must be positive");
  PriorRates r;
  r.beta1_c.reserve(n_eff.size());
  for (double ne : n_eff) r.beta1_c.push_back(beta1 / (ne * ne));
  for (const auto& [a, b] : all_pairs(n_eff.size())) {
    const double h = (n_eff[a] + n_eff[b]) / (2.0 * n_eff[a] * n_eff[b]);
    r.beta2_cc.push_back(beta2 * h * h);
  }
  return r;
}

inline PriorRates prior_rates_for(const std::vector<double>& n, const Hyperparameters& h) {
  return hyperprior_rates(effective_sample_sizes(n, h.delta), h.beta1, h.beta2);
}

struct PriorMeanRow {
  double delta;
  std::vector<double> lambda1_sq;  // (alpha1 / beta1) (n_c^e)^2
  std::vector<double> lambda2_sq;  // (alpha2 / beta2) (harmonic mean of the pair's n^e)^2
};

inline std::vector<PriorMeanRow> prior_mean_curves(const std::vector<double>& n,
                                                   const std::vector<double>& deltas,
                                                   const Hyperparameters& h) {
  if (deltas.empty()) throw DomainError("delta grid is empty");
  std::vector<PriorMeanRow> rows;
  rows.reserve(deltas.size());
  for (double d : deltas) {
    const auto rates = hyperprior_rates(effective_sample_sizes(n, d), h.beta1, h.beta2);
    PriorMeanRow row{d, {}, {}};
    for (double b : rates.beta1_c) row.lambda1_sq.push_back(h.alpha1 / b);
    for (double b : rates.beta2_cc) row.lambda2_sq.push_back(h.alpha2 / b);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace nexus
