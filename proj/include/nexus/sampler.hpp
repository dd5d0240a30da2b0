#pragma once

// Gibbs sampler for the joint multi-group graphical model.
//
// Off-diagonal elements carry the within-group Laplace penalty and the
// pairwise fused penalty; both are written as normal scale mixtures with
// latent variances tau^2 (per group, per edge) and omega^2 (per group pair,
// per edge). Given the latents, the edge vector across groups is Gaussian
// with precision diag(1/tau^2) + sum_pairs (1/omega^2)(e_c - e_c')(e_c - e_c')^T,
// so each group's off-diagonal entry has conditional prior precision
//   a = 1/tau_c^2 + sum_{c'} 1/omega_cc'^2   and linear term
//   b = sum_{c'} theta^{c'} / omega_cc'^2.
// The column update is the block update of the Bayesian graphical lasso with
// that non-zero prior mean. The derivation is written out in
// docs/full_conditionals.md.
//
// One sweep runs, in order: every column of every Theta_c (groups outer,
// columns inner), tau^2, omega^2, lambda1^2, lambda2^2, gamma.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/random.hpp"

namespace nexus {

// Absolute values below this are clamped before forming reciprocal-scale
// full-conditional parameters.
inline constexpr double kScaleFloor = 1e-12;

// What a chain conditions on: scatter matrices, sample sizes and prior rates.
// Prior-only runs use zero scatter and n_c = 0 with rates from nominal sizes.
struct SamplerInputs {
  std::size_t p = 0;
  std::vector<Matrix> scatter;
  std::vector<double> n;
  PriorRates rates;

  std::size_t num_groups() const noexcept { return scatter.size(); }

  static SamplerInputs from_dataset(const PanDataset& data, const Hyperparameters& h) {
    SamplerInputs in;
    in.p = data.num_variables();
    in.n = data.sample_sizes();
    for (std::size_t c = 0; c < data.num_groups(); ++c) in.scatter.push_back(data.scatter(c));
    in.rates = prior_rates_for(in.n, h);
    return in;
  }

  static SamplerInputs prior_only(std::size_t num_groups, std::size_t p, PriorRates rates) {
    SamplerInputs in;
    in.p = p;
    in.scatter.assign(num_groups, Matrix::Zero(p, p));
    in.n.assign(num_groups, 0.0);
    in.rates = std::move(rates);
    return in;
  }

  // Group c on its own: rates come from n_c alone, as a single-group fit would.
  SamplerInputs single_group(std::size_t c, const Hyperparameters& h) const {
    SamplerInputs in;
    in.p = p;
    in.scatter = {scatter.at(c)};
    in.n = {n.at(c)};
    if (n[c] >= 1.0) {
      in.rates = prior_rates_for(in.n, h);
    } else {
      in.rates.beta1_c = {rates.beta1_c.at(c)};
    }
    return in;
  }
};

// Default kappa grid retained by every trace: 0.01, 0.02, ..., 0.99 plus the
// configured cut-off.
inline std::vector<double> default_kappa_grid(double kappa) {
  std::vector<double> grid;
  for (int k = 1; k < 100; ++k) grid.push_back(k / 100.0);
  grid.push_back(kappa);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());
  return grid;
}

// Post-burn-in record. By default only summaries are kept: exceedance counts
// of |partial correlation| over a kappa grid, running means, and the full
// penalty traces. `theta_draws` is filled only when full retention is on.
struct ChainTrace {
  std::size_t num_groups = 0;
  std::size_t p = 0;
  std::size_t n_retained = 0;
  double kappa = 0.05;
  bool independent_mode = false;

  std::vector<double> kappa_grid;
  // exceed_counts[g][c * m + e]: retained draws with |rho_e^c| > kappa_grid[g]
  std::vector<std::vector<std::uint32_t>> exceed_counts;
  std::vector<double> mean_partial_corr;      // C * m
  std::vector<double> mean_abs_partial_corr;  // C * m
  std::vector<Matrix> mean_theta;             // C matrices

  Matrix lambda1_sq_draws;  // n_retained x C
  Matrix lambda2_sq_draws;  // n_retained x C(C-1)/2 (empty columns in independent mode)
  Matrix gamma_draws;       // n_retained x 1, or x C in independent mode

  double min_cholesky_pivot = std::numeric_limits<double>::infinity();
  std::vector<std::vector<Matrix>> theta_draws;  // [draw][group], optional

  std::size_t num_edges() const noexcept { return num_pairs(p); }
};

// Partial correlations from a precision matrix: -theta_ij / sqrt(theta_ii theta_jj).
inline Matrix partial_correlations(const Matrix& theta) {
  if (theta.rows() != theta.cols()) throw DomainError("precision matrix must be square");
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0))
    throw NumericalError("partial correlations need a positive-definite matrix",
                         failing_leading_minor(theta));
  const Vector inv_sd = theta.diagonal().cwiseSqrt().cwiseInverse();
  Matrix rho = -(inv_sd.asDiagonal() * theta * inv_sd.asDiagonal());
  rho.diagonal().setOnes();
  return rho;
}

class GibbsSampler {
 public:
  GibbsSampler(SamplerInputs inputs, Hyperparameters hyper, Rng rng, bool fused = true)
      : in_(std::move(inputs)), h_(hyper), rng_(std::move(rng)) {
    const std::size_t C = in_.num_groups();
    if (C == 0) throw DomainError("sampler needs at least one group");
    if (in_.p < 2) throw DomainError("sampler needs p >= 2");
    if (in_.rates.beta1_c.size() != C) throw DomainError("beta1 rate count does not match C");
    fused_ = fused && C > 1;
    if (fused_ && in_.rates.beta2_cc.size() != num_pairs(C))
      throw DomainError("beta2 rate count does not match C(C-1)/2");
    m_ = num_pairs(in_.p);
    pairs_ = all_pairs(C);
    for (std::size_t i = 0; i < in_.p; ++i) {
      std::vector<Eigen::Index> idx;
      for (std::size_t j = 0; j < in_.p; ++j)
        if (j != i) idx.push_back(static_cast<Eigen::Index>(j));
      others_.push_back(std::move(idx));
    }
    initialize();
  }

  // Identity precision matrices, unit latent scales, penalties at their
  // prior means.
  void initialize() {
    const std::size_t C = in_.num_groups();
    state_.thetas.assign(C, Matrix::Identity(in_.p, in_.p));
    sigmas_.assign(C, Matrix::Identity(in_.p, in_.p));
    state_.latents.tau_sq.assign(C * m_, 1.0);
    state_.latents.omega_sq.assign(fused_ ? pairs_.size() * m_ : 0, 1.0);
    state_.penalties.lambda1_sq.clear();
    for (double b : in_.rates.beta1_c) state_.penalties.lambda1_sq.push_back(h_.alpha1 / b);
    state_.penalties.lambda2_sq.clear();
    if (fused_)
      for (double b : in_.rates.beta2_cc) state_.penalties.lambda2_sq.push_back(h_.alpha2 / b);
    state_.penalties.gamma = h_.alpha_gamma / h_.beta_gamma;
  }

  const ChainState& state() const noexcept { return state_; }
  const SamplerInputs& inputs() const noexcept { return in_; }
  bool fused() const noexcept { return fused_; }
  Rng& rng() noexcept { return rng_; }

  // Replace the state (tests, restarts). Thetas must be positive definite.
  void set_state(ChainState s) {
    state_ = std::move(s);
    refresh_covariances(-1);
  }

  void update_theta_column(std::size_t c, std::size_t i) {
    const std::size_t p = in_.p;
    const auto& idx = others_[i];
    Matrix& theta = state_.thetas[c];
    Matrix& sigma = sigmas_[c];
    const Matrix& s = in_.scatter[c];
    const double gamma = state_.penalties.gamma;

    // Theta_11^{-1} from the current covariance.
    const double sigma_ii = sigma(i, i);
    const Vector sigma_12 = sigma(idx, i);
    Matrix theta11_inv = sigma(idx, idx);
    theta11_inv.noalias() -= (sigma_12 / sigma_ii) * sigma_12.transpose();

    Vector a(p - 1), b(p - 1);
    for (std::size_t k = 0; k < p - 1; ++k) {
      const auto j = static_cast<std::size_t>(idx[k]);
      const std::size_t e = pair_index(i, j, p);
      double prec = 1.0 / state_.latents.tau_sq[c * m_ + e];
      double lin = 0.0;
      if (fused_) {
        for (std::size_t q = 0; q < pairs_.size(); ++q) {
          const auto [c1, c2] = pairs_[q];
          if (c1 != c && c2 != c) continue;
          const std::size_t other = c1 == c ? c2 : c1;
          const double w = 1.0 / state_.latents.omega_sq[q * m_ + e];
          prec += w;
          lin += w * state_.thetas[other](i, j);
        }
      }
      a[k] = prec;
      b[k] = lin;
    }

    const double s_ii = s(i, i);
    Matrix precision = (s_ii + 2.0 * gamma) * theta11_inv;
    precision.diagonal() += a;
    const Vector linear = b - s(idx, i);

    Eigen::LLT<Matrix> factor(precision);
    if (factor.info() != Eigen::Success)
      throw NumericalError("column precision not positive definite (group " +
                               std::to_string(c) + ", column " + std::to_string(i) + ")",
                           failing_leading_minor(precision), -1, static_cast<long>(c));
    const Vector beta = sample_mvn_canonical(rng_, linear, factor);
    const double u = sample_gamma(rng_, 0.5 * in_.n[c] + 1.0, 0.5 * s_ii + gamma);

    const Vector w = theta11_inv * beta;
    theta(idx, i) = beta;
    theta(i, idx) = beta.transpose();
    theta(i, i) = u + beta.dot(w);

    Matrix sigma11 = theta11_inv;
    sigma11.noalias() += (w / u) * w.transpose();
    sigma(idx, idx) = sigma11;
    const Vector sigma12 = -w / u;
    sigma(idx, i) = sigma12;
    sigma(i, idx) = sigma12.transpose();
    sigma(i, i) = 1.0 / u;
  }

  void update_thetas() {
    for (std::size_t c = 0; c < in_.num_groups(); ++c)
      for (std::size_t i = 0; i < in_.p; ++i) update_theta_column(c, i);
  }

  // 1/tau^2 | theta, lambda1 ~ InvGaussian(lambda1 / |theta|, lambda1^2)
  void update_tau_sq() {
    for (std::size_t c = 0; c < in_.num_groups(); ++c) {
      const double lam_sq = state_.penalties.lambda1_sq[c];
      const double lam = std::sqrt(lam_sq);
      std::size_t e = 0;
      for (std::size_t i = 0; i + 1 < in_.p; ++i)
        for (std::size_t j = i + 1; j < in_.p; ++j, ++e) {
          const double d = std::max(std::abs(state_.thetas[c](i, j)), kScaleFloor);
          state_.latents.tau_sq[c * m_ + e] = 1.0 / sample_inverse_gaussian(rng_, lam / d, lam_sq);
        }
    }
  }

  // 1/omega^2 | theta, lambda2 ~ InvGaussian(lambda2 / |theta^c - theta^c'|, lambda2^2)
  void update_omega_sq() {
    if (!fused_) return;
    for (std::size_t q = 0; q < pairs_.size(); ++q) {
      const auto [c1, c2] = pairs_[q];
      const double lam_sq = state_.penalties.lambda2_sq[q];
      const double lam = std::sqrt(lam_sq);
      std::size_t e = 0;
      for (std::size_t i = 0; i + 1 < in_.p; ++i)
        for (std::size_t j = i + 1; j < in_.p; ++j, ++e) {
          const double d = std::max(
              std::abs(state_.thetas[c1](i, j) - state_.thetas[c2](i, j)), kScaleFloor);
          state_.latents.omega_sq[q * m_ + e] =
              1.0 / sample_inverse_gaussian(rng_, lam / d, lam_sq);
        }
    }
  }

  // lambda1_c^2 ~ Gamma(alpha1 + m, beta1_c + sum_e tau_ce^2 / 2)
  void update_lambda1_sq() {
    for (std::size_t c = 0; c < in_.num_groups(); ++c) {
      double sum = 0.0;
      for (std::size_t e = 0; e < m_; ++e) sum += state_.latents.tau_sq[c * m_ + e];
      state_.penalties.lambda1_sq[c] = sample_gamma(
          rng_, h_.alpha1 + static_cast<double>(m_), in_.rates.beta1_c[c] + 0.5 * sum);
    }
  }

  // lambda2_cc'^2 ~ Gamma(alpha2 + m, beta2_cc' + sum_e omega_e^2 / 2)
  void update_lambda2_sq() {
    if (!fused_) return;
    for (std::size_t q = 0; q < pairs_.size(); ++q) {
      double sum = 0.0;
      for (std::size_t e = 0; e < m_; ++e) sum += state_.latents.omega_sq[q * m_ + e];
      state_.penalties.lambda2_sq[q] = sample_gamma(
          rng_, h_.alpha2 + static_cast<double>(m_), in_.rates.beta2_cc[q] + 0.5 * sum);
    }
  }

  // gamma ~ Gamma(alpha_gamma + Cp, beta_gamma + sum of all diagonal entries)
  void update_gamma() {
    double diag = 0.0;
    for (const auto& t : state_.thetas) diag += t.trace();
    const double shape =
        h_.alpha_gamma + static_cast<double>(in_.num_groups() * in_.p);
    state_.penalties.gamma = sample_gamma(rng_, shape, h_.beta_gamma + diag);
  }

  // One full sweep. Returns the smallest Cholesky pivot over the C updated
  // precision matrices; the covariances are refreshed from that factorization.
  double sweep(long iteration = -1) {
    update_thetas();
    const double pivot = refresh_covariances(iteration);
    update_tau_sq();
    update_omega_sq();
    update_lambda1_sq();
    update_lambda2_sq();
    update_gamma();
    return pivot;
  }

 private:
  double refresh_covariances(long iteration) {
    double min_pivot = std::numeric_limits<double>::infinity();
    sigmas_.resize(state_.thetas.size());
    for (std::size_t c = 0; c < state_.thetas.size(); ++c) {
      const Matrix& t = state_.thetas[c];
      Eigen::LLT<Matrix> llt(t);
      const double pivot =
          llt.info() == Eigen::Success ? llt.matrixLLT().diagonal().minCoeff() : 0.0;
      if (!(pivot > 0.0))
        throw NumericalError("precision matrix lost positive definiteness at iteration " +
                                 std::to_string(iteration) + " in group " + std::to_string(c),
                             failing_leading_minor(t), iteration, static_cast<long>(c));
      min_pivot = std::min(min_pivot, pivot);
      sigmas_[c] = llt.solve(Matrix::Identity(t.rows(), t.cols()));
    }
    return min_pivot;
  }

  SamplerInputs in_;
  Hyperparameters h_;
  Rng rng_;
  bool fused_ = true;
  std::size_t m_ = 0;
  std::vector<IndexPair> pairs_;
  std::vector<std::vector<Eigen::Index>> others_;
  ChainState state_;
  std::vector<Matrix> sigmas_;
};

struct RunOptions {
  bool keep_theta_draws = false;
  std::vector<double> kappa_grid;  // empty: default_kappa_grid(hyper.kappa)
};

namespace detail {

// Accumulates the post-burn-in summaries of one chain.
class TraceRecorder {
 public:
  TraceRecorder(std::size_t C, std::size_t p, std::size_t n_keep, std::size_t n_gamma,
                std::size_t n_lambda2, double kappa, std::vector<double> grid, bool keep)
      : keep_(keep) {
    t_.num_groups = C;
    t_.p = p;
    t_.kappa = kappa;
    t_.kappa_grid = std::move(grid);
    const std::size_t m = num_pairs(p);
    hist_.assign(C * m, std::vector<std::uint32_t>(t_.kappa_grid.size() + 1, 0));
    t_.mean_partial_corr.assign(C * m, 0.0);
    t_.mean_abs_partial_corr.assign(C * m, 0.0);
    t_.mean_theta.assign(C, Matrix::Zero(p, p));
    t_.lambda1_sq_draws.resize(n_keep, C);
    t_.lambda2_sq_draws.resize(n_keep, n_lambda2);
    t_.gamma_draws.resize(n_keep, n_gamma);
  }

  void record_thetas(std::size_t c, const Matrix& theta) {
    const std::size_t p = t_.p;
    const std::size_t m = num_pairs(p);
    t_.mean_theta[c] += theta;
    std::size_t e = 0;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      const double di = theta(i, i);
      for (std::size_t j = i + 1; j < p; ++j, ++e) {
        const double rho = -theta(i, j) / std::sqrt(di * theta(j, j));
        const double ar = std::abs(rho);
        t_.mean_partial_corr[c * m + e] += rho;
        t_.mean_abs_partial_corr[c * m + e] += ar;
        const auto below = static_cast<std::size_t>(
            std::lower_bound(t_.kappa_grid.begin(), t_.kappa_grid.end(), ar) -
            t_.kappa_grid.begin());
        ++hist_[c * m + e][below];
      }
    }
  }

  ChainTrace& trace() noexcept { return t_; }
  bool keep_draws() const noexcept { return keep_; }

  ChainTrace finish(std::size_t n_keep) {
    t_.n_retained = n_keep;
    const double inv = 1.0 / static_cast<double>(n_keep);
    for (auto& v : t_.mean_partial_corr) v *= inv;
    for (auto& v : t_.mean_abs_partial_corr) v *= inv;
    for (auto& mt : t_.mean_theta) mt *= inv;
    // bucket b counts draws with exactly b grid points below |rho|; |rho| > grid[g] iff b > g.
    const std::size_t G = t_.kappa_grid.size();
    t_.exceed_counts.assign(G, std::vector<std::uint32_t>(hist_.size(), 0));
    for (std::size_t e = 0; e < hist_.size(); ++e) {
      std::uint32_t acc = 0;
      for (std::size_t g = G; g-- > 0;) {
        acc += hist_[e][g + 1];
        t_.exceed_counts[g][e] = acc;
      }
    }
    return std::move(t_);
  }

 private:
  ChainTrace t_;
  std::vector<std::vector<std::uint32_t>> hist_;
  bool keep_;
};

inline ChainTrace run_single_chain(SamplerInputs inputs, const Hyperparameters& hyper, Rng rng,
                                   bool fused, const RunOptions& opt) {
  GibbsSampler sampler(std::move(inputs), hyper, std::move(rng), fused);
  const std::size_t C = sampler.inputs().num_groups();
  const std::size_t p = sampler.inputs().p;
  const std::size_t n_keep = hyper.n_retained();
  auto grid = opt.kappa_grid.empty() ? default_kappa_grid(hyper.kappa) : opt.kappa_grid;
  TraceRecorder rec(C, p, n_keep, 1, sampler.fused() ? num_pairs(C) : 0, hyper.kappa,
                    std::move(grid), opt.keep_theta_draws);
  auto& t = rec.trace();
  for (std::size_t it = 0; it < hyper.n_iterations; ++it) {
    const double pivot = sampler.sweep(static_cast<long>(it));
    if (it < hyper.n_burnin) continue;
    const std::size_t r = it - hyper.n_burnin;
    t.min_cholesky_pivot = std::min(t.min_cholesky_pivot, pivot);
    const auto& st = sampler.state();
    for (std::size_t c = 0; c < C; ++c) rec.record_thetas(c, st.thetas[c]);
    if (opt.keep_theta_draws) t.theta_draws.push_back(st.thetas);
    for (std::size_t c = 0; c < C; ++c) t.lambda1_sq_draws(r, c) = st.penalties.lambda1_sq[c];
    for (std::size_t q = 0; q < st.penalties.lambda2_sq.size(); ++q)
      t.lambda2_sq_draws(r, q) = st.penalties.lambda2_sq[q];
    t.gamma_draws(r, 0) = st.penalties.gamma;
  }
  return rec.finish(n_keep);
}

// Concatenate single-group traces (independent mode) into one C-group trace.
inline ChainTrace merge_group_traces(std::vector<ChainTrace> parts, double kappa) {
  ChainTrace out;
  const std::size_t C = parts.size();
  out.num_groups = C;
  out.p = parts.front().p;
  out.n_retained = parts.front().n_retained;
  out.kappa = kappa;
  out.independent_mode = true;
  out.kappa_grid = parts.front().kappa_grid;
  out.exceed_counts.assign(out.kappa_grid.size(), {});
  out.lambda1_sq_draws.resize(out.n_retained, C);
  out.lambda2_sq_draws.resize(out.n_retained, 0);
  out.gamma_draws.resize(out.n_retained, C);
  for (std::size_t c = 0; c < C; ++c) {
    auto& part = parts[c];
    for (std::size_t g = 0; g < out.kappa_grid.size(); ++g)
      out.exceed_counts[g].insert(out.exceed_counts[g].end(), part.exceed_counts[g].begin(),
                                  part.exceed_counts[g].end());
    out.mean_partial_corr.insert(out.mean_partial_corr.end(), part.mean_partial_corr.begin(),
                                 part.mean_partial_corr.end());
    out.mean_abs_partial_corr.insert(out.mean_abs_partial_corr.end(),
                                     part.mean_abs_partial_corr.begin(),
                                     part.mean_abs_partial_corr.end());
    out.mean_theta.push_back(part.mean_theta.front());
    out.lambda1_sq_draws.col(c) = part.lambda1_sq_draws.col(0);
    out.gamma_draws.col(c) = part.gamma_draws.col(0);
    out.min_cholesky_pivot = std::min(out.min_cholesky_pivot, part.min_cholesky_pivot);
  }
  if (!parts.front().theta_draws.empty()) {
    out.theta_draws.resize(out.n_retained);
    for (std::size_t r = 0; r < out.n_retained; ++r)
      for (std::size_t c = 0; c < C; ++c) out.theta_draws[r].push_back(parts[c].theta_draws[r][0]);
  }
  return out;
}

}  // namespace detail

// Runs hyper.n_iterations sweeps and records the retained ones. Chain k
// draws from rng.derive(k): the joint model is chain 0; in independent mode
// group c is fitted alone on chain c with its own gamma and lambda1.
inline ChainTrace run_chain(const SamplerInputs& inputs, const Hyperparameters& hyper,
                            const Rng& rng, const RunOptions& opt = {}) {
  hyper.validate();
  if (!hyper.independent_mode)
    return detail::run_single_chain(inputs, hyper, rng.derive(0), true, opt);
  std::vector<ChainTrace> parts;
  for (std::size_t c = 0; c < inputs.num_groups(); ++c)
    parts.push_back(detail::run_single_chain(inputs.single_group(c, hyper), hyper,
                                             rng.derive(c), false, opt));
  return detail::merge_group_traces(std::move(parts), hyper.kappa);
}

inline ChainTrace run_chain(const PanDataset& data, const Hyperparameters& hyper,
                            const RunOptions& opt = {}) {
  hyper.validate();
  return run_chain(SamplerInputs::from_dataset(data, hyper), hyper, Rng(hyper.seed), opt);
}

// Log of the penalty term on the off-diagonal elements:
//   -sum_c lambda1_c sum_{i<j} |theta_ij^c| - sum_{c<c'} lambda2_cc' sum_{i<j} |theta_ij^c - theta_ij^c'|
inline double log_edge_penalty(const std::vector<Matrix>& thetas, const PenaltyState& pen) {
  const std::size_t C = thetas.size();
  const auto p = static_cast<std::size_t>(thetas.front().rows());
  double out = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    double abs_sum = 0.0;
    for (std::size_t i = 0; i + 1 < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) abs_sum += std::abs(thetas[c](i, j));
    out -= std::sqrt(pen.lambda1_sq[c]) * abs_sum;
  }
  if (!pen.lambda2_sq.empty()) {
    const auto pairs = all_pairs(C);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      double diff = 0.0;
      for (std::size_t i = 0; i + 1 < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
          diff += std::abs(thetas[pairs[q].first](i, j) - thetas[pairs[q].second](i, j));
      out -= std::sqrt(pen.lambda2_sq[q]) * diff;
    }
  }
  return out;
}

// Unnormalized log posterior of (Theta, lambda, gamma) with the latent
// scales integrated out; -inf outside the positive-definite cone.
inline double log_unnormalized_posterior(const std::vector<Matrix>& thetas,
                                         const PenaltyState& pen, const SamplerInputs& in,
                                         const Hyperparameters& h) {
  const std::size_t C = thetas.size();
  const double m = static_cast<double>(num_pairs(in.p));
  double lp = 0.0;
  double diag = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    Eigen::LLT<Matrix> llt(thetas[c]);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    lp += 0.5 * in.n[c] * logdet - 0.5 * (in.scatter[c].cwiseProduct(thetas[c])).sum();
    diag += thetas[c].trace();
  }
  lp += log_edge_penalty(thetas, pen);
  const double g = pen.gamma;
  lp += static_cast<double>(C * in.p) * std::log(g) - g * diag;
  lp += (h.alpha_gamma - 1.0) * std::log(g) - h.beta_gamma * g;
  for (std::size_t c = 0; c < C; ++c) {
    const double l2 = pen.lambda1_sq[c];
    lp += 0.5 * m * std::log(l2) + (h.alpha1 - 1.0) * std::log(l2) - in.rates.beta1_c[c] * l2;
  }
  for (std::size_t q = 0; q < pen.lambda2_sq.size(); ++q) {
    const double l2 = pen.lambda2_sq[q];
    lp += 0.5 * m * std::log(l2) + (h.alpha2 - 1.0) * std::log(l2) - in.rates.beta2_cc[q] * l2;
  }
  return lp;
}

}  // namespace nexus
