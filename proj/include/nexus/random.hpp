#pragma once

// Seeded random variate generation for the sampler.
//
// Streams are derived, never shared: a chain's generator is built from
// (master seed, replicate index, chain index) through std::seed_seq, whose
// mixing is fixed by the standard, so traces are reproducible given the seed
// and the algorithms below. Variates are produced by hand-written transforms
// rather than <random> distributions, whose algorithms are unspecified.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nexus/error.hpp"

namespace nexus {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : seed_(seed), path_(path) {
    reseed();
  }

  // Independent stream for a sub-task (replicate, chain, group, ...).
  Rng derive(std::uint64_t index) const {
    Rng out(*this);
    out.path_.push_back(index);
    out.reseed();
    return out;
  }

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Marsaglia polar method; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  void reseed() {
    std::vector<std::uint32_t> words;
    auto push = [&](std::uint64_t x) {
      words.push_back(static_cast<std::uint32_t>(x & 0xffffffffu));
      words.push_back(static_cast<std::uint32_t>(x >> 32));
    };
    push(seed_);
    push(path_.size());
    for (auto p : path_) push(p);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
    has_spare_ = false;
  }

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Gamma(shape, rate), mean shape / rate. Marsaglia-Tsang squeeze for
// shape >= 1; shape < 1 uses Gamma(shape + 1) * U^(1/shape).
inline double sample_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw DomainError("gamma requires positive finite shape and rate");
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0, 1.0);
    return g * std::pow(rng.uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

// Inverse-Gaussian(mean, shape) by Michael-Schucany-Haas. The smaller root is
// evaluated as mean^2 / (larger root) to avoid cancellation when mean/shape
// is large.
inline double sample_inverse_gaussian(Rng& rng, double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0) || !std::isfinite(mean) || !std::isfinite(shape))
    throw DomainError("inverse Gaussian requires positive finite mean and shape");
  const double nu = rng.normal();
  const double y = nu * nu;
  const double phi = mean / shape;
  const double x = mean / (1.0 + 0.5 * phi * y + std::sqrt(phi * y + 0.25 * phi * phi * y * y));
  if (rng.uniform() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

// Index of the first leading minor at which Cholesky breaks down, or -1.
inline long failing_leading_minor(const Eigen::MatrixXd& a) {
  const Eigen::Index k = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return static_cast<long>(j);
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < k; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return -1;
}

// Cholesky factor of a symmetric positive-definite matrix, or NumericalError
// carrying the offending leading minor.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_or_throw(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0)) {
    const long minor = failing_leading_minor(a);
    throw NumericalError("matrix is not positive definite (leading minor " +
                             std::to_string(minor) + ")",
                         minor);
  }
  return llt;
}

// Draw from N(precision^-1 * linear, precision^-1) given the factor of the
// precision. The explicit inverse is never formed.
inline Eigen::VectorXd sample_mvn_canonical(Rng& rng, const Eigen::VectorXd& linear,
                                            const Eigen::LLT<Eigen::MatrixXd>& factor) {
  Eigen::VectorXd z(linear.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  Eigen::VectorXd mean = factor.solve(linear);
  factor.matrixU().solveInPlace(z);
  return mean + z;
}

inline Eigen::VectorXd sample_mvn_from_precision(Rng& rng, const Eigen::VectorXd& mean,
                                                 const Eigen::MatrixXd& precision) {
  if (precision.rows() != precision.cols() || precision.rows() != mean.size())
    throw DomainError("precision must be square and match the mean length");
  const auto factor = cholesky_or_throw(precision);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  factor.matrixU().solveInPlace(z);
  return mean + z;
}

}  // namespace nexus
