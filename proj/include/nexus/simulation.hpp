#pragma once

// Synthetic four-group benchmark: a banded base precision matrix, three
// successive edge perturbations, a row-sum repair to restore positive
// definiteness, and Gaussian sampling.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/random.hpp"

namespace nexus::sim {

struct EdgeLess {
  bool operator()(const IndexPair& x, const IndexPair& y) const noexcept {
    return x.first != y.first ? x.first < y.first : x.second < y.second;
  }
};

using EdgeSet = std::set<IndexPair, EdgeLess>;

inline EdgeSet edges_of(const Matrix& theta) {
  EdgeSet out;
  for (Eigen::Index i = 0; i + 1 < theta.rows(); ++i)
    for (Eigen::Index j = i + 1; j < theta.cols(); ++j)
      if (theta(i, j) != 0.0)
        out.insert({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  return out;
}

inline EdgeSet intersect(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  for (const auto& e : a)
    if (b.count(e)) out.insert(e);
  return out;
}

// Boolean edge vector in canonical pair order.
inline std::vector<bool> edge_indicator(const Matrix& theta) {
  const auto p = static_cast<std::size_t>(theta.rows());
  std::vector<bool> out(num_pairs(p), false);
  for (const auto& e : edges_of(theta)) out[pair_index(e.first, e.second, p)] = true;
  return out;
}

// Unit diagonal, 0.5 on the first off-diagonal, 0.4 on the second.
inline Matrix build_theta1(std::size_t p = 20) {
  if (p < 3) throw DomainError("base precision matrix needs p >= 3");
  Matrix t = Matrix::Identity(p, p);
  for (std::size_t i = 0; i + 1 < p; ++i) t(i, i + 1) = t(i + 1, i) = 0.5;
  for (std::size_t i = 0; i + 2 < p; ++i) t(i, i + 2) = t(i + 2, i) = 0.4;
  return t;
}

// Uniform on [-0.6, -0.4] U [0.4, 0.6].
inline double draw_edge_value(Rng& rng) {
  const double mag = 0.4 + 0.2 * rng.uniform();
  return rng.uniform() < 0.5 ? -mag : mag;
}

// k distinct elements chosen uniformly (partial Fisher-Yates).
inline std::vector<IndexPair> choose(Rng& rng, const EdgeSet& pool, std::size_t k) {
  std::vector<IndexPair> v(pool.begin(), pool.end());
  if (v.size() < k)
    throw DomainError("cannot choose " + std::to_string(k) + " edges from a pool of " +
                      std::to_string(v.size()));
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(v.size() - i));
    std::swap(v[i], v[std::min(r, v.size() - 1)]);
  }
  v.resize(k);
  return v;
}

struct Perturbation {
  std::vector<IndexPair> removed;
  std::vector<IndexPair> added;
};

struct PerturbationCounts {
  std::size_t step2 = 5;   // removed from / added to Theta1 to get Theta2
  std::size_t step3 = 10;  // removed from shared(1,2), added outside union(1,2)
  std::size_t step4 = 5;   // removed from shared(1,2,3), added outside union(1,2,3)
};

struct PerturbedChain {
  Matrix theta2, theta3, theta4;
  Perturbation step2, step3, step4;
};

// Each matrix is derived from its predecessor: removals are drawn from the
// edges common to all earlier matrices, additions from the positions that are
// null in all of them.
inline PerturbedChain perturb_chain(Rng& rng, const Matrix& theta1,
                                    const PerturbationCounts& counts = {}) {
  const auto p = static_cast<std::size_t>(theta1.rows());
  EdgeSet all;
  for (std::size_t i = 0; i + 1 < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) all.insert({i, j});

  auto step = [&](const Matrix& base, const EdgeSet& removable, const EdgeSet& occupied,
                  std::size_t k, Perturbation& log) {
    Matrix out = base;
    log.removed = choose(rng, removable, k);
    for (const auto& e : log.removed) out(e.first, e.second) = out(e.second, e.first) = 0.0;
    EdgeSet free;
    for (const auto& e : all)
      if (!occupied.count(e)) free.insert(e);
    log.added = choose(rng, free, k);
    for (const auto& e : log.added)
      out(e.first, e.second) = out(e.second, e.first) = draw_edge_value(rng);
    return out;
  };

  PerturbedChain pc;
  const EdgeSet e1 = edges_of(theta1);
  pc.theta2 = step(theta1, e1, e1, counts.step2, pc.step2);
  const EdgeSet e2 = edges_of(pc.theta2);
  EdgeSet u12 = e1;
  u12.insert(e2.begin(), e2.end());
  pc.theta3 = step(pc.theta2, intersect(e1, e2), u12, counts.step3, pc.step3);
  const EdgeSet e3 = edges_of(pc.theta3);
  EdgeSet u123 = u12;
  u123.insert(e3.begin(), e3.end());
  pc.theta4 = step(pc.theta3, intersect(intersect(e1, e2), e3), u123, counts.step4, pc.step4);
  return pc;
}

// Divide each off-diagonal entry by `slack` times the absolute off-diagonal
// sum of its row, symmetrize by averaging with the transpose, keep the unit
// diagonal. Throws if the result is not positive definite.
inline Matrix make_positive_definite(const Matrix& theta, double slack = 1.0) {
  if (!(slack > 0.0)) throw DomainError("repair slack must be positive");
  if (theta.rows() != theta.cols()) throw DomainError("repair needs a square matrix");
  const Eigen::Index p = theta.rows();
  Matrix m = theta;
  for (Eigen::Index i = 0; i < p; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (j != i) s += std::abs(theta(i, j));
    for (Eigen::Index j = 0; j < p; ++j)
      if (j != i) m(i, j) = s > 0.0 ? theta(i, j) / (slack * s) : 0.0;
  }
  Matrix out = 0.5 * (m + m.transpose());
  out.diagonal().setOnes();
  Eigen::LLT<Matrix> llt(out);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0))
    throw NumericalError("row-sum repair did not produce a positive-definite matrix",
                         failing_leading_minor(out));
  return out;
}

struct SimTruth {
  std::vector<Matrix> thetas;               // repaired
  std::vector<std::vector<bool>> adjacency;  // canonical edge order
  PerturbedChain chain;

  // |E_a ∩ E_b| / |E_a|. The four truths have equal edge counts, so this is
  // symmetric in (a, b).
  double shared_proportion(std::size_t a, std::size_t b) const {
    std::size_t both = 0, na = 0;
    for (std::size_t e = 0; e < adjacency[a].size(); ++e) {
      na += adjacency[a][e];
      both += adjacency[a][e] && adjacency[b][e];
    }
    return na == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(na);
  }
};

// Builds the four truths: Theta1 as constructed (it is positive definite),
// Theta2..Theta4 repaired. The perturbation is redrawn if a repair fails.
inline SimTruth make_truths(Rng& rng, std::size_t p = 20, const PerturbationCounts& counts = {},
                            double slack = 1.0, int max_attempts = 100) {
  const Matrix theta1 = build_theta1(p);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    SimTruth t;
    t.chain = perturb_chain(rng, theta1, counts);
    try {
      t.thetas.push_back(theta1);
      for (const Matrix* raw : {&t.chain.theta2, &t.chain.theta3, &t.chain.theta4})
        t.thetas.push_back(make_positive_definite(*raw, slack));
    } catch (const NumericalError&) {
      continue;
    }
    for (const auto& th : t.thetas) t.adjacency.push_back(edge_indicator(th));
    return t;
  }
  throw NumericalError("could not build positive-definite truths");
}

inline const std::vector<double>& default_sample_sizes() {
  static const std::vector<double> n{20, 40, 60, 80};
  return n;
}

// n_c draws from N(0, Theta_c^{-1}) per group.
inline PanDataset generate_dataset(Rng& rng, const std::vector<Matrix>& thetas,
                                   const std::vector<double>& n = default_sample_sizes()) {
  if (thetas.size() != n.size()) throw DomainError("one sample size per truth is required");
  const auto p = static_cast<std::size_t>(thetas.front().rows());
  std::vector<DataGroup> groups;
  for (std::size_t c = 0; c < thetas.size(); ++c) {
    const auto factor = cholesky_or_throw(thetas[c]);
    const auto rows = static_cast<Eigen::Index>(n[c]);
    Matrix x(rows, static_cast<Eigen::Index>(p));
    for (Eigen::Index r = 0; r < rows; ++r) {
      Vector z(p);
      for (std::size_t k = 0; k < p; ++k) z[k] = rng.normal();
      factor.matrixU().solveInPlace(z);
      x.row(r) = z.transpose();
    }
    groups.push_back({"C" + std::to_string(c + 1), std::move(x)});
  }
  return PanDataset(std::move(groups), {});
}

}  // namespace nexus::sim
