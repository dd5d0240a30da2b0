#pragma once

// Posterior summaries: edge selection, network similarity, pathway sharing
// and heatmap data.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/sampler.hpp"

namespace nexus {

struct EdgeReport {
  std::size_t num_groups = 0;
  std::size_t p = 0;
  double kappa = 0.05;
  std::vector<double> inclusion_prob;  // C * m
  std::vector<bool> adjacency;         // inclusion_prob > 0.5

  std::size_t num_edges() const noexcept { return num_pairs(p); }
  double prob(std::size_t c, std::size_t e) const { return inclusion_prob[c * num_edges() + e]; }
  bool selected(std::size_t c, std::size_t e) const { return adjacency[c * num_edges() + e]; }

  std::vector<bool> group_adjacency(std::size_t c) const {
    const std::size_t m = num_edges();
    return {adjacency.begin() + static_cast<long>(c * m),
            adjacency.begin() + static_cast<long>((c + 1) * m)};
  }
};

// Posterior probability that |rho| exceeds kappa, and the edges whose
// probability exceeds 0.5. Both comparisons are strict.
//
// With full draw retention any kappa is allowed; otherwise kappa must be on
// the trace's recorded grid.
inline EdgeReport select_edges(const ChainTrace& trace, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in (0,1)");
  if (trace.n_retained == 0) throw DomainError("trace has no retained draws");
  const std::size_t m = trace.num_edges();
  EdgeReport r;
  r.num_groups = trace.num_groups;
  r.p = trace.p;
  r.kappa = kappa;
  r.inclusion_prob.assign(trace.num_groups * m, 0.0);
  const double inv = 1.0 / static_cast<double>(trace.n_retained);

  if (!trace.theta_draws.empty()) {
    std::vector<std::uint32_t> counts(r.inclusion_prob.size(), 0);
    for (const auto& draw : trace.theta_draws)
      for (std::size_t c = 0; c < trace.num_groups; ++c) {
        const Matrix& t = draw[c];
        std::size_t e = 0;
        for (std::size_t i = 0; i + 1 < trace.p; ++i)
          for (std::size_t j = i + 1; j < trace.p; ++j, ++e)
            counts[c * m + e] += std::abs(t(i, j) / std::sqrt(t(i, i) * t(j, j))) > kappa;
      }
    for (std::size_t k = 0; k < counts.size(); ++k)
      r.inclusion_prob[k] = static_cast<double>(counts[k]) * inv;
  } else {
    const auto it = std::find_if(trace.kappa_grid.begin(), trace.kappa_grid.end(),
                                 [&](double g) { return std::abs(g - kappa) < 1e-12; });
    if (it == trace.kappa_grid.end())
      throw DomainError("kappa " + std::to_string(kappa) +
                        " is not on the trace's recorded grid; refit with full draw retention");
    const auto& counts = trace.exceed_counts[static_cast<std::size_t>(it - trace.kappa_grid.begin())];
    for (std::size_t k = 0; k < counts.size(); ++k)
      r.inclusion_prob[k] = static_cast<double>(counts[k]) * inv;
  }
  r.adjacency.reserve(r.inclusion_prob.size());
  for (double pr : r.inclusion_prob) r.adjacency.push_back(pr > 0.5);
  return r;
}

struct SimilarityReport {
  std::vector<IndexPair> pairs;
  std::vector<double> nsi;
  std::vector<double> nnsi;
  std::vector<double> l1_distance;
  bool nnsi_degenerate = false;
  std::string warning;
};

// Min-max map onto [0,1]. Fewer than two values, or all equal, maps to 0.
inline std::vector<double> normalize_min_max(const std::vector<double>& v, bool* degenerate = nullptr) {
  std::vector<double> out(v.size(), 0.0);
  bool deg = v.size() < 2;
  if (!deg) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi > *lo) {
      for (std::size_t k = 0; k < v.size(); ++k) out[k] = (v[k] - *lo) / (*hi - *lo);
    } else {
      deg = true;
    }
  }
  if (degenerate) *degenerate = deg;
  return out;
}

// NSI = posterior mean of lambda2^2 per group pair; L1 distance between
// posterior-mean precision matrices (all entries).
inline SimilarityReport network_similarity(const ChainTrace& trace,
                                           const std::vector<Matrix>& posterior_mean_thetas) {
  if (trace.independent_mode || trace.lambda2_sq_draws.cols() == 0)
    throw UnsupportedError("network similarity needs cross-group penalty draws (joint mode)");
  if (posterior_mean_thetas.size() != trace.num_groups)
    throw DomainError("one posterior-mean precision matrix per group is required");
  SimilarityReport r;
  r.pairs = all_pairs(trace.num_groups);
  for (std::size_t q = 0; q < r.pairs.size(); ++q) {
    r.nsi.push_back(trace.lambda2_sq_draws.col(static_cast<Eigen::Index>(q)).mean());
    const auto [a, b] = r.pairs[q];
    r.l1_distance.push_back((posterior_mean_thetas[a] - posterior_mean_thetas[b]).cwiseAbs().sum());
  }
  r.nnsi = normalize_min_max(r.nsi, &r.nnsi_degenerate);
  if (r.nnsi_degenerate)
    r.warning = r.pairs.size() < 2 ? "NNSI undefined for a single group pair; reported as 0"
                                   : "all NSI values equal; NNSI reported as 0";
  return r;
}

inline SimilarityReport network_similarity(const ChainTrace& trace) {
  return network_similarity(trace, trace.mean_theta);
}

struct Pathway {
  std::string name;
  std::set<std::size_t> members;
};

struct PathwayAnnotation {
  std::vector<Pathway> pathways;

  void validate(std::size_t p) const {
    for (const auto& pw : pathways)
      for (auto i : pw.members)
        if (i >= p)
          throw DomainError("pathway '" + pw.name + "' references variable index " +
                            std::to_string(i) + " >= p");
  }
};

struct PathwayProportion {
  std::size_t first;   // pathway index
  std::size_t second;  // pathway index, >= first
  std::size_t shared;
  std::size_t union_count;
  double proportion;
};

struct PathwayTable {
  std::vector<PathwayProportion> rows;
  std::vector<std::string> warnings;
};

// For each pathway pair (P, Q), P <= Q: edges (i, j) with i in P and j in Q
// (either orientation, i != j) selected in both groups over those selected in
// at least one. Zero when nothing in the block is selected.
inline PathwayTable pathway_shared_proportions(const std::vector<bool>& adj_a,
                                               const std::vector<bool>& adj_b, std::size_t p,
                                               const PathwayAnnotation& ann) {
  if (adj_a.size() != num_pairs(p) || adj_b.size() != num_pairs(p))
    throw DomainError("adjacency vectors must both cover p(p-1)/2 edges");
  ann.validate(p);
  PathwayTable table;
  for (const auto& pw : ann.pathways)
    if (pw.members.empty()) table.warnings.push_back("pathway '" + pw.name + "' is empty");
  const std::size_t k = ann.pathways.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      std::set<std::size_t> block;
      for (auto i : ann.pathways[a].members)
        for (auto j : ann.pathways[b].members)
          if (i != j) block.insert(pair_index(i, j, p));
      std::size_t both = 0, any = 0;
      for (auto e : block) {
        both += adj_a[e] && adj_b[e];
        any += adj_a[e] || adj_b[e];
      }
      table.rows.push_back(
          {a, b, both, any, any == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(any)});
    }
  return table;
}

// Average-linkage agglomerative clustering on Euclidean distance between
// columns; returns the leaf order. At each merge the cluster holding the
// smaller original index is placed first, and ties in distance go to the
// lexicographically first pair.
inline std::vector<std::size_t> average_linkage_order(const Matrix& columns) {
  const auto k = static_cast<std::size_t>(columns.cols());
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t c = 0; c < k; ++c) clusters.push_back({c});
  if (k <= 2) {
    std::vector<std::size_t> id(k);
    std::iota(id.begin(), id.end(), 0);
    return id;
  }
  Matrix d(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      d(a, b) = (columns.col(static_cast<Eigen::Index>(a)) - columns.col(static_cast<Eigen::Index>(b))).norm();
  auto linkage = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    double s = 0.0;
    for (auto i : x)
      for (auto j : y) s += d(i, j);
    return s / static_cast<double>(x.size() * y.size());
  };
  while (clusters.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double l = linkage(clusters[a], clusters[b]);
        if (l < best - 1e-15) {
          best = l;
          best_a = a;
          best_b = b;
        }
      }
    auto& first = clusters[best_a];
    auto& second = clusters[best_b];
    const bool swap = *std::min_element(second.begin(), second.end()) <
                      *std::min_element(first.begin(), first.end());
    std::vector<std::size_t> merged = swap ? second : first;
    const auto& tail = swap ? first : second;
    merged.insert(merged.end(), tail.begin(), tail.end());
    clusters[best_a] = std::move(merged);
    clusters.erase(clusters.begin() + static_cast<long>(best_b));
  }
  return clusters.front();
}

struct HeatmapData {
  std::vector<std::size_t> edge_rows;  // canonical edge indices selected in >= 1 group
  Matrix probabilities;                // rows = edge_rows, cols = groups (input order)
  std::vector<std::size_t> group_order;
};

// Rows restricted to edges selected in at least one group; the group order
// comes from clustering the probability columns.
inline HeatmapData edge_probability_heatmap_data(const EdgeReport& report) {
  HeatmapData h;
  const std::size_t m = report.num_edges();
  const std::size_t C = report.num_groups;
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t c = 0; c < C; ++c)
      if (report.selected(c, e)) {
        h.edge_rows.push_back(e);
        break;
      }
  h.probabilities.resize(static_cast<Eigen::Index>(h.edge_rows.size()), static_cast<Eigen::Index>(C));
  for (std::size_t r = 0; r < h.edge_rows.size(); ++r)
    for (std::size_t c = 0; c < C; ++c)
      h.probabilities(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          report.prob(c, h.edge_rows[r]);
  h.group_order = average_linkage_order(h.probabilities);
  return h;
}

// Same, over a list of per-group reports sharing p.
inline HeatmapData edge_probability_heatmap_data(const std::vector<EdgeReport>& reports) {
  if (reports.empty()) return {};
  EdgeReport merged;
  merged.p = reports.front().p;
  merged.kappa = reports.front().kappa;
  for (const auto& r : reports) {
    if (r.p != merged.p) throw DomainError("edge reports must share p");
    merged.num_groups += r.num_groups;
    merged.inclusion_prob.insert(merged.inclusion_prob.end(), r.inclusion_prob.begin(),
                                 r.inclusion_prob.end());
    merged.adjacency.insert(merged.adjacency.end(), r.adjacency.begin(), r.adjacency.end());
  }
  return edge_probability_heatmap_data(merged);
}

}  // namespace nexus
