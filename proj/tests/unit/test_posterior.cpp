#include <gtest/gtest.h>

#include "nexus/posterior.hpp"

using namespace nexus;

namespace {

Matrix pc2(double rho) {
  Matrix t(2, 2);
  t << 1, -rho, -rho, 1;
  return t;
}

// A one-group p = 2 trace holding the given draws, with both the full-draw
// and grid-summary representations.
ChainTrace trace_of(const std::vector<Matrix>& draws, double kappa = 0.05) {
  detail::TraceRecorder rec(1, 2, draws.size(), 1, 0, kappa, default_kappa_grid(kappa), true);
  for (const auto& d : draws) {
    rec.record_thetas(0, d);
    rec.trace().theta_draws.push_back({d});
  }
  return rec.finish(draws.size());
}

ChainTrace without_draws(ChainTrace t) {
  t.theta_draws.clear();
  return t;
}

}  // namespace

TEST(SelectEdges, AllAbove) {
  const auto t = trace_of({pc2(0.1), pc2(0.1), pc2(-0.1)});
  for (const auto& tr : {t, without_draws(t)}) {
    const auto r = select_edges(tr, 0.05);
    EXPECT_DOUBLE_EQ(r.prob(0, 0), 1.0);
    EXPECT_TRUE(r.selected(0, 0));
  }
}

TEST(SelectEdges, AllBelow) {
  const auto t = trace_of({pc2(0.01), pc2(-0.01)});
  for (const auto& tr : {t, without_draws(t)}) {
    const auto r = select_edges(tr, 0.05);
    EXPECT_DOUBLE_EQ(r.prob(0, 0), 0.0);
    EXPECT_FALSE(r.selected(0, 0));
  }
}

TEST(SelectEdges, HalfIsNotSelected) {
  const auto t = trace_of({pc2(0.1), pc2(0.01)});
  for (const auto& tr : {t, without_draws(t)}) {
    const auto r = select_edges(tr, 0.05);
    EXPECT_DOUBLE_EQ(r.prob(0, 0), 0.5);
    EXPECT_FALSE(r.selected(0, 0));
  }
}

TEST(SelectEdges, DomainAndGrid) {
  const auto t = trace_of({pc2(0.1)});
  EXPECT_THROW(select_edges(t, 0.0), DomainError);
  EXPECT_THROW(select_edges(t, 1.0), DomainError);
  EXPECT_NO_THROW(select_edges(t, 0.123));
  EXPECT_THROW(select_edges(without_draws(t), 0.123), DomainError);
}

TEST(SelectEdges, GridMatchesFullDrawsAndIsMonotone) {
  Rng rng(3);
  std::vector<Matrix> draws;
  for (int k = 0; k < 400; ++k) draws.push_back(pc2(1.8 * rng.uniform() - 0.9));
  const auto t = trace_of(draws);
  const auto summary = without_draws(t);
  double prev = 1.0;
  for (int g = 1; g < 100; ++g) {
    const double kappa = g / 100.0;
    const double full = select_edges(t, kappa).prob(0, 0);
    EXPECT_DOUBLE_EQ(full, select_edges(summary, kappa).prob(0, 0)) << kappa;
    EXPECT_LE(full, prev);
    prev = full;
  }
}

TEST(NetworkSimilarity, MinMaxMap) {
  bool deg = true;
  EXPECT_EQ(normalize_min_max({2, 5, 8}, &deg), (std::vector<double>{0, 0.5, 1}));
  EXPECT_FALSE(deg);
  EXPECT_EQ(normalize_min_max({3}, &deg), (std::vector<double>{0}));
  EXPECT_TRUE(deg);
  EXPECT_EQ(normalize_min_max({4, 4}, &deg), (std::vector<double>{0, 0}));
  EXPECT_TRUE(deg);
}

TEST(NetworkSimilarity, FromTrace) {
  ChainTrace t;
  t.num_groups = 3;
  t.p = 2;
  t.n_retained = 2;
  t.lambda2_sq_draws.resize(2, 3);
  t.lambda2_sq_draws << 1, 4, 7, 3, 6, 9;
  t.mean_theta = {Matrix::Identity(2, 2), 2 * Matrix::Identity(2, 2), pc2(0.5)};
  const auto r = network_similarity(t);
  EXPECT_EQ(r.nsi, (std::vector<double>{2, 5, 8}));
  EXPECT_EQ(r.nnsi, (std::vector<double>{0, 0.5, 1}));
  EXPECT_DOUBLE_EQ(r.l1_distance[0], 2.0);
  EXPECT_DOUBLE_EQ(r.l1_distance[1], 1.0);
  EXPECT_FALSE(r.nnsi_degenerate);
  EXPECT_TRUE(r.warning.empty());

  // order preservation
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      EXPECT_EQ(r.nsi[a] < r.nsi[b], r.nnsi[a] < r.nnsi[b]);
}

TEST(NetworkSimilarity, SinglePairWarns) {
  ChainTrace t;
  t.num_groups = 2;
  t.p = 2;
  t.n_retained = 1;
  t.lambda2_sq_draws = Matrix::Constant(1, 1, 3.0);
  t.mean_theta = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const auto r = network_similarity(t);
  EXPECT_EQ(r.nnsi, (std::vector<double>{0}));
  EXPECT_TRUE(r.nnsi_degenerate);
  EXPECT_FALSE(r.warning.empty());
}

TEST(NetworkSimilarity, IndependentModeUnsupported) {
  ChainTrace t;
  t.num_groups = 2;
  t.p = 2;
  t.independent_mode = true;
  t.mean_theta = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  EXPECT_THROW(network_similarity(t), UnsupportedError);
}

namespace {

// p = 4 edge vectors from a list of (i, j) pairs.
std::vector<bool> adj(std::initializer_list<std::pair<std::size_t, std::size_t>> edges, std::size_t p = 4) {
  std::vector<bool> a(num_pairs(p), false);
  for (auto [i, j] : edges) a[pair_index(i, j, p)] = true;
  return a;
}

PathwayAnnotation toy_annotation() {
  return {{{"P", {0, 1, 2}}, {"Q", {3}}}};
}

const PathwayProportion& row(const PathwayTable& t, std::size_t a, std::size_t b) {
  for (const auto& r : t.rows)
    if (r.first == a && r.second == b) return r;
  throw std::runtime_error("missing pathway row");
}

}  // namespace

TEST(Pathways, IdenticalAdjacency) {
  const auto a = adj({{0, 1}, {1, 2}, {2, 3}});
  const auto t = pathway_shared_proportions(a, a, 4, toy_annotation());
  EXPECT_DOUBLE_EQ(row(t, 0, 0).proportion, 1.0);
  EXPECT_DOUBLE_EQ(row(t, 0, 1).proportion, 1.0);
  EXPECT_DOUBLE_EQ(row(t, 1, 1).proportion, 0.0);  // single-member pathway has no edges
}

TEST(Pathways, DisjointAdjacency) {
  const auto t = pathway_shared_proportions(adj({{0, 1}, {2, 3}}), adj({{0, 2}, {1, 3}}), 4, toy_annotation());
  for (const auto& r : t.rows) EXPECT_DOUBLE_EQ(r.proportion, 0.0);
}

TEST(Pathways, HandCount) {
  const auto t = pathway_shared_proportions(adj({{0, 1}, {0, 2}}), adj({{0, 1}}), 4, toy_annotation());
  EXPECT_EQ(row(t, 0, 0).shared, 1u);
  EXPECT_EQ(row(t, 0, 0).union_count, 2u);
  EXPECT_DOUBLE_EQ(row(t, 0, 0).proportion, 0.5);
}

TEST(Pathways, SymmetricInGroupsAndPathways) {
  Rng rng(4);
  const std::size_t p = 8;
  PathwayAnnotation ann{{{"A", {0, 1, 2, 3}}, {"B", {3, 4, 5}}, {"C", {5, 6, 7, 0}}}};
  PathwayAnnotation rev{{ann.pathways[2], ann.pathways[1], ann.pathways[0]}};
  for (int t = 0; t < 50; ++t) {
    std::vector<bool> a(num_pairs(p)), b(num_pairs(p));
    for (std::size_t e = 0; e < a.size(); ++e) {
      a[e] = rng.uniform() < 0.4;
      b[e] = rng.uniform() < 0.4;
    }
    const auto ab = pathway_shared_proportions(a, b, p, ann);
    const auto ba = pathway_shared_proportions(b, a, p, ann);
    const auto rv = pathway_shared_proportions(a, b, p, rev);
    for (std::size_t k = 0; k < ab.rows.size(); ++k) EXPECT_EQ(ab.rows[k].proportion, ba.rows[k].proportion);
    for (const auto& r : ab.rows)
      EXPECT_EQ(r.proportion, row(rv, 2 - r.second, 2 - r.first).proportion);
  }
}

TEST(Pathways, EmptyPathwayWarnsAndInvalidIndexThrows) {
  PathwayAnnotation ann{{{"E", {}}, {"P", {0, 1}}}};
  const auto t = pathway_shared_proportions(adj({{0, 1}}), adj({{0, 1}}), 4, ann);
  EXPECT_EQ(t.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(row(t, 0, 0).proportion, 0.0);
  PathwayAnnotation bad{{{"X", {0, 9}}}};
  EXPECT_THROW(pathway_shared_proportions(adj({}), adj({}), 4, bad), DomainError);
}

namespace {

EdgeReport report(std::size_t C, std::size_t p, const std::vector<double>& probs) {
  EdgeReport r;
  r.num_groups = C;
  r.p = p;
  r.inclusion_prob = probs;
  for (double v : probs) r.adjacency.push_back(v > 0.5);
  return r;
}

}  // namespace

TEST(Heatmap, NoEdgesSelected) {
  const auto h = edge_probability_heatmap_data(report(3, 3, std::vector<double>(9, 0.2)));
  EXPECT_TRUE(h.edge_rows.empty());
  EXPECT_EQ(h.probabilities.rows(), 0);
}

TEST(Heatmap, TwoGroupsIdentityOrder) {
  const auto h = edge_probability_heatmap_data(report(2, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.1}));
  EXPECT_EQ(h.group_order, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(h.edge_rows, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(h.probabilities(1, 1), 0.8);
}

TEST(Heatmap, DuplicatedColumnsClusterAdjacent) {
  // groups 0 and 2 identical, group 1 different
  const std::vector<double> g0{0.9, 0.8, 0.1}, g1{0.1, 0.2, 0.95};
  std::vector<double> probs;
  for (const auto* g : {&g0, &g1, &g0}) probs.insert(probs.end(), g->begin(), g->end());
  const auto h = edge_probability_heatmap_data(report(3, 3, probs));
  EXPECT_EQ(h.group_order, (std::vector<std::size_t>{0, 2, 1}));

  const auto split = edge_probability_heatmap_data(
      std::vector<EdgeReport>{report(1, 3, g0), report(1, 3, g1), report(1, 3, g0)});
  EXPECT_EQ(split.group_order, h.group_order);
  EXPECT_EQ(split.probabilities, h.probabilities);
}

TEST(Heatmap, AverageLinkageFourColumns) {
  Matrix cols(1, 4);
  cols << 0.0, 10.0, 1.0, 11.5;
  // {0,2} merge at 1, {1,3} at 1.5, then the two clusters.
  EXPECT_EQ(average_linkage_order(cols), (std::vector<std::size_t>{0, 2, 1, 3}));
}
