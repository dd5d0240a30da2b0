#pragma once

// Scoring estimated networks against known truths: ROC AUC per graph and per
// group pair, threshold sweeps, and the replicated simulation benchmark.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/posterior.hpp"
#include "nexus/sampler.hpp"
#include "nexus/simulation.hpp"

namespace nexus::eval {

// Per-edge continuous scores (posterior mean |partial correlation|) and truth
// labels for each group, indexed identically.
struct ScoreSet {
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<bool>> truth;

  static ScoreSet from_trace(const ChainTrace& trace, std::vector<std::vector<bool>> truth) {
    ScoreSet s;
    const std::size_t m = trace.num_edges();
    for (std::size_t c = 0; c < trace.num_groups; ++c)
      s.scores.emplace_back(trace.mean_abs_partial_corr.begin() + static_cast<long>(c * m),
                            trace.mean_abs_partial_corr.begin() + static_cast<long>((c + 1) * m));
    s.truth = std::move(truth);
    return s;
  }
};

// Rank-sum AUC with midranks for ties (the Mann-Whitney statistic).
inline double roc_auc(const std::vector<double>& scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) throw DomainError("scores and truth differ in length");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (bool t : truth) pos += t;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw DomainError("AUC needs at least one positive and one negative");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (truth[order[k]]) rank_sum += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(neg));
}

// Label = edge present in both truths; score = min of the two scores.
inline double shared_edge_auc(const std::vector<double>& scores_a,
                              const std::vector<double>& scores_b,
                              const std::vector<bool>& truth_a, const std::vector<bool>& truth_b) {
  if (scores_a.size() != scores_b.size() || truth_a.size() != truth_b.size() ||
      scores_a.size() != truth_a.size())
    throw DomainError("shared-edge AUC inputs must share one edge index set");
  std::vector<double> s(scores_a.size());
  std::vector<bool> t(scores_a.size());
  for (std::size_t e = 0; e < s.size(); ++e) {
    s[e] = std::min(scores_a[e], scores_b[e]);
    t[e] = truth_a[e] && truth_b[e];
  }
  return roc_auc(s, t);
}

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  double tpr() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double fpr() const { return fp + tn == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(fp + tn); }
  // Matthews correlation; 0 when any marginal is empty.
  double mcc() const {
    const double a = static_cast<double>(tp), b = static_cast<double>(fp);
    const double c = static_cast<double>(tn), d = static_cast<double>(fn);
    const double den = (a + b) * (a + d) * (c + b) * (c + d);
    return den == 0.0 ? 0.0 : (a * c - b * d) / std::sqrt(den);
  }
};

inline Confusion confusion(const std::vector<bool>& selected, const std::vector<bool>& truth) {
  Confusion k;
  for (std::size_t e = 0; e < truth.size(); ++e) {
    if (truth[e]) (selected[e] ? k.tp : k.fn)++;
    else (selected[e] ? k.fp : k.tn)++;
  }
  return k;
}

struct SweepRow {
  std::size_t group;
  double kappa;
  double tpr, fpr, mcc;
};

inline std::vector<SweepRow> threshold_sweep(const ChainTrace& trace,
                                             const std::vector<std::vector<bool>>& truth,
                                             const std::vector<double>& kappas) {
  if (truth.size() != trace.num_groups) throw DomainError("one truth per group is required");
  std::vector<SweepRow> rows;
  for (double k : kappas) {
    const EdgeReport r = select_edges(trace, k);
    for (std::size_t c = 0; c < trace.num_groups; ++c) {
      const Confusion conf = confusion(r.group_adjacency(c), truth[c]);
      rows.push_back({c, k, conf.tpr(), conf.fpr(), conf.mcc()});
    }
  }
  return rows;
}

// Worker count: NEXUS_THREADS if set and positive, otherwise hardware
// concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("NEXUS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, count) on up to `workers` threads. The first
// exception is rethrown after all workers join.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (n == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct BenchmarkConfig {
  std::size_t p = 20;
  std::vector<double> n = sim::default_sample_sizes();
  Hyperparameters hyper = Hyperparameters::simulation_defaults(50.0);
  std::uint64_t seed = 1;
  bool run_independent = true;
  unsigned workers = 0;  // 0: worker_count()
};

struct ReplicateResult {
  std::vector<double> auc;             // per group
  std::vector<double> shared_auc;      // per group pair
  std::vector<double> auc_independent;
  std::vector<double> shared_auc_independent;
  std::vector<double> truth_shared_proportion;  // per group pair
  double min_cholesky_pivot = 0.0;
};

struct ColumnSummary {
  double mean = 0.0;
  double sd = 0.0;
};

inline std::vector<ColumnSummary> summarize(const std::vector<ReplicateResult>& reps,
                                            std::vector<double> ReplicateResult::*field) {
  if (reps.empty() || (reps.front().*field).empty()) return {};
  const std::size_t k = (reps.front().*field).size();
  std::vector<ColumnSummary> out(k);
  const double r = static_cast<double>(reps.size());
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (const auto& rep : reps) s += (rep.*field)[j];
    const double mean = s / r;
    double ss = 0.0;
    for (const auto& rep : reps) ss += ((rep.*field)[j] - mean) * ((rep.*field)[j] - mean);
    out[j] = {mean, reps.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0};
  }
  return out;
}

struct BenchmarkSummary {
  std::vector<ReplicateResult> replicates;
  std::vector<ColumnSummary> auc, shared_auc, auc_independent, shared_auc_independent;
};

inline std::vector<std::vector<double>> scores_by_group(const ChainTrace& trace) {
  return ScoreSet::from_trace(trace, {}).scores;
}

// One replicate on stream rng: truths, data, joint fit, optional
// independent fit, scores.
inline ReplicateResult run_replicate(const BenchmarkConfig& cfg, const Rng& rng) {
  Rng truth_rng = rng.derive(0);
  Rng data_rng = rng.derive(1);
  const sim::SimTruth truth = sim::make_truths(truth_rng, cfg.p);
  const PanDataset data = sim::generate_dataset(data_rng, truth.thetas, cfg.n);
  const SamplerInputs inputs = SamplerInputs::from_dataset(data, cfg.hyper);

  ReplicateResult res;
  const auto pairs = all_pairs(truth.thetas.size());
  for (const auto& [a, b] : pairs) res.truth_shared_proportion.push_back(truth.shared_proportion(a, b));

  auto score = [&](const ChainTrace& trace, std::vector<double>& auc, std::vector<double>& shared) {
    const auto s = scores_by_group(trace);
    for (std::size_t c = 0; c < s.size(); ++c) auc.push_back(roc_auc(s[c], truth.adjacency[c]));
    for (const auto& [a, b] : pairs)
      shared.push_back(shared_edge_auc(s[a], s[b], truth.adjacency[a], truth.adjacency[b]));
  };

  Hyperparameters joint = cfg.hyper;
  joint.independent_mode = false;
  const ChainTrace jt = run_chain(inputs, joint, rng.derive(2));
  res.min_cholesky_pivot = jt.min_cholesky_pivot;
  score(jt, res.auc, res.shared_auc);
  if (cfg.run_independent) {
    Hyperparameters ind = cfg.hyper;
    ind.independent_mode = true;
    const ChainTrace it = run_chain(inputs, ind, rng.derive(3));
    score(it, res.auc_independent, res.shared_auc_independent);
  }
  return res;
}

// Replicate r runs on Rng(seed).derive(r); results are reduced in replicate
// order, so the summary does not depend on the worker count.
inline BenchmarkSummary replicate_experiment(const BenchmarkConfig& cfg, std::size_t n_replicates) {
  cfg.hyper.validate();
  if (n_replicates == 0) throw DomainError("at least one replicate is required");
  BenchmarkSummary out;
  out.replicates.resize(n_replicates);
  const Rng master(cfg.seed);
  parallel_for(n_replicates, cfg.workers ? cfg.workers : worker_count(),
               [&](std::size_t r) { out.replicates[r] = run_replicate(cfg, master.derive(r)); });
  out.auc = summarize(out.replicates, &ReplicateResult::auc);
  out.shared_auc = summarize(out.replicates, &ReplicateResult::shared_auc);
  out.auc_independent = summarize(out.replicates, &ReplicateResult::auc_independent);
  out.shared_auc_independent = summarize(out.replicates, &ReplicateResult::shared_auc_independent);
  return out;
}

}  // namespace nexus::eval
