#pragma once

// Command-line surface. Settings resolve in three layers: built-in defaults,
// then a JSON config file (--config), then explicitly given flags. Config
// keys are named after the Hyperparameters fields.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/evaluation.hpp"
#include "nexus/io.hpp"
#include "nexus/model.hpp"
#include "nexus/posterior.hpp"
#include "nexus/sampler.hpp"
#include "nexus/simulation.hpp"

namespace nexus::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct RunConfig {
  Hyperparameters hyper;
  bool beta1_given = false;
  bool beta2_given = false;
  std::string manifest;
  std::string trace;
  std::string annotation;
  std::string output = "nexus_out";
  std::size_t replicates = 10;
  std::size_t p = 20;
  std::vector<double> n;
  std::vector<double> deltas;
  std::optional<bool> scale;  // unset: on for fit, off for simulated data
  bool full_trace = false;
  bool run_independent = true;
};

inline void apply_json(RunConfig& cfg, const Json& j) {
  auto& h = cfg.hyper;
  for (const auto& [key, val] : j.items()) {
    if (key == "alpha1") h.alpha1 = val.get<double>();
    else if (key == "beta1") { h.beta1 = val.get<double>(); cfg.beta1_given = true; }
    else if (key == "alpha2") h.alpha2 = val.get<double>();
    else if (key == "beta2") { h.beta2 = val.get<double>(); cfg.beta2_given = true; }
    else if (key == "alpha_gamma") h.alpha_gamma = val.get<double>();
    else if (key == "beta_gamma") h.beta_gamma = val.get<double>();
    else if (key == "delta") h.delta = val.get<double>();
    else if (key == "kappa") h.kappa = val.get<double>();
    else if (key == "n_iterations") h.n_iterations = val.get<std::size_t>();
    else if (key == "n_burnin") h.n_burnin = val.get<std::size_t>();
    else if (key == "seed") h.seed = val.get<std::uint64_t>();
    else if (key == "independent_mode") h.independent_mode = val.get<bool>();
    else if (key == "manifest") cfg.manifest = val.get<std::string>();
    else if (key == "trace") cfg.trace = val.get<std::string>();
    else if (key == "annotation") cfg.annotation = val.get<std::string>();
    else if (key == "output") cfg.output = val.get<std::string>();
    else if (key == "replicates") cfg.replicates = val.get<std::size_t>();
    else if (key == "p") cfg.p = val.get<std::size_t>();
    else if (key == "n") cfg.n = val.get<std::vector<double>>();
    else if (key == "deltas") cfg.deltas = val.get<std::vector<double>>();
    else if (key == "scale") cfg.scale = val.get<bool>();
    else if (key == "full_trace") cfg.full_trace = val.get<bool>();
    else if (key == "run_independent") cfg.run_independent = val.get<bool>();
    else throw DomainError("unknown config key '" + key + "'");
  }
}

// Everything that influences results; the output directory is excluded so
// identical runs into different directories hash identically.
inline Json to_json(const RunConfig& cfg, const std::string& mode) {
  const auto& h = cfg.hyper;
  Json j;
  j["mode"] = mode;
  j["alpha1"] = h.alpha1;
  j["beta1"] = h.beta1;
  j["alpha2"] = h.alpha2;
  j["beta2"] = h.beta2;
  j["alpha_gamma"] = h.alpha_gamma;
  j["beta_gamma"] = h.beta_gamma;
  j["delta"] = h.delta;
  j["kappa"] = h.kappa;
  j["n_iterations"] = h.n_iterations;
  j["n_burnin"] = h.n_burnin;
  j["seed"] = h.seed;
  j["independent_mode"] = h.independent_mode;
  if (!cfg.manifest.empty()) j["manifest"] = cfg.manifest;
  if (!cfg.trace.empty()) j["trace"] = cfg.trace;
  if (!cfg.annotation.empty()) j["annotation"] = cfg.annotation;
  j["replicates"] = cfg.replicates;
  j["p"] = cfg.p;
  j["n"] = cfg.n;
  if (!cfg.deltas.empty()) j["deltas"] = cfg.deltas;
  if (cfg.scale) j["scale"] = *cfg.scale;
  j["full_trace"] = cfg.full_trace;
  j["run_independent"] = cfg.run_independent;
  return j;
}

inline std::string config_hash(const Json& j) { return io::fnv1a_hex(j.dump()); }

inline std::string file_label(const std::string& label) {
  std::string out;
  for (char ch : label)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
  return out.empty() ? "group" : out;
}

inline void write_metadata(const fs::path& dir, const Json& config, const std::string& hash,
                           Json extra, double wall_seconds) {
  Json meta;
  meta["config"] = config;
  meta["config_hash"] = hash;
  meta["seed"] = config.at("seed");
  meta["n_iterations"] = config.at("n_iterations");
  meta["n_burnin"] = config.at("n_burnin");
  for (auto& [k, v] : extra.items()) meta[k] = v;
  io::write_text(dir / "run_metadata.json", meta.dump(2) + "\n");
  Json timing;
  timing["config_hash"] = hash;
  timing["wall_seconds"] = wall_seconds;
  io::write_text(dir / "timing.json", timing.dump(2) + "\n");
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<std::string> group_file_labels(const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(file_label(l));
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int run_simulate(RunConfig cfg, std::ostream& out) {
  if (cfg.n.empty()) cfg.n = sim::default_sample_sizes();
  if (cfg.n.size() != 4) throw DomainError("simulate builds four groups; --n needs 4 sizes");
  const Json conf = to_json(cfg, "simulate");
  const std::string hash = config_hash(conf);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  Stopwatch clock;

  const Rng master(cfg.hyper.seed);
  Rng truth_rng = master.derive(0);
  Rng data_rng = master.derive(1);
  const sim::SimTruth truth = sim::make_truths(truth_rng, cfg.p);
  const PanDataset data = sim::generate_dataset(data_rng, truth.thetas, cfg.n);
  const auto& names = data.variable_names();

  io::CsvWriter manifest(dir / "manifest.csv", hash, {"label", "path"});
  io::CsvWriter edges(dir / "truth_edges.csv", hash, {"group", "i", "j", "var_i", "var_j", "value"});
  for (std::size_t c = 0; c < data.num_groups(); ++c) {
    const std::string label = data.group(c).label;
    io::write_matrix_csv(dir / ("data_" + label + ".csv"), data.group(c).data, names, hash);
    io::write_matrix_csv(dir / ("truth_theta_" + label + ".csv"), truth.thetas[c], names, hash);
    manifest.row({label, "data_" + label + ".csv"});
    for (std::size_t e = 0; e < truth.adjacency[c].size(); ++e) {
      if (!truth.adjacency[c][e]) continue;
      const auto [i, j] = pair_from_index(e, cfg.p);
      edges.row({label, std::to_string(i + 1), std::to_string(j + 1), names[i], names[j],
                 io::format_double(truth.thetas[c](i, j))});
    }
  }
  io::CsvWriter shared(dir / "truth_shared.csv", hash, {"group_a", "group_b", "shared_proportion"});
  for (const auto& [a, b] : all_pairs(4))
    shared.row({data.group(a).label, data.group(b).label,
                io::format_double(truth.shared_proportion(a, b))});
  write_metadata(dir, conf, hash, Json::object(), clock.seconds());
  out << "simulate: wrote " << data.num_groups() << " groups (p=" << cfg.p << ") to "
      << dir.string() << "\n";
  return 0;
}

inline void write_fit_products(const fs::path& dir, const io::SavedTrace& saved, double kappa,
                               const std::string& hash) {
  const auto labels = group_file_labels(saved.group_labels);
  const EdgeReport report = select_edges(saved.trace, kappa);
  io::write_edge_reports(dir, report, saved.trace, labels, saved.variable_names, hash);
  io::write_heatmap(dir / "heatmap.csv", edge_probability_heatmap_data(report), saved.group_labels,
                    saved.variable_names, saved.trace.p, hash);
}

inline int run_fit(RunConfig cfg, std::ostream& out, std::ostream& err) {
  if (cfg.manifest.empty()) throw DomainError("fit needs --manifest");
  const PanDataset data = io::load_dataset(cfg.manifest, cfg.scale.value_or(true));
  const auto n = data.sample_sizes();
  const double nbar = mean_of(n);
  const auto defaults = Hyperparameters::simulation_defaults(nbar);
  if (!cfg.beta1_given) cfg.hyper.beta1 = defaults.beta1;
  if (!cfg.beta2_given) cfg.hyper.beta2 = defaults.beta2;
  cfg.n = n;
  cfg.hyper.validate();
  const Json conf = to_json(cfg, "fit");
  const std::string hash = config_hash(conf);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  Stopwatch clock;

  RunOptions opt;
  opt.keep_theta_draws = cfg.full_trace;
  io::SavedTrace saved;
  saved.trace = run_chain(data, cfg.hyper, opt);
  for (const auto& g : data.groups()) saved.group_labels.push_back(g.label);
  saved.variable_names = data.variable_names();
  saved.config_hash = hash;
  saved.config = conf;
  io::save_trace(dir / "trace.json", saved);
  write_fit_products(dir, saved, cfg.hyper.kappa, hash);
  if (!saved.trace.independent_mode && data.num_groups() > 1) {
    const SimilarityReport sim = network_similarity(saved.trace);
    if (!sim.warning.empty()) err << "warning: " << sim.warning << "\n";
    io::write_similarity(dir / "similarity.csv", sim, saved.group_labels, hash);
  }
  Json extra;
  extra["groups"] = saved.group_labels;
  extra["sample_sizes"] = n;
  extra["p"] = data.num_variables();
  extra["n_retained"] = saved.trace.n_retained;
  extra["min_cholesky_pivot"] = saved.trace.min_cholesky_pivot;
  write_metadata(dir, conf, hash, extra, clock.seconds());
  out << "fit: " << data.num_groups() << " groups, p=" << data.num_variables() << ", "
      << saved.trace.n_retained << " retained draws -> " << dir.string() << "\n";
  return 0;
}

inline io::SavedTrace require_trace(const RunConfig& cfg) {
  if (cfg.trace.empty()) throw DomainError("this command needs --trace");
  return io::load_trace(cfg.trace);
}

// Derived commands hash their own settings together with the source trace.
inline std::string derived_hash(const io::SavedTrace& saved, const Json& conf) {
  return io::fnv1a_hex(saved.config_hash + conf.dump());
}

inline int run_select(RunConfig cfg, bool kappa_given, std::ostream& out) {
  const io::SavedTrace saved = require_trace(cfg);
  const double kappa = kappa_given ? cfg.hyper.kappa : saved.trace.kappa;
  Json conf = {{"mode", "select"}, {"kappa", kappa}, {"trace_config_hash", saved.config_hash}};
  const std::string hash = derived_hash(saved, conf);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  write_fit_products(dir, saved, kappa, hash);
  out << "select: kappa=" << kappa << " -> " << dir.string() << "\n";
  return 0;
}

inline int run_similarity(RunConfig cfg, std::ostream& out, std::ostream& err) {
  const io::SavedTrace saved = require_trace(cfg);
  Json conf = {{"mode", "similarity"}, {"trace_config_hash", saved.config_hash}};
  const std::string hash = derived_hash(saved, conf);
  const SimilarityReport sim = network_similarity(saved.trace);
  if (!sim.warning.empty()) err << "warning: " << sim.warning << "\n";
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  io::write_similarity(dir / "similarity.csv", sim, saved.group_labels, hash);
  out << "similarity: " << sim.pairs.size() << " pairs -> " << dir.string() << "\n";
  return 0;
}

inline int run_pathways(RunConfig cfg, bool kappa_given, std::ostream& out, std::ostream& err) {
  const io::SavedTrace saved = require_trace(cfg);
  if (cfg.annotation.empty()) throw DomainError("pathways needs --annotation");
  const PathwayAnnotation ann = io::load_annotation(cfg.annotation, saved.variable_names);
  const double kappa = kappa_given ? cfg.hyper.kappa : saved.trace.kappa;
  Json conf = {{"mode", "pathways"},
               {"kappa", kappa},
               {"annotation", cfg.annotation},
               {"trace_config_hash", saved.config_hash}};
  const std::string hash = derived_hash(saved, conf);
  const EdgeReport report = select_edges(saved.trace, kappa);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  io::CsvWriter w(dir / "pathways.csv", hash, io::pathway_header());
  std::vector<std::string> warnings;
  for (const auto& [a, b] : all_pairs(saved.trace.num_groups)) {
    const PathwayTable t = pathway_shared_proportions(report.group_adjacency(a),
                                                      report.group_adjacency(b), saved.trace.p, ann);
    io::write_pathway_rows(w, t, ann, saved.group_labels[a], saved.group_labels[b]);
    if (warnings.empty()) warnings = t.warnings;
  }
  for (const auto& wmsg : warnings) err << "warning: " << wmsg << "\n";
  out << "pathways: " << ann.pathways.size() << " pathways -> " << dir.string() << "\n";
  return 0;
}

inline int run_benchmark(RunConfig cfg, std::ostream& out) {
  if (cfg.n.empty()) cfg.n = sim::default_sample_sizes();
  const double nbar = mean_of(cfg.n);
  const auto defaults = Hyperparameters::simulation_defaults(nbar);
  if (!cfg.beta1_given) cfg.hyper.beta1 = defaults.beta1;
  if (!cfg.beta2_given) cfg.hyper.beta2 = defaults.beta2;
  cfg.hyper.validate();
  const Json conf = to_json(cfg, "benchmark");
  const std::string hash = config_hash(conf);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);
  Stopwatch clock;

  eval::BenchmarkConfig bc;
  bc.p = cfg.p;
  bc.n = cfg.n;
  bc.hyper = cfg.hyper;
  bc.seed = cfg.hyper.seed;
  bc.run_independent = cfg.run_independent;
  const eval::BenchmarkSummary s = eval::replicate_experiment(bc, cfg.replicates);

  const std::size_t C = cfg.n.size();
  std::vector<std::string> group_names, pair_names;
  for (std::size_t c = 0; c < C; ++c) group_names.push_back("C" + std::to_string(c + 1));
  for (const auto& [a, b] : all_pairs(C)) pair_names.push_back(group_names[a] + "-" + group_names[b]);

  auto table = [&](const fs::path& file, const std::vector<std::string>& cols,
                   const std::vector<std::pair<std::string, const std::vector<eval::ColumnSummary>*>>& rows) {
    std::vector<std::string> header{"method"};
    for (const auto& c : cols) {
      header.push_back(c + "_mean");
      header.push_back(c + "_sd");
    }
    io::CsvWriter w(file, hash, header);
    for (const auto& [name, summary] : rows) {
      if (summary->empty()) continue;
      std::vector<std::string> row{name};
      for (const auto& cs : *summary) {
        row.push_back(io::format_double(cs.mean));
        row.push_back(io::format_double(cs.sd));
      }
      w.row(row);
    }
  };
  table(dir / "table1.csv", group_names,
        {{"joint", &s.auc}, {"independent", &s.auc_independent}});
  table(dir / "table2.csv", pair_names,
        {{"joint", &s.shared_auc}, {"independent", &s.shared_auc_independent}});

  io::CsvWriter reps(dir / "replicates.csv", hash, {"replicate", "method", "metric", "column", "auc"});
  for (std::size_t r = 0; r < s.replicates.size(); ++r) {
    const auto& rep = s.replicates[r];
    auto emit = [&](const char* method, const char* metric, const std::vector<double>& v,
                    const std::vector<std::string>& cols) {
      for (std::size_t k = 0; k < v.size(); ++k)
        reps.row({std::to_string(r), method, metric, cols[k], io::format_double(v[k])});
    };
    emit("joint", "per_graph", rep.auc, group_names);
    emit("joint", "shared_edge", rep.shared_auc, pair_names);
    emit("independent", "per_graph", rep.auc_independent, group_names);
    emit("independent", "shared_edge", rep.shared_auc_independent, pair_names);
  }
  write_metadata(dir, conf, hash, Json::object(), clock.seconds());

  out << "benchmark: " << cfg.replicates << " replicates\n  per-graph AUC (joint):";
  for (const auto& cs : s.auc) out << ' ' << cs.mean;
  out << "\n  shared-edge AUC (joint):";
  for (const auto& cs : s.shared_auc) out << ' ' << cs.mean;
  out << "\n";
  return 0;
}

inline int run_prior_curves(RunConfig cfg, std::ostream& out) {
  if (cfg.n.empty()) cfg.n = {50, 100, 200};
  if (cfg.deltas.empty())
    for (int k = 0; k <= 20; ++k) cfg.deltas.push_back(k / 20.0);
  const double nbar = mean_of(cfg.n);
  const auto defaults = Hyperparameters::simulation_defaults(nbar);
  if (!cfg.beta1_given) cfg.hyper.beta1 = defaults.beta1;
  if (!cfg.beta2_given) cfg.hyper.beta2 = defaults.beta2;
  const Json conf = to_json(cfg, "prior-curves");
  const std::string hash = config_hash(conf);
  const auto rows = prior_mean_curves(cfg.n, cfg.deltas, cfg.hyper);
  const fs::path dir = cfg.output;
  io::ensure_directory(dir);

  const std::size_t C = cfg.n.size();
  std::vector<std::string> header{"delta"};
  for (std::size_t c = 0; c < C; ++c) header.push_back("lambda1_sq_G" + std::to_string(c + 1));
  for (const auto& [a, b] : all_pairs(C))
    header.push_back("lambda2_sq_G" + std::to_string(a + 1) + "_G" + std::to_string(b + 1));
  io::CsvWriter w(dir / "prior_curves.csv", hash, header);
  for (const auto& r : rows) {
    std::vector<std::string> row{io::format_double(r.delta)};
    for (double v : r.lambda1_sq) row.push_back(io::format_double(v));
    for (double v : r.lambda2_sq) row.push_back(io::format_double(v));
    w.row(row);
  }
  out << "prior-curves: " << rows.size() << " delta values -> " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline void print_error(std::ostream& err, const char* kind, const std::string& message) {
  std::string flat = message;
  for (char& ch : flat)
    if (ch == '\n') ch = ' ';
  err << "error: kind=" << kind << " message=" << Json(flat).dump() << "\n";
}

// Returns the process exit code: 0 on success, 2 for usage errors, 1 for
// runtime failures. Failures print one "error: kind=... message=..." line.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app{"Joint estimation of sparse Gaussian graphical models across groups of unequal size",
               "nexus"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", flags.output, "output directory");
    overrides.emplace_back(sub->get_option("--out"), [&](RunConfig& c) { c.output = flags.output; });
  };
  auto add = [&](CLI::App* sub, const std::string& name, auto& field, const std::string& help,
                 std::function<void(RunConfig&)> apply) {
    overrides.emplace_back(sub->add_option(name, field, help), std::move(apply));
  };
  auto hyper_flags = [&](CLI::App* sub) {
    auto& h = flags.hyper;
    add(sub, "--alpha1", h.alpha1, "shape of the lambda1^2 prior", [&](RunConfig& c) { c.hyper.alpha1 = h.alpha1; });
    add(sub, "--beta1", h.beta1, "rate scale of the lambda1^2 prior (default 0.1 nbar^2)",
        [&](RunConfig& c) { c.hyper.beta1 = h.beta1; c.beta1_given = true; });
    add(sub, "--alpha2", h.alpha2, "shape of the lambda2^2 prior", [&](RunConfig& c) { c.hyper.alpha2 = h.alpha2; });
    add(sub, "--beta2", h.beta2, "rate scale of the lambda2^2 prior (default nbar^2)",
        [&](RunConfig& c) { c.hyper.beta2 = h.beta2; c.beta2_given = true; });
    add(sub, "--alpha-gamma", h.alpha_gamma, "shape of the gamma prior", [&](RunConfig& c) { c.hyper.alpha_gamma = h.alpha_gamma; });
    add(sub, "--beta-gamma", h.beta_gamma, "rate of the gamma prior", [&](RunConfig& c) { c.hyper.beta_gamma = h.beta_gamma; });
    add(sub, "--delta", h.delta, "sample-size correction strength in [0,1]", [&](RunConfig& c) { c.hyper.delta = h.delta; });
    add(sub, "--iterations", h.n_iterations, "MCMC iterations", [&](RunConfig& c) { c.hyper.n_iterations = h.n_iterations; });
    add(sub, "--burnin", h.n_burnin, "burn-in iterations", [&](RunConfig& c) { c.hyper.n_burnin = h.n_burnin; });
    add(sub, "--seed", h.seed, "master seed", [&](RunConfig& c) { c.hyper.seed = h.seed; });
    overrides.emplace_back(sub->add_flag("--independent", h.independent_mode, "fit each group separately"),
                           [&](RunConfig& c) { c.hyper.independent_mode = h.independent_mode; });
  };
  std::vector<CLI::Option*> kappa_opts;
  auto kappa_flag = [&](CLI::App* sub) {
    auto* o = sub->add_option("--kappa", flags.hyper.kappa, "partial-correlation cut-off");
    overrides.emplace_back(o, [&](RunConfig& c) { c.hyper.kappa = flags.hyper.kappa; });
    kappa_opts.push_back(o);
  };
  auto n_flag = [&](CLI::App* sub, const std::string& help) {
    add(sub, "--n", flags.n, help, [&](RunConfig& c) { c.n = flags.n; });
    sub->get_option("--n")->delimiter(',');
  };

  auto* simulate = app.add_subcommand("simulate", "generate the four-group benchmark truths and data");
  common(simulate);
  add(simulate, "--seed", flags.hyper.seed, "master seed", [&](RunConfig& c) { c.hyper.seed = flags.hyper.seed; });
  add(simulate, "--p", flags.p, "number of variables", [&](RunConfig& c) { c.p = flags.p; });
  n_flag(simulate, "sample sizes, comma separated (default 20,40,60,80)");

  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler on a dataset manifest");
  common(fit);
  hyper_flags(fit);
  kappa_flag(fit);
  add(fit, "--manifest", flags.manifest, "CSV manifest with label,path columns",
      [&](RunConfig& c) { c.manifest = flags.manifest; });
  bool no_scale = false;
  overrides.emplace_back(fit->add_flag("--no-scale", no_scale, "center only; skip unit-variance scaling"),
                         [&](RunConfig& c) { c.scale = !no_scale; });
  overrides.emplace_back(fit->add_flag("--full-trace", flags.full_trace, "retain every precision draw"),
                         [&](RunConfig& c) { c.full_trace = flags.full_trace; });

  auto* select = app.add_subcommand("select", "edge reports from a saved trace");
  common(select);
  kappa_flag(select);
  add(select, "--trace", flags.trace, "trace.json from fit", [&](RunConfig& c) { c.trace = flags.trace; });

  auto* similarity = app.add_subcommand("similarity", "NSI, NNSI and L1 distances from a saved trace");
  common(similarity);
  add(similarity, "--trace", flags.trace, "trace.json from fit", [&](RunConfig& c) { c.trace = flags.trace; });

  auto* pathways = app.add_subcommand("pathways", "shared-edge proportions within and across pathways");
  common(pathways);
  kappa_flag(pathways);
  add(pathways, "--trace", flags.trace, "trace.json from fit", [&](RunConfig& c) { c.trace = flags.trace; });
  add(pathways, "--annotation", flags.annotation, "one pathway per line: name,var,var,...",
      [&](RunConfig& c) { c.annotation = flags.annotation; });

  auto* benchmark = app.add_subcommand("benchmark", "replicated simulation study with AUC tables");
  common(benchmark);
  hyper_flags(benchmark);
  add(benchmark, "--replicates", flags.replicates, "number of replicates (default 10)",
      [&](RunConfig& c) { c.replicates = flags.replicates; });
  add(benchmark, "--p", flags.p, "number of variables", [&](RunConfig& c) { c.p = flags.p; });
  n_flag(benchmark, "sample sizes, comma separated (default 20,40,60,80)");
  bool no_baseline = false;
  overrides.emplace_back(benchmark->add_flag("--no-independent", no_baseline, "skip the independent baseline"),
                         [&](RunConfig& c) { c.run_independent = !no_baseline; });

  auto* prior = app.add_subcommand("prior-curves", "prior means of the shrinkage parameters over delta");
  common(prior);
  n_flag(prior, "sample sizes, comma separated (default 50,100,200)");
  add(prior, "--deltas", flags.deltas, "delta grid, comma separated (default 0,0.05,...,1)",
      [&](RunConfig& c) { c.deltas = flags.deltas; });
  prior->get_option("--deltas")->delimiter(',');
  add(prior, "--alpha1", flags.hyper.alpha1, "shape of the lambda1^2 prior", [&](RunConfig& c) { c.hyper.alpha1 = flags.hyper.alpha1; });
  add(prior, "--beta1", flags.hyper.beta1, "rate scale of the lambda1^2 prior",
      [&](RunConfig& c) { c.hyper.beta1 = flags.hyper.beta1; c.beta1_given = true; });
  add(prior, "--alpha2", flags.hyper.alpha2, "shape of the lambda2^2 prior", [&](RunConfig& c) { c.hyper.alpha2 = flags.hyper.alpha2; });
  add(prior, "--beta2", flags.hyper.beta2, "rate scale of the lambda2^2 prior",
      [&](RunConfig& c) { c.hyper.beta2 = flags.hyper.beta2; c.beta2_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    err << app.help();
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config " + config_path);
      Json j;
      try {
        in >> j;
      } catch (const Json::exception& e) {
        throw IngestionError(config_path + ": " + e.what());
      }
      try {
        apply_json(cfg, j);
      } catch (const Json::exception& e) {
        throw IngestionError(config_path + ": " + e.what());
      }
    }
    for (const auto& [opt, apply] : overrides)
      if (opt && opt->count() > 0) apply(cfg);
    bool kappa_given = !config_path.empty() && cfg.hyper.kappa != Hyperparameters{}.kappa;
    for (auto* o : kappa_opts) kappa_given = kappa_given || o->count() > 0;

    if (*simulate) return run_simulate(cfg, out);
    if (*fit) return run_fit(cfg, out, err);
    if (*select) return run_select(cfg, kappa_given, out);
    if (*similarity) return run_similarity(cfg, out, err);
    if (*pathways) return run_pathways(cfg, kappa_given, out, err);
    if (*benchmark) return run_benchmark(cfg, out);
    if (*prior) return run_prior_curves(cfg, out);
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "error", e.what());
    return 1;
  }
  return 1;
}

}  // namespace nexus::cli
