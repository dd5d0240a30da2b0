#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nexus/cli.hpp"

using namespace nexus;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nexus_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "nexus");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string without_hash(const std::string& text) { return text.substr(text.find('\n') + 1); }

std::size_t data_rows(const fs::path& csv) { return io::read_csv(csv).rows.size(); }

}  // namespace

TEST(Csv, DoubleRoundTrip) {
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, 20.0 * rng.uniform() - 10.0);
    const double back = io::parse_real(io::format_double(v), "x", 1, 0);
    EXPECT_NEAR(back, v, std::abs(v) * 1e-12);
  }
}

TEST(Csv, QuotedFields) {
  EXPECT_EQ(io::split_csv_line("a,\"b,c\",\"d\"\"e\""), (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(io::csv_field("x,y"), "\"x,y\"");
}

TEST(LoadDataset, TwoGroups) {
  const auto dir = scratch("load_ok");
  write(dir / "a.csv", "u,v\n1,2\n3,4\n5,9\n");
  write(dir / "b.csv", "u,v\n0,0\n1,1\n2,5\n");
  write(dir / "m.csv", "label,path\nA,a.csv\nB,b.csv\n");
  const auto d = io::load_dataset(dir / "m.csv", false);
  EXPECT_EQ(d.num_groups(), 2u);
  EXPECT_EQ(d.num_variables(), 2u);
  EXPECT_EQ(d.variable_names(), (std::vector<std::string>{"u", "v"}));
  EXPECT_EQ(d.group(1).label, "B");
}

TEST(LoadDataset, MismatchedHeadersNameBothFiles) {
  const auto dir = scratch("load_hdr");
  write(dir / "a.csv", "u,v\n1,2\n3,4\n");
  write(dir / "b.csv", "u,w\n1,2\n3,4\n");
  write(dir / "m.csv", "label,path\nA,a.csv\nB,b.csv\n");
  try {
    io::load_dataset(dir / "m.csv", false);
    FAIL();
  } catch (const IngestionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a.csv"), std::string::npos);
    EXPECT_NE(msg.find("b.csv"), std::string::npos);
  }
}

TEST(LoadDataset, EmptyCellNamesRow) {
  const auto dir = scratch("load_empty");
  write(dir / "a.csv", "u,v\n1,2\n3,\n5,6\n");
  write(dir / "m.csv", "label,path\nA,a.csv\n");
  try {
    io::load_dataset(dir / "m.csv", false);
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("a.csv:3"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, RaggedNonNumericAndTooFewRows) {
  const auto dir = scratch("load_bad");
  write(dir / "ragged.csv", "u,v\n1,2\n3\n");
  write(dir / "text.csv", "u,v\n1,2\n3,abc\n");
  write(dir / "one.csv", "u,v\n1,2\n");
  for (const char* f : {"ragged.csv", "text.csv", "one.csv"}) {
    write(dir / "m.csv", std::string("label,path\nA,") + f + "\n");
    EXPECT_THROW(io::load_dataset(dir / "m.csv", false), IngestionError) << f;
  }
  EXPECT_THROW(io::load_dataset(dir / "missing.csv", false), IoError);
}

TEST(Annotation, ParsesAndRejectsUnknown) {
  const auto dir = scratch("ann");
  write(dir / "ok.txt", "# comment\nP1,u,v\n\nP2,w\n");
  const auto ann = io::load_annotation(dir / "ok.txt", {"u", "v", "w"});
  ASSERT_EQ(ann.pathways.size(), 2u);
  EXPECT_EQ(ann.pathways[0].members, (std::set<std::size_t>{0, 1}));
  write(dir / "bad.txt", "P1,u,zz\n");
  EXPECT_THROW(io::load_annotation(dir / "bad.txt", {"u", "v"}), IngestionError);
}

TEST(Persist, TraceRoundTrip) {
  Rng rng(2);
  const auto truth = sim::make_truths(rng);
  Rng drng(3);
  const auto data = sim::generate_dataset(drng, {truth.thetas[0], truth.thetas[1]}, {20, 40});
  auto h = Hyperparameters::simulation_defaults(30);
  h.n_iterations = 60;
  h.n_burnin = 20;
  RunOptions opt;
  opt.keep_theta_draws = true;
  io::SavedTrace s{run_chain(data, h, opt), {"C1", "C2"}, data.variable_names(), "abc", {{"k", 1}}};
  const auto dir = scratch("trace");
  io::save_trace(dir / "t.json", s);
  const auto back = io::load_trace(dir / "t.json");
  const auto& a = s.trace;
  const auto& b = back.trace;
  EXPECT_EQ(b.exceed_counts, a.exceed_counts);
  EXPECT_EQ(b.mean_partial_corr, a.mean_partial_corr);
  EXPECT_EQ(b.lambda1_sq_draws, a.lambda1_sq_draws);
  EXPECT_EQ(b.lambda2_sq_draws, a.lambda2_sq_draws);
  EXPECT_EQ(b.gamma_draws, a.gamma_draws);
  EXPECT_EQ(b.mean_theta[1], a.mean_theta[1]);
  EXPECT_EQ(b.theta_draws.size(), a.theta_draws.size());
  EXPECT_EQ(b.theta_draws[5][1], a.theta_draws[5][1]);
  EXPECT_EQ(back.group_labels, s.group_labels);
  EXPECT_EQ(back.config_hash, "abc");
  write(dir / "junk.json", "{\"format\": \"other\"}");
  EXPECT_THROW(io::load_trace(dir / "junk.json"), IngestionError);
}

TEST(Persist, EmptySelectionAndSimilarityRows) {
  const auto dir = scratch("persist");
  EdgeReport r;
  r.num_groups = 1;
  r.p = 3;
  r.inclusion_prob = {0.1, 0.2, 0.3};
  r.adjacency = {false, false, false};
  io::write_selected_edges(dir / "sel.csv", r, 0, {"a", "b", "c"}, "h");
  const auto t = io::read_csv(dir / "sel.csv");
  EXPECT_TRUE(t.rows.empty());
  EXPECT_EQ(t.header.size(), 5u);
  EXPECT_EQ(t.comments, (std::vector<std::string>{"# config_hash=h"}));

  SimilarityReport s;
  s.pairs = all_pairs(4);
  s.nsi = {1, 2, 3, 4, 5, 6};
  s.nnsi = normalize_min_max(s.nsi);
  s.l1_distance.assign(6, 0.5);
  io::write_similarity(dir / "sim.csv", s, {"A", "B", "C", "D"}, "h");
  EXPECT_EQ(data_rows(dir / "sim.csv"), 6u);
}

TEST(Cli, UnknownSubcommand) {
  const auto r = run({"frobnicate"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error: kind=usage", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("Subcommands"), std::string::npos) << r.err;
  EXPECT_NE(run({}).code, 0);
}

TEST(Cli, RuntimeErrorIsOneParsableLine) {
  const auto r = run({"fit", "--manifest", "/nonexistent/m.csv", "--out", scratch("cli_err").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: kind=io message=\"", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  const auto d = run({"prior-curves", "--deltas", "0.5,2", "--out", scratch("cli_err2").string()});
  EXPECT_EQ(d.code, 1);
  EXPECT_EQ(d.err.rfind("error: kind=domain", 0), 0u) << d.err;
}

TEST(Cli, PriorCurvesOrderings) {
  const auto dir = scratch("curves");
  const auto r = run({"prior-curves", "--n", "50,100,200", "--deltas", "0,0.3,1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = io::read_csv(dir / "prior_curves.csv");
  ASSERT_EQ(t.rows.size(), 3u);
  ASSERT_EQ(t.header.size(), 7u);
  auto v = [&](std::size_t row, std::size_t col) { return std::stod(t.rows[row][col]); };
  for (std::size_t row : {0u, 1u}) {
    EXPECT_LT(v(row, 1), v(row, 2));
    EXPECT_LT(v(row, 2), v(row, 3));
    EXPECT_LT(v(row, 4), v(row, 5));
    EXPECT_LT(v(row, 5), v(row, 6));
  }
  for (std::size_t col = 2; col <= 3; ++col) EXPECT_NEAR(v(2, col), v(2, 1), 1e-12 * v(2, 1));
  for (std::size_t col = 5; col <= 6; ++col) EXPECT_NEAR(v(2, col), v(2, 4), 1e-12 * v(2, 4));
}

TEST(Cli, BenchmarkIsByteIdentical) {
  const auto a = scratch("bench_a"), b = scratch("bench_b");
  for (const auto& dir : {a, b}) {
    const auto r = run({"benchmark", "--replicates", "2", "--iterations", "2000", "--burnin", "500",
                        "--seed", "7", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"table1.csv", "table2.csv", "replicates.csv", "run_metadata.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(data_rows(a / "table1.csv"), 2u);
  const std::string hash_line = io::read_csv(a / "table1.csv").comments.at(0);
  EXPECT_NE(slurp(a / "timing.json").find(hash_line.substr(14)), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const auto dir = scratch("config");
  write(dir / "cfg.json", R"({"n": [40, 80], "deltas": [0.25], "alpha1": 2.0, "beta1": 10.0})");
  auto r = run({"prior-curves", "--config", (dir / "cfg.json").string(), "--alpha1", "4", "--out",
                (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto t = io::read_csv(dir / "out" / "prior_curves.csv");
  const auto ne = effective_sample_sizes({40, 80}, 0.25);
  EXPECT_NEAR(std::stod(t.rows[0][1]), 4.0 / 10.0 * ne[0] * ne[0], 1e-9);
  write(dir / "bad.json", R"({"alpha_one": 2.0})");
  r = run({"prior-curves", "--config", (dir / "bad.json").string(), "--out", (dir / "o2").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("alpha_one"), std::string::npos);
}

TEST(Cli, SimulateFitSelectSimilarityPathways) {
  const auto dir = scratch("pipeline");
  auto r = run({"simulate", "--seed", "3", "--out", (dir / "sim").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "sim" / "truth_theta_C4.csv"));
  EXPECT_EQ(data_rows(dir / "sim" / "data_C1.csv"), 20u);
  EXPECT_EQ(data_rows(dir / "sim" / "truth_shared.csv"), 6u);

  r = run({"fit", "--manifest", (dir / "sim" / "manifest.csv").string(), "--iterations", "300",
           "--burnin", "100", "--out", (dir / "fit").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trace.json", "edges_C1.csv", "edges_C4.csv", "similarity.csv", "heatmap.csv",
                        "run_metadata.json", "timing.json"})
    EXPECT_TRUE(fs::exists(dir / "fit" / f)) << f;
  EXPECT_EQ(data_rows(dir / "fit" / "edges_C2.csv"), 190u);
  EXPECT_EQ(data_rows(dir / "fit" / "similarity.csv"), 6u);

  const std::string trace = (dir / "fit" / "trace.json").string();
  r = run({"select", "--trace", trace, "--kappa", "0.2", "--out", (dir / "sel").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"select", "--trace", trace, "--kappa", "0.123", "--out", (dir / "sel2").string()});
  EXPECT_EQ(r.code, 1);
  r = run({"similarity", "--trace", trace, "--out", (dir / "simi").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(without_hash(slurp(dir / "simi" / "similarity.csv")),
            without_hash(slurp(dir / "fit" / "similarity.csv")));

  write(dir / "ann.txt", "PA,V1,V2,V3,V4\nPB,V5,V6,V7\n");
  r = run({"pathways", "--trace", trace, "--annotation", (dir / "ann.txt").string(), "--out",
           (dir / "pw").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(dir / "pw" / "pathways.csv"), 6u * 3u);

  // identical fits write identical result files
  r = run({"fit", "--manifest", (dir / "sim" / "manifest.csv").string(), "--iterations", "300",
           "--burnin", "100", "--out", (dir / "fit2").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trace.json", "edges_C3.csv", "run_metadata.json"})
    EXPECT_EQ(slurp(dir / "fit" / f), slurp(dir / "fit2" / f)) << f;

  // independent-mode traces cannot feed similarity
  r = run({"fit", "--manifest", (dir / "sim" / "manifest.csv").string(), "--iterations", "100",
           "--burnin", "50", "--independent", "--out", (dir / "ind").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir / "ind" / "similarity.csv"));
  r = run({"similarity", "--trace", (dir / "ind" / "trace.json").string(), "--out", (dir / "x").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: kind=unsupported", 0), 0u) << r.err;
}

#ifdef NEXUS_CLI_PATH
TEST(Cli, BinaryExitCodes) {
  EXPECT_NE(std::system(NEXUS_CLI_PATH " bogus > /dev/null 2>&1"), 0);
  EXPECT_EQ(std::system(NEXUS_CLI_PATH " --help > /dev/null 2>&1"), 0);
}
#endif
