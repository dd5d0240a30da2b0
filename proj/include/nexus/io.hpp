#pragma once

// File formats: CSV data/result tables, the group manifest, pathway
// annotations and the JSON trace/metadata documents.
//
// CSV conventions: UTF-8, LF line endings, '.' decimal separator, mandatory
// header row. Result files start with a "# config_hash=<hex>" line; readers
// skip lines beginning with '#'.

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/posterior.hpp"
#include "nexus/sampler.hpp"

namespace nexus::io {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
  std::vector<std::string> comments;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      t.comments.push_back(line);
      continue;
    }
    if (!have_header) {
      if (trim(line).empty()) continue;
      for (auto& f : split_csv_line(line)) t.header.push_back(trim(f));
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    for (auto& f : fields) f = trim(f);
    if (fields.size() != t.header.size())
      throw IngestionError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw IngestionError(path.string() + ": missing header row");
  return t;
}

inline double parse_real(const std::string& cell, const fs::path& path, std::size_t line,
                         std::size_t column) {
  const std::string where = path.string() + ":" + std::to_string(line) + ": column " +
                            std::to_string(column + 1);
  if (cell.empty()) throw IngestionError(where + ": empty cell");
  double v = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw IngestionError(where + ": not a finite decimal number: '" + cell + "'");
  return v;
}

inline Matrix numeric_matrix(const CsvTable& t, const fs::path& path) {
  Matrix x(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_real(t.rows[r][c], path, t.line_numbers[r], c);
  return x;
}

// Manifest: CSV with columns `label,path`; relative paths resolve against the
// manifest's directory. Every group CSV has a header of variable names and
// one row per sample.
inline PanDataset load_dataset(const fs::path& manifest, bool scale_columns) {
  const CsvTable m = read_csv(manifest);
  const auto label_col = std::find(m.header.begin(), m.header.end(), "label");
  const auto path_col = std::find(m.header.begin(), m.header.end(), "path");
  if (label_col == m.header.end() || path_col == m.header.end())
    throw IngestionError(manifest.string() + ": manifest needs 'label' and 'path' columns");
  const auto li = static_cast<std::size_t>(label_col - m.header.begin());
  const auto pi = static_cast<std::size_t>(path_col - m.header.begin());
  if (m.rows.empty()) throw IngestionError(manifest.string() + ": manifest lists no groups");

  std::vector<DataGroup> groups;
  std::vector<std::string> names;
  fs::path first_file;
  for (const auto& row : m.rows) {
    fs::path file = row[pi];
    if (file.is_relative()) file = manifest.parent_path() / file;
    const CsvTable t = read_csv(file);
    if (groups.empty()) {
      names = t.header;
      first_file = file;
    } else if (t.header != names) {
      throw IngestionError("variable headers differ between " + first_file.string() + " and " +
                           file.string());
    }
    if (t.rows.size() < 2) throw IngestionError(file.string() + ": fewer than 2 samples");
    groups.push_back({row[li], numeric_matrix(t, file)});
  }
  return PanDataset(std::move(groups), std::move(names), scale_columns);
}

// One pathway per line: name followed by comma-separated variable names.
// Unknown variable names are an error; '#' lines and blank lines are skipped.
inline PathwayAnnotation load_annotation(const fs::path& path,
                                         const std::vector<std::string>& variable_names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < variable_names.size(); ++k) index[variable_names[k]] = k;
  PathwayAnnotation ann;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);
    Pathway pw;
    pw.name = trim(fields.front());
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const std::string v = trim(fields[k]);
      if (v.empty()) continue;
      const auto it = index.find(v);
      if (it == index.end())
        throw IngestionError(path.string() + ":" + std::to_string(lineno) +
                             ": unknown variable '" + v + "'");
      pw.members.insert(it->second);
    }
    ann.pathways.push_back(std::move(pw));
  }
  return ann;
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& config_hash,
            const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << "# config_hash=" << config_hash << '\n';
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) out_ << (k ? "," : "") << csv_field(fields[k]);
    out_ << '\n';
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// Labels and variable names travel with a trace so downstream commands can
// name their output.
struct SavedTrace {
  ChainTrace trace;
  std::vector<std::string> group_labels;
  std::vector<std::string> variable_names;
  std::string config_hash;
  Json config;
};

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

inline Json trace_to_json(const SavedTrace& s) {
  const ChainTrace& t = s.trace;
  Json j;
  j["format"] = "nexus-trace-1";
  j["config_hash"] = s.config_hash;
  j["config"] = s.config;
  j["group_labels"] = s.group_labels;
  j["variable_names"] = s.variable_names;
  j["num_groups"] = t.num_groups;
  j["p"] = t.p;
  j["n_retained"] = t.n_retained;
  j["kappa"] = t.kappa;
  j["independent_mode"] = t.independent_mode;
  j["kappa_grid"] = t.kappa_grid;
  j["exceed_counts"] = t.exceed_counts;
  j["mean_partial_corr"] = t.mean_partial_corr;
  j["mean_abs_partial_corr"] = t.mean_abs_partial_corr;
  j["mean_theta"] = Json::array();
  for (const auto& m : t.mean_theta) j["mean_theta"].push_back(matrix_to_json(m));
  j["lambda1_sq_draws"] = matrix_to_json(t.lambda1_sq_draws);
  j["lambda2_sq_columns"] = t.lambda2_sq_draws.cols();
  j["lambda2_sq_draws"] = matrix_to_json(t.lambda2_sq_draws);
  j["gamma_draws"] = matrix_to_json(t.gamma_draws);
  j["min_cholesky_pivot"] = t.min_cholesky_pivot;
  if (!t.theta_draws.empty()) {
    Json draws = Json::array();
    for (const auto& d : t.theta_draws) {
      Json g = Json::array();
      for (const auto& m : d) g.push_back(matrix_to_json(m));
      draws.push_back(std::move(g));
    }
    j["theta_draws"] = std::move(draws);
  }
  return j;
}

inline SavedTrace trace_from_json(const Json& j) {
  if (j.value("format", "") != "nexus-trace-1") throw IngestionError("not a nexus trace document");
  SavedTrace s;
  s.config_hash = j.at("config_hash").get<std::string>();
  s.config = j.at("config");
  s.group_labels = j.at("group_labels").get<std::vector<std::string>>();
  s.variable_names = j.at("variable_names").get<std::vector<std::string>>();
  ChainTrace& t = s.trace;
  t.num_groups = j.at("num_groups").get<std::size_t>();
  t.p = j.at("p").get<std::size_t>();
  t.n_retained = j.at("n_retained").get<std::size_t>();
  t.kappa = j.at("kappa").get<double>();
  t.independent_mode = j.at("independent_mode").get<bool>();
  t.kappa_grid = j.at("kappa_grid").get<std::vector<double>>();
  t.exceed_counts = j.at("exceed_counts").get<std::vector<std::vector<std::uint32_t>>>();
  t.mean_partial_corr = j.at("mean_partial_corr").get<std::vector<double>>();
  t.mean_abs_partial_corr = j.at("mean_abs_partial_corr").get<std::vector<double>>();
  for (const auto& m : j.at("mean_theta")) t.mean_theta.push_back(matrix_from_json(m));
  t.lambda1_sq_draws = matrix_from_json(j.at("lambda1_sq_draws"));
  t.lambda2_sq_draws = matrix_from_json(j.at("lambda2_sq_draws"));
  if (t.lambda2_sq_draws.rows() == 0 || j.at("lambda2_sq_columns").get<Eigen::Index>() == 0)
    t.lambda2_sq_draws.resize(static_cast<Eigen::Index>(t.n_retained), 0);
  t.gamma_draws = matrix_from_json(j.at("gamma_draws"));
  t.min_cholesky_pivot = j.at("min_cholesky_pivot").get<double>();
  if (j.contains("theta_draws"))
    for (const auto& d : j.at("theta_draws")) {
      std::vector<Matrix> g;
      for (const auto& m : d) g.push_back(matrix_from_json(m));
      t.theta_draws.push_back(std::move(g));
    }
  return s;
}

inline void save_trace(const fs::path& path, const SavedTrace& s) {
  write_text(path, trace_to_json(s).dump() + "\n");
}

inline SavedTrace load_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
  try {
    return trace_from_json(j);
  } catch (const Json::exception& e) {
    throw IngestionError(path.string() + ": malformed trace: " + e.what());
  }
}

// One CSV per group: edge list with 1-based variable indices.
inline std::vector<fs::path> write_edge_reports(const fs::path& dir, const EdgeReport& r,
                                                const ChainTrace& trace,
                                                const std::vector<std::string>& labels,
                                                const std::vector<std::string>& names,
                                                const std::string& hash) {
  std::vector<fs::path> files;
  const std::size_t m = r.num_edges();
  for (std::size_t c = 0; c < r.num_groups; ++c) {
    const fs::path file = dir / ("edges_" + labels.at(c) + ".csv");
    CsvWriter w(file, hash,
                {"i", "j", "var_i", "var_j", "inclusion_prob", "selected", "mean_partial_corr"});
    for (std::size_t e = 0; e < m; ++e) {
      const auto [i, j] = pair_from_index(e, r.p);
      w.row({std::to_string(i + 1), std::to_string(j + 1), names.at(i), names.at(j),
             format_double(r.prob(c, e)), r.selected(c, e) ? "1" : "0",
             format_double(trace.mean_partial_corr.at(c * m + e))});
    }
    files.push_back(file);
  }
  return files;
}

// Same layout restricted to selected edges; header-only when none are.
inline fs::path write_selected_edges(const fs::path& file, const EdgeReport& r, std::size_t c,
                                     const std::vector<std::string>& names,
                                     const std::string& hash) {
  CsvWriter w(file, hash, {"i", "j", "var_i", "var_j", "inclusion_prob"});
  for (std::size_t e = 0; e < r.num_edges(); ++e) {
    if (!r.selected(c, e)) continue;
    const auto [i, j] = pair_from_index(e, r.p);
    w.row({std::to_string(i + 1), std::to_string(j + 1), names.at(i), names.at(j),
           format_double(r.prob(c, e))});
  }
  return file;
}

inline fs::path write_similarity(const fs::path& file, const SimilarityReport& s,
                                 const std::vector<std::string>& labels, const std::string& hash) {
  CsvWriter w(file, hash, {"group_a", "group_b", "nsi", "nnsi", "l1_distance"});
  for (std::size_t q = 0; q < s.pairs.size(); ++q)
    w.row({labels.at(s.pairs[q].first), labels.at(s.pairs[q].second), format_double(s.nsi[q]),
           format_double(s.nnsi[q]), format_double(s.l1_distance[q])});
  return file;
}

inline void write_pathway_rows(CsvWriter& w, const PathwayTable& t, const PathwayAnnotation& ann,
                               const std::string& label_a, const std::string& label_b) {
  for (const auto& r : t.rows)
    w.row({label_a, label_b, ann.pathways[r.first].name, ann.pathways[r.second].name,
           std::to_string(r.shared), std::to_string(r.union_count), format_double(r.proportion)});
}

inline const std::vector<std::string>& pathway_header() {
  static const std::vector<std::string> h{"group_a", "group_b", "pathway_p", "pathway_q",
                                          "shared",  "union",   "proportion"};
  return h;
}

// Rows are edges selected in at least one group; columns are groups in
// clustering order.
inline fs::path write_heatmap(const fs::path& file, const HeatmapData& h,
                              const std::vector<std::string>& labels,
                              const std::vector<std::string>& names, std::size_t p,
                              const std::string& hash) {
  std::vector<std::string> header{"var_i", "var_j"};
  for (auto c : h.group_order) header.push_back(labels.at(c));
  CsvWriter w(file, hash, header);
  for (std::size_t r = 0; r < h.edge_rows.size(); ++r) {
    const auto [i, j] = pair_from_index(h.edge_rows[r], p);
    std::vector<std::string> row{names.at(i), names.at(j)};
    for (auto c : h.group_order)
      row.push_back(format_double(h.probabilities(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    w.row(row);
  }
  return file;
}

inline fs::path write_matrix_csv(const fs::path& file, const Matrix& m,
                                 const std::vector<std::string>& header, const std::string& hash) {
  CsvWriter w(file, hash, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    w.row(row);
  }
  return file;
}

}  // namespace nexus::io
