#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "potts/common.hpp"

namespace potts {

/// Everything a run needs, serialized alongside every output file so runs
/// are reproducible byte-for-byte from their own metadata.
struct RunConfig {
  std::string command;
  std::string family = "petersen";
  int k = 1;
  int L = 2;
  int n = 2;
  std::string line = "v=-1";
  bool plane = false;
  int N = 0;
  double q_lo = 0, q_hi = 0, v_lo = 0, v_hi = 0;
  double step = 0.05, tol = 1e-9;
  double target_radius = 1e-20;
  int points = 11;
  int threads = 0;
  std::string model = "all";
  std::string input;
  std::string cache_dir;
  std::string out_dir = ".";

  nlohmann::json to_json() const {
    return {{"command", command}, {"family", family}, {"k", k},       {"L", L},
            {"n", n},             {"line", line},     {"plane", plane}, {"N", N},
            {"q_lo", q_lo},       {"q_hi", q_hi},     {"v_lo", v_lo},  {"v_hi", v_hi},
            {"step", step},       {"tol", tol},       {"target_radius", target_radius},
            {"points", points},   {"threads", threads}, {"model", model},
            {"input", input},     {"cache_dir", cache_dir}, {"out_dir", out_dir},
            {"version", kVersionStamp}};
  }

  void apply_json(const nlohmann::json& j) {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("family", family);
    get("k", k);
    get("L", L);
    get("n", n);
    get("line", line);
    get("plane", plane);
    get("N", N);
    get("q_lo", q_lo);
    get("q_hi", q_hi);
    get("v_lo", v_lo);
    get("v_hi", v_hi);
    get("step", step);
    get("tol", tol);
    get("target_radius", target_radius);
    get("points", points);
    get("threads", threads);
    get("model", model);
    get("input", input);
    get("cache_dir", cache_dir);
    get("out_dir", out_dir);
  }

  void validate() const {
    if (family != "petersen" && family != "slab")
      throw invalid_input_error("family must be petersen or slab");
    if (k < 1) throw invalid_input_error("k must be >= 1");
    if (L < 1) throw invalid_input_error("L must be >= 1");
    if (n < 1) throw invalid_input_error("n must be >= 1");
    if (step <= 0 || tol <= 0) throw invalid_input_error("step and tol must be positive");
    if (target_radius <= 0) throw invalid_input_error("target radius must be positive");
  }
};

inline std::string format_double(double x, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

/// CSV with '#'-prefixed metadata lines: config JSON, version, and a content
/// hash over the data section. Identical configs and data give identical
/// bytes.
class CsvWriter {
 public:
  void add_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
  }
  void set_header(const std::vector<std::string>& cols) {
    std::string h;
    for (std::size_t i = 0; i < cols.size(); ++i) h += (i ? "," : "") + cols[i];
    header_ = h;
  }
  void add_row(const std::vector<std::string>& cells) {
    std::string r;
    for (std::size_t i = 0; i < cells.size(); ++i) r += (i ? "," : "") + cells[i];
    rows_.push_back(std::move(r));
  }
  std::string str() const {
    std::string data = header_ + "\n";
    for (auto& r : rows_) data += r + "\n";
    std::string out;
    for (auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
    out += "# content_hash: " + hash_hex(fnv1a(data)) + "\n";
    out += data;
    return out;
  }
  void write(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw invalid_input_error("cannot write " + path.string());
    f << str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::string header_;
  std::vector<std::string> rows_;
};

/// JSON report with the config and a content hash over the payload.
inline void write_json_report(const std::filesystem::path& path, const RunConfig& cfg,
                              nlohmann::json payload) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  j["content_hash"] = hash_hex(fnv1a(payload.dump()));
  j["report"] = std::move(payload);
  std::ofstream f(path);
  if (!f) throw invalid_input_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

/// Reads a two-column CSV (k, value) tolerating '#' comments and a header.
inline void read_table_csv(const std::string& path, std::vector<int>* ks,
                           std::vector<double>* qs) {
  std::ifstream f(path);
  if (!f) throw invalid_input_error("cannot read " + path);
  std::string linebuf;
  while (std::getline(f, linebuf)) {
    if (linebuf.empty() || linebuf[0] == '#') continue;
    for (auto& c : linebuf)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream is(linebuf);
    double a, b;
    if (is >> a >> b) {
      ks->push_back(static_cast<int>(std::lround(a)));
      qs->push_back(b);
    }
  }
  if (ks->empty()) throw invalid_input_error("no data rows in " + path);
}

/// Aligned two-column table in the layout of the reference tables.
inline std::string format_qc_table(const std::string& title,
                                   const std::vector<std::pair<int, double>>& rows) {
  std::ostringstream os;
  os << title << "\n";
  os << "  k | Qc\n";
  os << "----+---------------\n";
  for (auto& [k, v] : rows)
    os << std::setw(3) << k << " | " << std::fixed << std::setprecision(10) << v << "\n";
  return os.str();
}

}  // namespace potts
