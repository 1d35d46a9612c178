// Command-line front end: exact partition-function zeros, limiting curves,
// dominance data, correlation lengths, integer-Q audits, and extrapolation
// fits for the Potts model on generalized Petersen graphs G(nk,k) and
// simple-cubic slabs Sc(L,n).

#include "CLI11.hpp"

#include "potts/analysis.hpp"
#include "potts/audit.hpp"
#include "potts/io.hpp"

#include <iostream>

namespace fs = std::filesystem;
using namespace potts;

namespace {

std::string env_cache_dir() {
  const char* e = std::getenv("POTTS_CACHE_DIR");
  return e ? std::string(e) : std::string();
}

TransferDecomposition load_decomposition(const RunConfig& cfg) {
  DecomposeOptions opts;
  opts.threads = cfg.threads;
  opts.cache_dir = cfg.cache_dir;
  int kk = cfg.family == "slab" ? cfg.L : cfg.k;
  if (cfg.family == "petersen" && cfg.k > 4)
    throw resource_limit_error(
        "symbolic decompositions are built for k <= 4; larger k runs use the numeric "
        "operator mode (qc, xi)");
  if (cfg.family == "slab" && cfg.L > 2)
    throw resource_limit_error("slab decompositions are built for L = 2");
  return block_decompose(cfg.family, kk, opts);
}

std::string tag_str(const SectorTag& t) { return t.to_string(); }

int cmd_graph(const RunConfig& cfg, int m) {
  Graph g = cfg.family == "petersen" ? build_petersen(PetersenParams(m, cfg.k))
                                     : build_slab(SlabParams(cfg.L, cfg.n)).flatten();
  g.write_edge_list(std::cout);
  return 0;
}

int cmd_fk(const RunConfig& cfg) {
  std::ifstream in(cfg.input);
  if (!in) throw invalid_input_error("cannot read " + cfg.input);
  Graph g = Graph::read_edge_list(in);
  BivarPoly z = fk_partition_poly(g, 26, cfg.threads);
  nlohmann::json j = z.to_json();
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_zeros(const RunConfig& cfg, bool emit_z) {
  LineSpec line = LineSpec::parse(cfg.line);
  TransferDecomposition deco = load_decomposition(cfg);
  BivarPoly z = assemble_Z_generic(deco, cfg.n, cfg.threads);
  QPoly spec = specialize(z, line);
  fs::create_directories(cfg.out_dir);
  std::string base = cfg.family + (cfg.family == "slab" ? std::to_string(cfg.L) : "") + "_k" +
                     std::to_string(cfg.k) + "_n" + std::to_string(cfg.n);
  if (emit_z) {
    std::ofstream zf(fs::path(cfg.out_dir) / ("Z_" + base + ".json"));
    zf << z.to_json().dump() << "\n";
  }
  SolveOptions sopts;
  sopts.target_radius = cfg.target_radius;
  RootSet rs = solve_roots(spec, sopts);
  CsvWriter csv;
  csv.add_meta("config", cfg.to_json().dump());
  csv.add_meta("polynomial_hash", hash_hex(rs.poly_hash));
  csv.add_meta("provenance", cfg.family + " k=" + std::to_string(cfg.k) + " n=" +
                                 std::to_string(cfg.n) + " line=" + line.label());
  csv.add_meta("degree", std::to_string(rs.degree));
  csv.add_meta("converged", rs.converged ? "true" : "false");
  csv.set_header({"re", "im", "radius"});
  for (auto& r : rs.roots)
    csv.add_row({format_double(r.value.re.convert_to<double>(), 17),
                 format_double(r.value.im.convert_to<double>(), 17),
                 format_double(r.radius.convert_to<double>(), 3)});
  fs::path out = fs::path(cfg.out_dir) / ("zeros_" + base + ".csv");
  csv.write(out);
  std::cout << out.string() << "\n";
  if (!rs.converged) throw numeric_error("root solver did not reach the target radius");
  return 0;
}

int cmd_curve(const RunConfig& cfg) {
  TransferDecomposition deco = load_decomposition(cfg);
  fs::create_directories(cfg.out_dir);
  LimitingCurve curve;
  std::string label;
  if (cfg.plane) {
    label = "plane";
    double qlo = cfg.q_lo, qhi = cfg.q_hi ? cfg.q_hi : 2.0 * cfg.k + 4.0;
    double vlo = cfg.v_lo ? cfg.v_lo : -2.0 * cfg.k - 3.0, vhi = cfg.v_hi ? cfg.v_hi : 0.0;
    curve = trace_curve(plane_source(deco), qlo, qhi, vlo, vhi, cfg.step, cfg.tol, true, 1e-10,
                        cfg.threads);
  } else {
    LineSpec line = LineSpec::parse(cfg.line);
    label = line.label();
    double qlo = cfg.q_lo ? cfg.q_lo : -2.0, qhi = cfg.q_hi ? cfg.q_hi : 2.0 * cfg.k + 4.0;
    double ilo = cfg.v_lo ? cfg.v_lo : -3.0, ihi = cfg.v_hi ? cfg.v_hi : 3.0;
    curve = trace_curve(line_source(deco, line), qlo, qhi, ilo, ihi, cfg.step, cfg.tol, false,
                        1e-10, cfg.threads);
  }
  CsvWriter csv;
  csv.add_meta("config", cfg.to_json().dump());
  csv.add_meta("context", cfg.family + " k=" + std::to_string(cfg.k) + " " + label);
  csv.set_header({"x", "y", "side_a", "side_b", "chain"});
  std::vector<int> chain_of(curve.points.size(), -1);
  for (std::size_t c = 0; c < curve.chains.size(); ++c)
    for (int idx : curve.chains[c]) chain_of[idx] = static_cast<int>(c);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    auto& p = curve.points[i];
    csv.add_row({format_double(p.x), format_double(p.y), tag_str(p.side_a), tag_str(p.side_b),
                 std::to_string(chain_of[i])});
  }
  std::string base = cfg.family + "_k" + std::to_string(cfg.k) + (cfg.plane ? "_plane" : "_line");
  fs::path out = fs::path(cfg.out_dir) / ("curve_" + base + ".csv");
  csv.write(out);
  nlohmann::json seg = nlohmann::json::array();
  for (auto& s : curve.vertical_segments)
    seg.push_back({{"Q", s.q}, {"v_lo", s.v_lo}, {"v_hi", s.v_hi}, {"samples", s.samples}});
  nlohmann::json rep{{"points", curve.points.size()},
                     {"chains", curve.chains.size()},
                     {"unchained", curve.unchained.size()},
                     {"vertical_segments", seg}};
  write_json_report(fs::path(cfg.out_dir) / ("curve_" + base + ".json"), cfg, rep);
  std::cout << out.string() << "\n";
  if (!curve.unchained.empty())
    std::cerr << "warning: " << curve.unchained.size() << " crossing points left unchained\n";
  return 0;
}

int cmd_qc(const RunConfig& cfg) {
  LineSpec line = LineSpec::parse(cfg.line);
  SpectrumEngine eng(cfg.family, cfg.family == "slab" ? cfg.L : cfg.k);
  double hi = cfg.q_hi ? cfg.q_hi : default_qc_window_hi(line, cfg.k);
  double lo = cfg.q_lo ? cfg.q_lo : 1.0;
  QcEstimate est = qc_crossing(eng, cfg.k, line, lo, hi, cfg.step, cfg.tol);
  if (!est.found) {
    std::cerr << "no crossing found: " << est.note << "\n";
    throw numeric_error("qc: no dominance crossing in window");
  }
  std::cout << std::setprecision(12) << est.crossing << "\n";
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    nlohmann::json rep{{"k", cfg.k},
                       {"line", line.label()},
                       {"crossing", est.crossing},
                       {"bracket", {est.bracket_lo, est.bracket_hi}},
                       {"high_side", tag_str(est.high_side)},
                       {"low_side", tag_str(est.low_side)}};
    write_json_report(fs::path(cfg.out_dir) /
                          ("qc_" + cfg.family + "_k" + std::to_string(cfg.k) + ".json"),
                      cfg, rep);
  }
  return 0;
}

int cmd_xi(const RunConfig& cfg) {
  SpectrumEngine eng(cfg.family, cfg.family == "slab" ? cfg.L : cfg.k);
  double Q = cfg.q_lo;  // --Q stores here
  XiCurve c = xi_curve(eng, cfg.k, Q, cfg.v_lo, cfg.v_hi, cfg.points,
                       std::min(cfg.k + 1, eng.width() - 1));
  fs::create_directories(cfg.out_dir);
  CsvWriter csv;
  csv.add_meta("config", cfg.to_json().dump());
  csv.set_header({"v", "xi1_inv", "xi2_inv"});
  for (auto& s : c.samples)
    csv.add_row({format_double(s.v), format_double(s.xi1_inv), format_double(s.xi2_inv)});
  fs::path out = fs::path(cfg.out_dir) / ("xi_" + cfg.family + "_k" + std::to_string(cfg.k) +
                                          "_Q" + format_double(Q, 6) + ".csv");
  csv.write(out);
  std::cout << out.string() << "\n";
  return 0;
}

int cmd_audit(const RunConfig& cfg) {
  TransferDecomposition deco = load_decomposition(cfg);
  AuditOptions aopts;
  aopts.threads = cfg.threads;
  if (cfg.n > 1) aopts.reconstruction_n = {cfg.n};
  CancellationReport rep = integer_q_audit(deco, cfg.N, aopts);
  nlohmann::json sectors = nlohmann::json::array();
  for (std::size_t s = 0; s < rep.sectors.size(); ++s)
    sectors.push_back({{"name", rep.sectors[s].name},
                       {"weight", rat_to_string(rep.sectors[s].weight)},
                       {"nt_dim", rep.sectors[s].nt_dim},
                       {"became_trivial", rep.sectors[s].became_trivial},
                       {"contributing", rep.contributing[s].get_str()}});
  nlohmann::json bundles = nlohmann::json::array();
  for (auto& b : rep.bundles)
    bundles.push_back(
        {{"size", b.size}, {"mult", b.mult}, {"net_weight", rat_to_string(b.net_weight)}});
  nlohmann::json rj{{"k", rep.k},
                    {"N", rep.N},
                    {"sectors", sectors},
                    {"bundles", bundles},
                    {"rho", rat_to_string(rep.rho)},
                    {"survivors", rep.survivor_count.get_str()},
                    {"sum_rule_ok", rep.sum_rule_ok},
                    {"sum_rule_lhs", rep.sum_rule_lhs.get_str()},
                    {"sum_rule_rhs", rep.sum_rule_rhs.get_str()},
                    {"consistent_across_points", rep.consistent_across_points},
                    {"reconstruction_ok", rep.reconstruction_ok},
                    {"notes", rep.notes}};
  fs::create_directories(cfg.out_dir);
  write_json_report(fs::path(cfg.out_dir) / ("audit_k" + std::to_string(cfg.k) + "_N" +
                                             std::to_string(cfg.N) + ".json"),
                    cfg, rj);
  std::cout << "sum rule " << (rep.sum_rule_ok ? "PASS" : "FAIL") << ": "
            << rep.sum_rule_lhs.get_str() << " = " << rep.sum_rule_rhs.get_str()
            << ", survivors " << rep.survivor_count.get_str() << ", rho "
            << rat_to_string(rep.rho) << "\n";
  if (!rep.sum_rule_ok || !rep.reconstruction_ok)
    throw numeric_error("audit failed (see report)");
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  std::vector<int> ks;
  std::vector<double> qs;
  read_table_csv(cfg.input, &ks, &qs);
  ExtrapolationBundle bundle = fit_extrapolate(ks, qs);
  auto fit_json = [](const FitResult& f) {
    return nlohmann::json{{"model", f.model},     {"ok", f.ok},       {"Qc", f.Qc},
                          {"A", f.A},             {"Delta", f.Delta}, {"Ae", f.Ae},
                          {"Be", f.Be},           {"Ao", f.Ao},       {"Bo", f.Bo},
                          {"residual", f.residual_norm}, {"spread", f.spread},
                          {"note", f.note}};
  };
  nlohmann::json rep{{"primary", bundle.primary},
                     {"power", fit_json(bundle.power)},
                     {"parity", fit_json(bundle.parity)},
                     {"bst", fit_json(bundle.bst)},
                     {"parity_windows", bundle.parity_window_estimates}};
  fs::create_directories(cfg.out_dir);
  write_json_report(fs::path(cfg.out_dir) / "fit.json", cfg, rep);
  std::cout << std::setprecision(10) << "primary " << bundle.primary << " (power "
            << bundle.power.Qc << ", parity " << bundle.parity.Qc << ", bst " << bundle.bst.Qc
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potts transfer-matrix toolkit for generalized Petersen graphs and slabs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  RunConfig cfg;
  cfg.cache_dir = env_cache_dir();
  std::string config_file;
  int graph_m = 5;
  bool emit_z = false;

  app.add_option("--config", config_file, "JSON config file applied before flags");
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  app.add_option("--cache-dir", cfg.cache_dir, "decomposition cache directory");
  app.add_option("--out-dir", cfg.out_dir, "output directory");

  auto* graph = app.add_subcommand("graph", "emit a graph as a plain-text edge list");
  graph->add_option("--family", cfg.family);
  graph->add_option("--m", graph_m, "Petersen m (with --k)");
  graph->add_option("--k", cfg.k);
  graph->add_option("--L", cfg.L);
  graph->add_option("--n", cfg.n);

  auto* fk = app.add_subcommand("fk", "exact FK partition polynomial of an edge-list graph");
  fk->add_option("--input", cfg.input)->required();

  auto* zeros = app.add_subcommand("zeros", "exact Z, specialize on a line, emit roots CSV");
  zeros->add_option("--family", cfg.family);
  zeros->add_option("--k", cfg.k);
  zeros->add_option("--L", cfg.L);
  zeros->add_option("--n", cfg.n)->required();
  zeros->add_option("--line", cfg.line)->required();
  zeros->add_option("--target-radius", cfg.target_radius);
  zeros->add_flag("--emit-z", emit_z, "also write the exact Z polynomial as JSON");

  auto* curve = app.add_subcommand("curve", "trace the limiting curve by direct search");
  curve->add_option("--family", cfg.family);
  curve->add_option("--k", cfg.k);
  curve->add_option("--L", cfg.L);
  curve->add_option("--line", cfg.line);
  curve->add_flag("--plane", cfg.plane, "scan the real (Q,v) plane instead of a line");
  curve->add_option("--q-lo", cfg.q_lo);
  curve->add_option("--q-hi", cfg.q_hi);
  curve->add_option("--v-lo", cfg.v_lo);
  curve->add_option("--v-hi", cfg.v_hi);
  curve->add_option("--step", cfg.step);
  curve->add_option("--tol", cfg.tol);

  auto* qc = app.add_subcommand("qc", "largest real-axis crossing on a line");
  qc->add_option("--family", cfg.family);
  qc->add_option("--k", cfg.k)->required();
  qc->add_option("--line", cfg.line)->required();
  qc->add_option("--q-lo", cfg.q_lo);
  qc->add_option("--q-hi", cfg.q_hi);
  qc->add_option("--step", cfg.step);
  qc->add_option("--tol", cfg.tol);

  auto* xi = app.add_subcommand("xi", "inverse correlation lengths along a v range");
  xi->add_option("--family", cfg.family);
  xi->add_option("--k", cfg.k)->required();
  xi->add_option("--Q", cfg.q_lo)->required();
  xi->add_option("--v-lo", cfg.v_lo)->required();
  xi->add_option("--v-hi", cfg.v_hi)->required();
  xi->add_option("--points", cfg.points);

  auto* audit = app.add_subcommand("audit", "integer-Q cancellation audit");
  audit->add_option("--k", cfg.k)->required();
  audit->add_option("--N", cfg.N)->required();
  audit->add_option("--n", cfg.n, "reconstruction power (default 2)");

  auto* fit = app.add_subcommand("fit", "power-law / parity / BST extrapolation of a table");
  fit->add_option("--model", cfg.model);
  fit->add_option("--input", cfg.input)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw invalid_input_error("cannot read config " + config_file);
      nlohmann::json j;
      f >> j;
      cfg.apply_json(j);
    }
    cfg.validate();
    if (graph->parsed()) {
      cfg.command = "graph";
      return cmd_graph(cfg, graph_m);
    }
    if (fk->parsed()) {
      cfg.command = "fk";
      return cmd_fk(cfg);
    }
    if (zeros->parsed()) {
      cfg.command = "zeros";
      return cmd_zeros(cfg, emit_z);
    }
    if (curve->parsed()) {
      cfg.command = "curve";
      return cmd_curve(cfg);
    }
    if (qc->parsed()) {
      cfg.command = "qc";
      return cmd_qc(cfg);
    }
    if (xi->parsed()) {
      cfg.command = "xi";
      return cmd_xi(cfg);
    }
    if (audit->parsed()) {
      cfg.command = "audit";
      return cmd_audit(cfg);
    }
    if (fit->parsed()) {
      cfg.command = "fit";
      return cmd_fit(cfg);
    }
  } catch (const invalid_input_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const resource_limit_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
