#pragma once

// Command-line front end: argument parsing into a RunConfig and dispatch to
// the library. Exit codes: 0 success, 1 numeric failure, 2 usage error.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "projcap/capacity.hpp"
#include "projcap/chebyshev.hpp"
#include "projcap/evans.hpp"
#include "projcap/fekete.hpp"
#include "projcap/io.hpp"
#include "projcap/measure.hpp"
#include "projcap/sampling.hpp"
#include "projcap/set_spec.hpp"
#include "projcap/verify.hpp"
#include "projcap/version.hpp"

namespace projcap::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"kernel",    "energy",   "fekete", "diameter",
                                             "chebyshev", "capacity", "evans",  "verify"};
  return c;
}

inline const std::vector<std::string>& builtin_sets() {
  static const std::vector<std::string> s = {"p1",     "pn",       "fs",         "ball", "circle",
                                             "finite", "seqlimit", "disk-slice", "union"};
  return s;
}

struct RunConfig {
  std::string command;
  std::string set = "p1";
  std::size_t n = 1;
  std::optional<double> radius;
  std::string center_file;
  std::string centers_file;
  std::vector<double> radii;
  std::string points_file;
  std::string measure_file;
  std::size_t k_max = 19;
  std::size_t s = 0;
  std::vector<std::size_t> s_list;
  std::size_t m = 400;
  std::size_t N = 100000;
  std::size_t H = 10;
  std::size_t grid = 500;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  double cheb_tol = 1e-3;
  double gap_tol = 1e-8;
  std::size_t max_iters = 100000;
  std::size_t restarts = 8;
  std::size_t pool = 2000;
  std::size_t fekete_s = 50;
  std::string suite = "all";
  std::vector<int> criteria;
  std::string out;
  std::string format = "json";
  bool no_timing = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseOutcome {
  std::optional<RunConfig> config;  // empty when help was printed
  int exit_code = 0;
};

inline io::Json config_json(const RunConfig& c) {
  io::Json j{{"command", c.command}, {"set", c.set},   {"n", c.n},         {"seed", c.seed},
             {"s", c.s},             {"m", c.m},       {"N", c.N},         {"H", c.H},
             {"grid", c.grid},       {"tol", c.tol},   {"cheb_tol", c.cheb_tol},
             {"gap_tol", c.gap_tol}, {"max_iters", c.max_iters},
             {"restarts", c.restarts}, {"pool", c.pool}, {"fekete_s", c.fekete_s},
             {"k_max", c.k_max},     {"format", c.format}};
  j["radius"] = c.radius ? io::Json(*c.radius) : io::Json(nullptr);
  if (!c.center_file.empty()) j["center_file"] = c.center_file;
  if (!c.centers_file.empty()) j["centers_file"] = c.centers_file;
  if (!c.radii.empty()) j["radii"] = c.radii;
  if (!c.points_file.empty()) j["points_file"] = c.points_file;
  if (!c.measure_file.empty()) j["measure_file"] = c.measure_file;
  if (!c.s_list.empty()) j["s_list"] = c.s_list;
  if (c.command == "verify") {
    j["suite"] = c.suite;
    if (!c.criteria.empty()) j["criteria"] = c.criteria;
  }
  return j;
}

namespace detail {

inline void add_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--set", c.set, "builtin set")->check(CLI::IsMember(builtin_sets()));
  sub.add_option("--n", c.n, "projective dimension")->check(CLI::Range(1, 16));
  sub.add_option("--radius", c.radius, "ball or disk radius")->check(CLI::PositiveNumber);
  sub.add_option("--center-file", c.center_file, "JSON point (or list, first used) for the ball center");
  sub.add_option("--centers-file", c.centers_file, "JSON point list of ball centers for --set union");
  sub.add_option("--radii", c.radii, "ball radii for --set union")->delimiter(',')->check(CLI::PositiveNumber);
  sub.add_option("--points-file", c.points_file, "JSON point list");
  sub.add_option("--measure-file", c.measure_file, "JSON measure");
  sub.add_option("--k-max", c.k_max, "largest k in {0} u {1/k}")->check(CLI::Range(1, 100000));
  sub.add_option("--s", c.s, "number of points")->check(CLI::Range(1, 200));
  sub.add_option("--s-list", c.s_list, "orders for the diameter table")->delimiter(',')->check(CLI::Range(2, 200));
  sub.add_option("--m", c.m, "equilibrium sample count")->check(CLI::Range(2, 20000));
  sub.add_option("--N", c.N, "Monte-Carlo pairs")->check(CLI::Range(2, 1000000000));
  sub.add_option("--H", c.H, "Evans truncation depth")->check(CLI::Range(1, 30));
  sub.add_option("--grid", c.grid, "Evans off-set grid size")->check(CLI::Range(1, 1000000));
  sub.add_option("--seed", c.seed, "random seed");
  sub.add_option("--tol", c.tol, "Fekete sweep tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--cheb-tol", c.cheb_tol, "declared Chebyshev accuracy")->check(CLI::PositiveNumber);
  sub.add_option("--gap-tol", c.gap_tol, "Frank-Wolfe gap tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--max-iters", c.max_iters, "Frank-Wolfe iteration cap")->check(CLI::Range(1, 100000000));
  sub.add_option("--restarts", c.restarts, "solver restarts")->check(CLI::Range(1, 1000));
  sub.add_option("--pool", c.pool, "candidate pool size")->check(CLI::Range(2, 1000000));
  sub.add_option("--fekete-s", c.fekete_s, "Fekete cross-check order for capacity (0 disables)")
      ->check(CLI::Range(0, 200));
  sub.add_option("--suite", c.suite, "verify suite")
      ->check(CLI::IsMember({"all", "p1-oracles", "identities", "capacity", "evans", "determinism"}));
  sub.add_option("--criteria", c.criteria, "explicit criterion ids")->delimiter(',')->check(CLI::Range(1, 12));
  sub.add_option("--out", c.out, "output path (stdout when absent)");
  sub.add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  sub.add_flag("--no-timing", c.no_timing, "omit wall-clock fields");
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

inline void validate(const RunConfig& c) {
  const std::string& cmd = c.command;
  if (c.set == "ball") {
    require(c.radius.has_value(), "--radius is required for --set ball");
    require(*c.radius <= kDiameter, "--radius must not exceed pi/sqrt(2)");
  }
  if (c.set == "finite") require(!c.points_file.empty(), "--points-file is required for --set finite");
  if (c.set == "union") {
    require(!c.centers_file.empty() && !c.radii.empty(), "--set union needs --centers-file and --radii");
    for (double r : c.radii) require(r <= kDiameter, "--radii entries must not exceed pi/sqrt(2)");
  }
  if (c.set == "p1" || c.set == "circle") require(c.n == 1, "--n must be 1 for --set " + c.set);
  if (c.set == "disk-slice") require(c.n == 1 || c.n == 2, "--set disk-slice lives in P^2");
  if (cmd == "kernel") require(!c.points_file.empty(), "kernel needs --points-file");
  if (cmd == "fekete") require(c.s >= 2, "fekete needs --s >= 2");
  if (cmd == "diameter") require(c.s >= 2 || !c.s_list.empty(), "diameter needs --s >= 2 or --s-list");
  if (cmd == "chebyshev") require(c.s >= 1, "chebyshev needs --s >= 1");
  if (cmd == "evans")
    require(c.set == "finite" || c.set == "seqlimit", "evans needs a finite snapshot (--set finite or seqlimit)");
  for (std::size_t k = 1; k < c.s_list.size(); ++k) require(c.s_list[k] > c.s_list[k - 1], "--s-list must increase");
}

}  // namespace detail

/// Parses argv; usage problems yield exit code 2 with the message on `err`.
inline ParseOutcome parse_config(int argc, const char* const* argv, std::ostream& out = std::cout,
                                 std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"projective logarithmic potential theory on CP^n", "projcap"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::vector<CLI::App*> subs;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name, name + " pipeline");
    detail::add_options(*sub, cfg);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return {std::nullopt, 0};
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return {std::nullopt, 0};
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return {std::nullopt, 0};
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return {std::nullopt, 2};
  }
  for (auto* sub : subs) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }
  if (cfg.set == "p1" && cfg.n != 1) cfg.set = "pn";
  try {
    detail::validate(cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return {std::nullopt, 2};
  }
  return {cfg, 0};
}

inline ParseOutcome parse_config(const std::vector<std::string>& args, std::ostream& out = std::cout,
                                 std::ostream& err = std::cerr) {
  std::vector<const char*> argv = {"projcap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data(), out, err);
}

inline SetSpec build_set(const RunConfig& c) {
  auto north = [&](std::size_t n) {
    CVector v(n + 1, Complex(0.0, 0.0));
    v[0] = 1.0;
    return ProjectivePoint::from_homogeneous(v);
  };
  auto load_center = [&](const std::string& path) {
    auto j = io::read_json_file(path);
    return j.is_array() ? io::points_from_json(j).at(0) : io::point_from_json(j);
  };
  if (c.set == "p1") return sets::full_space(1);
  if (c.set == "pn" || c.set == "fs") return sets::full_space(c.n);
  if (c.set == "ball") {
    auto center = c.center_file.empty() ? north(c.n) : load_center(c.center_file);
    return sets::geodesic_ball(center, *c.radius);
  }
  if (c.set == "circle") return sets::real_circle();
  if (c.set == "finite") return sets::finite(io::read_points_file(c.points_file), "finite(" + c.points_file + ")");
  if (c.set == "seqlimit") return sets::sequence_with_limit(c.k_max);
  if (c.set == "disk-slice") return sets::disk_slice(c.radius.value_or(1.0));
  if (c.set == "union") {
    auto centers = io::read_points_file(c.centers_file);
    if (centers.size() != c.radii.size()) throw UsageError("--centers-file and --radii differ in length");
    std::vector<SetSpec> parts;
    for (std::size_t i = 0; i < centers.size(); ++i) parts.push_back(sets::geodesic_ball(centers[i], c.radii[i]));
    return sets::set_union(std::move(parts));
  }
  throw UsageError("unknown set " + c.set);
}

namespace detail {

struct Output {
  io::Json result;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::optional<double> wall_ms;
  int exit_code = 0;
  std::string text;  // printed to stdout in addition (verify)
};

inline std::string num(double v) { return io::csv_number(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }

inline Output cmd_kernel(const RunConfig& c) {
  auto pts = io::read_points_file(c.points_file);
  if (pts.size() < 2) throw UsageError("--points-file must hold at least two points");
  Output o;
  o.csv_header = {"i", "j", "sigma", "d", "G"};
  o.result = io::Json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s = sine_distance(pts[i], pts[j]), d = geodesic_distance(pts[i], pts[j]), g = kernel_G(pts[i], pts[j]);
      o.result.push_back({{"i", i}, {"j", j}, {"sigma", s}, {"d", d}, {"G", io::number(g)}});
      o.csv_rows.push_back({num(i), num(j), num(s), num(d), num(g)});
    }
  }
  return o;
}

inline Output cmd_energy(const RunConfig& c) {
  Output o;
  o.csv_header = {"value", "stderr", "samples"};
  if (!c.measure_file.empty()) {
    auto mu = io::measure_from_json(io::read_json_file(c.measure_file));
    auto e = energy(mu);
    o.result = {{"energy", io::energy_json(e)}};
    if (mu.size() >= 2) o.result["offdiag_energy"] = io::number(offdiag_energy(mu));
    o.csv_rows.push_back({num(e.value), "", num(e.samples)});
    return o;
  }
  auto set = build_set(c);
  MeasureSampler sampler;
  if (c.set == "fs" || c.set == "pn" || c.set == "p1") {
    sampler = fs_sampler(set.n);
  } else {
    sampler = {set.n, set.label, [set](Engine& eng) { return set.sample(eng(), 0); }};
  }
  auto e = mc_energy(sampler, c.N, c.seed);
  o.result = {{"sampler", sampler.description}, {"energy", io::energy_json(e)}};
  o.csv_rows.push_back({num(e.value), num(e.stderr_value.value_or(0.0)), num(e.samples)});
  return o;
}

inline FeketeOptions fekete_options(const RunConfig& c) {
  FeketeOptions f;
  f.restarts = c.restarts;
  f.pool = c.pool;
  f.tol = c.tol;
  f.seed = c.seed;
  return f;
}

inline ChebyshevOptions chebyshev_options(const RunConfig& c) {
  ChebyshevOptions o;
  o.seed = c.seed;
  o.tol = c.cheb_tol;
  return o;
}

inline EquilibriumOptions equilibrium_options(const RunConfig& c) {
  EquilibriumOptions e;
  e.seed = c.seed;
  e.gap_tol = c.gap_tol;
  e.max_iters = c.max_iters;
  return e;
}

inline Output cmd_fekete(const RunConfig& c) {
  auto set = build_set(c);
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = fekete_solve(set, c.s, fekete_options(c));
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  Output o;
  o.result = io::configuration_json(cfg);
  o.wall_ms = ms;
  o.csv_header = {"s", "theta_s", "D_s", "restarts", "sweeps", "wall_ms"};
  o.csv_rows.push_back({num(cfg.s), num(cfg.theta), num(std::exp(-cfg.theta)), num(cfg.restarts_used),
                        num(cfg.sweeps), c.no_timing ? "" : num(ms)});
  return o;
}

inline Output cmd_diameter(const RunConfig& c) {
  auto set = build_set(c);
  std::vector<std::size_t> s_list = c.s_list;
  if (s_list.empty()) {
    for (std::size_t s = 2; s <= c.s; ++s) s_list.push_back(s);
  }
  auto table = transfinite_estimate(set, s_list, fekete_options(c));
  Output o;
  o.csv_header = {"s", "theta_s", "D_s", "restarts", "sweeps", "wall_ms"};
  io::Json rows = io::Json::array();
  for (const auto& r : table.rows) {
    io::Json row{{"s", r.s}, {"theta_s", io::number(r.theta)}, {"D_s", io::number(r.D)},
                 {"D_monotone", io::number(r.D_monotone)}, {"restarts", r.restarts}, {"sweeps", r.sweeps}};
    if (!c.no_timing) row["wall_ms"] = r.wall_ms;
    rows.push_back(row);
    o.csv_rows.push_back({num(r.s), num(r.theta), num(r.D), num(r.restarts), num(r.sweeps),
                          c.no_timing ? "" : num(r.wall_ms)});
  }
  io::Json configs = io::Json::array();
  for (const auto& cfg : table.configurations) configs.push_back(io::configuration_json(cfg));
  o.result = {{"rows", rows},
              {"limit", io::number(table.limit)},
              {"violations", table.violations},
              {"configurations", configs}};
  return o;
}

inline Output cmd_chebyshev(const RunConfig& c) {
  auto set = build_set(c);
  auto t0 = std::chrono::steady_clock::now();
  auto r = chebyshev_value(set, c.s, chebyshev_options(c));
  std::optional<double> theta;
  if (c.s >= 2) theta = fekete_solve(set, c.s, fekete_options(c)).theta;
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  Output o;
  o.result = io::chebyshev_json(r);
  o.result["theta_s"] = theta ? io::number(*theta) : io::Json(nullptr);
  o.result["gap"] = theta ? io::number(r.M - *theta) : io::Json(nullptr);
  o.result["epsilon_solver"] = solver_slack(fekete_options(c), chebyshev_options(c));
  o.wall_ms = ms;
  o.csv_header = {"s", "M_s", "theta_s", "gap", "pools", "wall_ms"};
  o.csv_rows.push_back({num(r.s), num(r.M), theta ? num(*theta) : "", theta ? num(r.M - *theta) : "",
                        num(r.outer_pool_used) + "/" + num(r.inner_pool_used), c.no_timing ? "" : num(ms)});
  return o;
}

inline Output cmd_capacity(const RunConfig& c) {
  auto set = build_set(c);
  CapacityOptions co;
  co.m = c.m;
  co.equilibrium = equilibrium_options(c);
  co.fekete_s = c.fekete_s;
  co.fekete = fekete_options(c);
  auto rep = capacity(set, co);
  Output o;
  o.result = io::capacity_json(rep);
  o.csv_header = {"m", "gamma_hat", "kappa_hat", "fw_gap", "diag_rule", "cross_gap"};
  o.csv_rows.push_back({num(rep.m), num(rep.gamma_hat), num(rep.kappa_hat), num(rep.fw_gap), rep.diag_rule,
                        rep.cross_gap ? num(*rep.cross_gap) : ""});
  o.exit_code = rep.converged ? 0 : 1;
  return o;
}

inline Output cmd_evans(const RunConfig& c) {
  auto set = build_set(c);
  const auto& E = *set.points;
  auto grid = offset_grid(E, c.grid, c.seed);
  EvansOptions eo;
  eo.seed = c.seed;
  auto res = evans_construct(E, c.H, grid, eo);
  Output o;
  o.result = {{"measure", io::measure_json(res.measure)}, {"certificate", io::evans_json(res.certificate)}};
  o.csv_header = {"h", "s_h", "bound"};
  for (const auto& l : res.certificate.levels) o.csv_rows.push_back({num(l.h), num(l.s_h), num(l.bound)});
  return o;
}

inline Output cmd_verify(const RunConfig& c) {
  auto ids = c.criteria.empty() ? verify::suite_ids(c.suite) : c.criteria;
  auto results = verify::run_suite(ids);
  Output o;
  o.result = io::Json::array();
  o.csv_header = {"id", "name", "passed", "wall_ms", "detail"};
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    io::Json j{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
    if (!c.no_timing) j["wall_ms"] = r.wall_ms;
    o.result.push_back(j);
    o.csv_rows.push_back({std::to_string(r.id), r.name, r.passed ? "1" : "0", c.no_timing ? "" : num(r.wall_ms),
                          r.detail});
    o.text += verify::status_line(r) + "\n";
  }
  o.exit_code = all ? 0 : 1;
  return o;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string render(const RunConfig& c, const Output& o) {
  if (c.format == "csv") {
    std::string text = "# projcap " + std::string(kVersion) + "\n# config " + config_json(c).dump() + "\n";
    for (std::size_t k = 0; k < o.csv_header.size(); ++k) text += (k ? "," : "") + o.csv_header[k];
    text += "\n";
    for (const auto& row : o.csv_rows) {
      for (std::size_t k = 0; k < row.size(); ++k) text += (k ? "," : "") + csv_escape(row[k]);
      text += "\n";
    }
    return text;
  }
  io::Json doc{{"version", kVersion}, {"config", config_json(c)}, {"result", o.result}};
  if (o.wall_ms && !c.no_timing) doc["timing"] = {{"wall_ms", *o.wall_ms}};
  return doc.dump(2) + "\n";
}

}  // namespace detail

/// Dispatches a parsed configuration. Library errors map to exit code 1,
/// configuration problems found late (bad files, mismatched lists) to 2.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Output o;
  try {
    const auto& cmd = c.command;
    if (cmd == "kernel") o = detail::cmd_kernel(c);
    else if (cmd == "energy") o = detail::cmd_energy(c);
    else if (cmd == "fekete") o = detail::cmd_fekete(c);
    else if (cmd == "diameter") o = detail::cmd_diameter(c);
    else if (cmd == "chebyshev") o = detail::cmd_chebyshev(c);
    else if (cmd == "capacity") o = detail::cmd_capacity(c);
    else if (cmd == "evans") o = detail::cmd_evans(c);
    else if (cmd == "verify") o = detail::cmd_verify(c);
    else throw UsageError("unknown command " + cmd);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::Io || e.code() == Errc::InvalidArgument ? 2 : 1;
  }
  out << o.text;
  std::string text = detail::render(c, o);
  if (c.out.empty()) {
    if (c.command != "verify") out << text;
  } else {
    try {
      io::write_text(c.out, text);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return o.exit_code;
}

inline int main(int argc, const char* const* argv) {
  auto parsed = parse_config(argc, argv);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config);
}

}  // namespace projcap::cli
