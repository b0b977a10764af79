#include "qhinf/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qhinf/analysis.hpp"
#include "qhinf/cavity.hpp"
#include "qhinf/io.hpp"
#include "qhinf/realization.hpp"
#include "qhinf/synthesis.hpp"

namespace qhinf::cli {

namespace {

using io::Json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw io::InputError(what, "not a number: \"" + text + "\"");
  }
}

std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw io::InputError(what, "expected lo:hi");
  return {to_double(parts[0], what), to_double(parts[1], what)};
}

struct SweepSpec {
  double lo = 0.0, hi = 0.0;
  int n = 1;
};

SweepSpec parse_sweep(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw io::InputError("--sweep", "expected lo:hi:n");
  SweepSpec s{to_double(parts[0], "--sweep"), to_double(parts[1], "--sweep"), 0};
  const double n = to_double(parts[2], "--sweep");
  if (n < 1 || n != std::floor(n)) throw io::InputError("--sweep", "n must be a positive integer");
  s.n = static_cast<int>(n);
  return s;
}

std::vector<double> sweep_points(const SweepSpec& s) {
  if (s.n == 1) return {s.lo};
  std::vector<double> pts;
  for (int i = 0; i < s.n; ++i) pts.push_back(s.lo + (s.hi - s.lo) * i / (s.n - 1));
  return pts;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QHINF_SEED")) {
    const std::string text(env);
    try {
      std::size_t used = 0;
      const auto v = std::stoull(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw io::InputError("QHINF_SEED", "not an unsigned integer: \"" + text + "\"");
  }
  return 0;
}

Json with_manifest(Json j, const io::RunManifest& m) {
  j["manifest"] = io::manifest_to_json(m);
  return j;
}

void write_json(const std::string& path, const Json& j) { io::write_text_file(path, io::dump(j)); }

/// CSV has a fixed header on its first line, so its manifest goes next to it.
void write_csv(const std::string& path, const std::string& csv, const io::RunManifest& m) {
  io::write_text_file(path, csv);
  write_json(path + ".manifest.json", Json{{"output", path}, {"manifest", io::manifest_to_json(m)}});
}

void print_realizability(std::ostream& out, const std::string& label, const RealizabilityReport& r) {
  out << label << ": commutation residual " << fmt("%.3e", r.residual_commutation)
      << ", output residual " << fmt("%.3e", r.residual_output) << ", tolerance "
      << fmt("%.3e", r.tolerance) << " -> " << (r.realizable ? "realizable" : "NOT realizable")
      << '\n';
}

RealizabilityReport controller_realizability(const CoherentController& k) {
  return is_physically_realizable(k.system(), k.theta_K);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void print_elapsed(std::ostream& err, io::RunManifest& m, const Timer& t) {
  m.wall_clock_seconds = t.seconds();
  err << m.command << ": wall clock " << fmt("%.3f", m.wall_clock_seconds) << " s\n";
}

// ---------------------------------------------------------------- check

int cmd_check(const std::string& path, std::ostream& out) {
  const Json j = io::read_json_file(path);
  bool ok = true;
  if (j.is_object() && j.contains("A_K")) {
    const CoherentController k = io::parse_controller(j);
    const auto r = controller_realizability(k);
    print_realizability(out, "controller", r);
    ok = r.realizable;
  } else {
    const io::ModelFile model = io::parse_model(j);
    if (model.plant) {
      const auto r = is_physically_realizable(model.plant->full_system(), model.plant->theta);
      print_realizability(out, "plant", r);
      ok = ok && r.realizable;
    }
    if (model.slh) {
      const StateSpace ss = slh_to_state_space(*model.slh, model.theta);
      const auto r = is_physically_realizable(ss, model.theta);
      print_realizability(out, "slh", r);
      ok = ok && r.realizable;
    }
  }
  out << "verdict: " << (ok ? "realizable" : "not realizable") << '\n';
  return ok ? kSuccess : kFailed;
}

// ---------------------------------------------------------------- synthesize

struct SynthesizeOptions {
  std::string model;
  double g = 0.0;
  std::optional<double> eps;
  std::optional<std::string> eps_range;
  int delta_points = 21;
  std::string delta_mode = "scalar";
  std::optional<std::uint64_t> seed;
  bool no_uncertainty = false;
  std::optional<std::string> out;
  std::optional<std::string> report;
};

Json design_config_json(const SynthesisConfig& c, const std::string& mode, int points,
                        std::uint64_t seed, bool uncertainty) {
  Json j{{"g", c.g}};
  if (c.eps) {
    j["eps"] = *c.eps;
  } else {
    j["eps_range"] = Json::array({c.eps_grid.lo, c.eps_grid.hi});
    j["eps_points_per_decade"] = c.eps_grid.points_per_decade;
  }
  j["delta_grid"] = Json{{"mode", mode}, {"points", points}, {"seed", seed}};
  j["uncertainty"] = uncertainty;
  return j;
}

std::vector<UncertaintySample> make_delta_grid(Eigen::Index m, const std::string& mode, int points,
                                               std::uint64_t seed) {
  if (mode == "scalar") return scalar_delta_grid(m, points);
  if (mode == "random") return random_delta_grid(m, seed, points);
  throw io::InputError("--delta-mode", "expected scalar or random");
}

Json controller_file(const SynthesisReport& r, const io::RunManifest& m) {
  Json j = io::controller_to_json(r.controller);
  j["design"] = Json{{"g", r.g}, {"eps", r.eps_used}};
  return with_manifest(std::move(j), m);
}

Json infeasible_report(double g, const std::string& error, const std::vector<EpsEvaluation>& trace,
                       const io::RunManifest& m) {
  Json j{{"feasible", false}, {"g", g}, {"error", error}, {"per_eps_trace", io::trace_to_json(trace)}};
  return with_manifest(std::move(j), m);
}

void print_trace(std::ostream& out, const std::vector<EpsEvaluation>& trace) {
  out << "eps trace (" << trace.size() << " points):\n";
  for (const auto& e : trace) {
    out << "  eps " << fmt("%.6g", e.eps) << ": "
        << (e.feasible ? "feasible, worst-case norm " + fmt("%.6g", e.worst_case_norm)
                       : "infeasible (" + e.failure + ")")
        << '\n';
  }
}

void print_design(std::ostream& out, const SynthesisReport& r) {
  out << "feasible at eps " << fmt("%.9g", r.eps_used) << (r.epsilon_inert ? " (eps-inert)" : "")
      << '\n'
      << "rho(XY) " << fmt("%.6g", r.assumptions.rho_XY) << ", scaled norm "
      << fmt("%.6g", r.scaled_norm) << ", worst-case norm " << fmt("%.6g", r.worst_case_norm)
      << " (g = " << fmt("%.6g", r.g) << ")\n";
  print_realizability(out, "controller", controller_realizability(r.controller));
}

struct DesignOutcome {
  std::optional<SynthesisReport> report;
  std::string error;
  std::vector<EpsEvaluation> trace;
};

DesignOutcome run_design(const OpenPlant& plant, const SynthesisConfig& config) {
  DesignOutcome o;
  try {
    o.report = synthesize(plant, config);
  } catch (const NoFeasibleEpsilon& e) {
    o.error = e.what();
    o.trace = e.trace();
  } catch (const InvalidConfig&) {
    throw;
  } catch (const ContractError&) {
    throw;
  } catch (const DimensionError&) {
    throw;
  } catch (const Error& e) {
    o.error = e.what();
  }
  return o;
}

int cmd_synthesize(const SynthesizeOptions& o, std::ostream& out, std::ostream& err) {
  Timer timer;
  const io::ModelFile model = io::parse_model(io::read_json_file(o.model));
  if (!model.plant) throw io::InputError(o.model, "synthesis needs a \"plant\" section");
  OpenPlant plant = *model.plant;
  if (o.no_uncertainty) plant.uncertainty.E.setZero();

  const std::uint64_t seed = resolve_seed(o.seed);
  SynthesisConfig config;
  config.g = o.g;
  config.eps = o.eps;
  if (o.eps_range) {
    const auto [lo, hi] = parse_range(*o.eps_range, "--eps-range");
    config.eps_grid.lo = lo;
    config.eps_grid.hi = hi;
  }
  config.delta_grid = make_delta_grid(plant.m(), o.delta_mode, o.delta_points, seed);
  config.validate();

  io::RunManifest manifest{"synthesize", {o.model},
                           design_config_json(config, o.delta_mode, o.delta_points, seed,
                                              !o.no_uncertainty),
                           kToolVersion, seed};

  const DesignOutcome d = run_design(plant, config);
  print_elapsed(err, manifest, timer);
  if (!d.report) {
    out << "infeasible: " << d.error << '\n';
    print_trace(out, d.trace);
    if (o.report) write_json(*o.report, infeasible_report(o.g, d.error, d.trace, manifest));
    return kFailed;
  }
  print_design(out, *d.report);
  if (o.out) write_json(*o.out, controller_file(*d.report, manifest));
  if (o.report) write_json(*o.report, with_manifest(io::report_to_json(*d.report), manifest));
  return kSuccess;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string model;
  std::string controller;
  std::optional<std::string> reference;
  std::optional<double> delta;
  std::optional<std::string> sweep;
  std::optional<std::string> out;
  std::optional<double> g;
};

std::optional<double> design_g(const Json& j) {
  if (j.is_object() && j.contains("design") && j.at("design").contains("g") &&
      j.at("design").at("g").is_number())
    return j.at("design").at("g").get<double>();
  return std::nullopt;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  Timer timer;
  const io::ModelFile model = io::parse_model(io::read_json_file(o.model));
  if (!model.plant) throw io::InputError(o.model, "analysis needs a \"plant\" section");
  const OpenPlant& plant = *model.plant;
  const Json kj = io::read_json_file(o.controller);
  std::vector<CoherentController> controllers{io::parse_controller(kj)};
  std::vector<std::string> inputs{o.model, o.controller};
  if (o.reference) {
    controllers.push_back(io::parse_controller(io::read_json_file(*o.reference)));
    inputs.push_back(*o.reference);
  }
  for (const auto& k : controllers) {
    if (k.n_y() != plant.n_y() || k.n_u() != plant.n_u())
      throw io::InputError(o.controller, "controller does not fit the plant's y/u channels");
  }
  if (o.delta.has_value() == o.sweep.has_value())
    throw io::InputError("analyze", "give exactly one of --delta or --sweep");

  const std::optional<double> g = o.g ? o.g : design_g(kj);
  if (g && !(*g > 0.0)) throw io::InputError("--g", "must be > 0");
  std::vector<double> deltas;
  if (o.delta) {
    deltas = {*o.delta};
  } else {
    deltas = sweep_points(parse_sweep(*o.sweep));
  }
  for (double d : deltas)
    if (!(std::abs(d) <= 1.0)) throw io::InputError("analyze", "delta outside [-1, 1]");

  Json config{{"g", g ? Json(*g) : Json(nullptr)}};
  if (o.delta) config["delta"] = *o.delta;
  if (o.sweep) config["sweep"] = *o.sweep;
  io::RunManifest manifest{"analyze", inputs, config, kToolVersion, 0};

  const SweepResult result =
      sweep(plant, controllers, deltas, g.value_or(std::numeric_limits<double>::infinity()));
  print_elapsed(err, manifest, timer);

  if (o.delta) {
    const SweepRow& row = result.rows.front();
    if (std::isinf(row.norm_robust)) {
      out << "closed loop unstable at delta " << fmt("%.9g", row.delta) << '\n';
      return kFailed;
    }
    out << "norm " << fmt("%.9g", row.norm_robust);
    if (row.norm_reference) out << ", reference " << fmt("%.9g", *row.norm_reference);
    if (g) out << (row.attenuation_met ? " < g" : " >= g");
    out << '\n';
  } else {
    out << "max norm over " << result.rows.size() << " points: "
        << fmt("%.9g", result.max_robust()) << '\n';
  }
  if (o.out) {
    write_csv(*o.out, sweep_to_csv(result), manifest);
  } else if (o.sweep) {
    out << sweep_to_csv(result);
  }
  return kSuccess;
}

// ---------------------------------------------------------------- realize

int cmd_realize(const std::string& path, const std::optional<std::string>& out_path,
                std::ostream& out) {
  const io::ControllerTripleFile t = io::parse_controller_triple(io::read_json_file(path));
  const Eigen::Index ny = t.B_K.cols(), nu = t.C_K.rows();
  if (ny % 2 != 0 || nu % 2 != 0) throw io::InputError(path, "y and u need an even count");
  const auto theta_y = canonical_theta(ny), theta_u = canonical_theta(nu);
  const Matrix xi = noise_channel_defect(t.A_K, t.B_K, t.C_K, t.theta_K, theta_y, theta_u);
  const CoherentController k =
      complete_realization(t.A_K, t.B_K, t.C_K, t.theta_K, theta_y, theta_u);
  if (xi.rows() == 2) {
    out << "Xi = " << fmt("%.9g", xi(0, 1)) << " J\n";
  } else {
    out << "Xi =\n" << xi << '\n';
  }
  out << "B_K1 =\n" << k.B_K1 << '\n';
  const auto r = controller_realizability(k);
  print_realizability(out, "controller", r);
  if (out_path) {
    io::RunManifest manifest{"realize", {path}, Json::object(), kToolVersion, 0};
    write_json(*out_path, with_manifest(io::controller_to_json(k), manifest));
  }
  return r.realizable ? kSuccess : kFailed;
}

// ---------------------------------------------------------------- demo-cavity

std::string matrix_line(const Matrix& m) {
  std::ostringstream s;
  s << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s << "; ";
    for (Eigen::Index k = 0; k < m.cols(); ++k) s << (k ? " " : "") << fmt("%.6g", m(i, k) + 0.0);
  }
  s << ']';
  return s.str();
}

int cmd_demo_cavity(double g, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  Timer timer;
  std::filesystem::create_directories(out_dir);
  const auto file = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

  cavity::Parameters robust_params;
  cavity::Parameters nominal_params;
  nominal_params.uncertain = false;
  const OpenPlant robust_plant = cavity::plant(robust_params);
  const OpenPlant nominal_plant = cavity::plant(nominal_params);

  SynthesisConfig config;
  config.g = g;
  config.delta_grid = scalar_delta_grid(robust_plant.m());
  config.validate();

  io::RunManifest manifest{"demo-cavity", {},
                           design_config_json(config, "scalar", 21, 0, true), kToolVersion, 0};

  io::ModelFile model{robust_plant, cavity::slh(robust_params), robust_plant.theta};
  write_json(file("cavity_model.json"), with_manifest(io::model_to_json(model), manifest));

  const DesignOutcome robust = run_design(robust_plant, config);
  const DesignOutcome nominal = run_design(nominal_plant, config);

  const auto record = [&](const DesignOutcome& d, const char* report_name, const char* ctrl_name) {
    if (d.report) {
      write_json(file(report_name), with_manifest(io::report_to_json(*d.report), manifest));
      write_json(file(ctrl_name), controller_file(*d.report, manifest));
    } else {
      write_json(file(report_name), infeasible_report(g, d.error, d.trace, manifest));
    }
  };
  record(robust, "report_robust.json", "controller_robust.json");
  record(nominal, "report_nominal.json", "controller_nominal.json");

  std::ostringstream summary;
  summary << "cavity demo, g = " << fmt("%.6g", g) << "\n\n";

  if (nominal.report) {
    const auto& k = nominal.report->controller;
    const auto pub = cavity::reference_nominal();
    const Matrix I = Matrix::Identity(2, 2);
    const double dev = std::max({(k.A_K - pub.a_k * I).cwiseAbs().maxCoeff(),
                                 (k.B_K - pub.b_k * I).cwiseAbs().maxCoeff(),
                                 (k.C_K - pub.c_k * I).cwiseAbs().maxCoeff(),
                                 nominal.report->X.value.cwiseAbs().maxCoeff(),
                                 nominal.report->Y.value.cwiseAbs().maxCoeff()});
    summary << "uncertainty-free controller (eps " << fmt("%.6g", nominal.report->eps_used)
            << ")\n"
            << "  A_K " << matrix_line(k.A_K) << "  reference " << fmt("%.4f", pub.a_k) << " I\n"
            << "  B_K " << matrix_line(k.B_K) << "  reference " << fmt("%.4f", pub.b_k) << " I\n"
            << "  C_K " << matrix_line(k.C_K) << "  reference " << fmt("%.4f", pub.c_k) << " I\n"
            << "  X " << matrix_line(nominal.report->X.value) << "  Y "
            << matrix_line(nominal.report->Y.value) << "\n"
            << "  max deviation from reference values " << fmt("%.3e", dev)
            << (dev <= 1e-3 ? " (match within 1e-3)" : " (MISMATCH beyond 1e-3)") << "\n\n";
  } else {
    summary << "uncertainty-free design infeasible: " << nominal.error << "\n\n";
  }

  if (robust.report) {
    const auto& r = *robust.report;
    const auto pub = cavity::reference_robust();
    summary << "robust controller (eps " << fmt("%.6g", r.eps_used) << ")\n"
            << "  A_K " << matrix_line(r.controller.A_K) << "  reference "
            << fmt("%.4f", pub.a_k) << " I\n"
            << "  B_K " << matrix_line(r.controller.B_K) << "  reference "
            << fmt("%.4f", pub.b_k) << " I\n"
            << "  C_K " << matrix_line(r.controller.C_K) << "  reference "
            << fmt("%.4f", pub.c_k) << " I\n"
            << "  X " << matrix_line(r.X.value) << "  reference "
            << fmt("%.4f", cavity::kReferenceRobustX) << " I (informational)\n"
            << "  Y " << matrix_line(r.Y.value) << "  reference "
            << fmt("%.4f", cavity::kReferenceRobustY) << " I (informational)\n"
            << "  rho(XY) " << fmt("%.6g", r.assumptions.rho_XY) << ", worst-case norm on the design grid "
            << fmt("%.6g", r.worst_case_norm) << "\n\n";
  } else {
    summary << "robust design infeasible: " << robust.error << '\n';
    for (const auto& e : robust.trace)
      summary << "  eps " << fmt("%.6g", e.eps) << ": " << (e.feasible ? "feasible" : e.failure)
              << '\n';
    summary << '\n';
  }

  int code = kSuccess;
  if (robust.report && nominal.report) {
    std::vector<double> deltas;
    for (int i = 0; i <= 20; ++i) deltas.push_back(-1.0 + 0.1 * i);
    const SweepResult s = sweep(robust_plant, {robust.report->controller, nominal.report->controller},
                                deltas, g);
    write_csv(file("sweep.csv"), sweep_to_csv(s), manifest);
    const SweepRow& at_zero = s.rows[10];
    const SweepRow& at_neg = s.rows.front();
    const SweepRow& at_pos = s.rows.back();
    const bool small_better = *at_zero.norm_reference < at_zero.norm_robust;
    const bool large_worse =
        *at_neg.norm_reference > at_neg.norm_robust && *at_pos.norm_reference > at_pos.norm_robust;
    summary << "sweep over delta in [-1, 1], 21 points\n"
            << "  robust max norm " << fmt("%.6g", s.max_robust())
            << (s.max_robust() <= g ? " <= g" : " > g") << "\n"
            << "  delta = 0: robust " << fmt("%.6g", at_zero.norm_robust) << ", uncertainty-free "
            << fmt("%.6g", *at_zero.norm_reference)
            << (small_better ? " (uncertainty-free better)" : " (uncertainty-free NOT better)")
            << "\n"
            << "  |delta| = 1: robust " << fmt("%.6g", at_pos.norm_robust) << ", uncertainty-free "
            << fmt("%.6g", *at_pos.norm_reference)
            << (large_worse ? " (robust better)" : " (robust NOT better)") << "\n\n";
  } else {
    code = kFailed;
  }

  summary << "manifest\n" << io::dump(io::manifest_to_json(manifest));
  io::write_text_file(file("summary.txt"), summary.str());
  out << summary.str();
  print_elapsed(err, manifest, timer);
  return code;
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent robust H-infinity controller synthesis for linear quantum systems"};
  app.name("qhinf");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string check_path;
  auto* check = app.add_subcommand("check", "Physical realizability of a model or controller file");
  check->add_option("file", check_path, "model or controller JSON")->required();

  SynthesizeOptions so;
  auto* synth = app.add_subcommand("synthesize", "Robust coherent H-infinity controller design");
  synth->add_option("model", so.model, "model JSON")->required();
  synth->add_option("--g", so.g, "disturbance attenuation")->required();
  synth->add_option("--eps", so.eps, "fixed scaling parameter (skips the search)");
  synth->add_option("--eps-range", so.eps_range, "search range lo:hi");
  synth->add_option("--delta-grid", so.delta_points, "number of uncertainty samples")
      ->check(CLI::PositiveNumber);
  synth->add_option("--delta-mode", so.delta_mode, "scalar or random")
      ->check(CLI::IsMember({"scalar", "random"}));
  synth->add_option("--seed", so.seed, "seed for random uncertainty samples");
  synth->add_flag("--no-uncertainty", so.no_uncertainty, "design with E = 0");
  synth->add_option("--out", so.out, "controller JSON output");
  synth->add_option("--report", so.report, "report JSON output");

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Closed-loop H-infinity norm versus delta");
  analyze->add_option("model", ao.model, "model JSON")->required();
  analyze->add_option("controller", ao.controller, "controller JSON")->required();
  analyze->add_option("--reference", ao.reference, "second controller for comparison");
  auto* delta_opt = analyze->add_option("--delta", ao.delta, "single uncertainty value");
  auto* sweep_opt = analyze->add_option("--sweep", ao.sweep, "sweep lo:hi:n");
  delta_opt->excludes(sweep_opt);
  analyze->add_option("--out", ao.out, "CSV output");
  analyze->add_option("--g", ao.g, "attenuation for the meets_g column");

  std::string triple_path;
  std::optional<std::string> realize_out;
  auto* realize = app.add_subcommand("realize", "Complete a controller triple to a realizable one");
  realize->add_option("triple", triple_path, "JSON with A_K, B_K, C_K")->required();
  realize->add_option("--out", realize_out, "controller JSON output");

  double demo_g = 0.35;
  std::string demo_dir = "cavity_demo";
  auto* demo = app.add_subcommand("demo-cavity", "Optical cavity example end to end");
  demo->add_option("--g", demo_g, "disturbance attenuation");
  demo->add_option("--out-dir", demo_dir, "output directory");

  std::vector<const char*> argv{"qhinf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  if (*check) return cmd_check(check_path, out);
  if (*synth) return cmd_synthesize(so, out, err);
  if (*analyze) return cmd_analyze(ao, out, err);
  if (*realize) return cmd_realize(triple_path, realize_out, out);
  if (*demo) {
    if (!(demo_g > 0.0)) throw io::InputError("--g", "must be > 0");
    return cmd_demo_cavity(demo_g, demo_dir, out, err);
  }
  return kInputError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const io::InputError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
  } catch (const ContractError& e) {
    err << "invalid request: " << e.what() << '\n';
  } catch (const InvalidConfig& e) {
    err << "invalid configuration: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return kFailed;
  }
  return kInputError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qhinf::cli
