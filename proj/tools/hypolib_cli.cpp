// Batch front end: hypograph distances, approximation and SAA estimation.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypolib/approximation.hpp"
#include "hypolib/error.hpp"
#include "hypolib/estimation.hpp"
#include "hypolib/hypo_metric.hpp"
#include "hypolib/io.hpp"
#include "hypolib/parallel.hpp"
#include "hypolib/version.hpp"

using nlohmann::json;
using namespace hypolib;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json fn_values(const GridFn& f) {
  json a = json::array();
  for (std::size_t m = 0; m < f.size(); ++m) a.push_back(num(f[m].value()));
  return a;
}

// "dlTol" / "dl_tol" -> "dl-tol"
std::string flag_name(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '_') {
      out += '-';
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      out += '-';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_real(v.get<double>());
  return v.dump();
}

// Appends every config entry whose flag is absent from the command line, so
// explicit flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  const json cfg = read_json_file(*path);
  if (!cfg.is_object()) throw ValidationError(*path + ": config must be a JSON object");
  const std::vector<std::string> given(args);
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || key == "schema") continue;
    const std::string flag = "--" + flag_name(key);
    bool present = false;
    for (const auto& a : given) present = present || a == flag || a.rfind(flag + "=", 0) == 0;
    if (present || value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const json& e) { return e.is_primitive(); })) {
      for (const auto& e : value) args.push_back(flag + "=" + scalar_text(e));
    } else if (value.is_structured()) {
      args.push_back(flag + "=" + value.dump());
    } else {
      args.push_back(flag + "=" + scalar_text(value));
    }
  }
  return args;
}

struct Common {
  std::optional<unsigned> threads;
  std::string report;
};

void emit(const std::string& path, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

json make_report(const std::string& command, json inputs, json parameters, json results,
                 std::optional<std::uint64_t> seed) {
  return {{"command", command},
          {"inputs", std::move(inputs)},
          {"parameters", std::move(parameters)},
          {"results", std::move(results)},
          {"version", kVersion},
          {"seed", seed ? json(*seed) : json(nullptr)}};
}

void require_set(const CLI::App* app, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (app->get_option(n)->count() == 0) {
      throw ValidationError(std::string(app->get_name()) + ": missing required option " + n);
    }
  }
}

// ---- dist ---------------------------------------------------------------------

struct DistArgs {
  std::string f, g;
  double tol = 1e-6;
  std::optional<double> rho;
};

json run_dist(const DistArgs& a) {
  const GridFn f = read_gridfn_csv_file(a.f);
  std::ifstream in(a.g);
  if (!in) throw ValidationError("cannot open '" + a.g + "'");
  const GridFn g = read_gridfn_csv(in, f.domain_ptr(), a.g);
  const DistReport d = dl(f, g, a.tol);
  json results = {{"value", num(d.value)},
                  {"errorBound", num(d.error_bound)},
                  {"rhoMax", num(d.rho_max)},
                  {"breakpointCount", d.breakpoint_count},
                  {"rhoEvaluations", d.rho_evaluations}};
  json params = {{"tol", a.tol}};
  if (a.rho) {
    params["rho"] = *a.rho;
    const SandwichReport s = check_sandwich(f, g, *a.rho, a.tol);
    results["dlRho"] = num(dl_rho(f, g, *a.rho));
    results["dhatRho"] = num(dhat_rho(f, g, *a.rho));
    results["sandwich"] = {{"lower", num(s.lower)}, {"upper", num(s.upper)}, {"holds", s.holds}};
  }
  return make_report("dist", {{"f", a.f}, {"g", a.g}}, params, results, std::nullopt);
}

// ---- approx -------------------------------------------------------------------

struct PipelineArgs {
  std::string target, schedule, out, stage_dir;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t restarts = 10, iterations = 100;
};

json run_pipeline(const PipelineArgs& a) {
  const GridFn f = read_gridfn_csv_file(a.target);
  const json sj = read_json_arg(a.schedule);
  const json& stages = sj.is_array() ? sj : (sj.contains("stages") ? sj["stages"] : json());
  if (!stages.is_array() || stages.empty()) throw ValidationError("schedule: expected a non-empty array of stages");
  PipelineSchedule sched;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const json& s = stages[k];
    const std::string ctx = "schedule.stages[" + std::to_string(k) + "]";
    auto real = [&](const char* name, std::optional<double> fallback) -> double {
      if (!s.contains(name) || s[name].is_null()) {
        if (fallback) return *fallback;
        throw ValidationError(ctx + ": missing field '" + name + "'");
      }
      const json& v = s[name];
      if (v.is_number()) return v.get<double>();
      if (v.is_string() && (v == "inf" || v == "+inf")) return kInf;
      throw ValidationError(ctx + ": field '" + name + "' must be a number");
    };
    if (!s.is_object()) throw ValidationError(ctx + ": expected an object");
    if (!s.contains("q") || !s["q"].is_number_unsigned()) {
      throw ValidationError(ctx + ": field 'q' must be a positive integer");
    }
    sched.stages.push_back(PipelineStage{real("cap", kInf), real("lambda", std::nullopt), real("rho", std::nullopt),
                                         s["q"].get<std::size_t>()});
  }
  sched.validate();
  PaFitOptions fit;
  fit.restarts = a.restarts;
  fit.iterations = a.iterations;
  fit.seed = a.seed;
  const auto res = hypo_approx_sequence(f, sched, a.tol, fit);
  json rows = json::array();
  for (std::size_t k = 0; k < res.size(); ++k) {
    const auto& st = sched.stages[k];
    rows.push_back({{"cap", num(st.cap)},
                    {"lambda", st.lambda},
                    {"rho", st.rho},
                    {"q", st.q},
                    {"dlToTarget", num(res[k].dl_to_target)},
                    {"dlError", num(res[k].dl_error)},
                    {"fitResidual", num(res[k].fit_residual)},
                    {"fit", to_json(res[k].fit)}});
    if (!a.stage_dir.empty()) {
      write_gridfn_csv_file(a.stage_dir + "/stage_" + std::to_string(k + 1) + ".csv",
                            pa_to_gridfn(res[k].fit, f.domain_ptr()));
    }
  }
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw ValidationError("cannot write '" + a.out + "'");
    out << to_json(res.back().fit).dump(2) << "\n";
  }
  const bool improved = res.back().dl_to_target < res.front().dl_to_target;
  return make_report("approx pipeline", {{"target", a.target}, {"schedule", sj}},
                     {{"tol", a.tol}, {"restarts", a.restarts}, {"iterations", a.iterations}},
                     {{"stages", rows}, {"finalBelowFirst", improved}}, a.seed);
}

struct CoverArgs {
  double eps = 0.0, r = 0.0, omega = 0.0;
  std::vector<double> gammas;
  std::size_t n = 1;
  std::optional<double> eps_bar, rho_prime;
  bool compat = false;
  std::string f, out;
  double tol = 1e-4;
};

json run_cover(const CoverArgs& a) {
  if (a.gammas.size() != 3) throw ValidationError("cover: --gammas needs exactly three values");
  CoverOptions opts;
  opts.eps_bar = a.eps_bar;
  opts.compat = a.compat;
  const CoverParams p = cover_params(a.eps, a.r, a.gammas[0], a.gammas[1], a.gammas[2], a.omega, a.n, opts);
  json results = {{"rho", p.rho},
                  {"nu", p.nu},
                  {"m", p.m},
                  {"K", num(p.K)},
                  {"epsBar", p.eps_bar},
                  {"c", {p.c1, p.c2, p.c3, p.c4, p.c5, p.c6, p.c7}},
                  {"logCount", num(p.log_count)},
                  {"bound", num(p.bound)},
                  {"bracket", num(p.bracket)},
                  {"boundHolds", p.bound_holds()}};
  json inputs = json::object();
  if (!a.f.empty()) {
    inputs["f"] = a.f;
    const GridFn f = read_gridfn_csv_file(a.f);
    const GridFn q = quantize_to_cover(f, p, a.rho_prime);
    const DistReport d = dl(f, q, a.tol);
    results["quantized"] = {
        {"dl", num(d.value)}, {"dlError", num(d.error_bound)}, {"withinEps", d.value - d.error_bound <= p.eps}};
    if (!a.out.empty()) write_gridfn_csv_file(a.out, q);
  }
  json params = {{"eps", a.eps},     {"r", a.r},         {"gammas", a.gammas}, {"omega", a.omega},
                 {"n", a.n},         {"compat", a.compat}, {"tol", a.tol}};
  if (a.eps_bar) params["epsBar"] = *a.eps_bar;
  if (a.rho_prime) params["rhoPrime"] = *a.rho_prime;
  return make_report("approx cover", inputs, params, results, std::nullopt);
}

struct PackArgs {
  double rho = 0.0, eps = 0.0, cap = 1e6;
  std::size_t n = 1;
  bool verify = false;
};

json run_pack(const PackArgs& a) {
  const PackingFamily fam = packing_family(a.rho, a.eps, a.n, a.cap);
  json results = {{"members", fam.members.size()}, {"nuEps", fam.nu_eps}, {"levels", fam.levels}};
  if (a.verify) {
    const PackingReport r = verify_packing_separation(fam);
    results["separated"] = r.separated;
    results["pairs"] = r.pairs;
    results["minPairwiseLower"] = num(r.min_pairwise_lower);
    results["logCount"] = num(r.log_count);
    results["lowerBound"] = num(r.lower_bound);
  }
  return make_report("approx pack", json::object(),
                     {{"rho", a.rho}, {"eps", a.eps}, {"n", a.n}, {"cap", a.cap}, {"verify", a.verify}}, results,
                     std::nullopt);
}

// ---- estimation ---------------------------------------------------------------

struct SolverArgs {
  std::size_t max_iter = 2000;
  std::string rule = "spectral";
  double a = 1.0, b = 0.1, tol = 1e-12;

  [[nodiscard]] SaaOptions options(std::uint64_t seed) const {
    SaaOptions o;
    o.max_iter = max_iter;
    if (rule == "spectral") {
      o.rule = StepRule::Spectral;
    } else if (rule == "diminishing") {
      o.rule = StepRule::Diminishing;
    } else {
      throw ValidationError("--rule must be 'spectral' or 'diminishing'");
    }
    o.a = a;
    o.b = b;
    o.tol = tol;
    o.seed = seed;
    return o;
  }
  [[nodiscard]] json to_json() const {
    return {{"maxIter", max_iter}, {"rule", rule}, {"a", a}, {"b", b}, {"tol", tol}};
  }
};

void add_solver_options(CLI::App* app, SolverArgs& s) {
  app->add_option("--max-iter", s.max_iter, "solver iteration cap");
  app->add_option("--rule", s.rule, "step rule: spectral or diminishing");
  app->add_option("--a", s.a, "diminishing step numerator");
  app->add_option("--b", s.b, "diminishing step decay");
  app->add_option("--solver-tol", s.tol, "projected-gradient stopping tolerance");
}

struct EstimateArgs {
  std::string objective, data, cls, out;
  std::uint64_t seed = 0;
  SolverArgs solver;
};

json run_estimate(const EstimateArgs& a) {
  const ObjectiveKind obj = parse_objective(a.objective);
  const FunctionClass c = class_from_json(read_json_arg(a.cls), a.cls);
  const Sample s = read_sample_csv_file(a.data, *c.domain);
  if (obj == ObjectiveKind::LsRegression && !s.has_response()) {
    throw ValidationError(a.data + ": regression data needs a 'y' column");
  }
  const SaaResult r = saa_solve(obj, s, c, a.solver.options(a.seed));
  if (!a.out.empty()) write_gridfn_csv_file(a.out, r.f);
  json params = a.solver.to_json();
  params["objective"] = objective_name(obj);
  return make_report("estimate", {{"data", a.data}, {"class", a.cls}}, params,
                     {{"value", num(r.value)},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"sampleSize", s.size()},
                      {"f", fn_values(r.f)}},
                     a.seed);
}

struct ConfidenceArgs {
  std::string objective, data, f;
  double delta = 0.0;
  std::optional<double> c;
};

json run_confidence(const ConfidenceArgs& a) {
  const ObjectiveKind obj = parse_objective(a.objective);
  const GridFn f = read_gridfn_csv_file(a.f);
  const Sample s = read_sample_csv_file(a.data, f.domain());
  if (obj == ObjectiveKind::LsRegression && !s.has_response()) {
    throw ValidationError(a.data + ": regression data needs a 'y' column");
  }
  const double avg = sample_average(obj, s, f);
  json results = {{"sampleAverage", num(avg)}, {"member", level_set_member(obj, s, f, a.delta)}, {"sampleSize", s.size()}};
  json params = {{"objective", objective_name(obj)}, {"delta", num(a.delta)}};
  if (a.c) {
    params["c"] = *a.c;
    results["radius"] = num(confidence_radius(static_cast<double>(s.size()), f.domain().dim(), *a.c));
  }
  return make_report("confidence", {{"data", a.data}, {"f", a.f}}, params, results, std::nullopt);
}

struct ExperimentArgs {
  std::string objective, truth, cls, csv;
  std::vector<std::size_t> nus;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  double dl_tol = 1e-4;
  SolverArgs solver;
};

ExperimentConfig experiment_config(const ExperimentArgs& a) {
  if (a.nus.empty()) throw ValidationError("--nus needs at least one sample size");
  ExperimentConfig cfg;
  cfg.objective = parse_objective(a.objective);
  cfg.truth = truth_from_json(read_json_arg(a.truth), "truth");
  cfg.cls = class_from_json(read_json_arg(a.cls), "class", cfg.truth.domain);
  cfg.nus = a.nus;
  cfg.replications = a.replications;
  cfg.seed = a.seed;
  cfg.solver = a.solver.options(a.seed);
  cfg.dl_tol = a.dl_tol;
  return cfg;
}

json experiment_params(const ExperimentArgs& a) {
  json p = a.solver.to_json();
  p["objective"] = a.objective;
  p["nus"] = a.nus;
  p["replications"] = a.replications;
  p["dlTol"] = a.dl_tol;
  return p;
}

json run_rate(const ExperimentArgs& a) {
  const ExperimentConfig cfg = experiment_config(a);
  const RateReport r = rate_experiment(cfg);
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"nu", row.nu},
                    {"medianGap", num(row.median_gap)},
                    {"medianDl", num(row.median_dist)},
                    {"gaps", nums(row.gaps)},
                    {"dls", nums(row.dists)}});
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw ValidationError("cannot write '" + a.csv + "'");
    out << "nu,median_gap,median_dl,replications\n";
    for (const auto& row : r.rows) {
      out << row.nu << ',' << format_real(row.median_gap) << ',' << format_real(row.median_dist) << ','
          << row.gaps.size() << '\n';
    }
  }
  return make_report("rate", {{"truth", read_json_arg(a.truth)}, {"class", read_json_arg(a.cls)}},
                     experiment_params(a),
                     {{"populationValue", num(r.population_value)},
                      {"slope", num(r.slope)},
                      {"gapFloor", num(r.gap_floor)},
                      {"rows", rows}},
                     a.seed);
}

json run_consistency(const ExperimentArgs& a) {
  const ExperimentConfig cfg = experiment_config(a);
  const ConsistencyReport r = consistency_experiment(cfg);
  json dists = json::array();
  for (const auto& row : r.dist) dists.push_back(nums(row));
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw ValidationError("cannot write '" + a.csv + "'");
    out << "replication,nu,dl\n";
    for (std::size_t rep = 0; rep < r.dist.size(); ++rep) {
      for (std::size_t k = 0; k < r.nus.size(); ++k) {
        out << rep << ',' << r.nus[k] << ',' << format_real(r.dist[rep][k]) << '\n';
      }
    }
  }
  return make_report("consistency", {{"truth", read_json_arg(a.truth)}, {"class", read_json_arg(a.cls)}},
                     experiment_params(a), {{"dl", dists}, {"decreasingFraction", r.decreasing_fraction}}, a.seed);
}

void add_experiment_options(CLI::App* app, ExperimentArgs& e) {
  app->add_option("--objective", e.objective, "mle, ls or ls_density");
  app->add_option("--truth", e.truth, "truth JSON (path or inline)");
  app->add_option("--class", e.cls, "function class JSON (path or inline)");
  app->add_option("--nus", e.nus, "sample-size schedule");
  app->add_option("--replications", e.replications, "replications per sample size");
  app->add_option("--seed", e.seed, "random seed");
  app->add_option("--dl-tol", e.dl_tol, "quadrature tolerance for dl");
  app->add_option("--csv", e.csv, "plot-ready CSV output");
  add_solver_options(app, e.solver);
}

unsigned threads_from_env() {
  const char* env = std::getenv("HYPOLIB_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') throw ValidationError("HYPOLIB_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(v);
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  args = merge_config(std::move(args));

  CLI::App app{"hypolib: hypograph distances, approximation and sample-average estimation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads, "worker cap (default: HYPOLIB_THREADS, else all cores)");
  app.add_option("--report", common.report, "write the JSON report here instead of stdout");

  DistArgs dist;
  CLI::App* dist_cmd = app.add_subcommand("dist", "dl distance between two CSV functions");
  dist_cmd->add_option("--f", dist.f, "first function (CSV)");
  dist_cmd->add_option("--g", dist.g, "second function (CSV)");
  dist_cmd->add_option("--tol", dist.tol, "quadrature tolerance");
  dist_cmd->add_option("--rho", dist.rho, "also report dl_rho, dhat_rho and the sandwich bounds at rho");

  CLI::App* approx_cmd = app.add_subcommand("approx", "approximation: pipeline, cover, pack");
  approx_cmd->require_subcommand(1);

  PipelineArgs pipe;
  CoverArgs cover;
  PackArgs pack;
  std::vector<CLI::App*> pipe_cmds, cover_cmds, pack_cmds;
  // Each approximation command is reachable as "approx <name>" and "<name>".
  for (CLI::App* parent : {approx_cmd, static_cast<CLI::App*>(&app)}) {
    CLI::App* p = parent->add_subcommand("pipeline", "truncate, smooth and fit a schedule of difference-of-max stages");
    p->add_option("--target", pipe.target, "target function (CSV)");
    p->add_option("--schedule", pipe.schedule, "schedule JSON (path or inline)");
    p->add_option("--tol", pipe.tol, "quadrature tolerance");
    p->add_option("--seed", pipe.seed, "random seed for fitting restarts");
    p->add_option("--restarts", pipe.restarts, "fitting restarts");
    p->add_option("--iterations", pipe.iterations, "fitting iteration cap");
    p->add_option("--out", pipe.out, "final fit as JSON");
    p->add_option("--stage-dir", pipe.stage_dir, "directory for per-stage CSV functions");
    pipe_cmds.push_back(p);

    CLI::App* c = parent->add_subcommand("cover", "covering construction constants and quantizer");
    c->add_option("--eps", cover.eps, "target accuracy");
    c->add_option("--r", cover.r, "hypograph radius bound");
    c->add_option("--gammas", cover.gammas, "gamma1 gamma2 gamma3")->expected(3);
    c->add_option("--omega", cover.omega, "box enlargement factor");
    c->add_option("--n", cover.n, "dimension");
    c->add_option("--eps-bar", cover.eps_bar, "upper end of the admissible eps range");
    c->add_flag("--compat", cover.compat, "allow omega <= 1");
    c->add_option("--f", cover.f, "function to quantize (CSV)");
    c->add_option("--rho-prime", cover.rho_prime, "clip level for the quantizer (default omega*rho)");
    c->add_option("--out", cover.out, "quantized function (CSV)");
    c->add_option("--tol", cover.tol, "quadrature tolerance");
    cover_cmds.push_back(c);

    CLI::App* k = parent->add_subcommand("pack", "packing family and its separation");
    k->add_option("--rho", pack.rho, "radius");
    k->add_option("--eps", pack.eps, "separation");
    k->add_option("--n", pack.n, "dimension");
    k->add_option("--cap", pack.cap, "member-count cap");
    k->add_flag("--verify", pack.verify, "check pairwise separation");
    pack_cmds.push_back(k);
  }

  EstimateArgs est;
  CLI::App* est_cmd = app.add_subcommand("estimate", "solve a sample-average problem over a function class");
  est_cmd->add_option("--objective", est.objective, "mle, ls or ls_density");
  est_cmd->add_option("--data", est.data, "sample CSV (x1..xn[,y])");
  est_cmd->add_option("--class", est.cls, "function class JSON (path or inline)");
  est_cmd->add_option("--out", est.out, "estimate (CSV)");
  est_cmd->add_option("--seed", est.seed, "recorded seed");
  add_solver_options(est_cmd, est.solver);

  ConfidenceArgs conf;
  CLI::App* conf_cmd = app.add_subcommand("confidence", "level-set membership of a candidate function");
  conf_cmd->add_option("--objective", conf.objective, "mle, ls or ls_density");
  conf_cmd->add_option("--data", conf.data, "sample CSV");
  conf_cmd->add_option("--f", conf.f, "candidate function (CSV)");
  conf_cmd->add_option("--delta", conf.delta, "level");
  conf_cmd->add_option("--c", conf.c, "scale constant for the reported radius");

  ExperimentArgs rate, cons;
  std::string rate_out, cons_out;
  CLI::App* rate_cmd = app.add_subcommand("rate", "convergence-rate experiment");
  add_experiment_options(rate_cmd, rate);
  rate_cmd->add_option("--out", rate_out, "JSON report path");
  CLI::App* cons_cmd = app.add_subcommand("consistency", "consistency experiment");
  add_experiment_options(cons_cmd, cons);
  cons_cmd->add_option("--out", cons_out, "JSON report path");

  std::vector<const char*> cargv{argv[0]};
  for (const auto& s : args) cargv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  set_thread_count(common.threads ? *common.threads : threads_from_env());

  auto got = [](const std::vector<CLI::App*>& v) {
    for (CLI::App* a : v) {
      if (a->parsed()) return a;
    }
    return static_cast<CLI::App*>(nullptr);
  };

  json report;
  std::string report_path = common.report;
  if (dist_cmd->parsed()) {
    require_set(dist_cmd, {"--f", "--g"});
    report = run_dist(dist);
  } else if (CLI::App* p = got(pipe_cmds)) {
    require_set(p, {"--target", "--schedule", "--seed"});
    report = run_pipeline(pipe);
  } else if (CLI::App* c = got(cover_cmds)) {
    require_set(c, {"--eps", "--r", "--gammas", "--omega"});
    report = run_cover(cover);
  } else if (CLI::App* k = got(pack_cmds)) {
    require_set(k, {"--rho", "--eps"});
    report = run_pack(pack);
  } else if (est_cmd->parsed()) {
    require_set(est_cmd, {"--objective", "--data", "--class"});
    report = run_estimate(est);
  } else if (conf_cmd->parsed()) {
    require_set(conf_cmd, {"--objective", "--data", "--f", "--delta"});
    report = run_confidence(conf);
  } else if (rate_cmd->parsed()) {
    require_set(rate_cmd, {"--objective", "--truth", "--class", "--nus", "--seed"});
    report = run_rate(rate);
    if (!rate_out.empty()) report_path = rate_out;
  } else if (cons_cmd->parsed()) {
    require_set(cons_cmd, {"--objective", "--truth", "--class", "--nus", "--seed"});
    report = run_consistency(cons);
    if (!cons_out.empty()) report_path = cons_out;
  } else {
    throw ValidationError("no command given");
  }
  emit(report_path, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
