#include "sgdlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>

#include <json.hpp>

#include "sgdlab/analysis.hpp"
#include "sgdlab/io.hpp"

namespace sgdlab {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

// scalar or array of numbers; used by sweepable schedule parameters
std::vector<double> as_double_list(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      out.push_back(as_double(v[k], path + "[" + std::to_string(k) + "]"));
    }
    return out;
  }
  fail(path, "expected a number or a nonempty array of numbers");
}

SyntheticSpec parse_synthetic(const json& j, const std::string& path) {
  SyntheticSpec s;
  s.n = static_cast<int>(as_int(require(j, "n", path), path + ".n"));
  s.d = static_cast<int>(as_int(require(j, "d", path), path + ".d"));
  s.seed = static_cast<std::uint64_t>(as_int(require(j, "seed", path), path + ".seed"));
  if (s.n < 1) fail(path + ".n", "must be >= 1");
  if (s.d < 1) fail(path + ".d", "must be >= 1");
  if (j.contains("planted")) s.planted = as_bool(j["planted"], path + ".planted");
  if (j.contains("noise")) s.noise = as_double(j["noise"], path + ".noise");
  if (s.noise < 0) fail(path + ".noise", "must be >= 0");
  if (j.contains("law")) {
    const std::string law = as_string(j["law"], path + ".law");
    if (law == "gaussian") {
      s.law = InputLaw::gaussian;
    } else if (law == "sphere") {
      s.law = InputLaw::sphere;
    } else {
      fail(path + ".law", "unknown input law '" + law + "' (gaussian|sphere)");
    }
  }
  return s;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  ExperimentConfig cfg;

  const json& jobj = require(j, "objective", origin);
  cfg.objective.family = as_string(require(jobj, "family", origin + ".objective"),
                                   origin + ".objective.family");
  if (jobj.contains("c")) cfg.objective.c = as_double(jobj["c"], origin + ".objective.c");
  if (jobj.contains("alpha_loss")) {
    cfg.objective.alpha_loss = as_double(jobj["alpha_loss"], origin + ".objective.alpha_loss");
  }
  const json& jdata = require(jobj, "dataset", origin + ".objective");
  if (jdata.contains("path")) {
    cfg.objective.dataset.path = as_string(jdata["path"], origin + ".objective.dataset.path");
  }
  if (jdata.contains("synthetic")) {
    cfg.objective.dataset.synthetic =
        parse_synthetic(jdata["synthetic"], origin + ".objective.dataset.synthetic");
  }
  if (cfg.objective.dataset.path.has_value() == cfg.objective.dataset.synthetic.has_value()) {
    fail(origin + ".objective.dataset", "give exactly one of 'path' or 'synthetic'");
  }

  const json& jsched = require(j, "schedule", origin);
  cfg.schedule.kind = as_string(require(jsched, "kind", origin + ".schedule"),
                                origin + ".schedule.kind");
  const std::string sp = origin + ".schedule";
  if (jsched.contains("eta1")) cfg.schedule.eta1 = as_double_list(jsched["eta1"], sp + ".eta1");
  if (jsched.contains("theta")) cfg.schedule.theta = as_double_list(jsched["theta"], sp + ".theta");
  if (jsched.contains("beta")) cfg.schedule.beta = as_double_list(jsched["beta"], sp + ".beta");
  if (jsched.contains("eta")) cfg.schedule.eta = as_double_list(jsched["eta"], sp + ".eta");

  if (j.contains("kernel")) {
    KernelSpec k;
    k.kind = as_string(require(j["kernel"], "kind", origin + ".kernel"), origin + ".kernel.kind");
    if (k.kind != "linear" && k.kind != "gaussian") {
      fail(origin + ".kernel.kind", "unknown kernel '" + k.kind + "' (linear|gaussian)");
    }
    if (j["kernel"].contains("sigma")) {
      k.sigma = as_double(j["kernel"]["sigma"], origin + ".kernel.sigma");
    }
    cfg.kernel = k;
  }

  cfg.T = as_int(require(j, "T", origin), origin + ".T");
  if (cfg.T < 1) fail(origin + ".T", "must be >= 1");

  const json& jseeds = require(j, "seeds", origin);
  if (!jseeds.is_array() || jseeds.empty()) fail(origin + ".seeds", "expected a nonempty array");
  cfg.seeds.clear();
  for (std::size_t k = 0; k < jseeds.size(); ++k) {
    cfg.seeds.push_back(static_cast<std::uint64_t>(
        as_int(jseeds[k], origin + ".seeds[" + std::to_string(k) + "]")));
  }
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    fail(origin + ".seeds", "seeds must be pairwise distinct");
  }

  if (j.contains("checkpoints")) {
    const json& jck = j["checkpoints"];
    cfg.checkpoint_policy = as_string(require(jck, "policy", origin + ".checkpoints"),
                                      origin + ".checkpoints.policy");
    if (cfg.checkpoint_policy == "explicit") {
      const json& jlist = require(jck, "list", origin + ".checkpoints");
      if (!jlist.is_array()) fail(origin + ".checkpoints.list", "expected an array");
      for (std::size_t k = 0; k < jlist.size(); ++k) {
        cfg.explicit_checkpoints.push_back(
            as_int(jlist[k], origin + ".checkpoints.list[" + std::to_string(k) + "]"));
      }
    } else if (cfg.checkpoint_policy != "geometric2") {
      fail(origin + ".checkpoints.policy", "unknown policy (geometric2|explicit)");
    }
  }

  if (j.contains("divergence_factor")) {
    cfg.divergence_factor = as_double(j["divergence_factor"], origin + ".divergence_factor");
    if (cfg.divergence_factor <= 1) fail(origin + ".divergence_factor", "must be > 1");
  }
  if (j.contains("out")) cfg.out = as_string(j["out"], origin + ".out");

  if (j.contains("probes")) {
    const json& jp = j["probes"];
    const std::string pp = origin + ".probes";
    if (jp.contains("n")) cfg.probes.n = as_int(jp["n"], pp + ".n");
    if (jp.contains("radius")) cfg.probes.radius = as_double(jp["radius"], pp + ".radius");
    if (jp.contains("tol")) cfg.probes.tol = as_double(jp["tol"], pp + ".tol");
    if (jp.contains("seed")) {
      cfg.probes.seed = static_cast<std::uint64_t>(as_int(jp["seed"], pp + ".seed"));
    }
    if (jp.contains("fd_h_rel")) cfg.probes.fd_h_rel = as_double(jp["fd_h_rel"], pp + ".fd_h_rel");
    if (jp.contains("fd_tol")) cfg.probes.fd_tol = as_double(jp["fd_tol"], pp + ".fd_tol");
    if (jp.contains("fd_points")) {
      cfg.probes.fd_points = static_cast<int>(as_int(jp["fd_points"], pp + ".fd_points"));
    }
    if (jp.contains("L_override")) {
      cfg.probes.L_override = as_double(jp["L_override"], pp + ".L_override");
      if (cfg.probes.L_override < 0) fail(pp + ".L_override", "must be >= 0");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, path);
}

namespace {

json list_or_scalar(const std::vector<double>& v) {
  if (v.size() == 1) return v[0];
  return v;
}

ordered_json effective_config(const ExperimentConfig& cfg) {
  ordered_json j;
  ordered_json jobj;
  jobj["family"] = cfg.objective.family;
  if (cfg.objective.family == "welsch") jobj["c"] = cfg.objective.c;
  if (cfg.objective.family == "holder_p") jobj["alpha_loss"] = cfg.objective.alpha_loss;
  ordered_json jdata;
  if (cfg.objective.dataset.path) {
    jdata["path"] = *cfg.objective.dataset.path;
  } else if (cfg.objective.dataset.synthetic) {
    const auto& s = *cfg.objective.dataset.synthetic;
    jdata["synthetic"] = {{"n", s.n},
                          {"d", s.d},
                          {"seed", s.seed},
                          {"planted", s.planted},
                          {"noise", s.noise},
                          {"law", s.law == InputLaw::sphere ? "sphere" : "gaussian"}};
  }
  jobj["dataset"] = jdata;
  j["objective"] = jobj;

  ordered_json jsched;
  jsched["kind"] = cfg.schedule.kind;
  if (cfg.schedule.kind == "polynomial") {
    jsched["eta1"] = list_or_scalar(cfg.schedule.eta1);
    jsched["theta"] = list_or_scalar(cfg.schedule.theta);
  } else if (cfg.schedule.kind == "log_corrected") {
    jsched["eta1"] = list_or_scalar(cfg.schedule.eta1);
    jsched["beta"] = list_or_scalar(cfg.schedule.beta);
  } else if (cfg.schedule.kind == "constant") {
    jsched["eta"] = list_or_scalar(cfg.schedule.eta);
  }
  j["schedule"] = jsched;

  if (cfg.kernel) {
    j["kernel"] = {{"kind", cfg.kernel->kind}, {"sigma", cfg.kernel->sigma}};
  }
  j["T"] = cfg.T;
  j["seeds"] = cfg.seeds;
  ordered_json jck;
  jck["policy"] = cfg.checkpoint_policy;
  if (cfg.checkpoint_policy == "explicit") jck["list"] = cfg.explicit_checkpoints;
  j["checkpoints"] = jck;
  j["divergence_factor"] = cfg.divergence_factor;
  j["out"] = cfg.out;
  j["probes"] = {{"n", cfg.probes.n},         {"radius", cfg.probes.radius},
                 {"tol", cfg.probes.tol},     {"seed", cfg.probes.seed},
                 {"fd_h_rel", cfg.probes.fd_h_rel}, {"fd_tol", cfg.probes.fd_tol},
                 {"fd_points", cfg.probes.fd_points}, {"L_override", cfg.probes.L_override}};
  return j;
}

}  // namespace

std::string effective_config_json(const ExperimentConfig& cfg) {
  return effective_config(cfg).dump(2) + "\n";
}

Dataset build_dataset(const DatasetSpec& spec) {
  if (spec.path) {
    try {
      return load_dataset_csv(*spec.path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("dataset: ") + e.what());
    }
  }
  const auto& s = *spec.synthetic;
  auto synth = synthetic_regression(s.n, s.d, s.seed, s.noise, s.law);
  if (s.planted) return synth.data;
  // unplanted: strip the signal, leaving pure-noise targets
  Mat X = synth.data.X();
  Vec y = synth.data.y() - X * synth.planted_model;
  return Dataset(std::move(X), std::move(y));
}

Objective build_objective(const ObjectiveSpec& spec, const std::optional<KernelSpec>& kernel) {
  const std::string& fam = spec.family;
  if (fam == "interpolating_least_squares") {
    if (!spec.dataset.synthetic) {
      throw ConfigError("objective.dataset: interpolating_least_squares needs a synthetic spec");
    }
    const auto& s = *spec.dataset.synthetic;
    return make_interpolating_least_squares(s.n, s.d, s.seed);
  }
  Dataset data = build_dataset(spec.dataset);
  if (fam == "least_squares") return make_least_squares(data);
  if (fam == "welsch") return make_welsch(data, spec.c);
  if (fam == "holder_p") return make_holder_p(data, spec.alpha_loss);
  if (fam == "kernel_squared") {
    if (!kernel) throw ConfigError("objective.family: kernel_squared needs a kernel spec");
    Kernel k;
    k.kind = kernel->kind == "gaussian" ? Kernel::Kind::gaussian : Kernel::Kind::linear;
    k.sigma = kernel->sigma > 0 ? kernel->sigma : median_heuristic_sigma(data);
    return make_kernel_squared(data, k);
  }
  throw ConfigError("objective.family: unknown family '" + fam + "'");
}

namespace {

Schedule build_schedule(const ScheduleSpec& spec, const Objective& obj,
                        std::optional<PLScheduleCert>& cert_out,
                        double eta1, double theta, double beta, double eta) {
  const double alpha = obj.smoothness().alpha;
  if (spec.kind == "polynomial") return poly_schedule(eta1, theta, alpha);
  if (spec.kind == "log_corrected") return log_schedule(eta1, beta, alpha);
  if (spec.kind == "pl_matched") {
    if (!obj.pl()) throw ConfigError("schedule.kind: pl_matched needs an objective with a PL certificate");
    auto [sched, cert] = pl_schedule(obj.pl()->mu, obj.smoothness());
    cert_out = cert;
    return sched;
  }
  if (spec.kind == "constant") {
    return const_schedule(eta, obj.pl() ? *obj.pl() : PLSpec{}, obj.smoothness());
  }
  throw ConfigError("schedule.kind: unknown kind '" + spec.kind + "'");
}

struct SweepCell {
  double eta1, theta, beta, eta;
  std::string label;
};

std::vector<SweepCell> sweep_cells(const ScheduleSpec& s) {
  std::vector<SweepCell> cells;
  for (double eta1 : s.eta1)
    for (double theta : s.theta)
      for (double beta : s.beta)
        for (double eta : s.eta) {
          SweepCell cell{eta1, theta, beta, eta, ""};
          std::string label;
          if (s.kind == "polynomial") {
            label = "eta1=" + format_double(eta1) + "_theta=" + format_double(theta);
          } else if (s.kind == "log_corrected") {
            label = "eta1=" + format_double(eta1) + "_beta=" + format_double(beta);
          } else if (s.kind == "constant") {
            label = "eta=" + format_double(eta);
          } else {
            label = "pl";
          }
          cell.label = label;
          cells.push_back(cell);
        }
  // collapse duplicates caused by parameters the kind does not use
  std::vector<SweepCell> unique;
  std::set<std::string> seen;
  for (auto& c : cells) {
    if (seen.insert(c.label).second) unique.push_back(c);
  }
  return unique;
}

ordered_json schedule_metadata(const Schedule& sched, const std::optional<PLScheduleCert>& cert) {
  ordered_json js;
  js["kind"] = to_string(sched.kind());
  for (const auto& [name, val] : sched.params()) js[name] = val;
  js["theorem_valid"] = sched.theorem_valid();
  if (!sched.theorem_valid()) js["validity_note"] = sched.validity_note();
  js["sum_eta_divergent"] = sched.flags().sum_eta_divergent;
  js["sum_eta_power_convergent"] = sched.flags().sum_eta_power_convergent;
  if (cert) js["t0"] = cert->t0;
  return js;
}

ordered_json certificate_metadata(const Objective& obj) {
  ordered_json jc;
  jc["family"] = to_string(obj.loss().family);
  jc["alpha"] = obj.smoothness().alpha;
  jc["L"] = obj.smoothness().L;
  jc["L_provenance"] = to_string(obj.smoothness().provenance);
  if (obj.pl()) {
    jc["mu"] = obj.pl()->mu;
    jc["mu_provenance"] = to_string(obj.pl()->provenance);
    jc["optimum_value"] = obj.pl()->optimum_value;
  }
  jc["zero_variance_at_optimum"] = obj.zero_variance_at_optimum();
  return jc;
}

constexpr const char* kGeneratorNote =
    "pcg32 (PCG-XSH-RR 64/32); run index stream = pcg32_srandom(seed, 1) with the "
    "reference bounded-rejection draw; dataset stream id 2, probe stream id 3";

int run_cells(const ExperimentConfig& cfg, const std::string& out_dir, bool single_cell) {
  Objective obj = build_objective(cfg.objective, cfg.kernel);
  const auto cells = sweep_cells(cfg.schedule);
  if (single_cell && cells.size() != 1) {
    throw ConfigError("schedule: run wants scalar parameters; use the sweep command for lists");
  }

  RunConfig base;
  base.T = cfg.T;
  base.divergence_factor = cfg.divergence_factor;
  if (cfg.checkpoint_policy == "explicit") {
    base.checkpoint_policy = CheckpointPolicy::explicit_list;
    base.explicit_checkpoints = cfg.explicit_checkpoints;
  }

  ordered_json sweep_index = ordered_json::array();
  int worst = 0;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    const fs::path cell_dir = single_cell
        ? fs::path(out_dir)
        : fs::path(out_dir) / ("cell_" + std::to_string(ci) + "_" + cell.label);
    fs::create_directories(cell_dir);

    std::optional<PLScheduleCert> cert;
    Schedule sched = build_schedule(cfg.schedule, obj, cert,
                                    cell.eta1, cell.theta, cell.beta, cell.eta);

    ordered_json meta;
    meta["config"] = effective_config(cfg);
    meta["generator"] = kGeneratorNote;
    meta["certificates"] = certificate_metadata(obj);
    meta["schedule"] = schedule_metadata(sched, cert);

    int exit_code = 0;
    try {
      std::vector<Trace> traces;
      AggregateTrace agg;
      if (cfg.kernel && cfg.objective.family != "kernel_squared") {
        // functional SGD path: kernel spec + a plain loss family
        Kernel k;
        k.kind = cfg.kernel->kind == "gaussian" ? Kernel::Kind::gaussian : Kernel::Kind::linear;
        k.sigma = cfg.kernel->sigma > 0 ? cfg.kernel->sigma
                                        : median_heuristic_sigma(obj.data());
        meta["kernel_sigma"] = k.sigma;
        for (std::uint64_t s : cfg.seeds) {
          RunConfig rc = base;
          rc.seed = s;
          traces.push_back(run_kernel_sgd(obj.data(), obj.loss(), k, sched, rc));
        }
        agg = aggregate_traces(traces, sched);
      } else {
        auto result = run_multi(obj, sched, base, cfg.seeds);
        traces = std::move(result.traces);
        agg = std::move(result.aggregate);
      }
      for (const Trace& tr : traces) {
        write_trace_csv((cell_dir / ("trace_seed" + std::to_string(tr.seed) + ".csv")).string(), tr);
      }
      write_aggregate_json((cell_dir / "aggregate.json").string(), agg);
      meta["n_seeds_aggregated"] = agg.n_seeds;
      meta["diverged_seeds"] = agg.diverged_seeds;
    } catch (const std::runtime_error& e) {
      meta["error"] = e.what();
      std::cerr << "run: " << e.what() << "\n";
      exit_code = 1;
    }
    write_text_file((cell_dir / "meta.json").string(), meta.dump(2) + "\n");
    sweep_index.push_back({{"cell", ci}, {"label", cell.label}, {"exit", exit_code}});
    worst = std::max(worst, exit_code);
  }
  if (!single_cell) {
    write_text_file((fs::path(out_dir) / "sweep.json").string(), sweep_index.dump(2) + "\n");
  }
  return worst;
}

}  // namespace

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  Objective obj = build_objective(cfg.objective, cfg.kernel);
  const auto cells = sweep_cells(cfg.schedule);
  std::optional<PLScheduleCert> cert;
  Schedule sched = build_schedule(cfg.schedule, obj, cert, cells[0].eta1, cells[0].theta,
                                  cells[0].beta, cells[0].eta);
  std::optional<Kernel> kernel;
  if (cfg.kernel) {
    Kernel k;
    k.kind = cfg.kernel->kind == "gaussian" ? Kernel::Kind::gaussian : Kernel::Kind::linear;
    k.sigma = cfg.kernel->sigma > 0 ? cfg.kernel->sigma : median_heuristic_sigma(obj.data());
    kernel = k;
  }
  RunConfig rc;
  rc.T = cfg.T;
  rc.divergence_factor = cfg.divergence_factor;
  if (cfg.checkpoint_policy == "explicit") {
    rc.checkpoint_policy = CheckpointPolicy::explicit_list;
    rc.explicit_checkpoints = cfg.explicit_checkpoints;
  }
  return BuiltExperiment{std::move(obj), std::move(sched), cert, kernel, rc};
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    return run_cells(cfg, cfg.out, /*single_cell=*/true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    return run_cells(cfg, cfg.out, /*single_cell=*/false);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sweep failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& config_path, const std::string& out_override) {
  ExperimentConfig cfg;
  Objective* obj_ptr = nullptr;
  std::optional<Objective> obj;
  try {
    cfg = load_config(config_path);
    obj.emplace(build_objective(cfg.objective, cfg.kernel));
    if (cfg.probes.L_override > 0) {
      SmoothnessSpec forced = obj->smoothness();
      forced.L = cfg.probes.L_override;
      forced.provenance = Provenance::numeric_estimate;
      obj.emplace(obj->with_smoothness(forced));
    }
    obj_ptr = &*obj;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const ProbeSpec& p = cfg.probes;

  ordered_json checks = ordered_json::array();
  bool failed = false;
  auto record = [&](const std::string& name, const ViolationReport& rep) {
    checks.push_back({{"check_name", name},
                      {"n_probes", rep.n_probes},
                      {"n_violations", rep.n_violations},
                      {"worst_ratio", rep.worst_ratio},
                      {"seed", p.seed},
                      {"tolerances", {{"tol", p.tol}, {"radius", p.radius}}}});
    if (rep.n_violations > 0) {
      failed = true;
      std::cerr << name << ": " << rep.n_violations << " violation(s); worst: "
                << rep.worst_probe << "\n";
    }
  };

  record("holder", check_holder(*obj_ptr, p.n, p.radius, p.tol, p.seed));
  record("smooth_a", check_smooth_a(*obj_ptr, p.n, p.radius, p.tol, p.seed));
  record("self_bounding", check_self_bounding(*obj_ptr, p.n, p.radius, p.tol, p.seed));

  // analytic gradient vs central differences, relative error in norm
  {
    Pcg32 rng = make_stream(p.seed + 1, StreamId::probe);
    double worst = 0.0;
    for (int k = 0; k < p.fd_points; ++k) {
      const Vec w = sample_in_ball(rng, obj_ptr->dim(), p.radius);
      const Vec fd = finite_diff_grad([&](const Vec& v) { return obj_ptr->value(v); }, w,
                                      p.fd_h_rel);
      const Vec an = obj_ptr->grad(w);
      const double denom = std::max(an.norm(), 1e-12);
      worst = std::max(worst, (fd - an).norm() / denom);
    }
    const bool ok = worst <= p.fd_tol;
    checks.push_back({{"check_name", "finite_diff_grad"},
                      {"n_probes", p.fd_points},
                      {"n_violations", ok ? 0 : 1},
                      {"worst_ratio", worst / p.fd_tol},
                      {"seed", p.seed + 1},
                      {"tolerances", {{"fd_tol", p.fd_tol}, {"h_rel", p.fd_h_rel}}}});
    if (!ok) {
      failed = true;
      std::cerr << "finite_diff_grad: max relative error " << worst << " > " << p.fd_tol << "\n";
    }
  }

  ordered_json report;
  report["checks"] = checks;
  if (obj_ptr->pl()) {
    const double mu = obj_ptr->pl()->mu;
    double mu_hat = 0.0;
    bool ok = false;
    try {
      mu_hat = estimate_pl(*obj_ptr, std::min<std::int64_t>(p.n, 1000), p.radius, p.seed);
      ok = mu <= mu_hat * (1.0 + 1e-9);
    } catch (const std::exception& e) {
      std::cerr << "estimate_pl: " << e.what() << "\n";
    }
    report["pl"] = {{"mu", mu}, {"mu_hat", mu_hat}, {"certificate_ok", ok}};
    if (!ok) {
      failed = true;
      std::cerr << "pl certificate: mu = " << mu << " exceeds mu_hat = " << mu_hat << "\n";
    }
  } else {
    report["pl"] = "skipped (objective has no PL certificate)";
  }
  report["exit"] = failed ? 1 : 0;

  const std::string out_path = out_override.empty() ? "verify.json" : out_override;
  write_text_file(out_path, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return failed ? 1 : 0;
}

int cmd_fit(const std::string& aggregate_path, double t_min, double t_max,
            const std::string& axis, const std::string& series, double offset) {
  AggregateTrace agg;
  try {
    agg = read_aggregate_json(aggregate_path);
  } catch (const std::exception& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return 2;
  }
  try {
    std::vector<std::pair<double, double>> points;
    for (const auto& pt : agg.checkpoints) {
      if (pt.t < t_min || pt.t > t_max) continue;
      double value = 0.0;
      if (series == "min_prefix") {
        value = pt.min_prefix_grad_norm_sq;
      } else if (series == "mean_risk") {
        value = pt.mean_risk;
      } else if (series == "mean_grad_norm_sq") {
        value = pt.mean_grad_norm_sq;
      } else {
        std::cerr << "fit: unknown series '" << series << "'\n";
        return 2;
      }
      double abscissa = static_cast<double>(pt.t);
      if (axis == "eta_sum") {
        abscissa = pt.eta_sum;
      } else if (axis != "iteration") {
        std::cerr << "fit: unknown axis '" << axis << "'\n";
        return 2;
      }
      points.emplace_back(abscissa, value - offset);
    }
    const double lo = points.empty() ? t_min : points.front().first;
    const double hi = points.empty() ? t_max : points.back().first;
    RateFit fit = fit_rate(points, lo, hi);
    BoundRatioReport bounds = bound_ratio_check(agg, t_min, t_max);
    ordered_json out;
    out["series"] = series;
    out["axis"] = axis;
    out["offset"] = offset;
    out["window"] = {t_min, t_max};
    out["n_points"] = points.size();
    out["slope"] = fit.slope;
    out["intercept"] = fit.intercept;
    out["r_squared"] = fit.r_squared;
    out["bound_ratio"] = {{"max", bounds.max_ratio}, {"median", bounds.median_ratio}};
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sgdlab
