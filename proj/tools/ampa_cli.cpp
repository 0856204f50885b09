#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ampa/harness.hpp"
#include "ampa/io.hpp"
#include "ampa/kernels.hpp"
#include "ampa/rng.hpp"

using nlohmann::json;
using namespace ampa;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

template <typename T>
T jget(const json& j, const std::string& key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for \"" + key + "\": " + e.what());
  }
}

std::vector<double> jget_vec(const json& j, const std::string& key, std::vector<double> def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_array()) throw ConfigError("\"" + key + "\" must be an array");
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for \"" + key + "\": " + e.what());
  }
}

SignalModel parse_model(const json& cfg, json& echo) {
  SignalModel model;
  json m = cfg.contains("model") ? cfg.at("model") : json::object();
  if (!m.is_object()) throw ConfigError("\"model\" must be an object");
  check_keys(m, {"kind", "sparsity"}, "model");
  const std::string kind = jget<std::string>(m, "kind", "complex_gaussian");
  if (kind == "complex_gaussian")
    model.kind = SignalKind::complex_gaussian;
  else if (kind == "nonneg_sparse")
    model.kind = SignalKind::nonneg_sparse;
  else
    throw ConfigError("model.kind must be complex_gaussian or nonneg_sparse");
  model.sparsity = jget<double>(m, "sparsity", 0.1);
  echo["model"] = {{"kind", kind}, {"sparsity", model.sparsity}};
  return model;
}

NoiseKind parse_noise(const json& cfg, json& echo) {
  const std::string s = jget<std::string>(cfg, "noise", "real_gaussian");
  echo["noise"] = s;
  if (s == "real_gaussian") return NoiseKind::real_gaussian;
  if (s == "complex_circular") return NoiseKind::complex_circular;
  throw ConfigError("noise must be real_gaussian or complex_circular");
}

InitKind parse_init(const json& cfg, json& echo, const std::string& def) {
  const std::string s = jget<std::string>(cfg, "init", def);
  echo["init"] = s;
  try {
    return init_kind_from_string(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

AmpConfig parse_amp(const json& cfg, json& echo, int default_max_iter) {
  AmpConfig amp;
  amp.max_iter = default_max_iter;
  json a = cfg.contains("amp") ? cfg.at("amp") : json::object();
  if (!a.is_object()) throw ConfigError("\"amp\" must be an object");
  check_keys(a, {"variant", "mu", "epsilon", "max_iter", "stop_mse", "zero_p"}, "amp");
  const std::string v = jget<std::string>(a, "variant", "simplified");
  if (v == "simplified")
    amp.variant = AmpVariant::simplified;
  else if (v == "regularized")
    amp.variant = AmpVariant::regularized;
  else if (v == "auto" || v == "auto_continuation")
    amp.variant = AmpVariant::auto_continuation;
  else
    throw ConfigError("amp.variant must be simplified, regularized, or auto");
  amp.mu = jget<double>(a, "mu", 0.0);
  amp.epsilon = jget<double>(a, "epsilon", 0.0);
  amp.max_iter = jget<int>(a, "max_iter", amp.max_iter);
  amp.stop_mse = jget<double>(a, "stop_mse", 1e-13);
  if (a.contains("zero_p")) {
    const auto zp = jget_vec(a, "zero_p", {});
    if (zp.size() != 2) throw ConfigError("amp.zero_p must be [re, im]");
    amp.zero_p = cplx(zp[0], zp[1]);
  }
  if (amp.max_iter < 1) throw ConfigError("amp.max_iter must be >= 1");
  if (amp.epsilon < 0) throw ConfigError("amp.epsilon must be >= 0");
  echo["amp"] = {{"variant", v},
                 {"mu", amp.mu},
                 {"epsilon", amp.epsilon},
                 {"max_iter", amp.max_iter},
                 {"stop_mse", amp.stop_mse},
                 {"zero_p", {amp.zero_p.real(), amp.zero_p.imag()}}};
  return amp;
}

std::string classification_name(SeClass c) {
  switch (c) {
    case SeClass::converged_to_target: return "converged_to_target";
    case SeClass::converged_to_other: return "converged_to_other";
    case SeClass::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

std::string fmt_delta(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  return buf;
}

void emit_rows(const std::string& base, const std::string& format,
               const std::vector<std::string>& cols, const std::vector<std::string>& types,
               const std::vector<std::vector<std::string>>& rows) {
  if (format == "csv")
    write_csv(base + ".csv", cols, types, rows);
  else
    write_json_rows(base + ".json", cols, rows);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

std::size_t parse_n(const json& cfg, json& echo, std::size_t def) {
  const auto n = jget<long long>(cfg, "n", (long long)def);
  if (n < 8) throw ConfigError("n must be >= 8");
  echo["n"] = n;
  return std::size_t(n);
}

int parse_trials(const json& cfg, json& echo, int def) {
  const int t = jget<int>(cfg, "trials", def);
  if (t < 1) throw ConfigError("trials must be >= 1");
  echo["trials"] = t;
  return t;
}

void validate_deltas(const std::vector<double>& deltas, double min_excl) {
  if (deltas.empty()) throw ConfigError("deltas must be non-empty");
  for (double d : deltas)
    if (!(d > min_excl))
      throw ConfigError("delta " + fmt_delta(d) + " must be > " + fmt_delta(min_excl));
}

int cmd_se_run(const json& cfg, const std::string& out, const std::string& format,
               uint64_t seed) {
  check_keys(cfg, {"delta", "sigma_w2", "noise", "alpha0", "sigma2_0", "quad_nodes", "max_iter"},
             "se-run");
  json echo{{"command", "se-run"}, {"seed", seed}};
  const double delta = jget<double>(cfg, "delta", 4.0);
  const double sigma_w2 = jget<double>(cfg, "sigma_w2", 0.0);
  if (!(delta > 0)) throw ConfigError("delta must be > 0");
  if (sigma_w2 < 0) throw ConfigError("sigma_w2 must be >= 0");
  const NoiseKind nk = parse_noise(cfg, echo);
  SeConfig se;
  se.quad_nodes = jget<int>(cfg, "quad_nodes", 512);
  se.max_iter = jget<int>(cfg, "max_iter", 1000);
  if (se.quad_nodes < 64) throw ConfigError("quad_nodes must be >= 64");
  if (se.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  echo["delta"] = delta;
  echo["sigma_w2"] = sigma_w2;
  echo["quad_nodes"] = se.quad_nodes;
  echo["max_iter"] = se.max_iter;

  double a0, s0;
  if (cfg.contains("alpha0") || cfg.contains("sigma2_0")) {
    if (!cfg.contains("alpha0") || !cfg.contains("sigma2_0"))
      throw ConfigError("alpha0 and sigma2_0 must be given together");
    a0 = jget<double>(cfg, "alpha0", 0.0);
    s0 = jget<double>(cfg, "sigma2_0", 0.0);
  } else {
    if (!(delta > 2)) throw ConfigError("spectral start needs delta > 2; give alpha0/sigma2_0");
    const auto [a2, s2] = predict_finding1(delta, sigma_w2, nk);
    a0 = std::sqrt(a2);
    s0 = s2;
  }
  echo["alpha0"] = a0;
  echo["sigma2_0"] = s0;

  Timer timer;
  const SeRunResult r = se_run({cplx(a0, 0.0), s0}, delta, sigma_w2, se);
  StageClock clock;
  clock.add("se_run", timer.lap());

  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < r.path.size(); ++t)
    rows.push_back({std::to_string(t), fmt_g17(std::abs(r.path[t].alpha)),
                    fmt_g17(r.path[t].sigma2), fmt_g17(amse(r.path[t]))});
  emit_rows(out + "/se_run", format, {"t", "abs_alpha", "sigma2", "amse"},
            {"int", "double", "double", "double"}, rows);
  json extra{{"classification", classification_name(r.classification)},
             {"iterations", r.path.size() - 1},
             {"final_amse", amse(r.path.back())}};
  write_summary(out + "/se_run_summary.json", echo, clock, extra);
  return 0;
}

int cmd_basin(const json& cfg, const std::string& out, const std::string& format,
              uint64_t seed) {
  check_keys(cfg, {"deltas", "grid_alpha", "grid_sigma", "quad_nodes", "max_iter"}, "basin");
  json echo{{"command", "basin"}, {"seed", seed}};
  const auto deltas = jget_vec(cfg, "deltas", {2.45, 2.40, 2.35});
  validate_deltas(deltas, 0.0);
  const int ga = jget<int>(cfg, "grid_alpha", 21);
  const int gs = jget<int>(cfg, "grid_sigma", 21);
  if (ga < 2 || gs < 2) throw ConfigError("grid must be at least 2x2");
  SeConfig se;
  se.quad_nodes = jget<int>(cfg, "quad_nodes", 512);
  se.max_iter = jget<int>(cfg, "max_iter", 10000);
  echo["deltas"] = deltas;
  echo["grid_alpha"] = ga;
  echo["grid_sigma"] = gs;
  echo["quad_nodes"] = se.quad_nodes;
  echo["max_iter"] = se.max_iter;

  Timer timer;
  StageClock clock;
  json extra;
  for (double d : deltas) {
    const auto cells = basin_grid(d, ga, gs, se);
    std::vector<std::vector<std::string>> rows;
    int converged = 0;
    for (int i = 0; i < ga; ++i)
      for (int j = 0; j < gs; ++j) {
        const int c = cells[std::size_t(i) * gs + j];
        converged += c;
        rows.push_back({fmt_g17(double(i) / (ga - 1)), fmt_g17(double(j) / (gs - 1)),
                        std::to_string(c)});
      }
    emit_rows(out + "/basin_" + fmt_delta(d), format, {"alpha0", "sigma2_0", "converged"},
              {"double", "double", "int"}, rows);
    clock.add("basin_" + fmt_delta(d), timer.lap());
    extra["converged_cells"][fmt_delta(d)] = converged;
    extra["total_cells"] = ga * gs;
  }
  write_summary(out + "/basin_summary.json", echo, clock, extra);
  return 0;
}

const std::set<std::string> kTrialKeys = {"model", "n",     "delta", "deltas",
                                          "sigma_w2", "noise", "init",  "trials",
                                          "amp",   "se_quad_nodes"};

std::vector<std::vector<std::string>> trial_rows(const std::vector<TrialRecord>& recs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : recs)
    for (const auto& row : r.rows)
      rows.push_back({std::to_string(r.seed), std::to_string(row.t),
                      fmt_g17(row.abs_alpha_hat), fmt_g17(row.sigma2_hat), fmt_g17(row.mse),
                      fmt_g17(row.div_value), fmt_g17(row.mse_n)});
  return rows;
}

const std::vector<std::string> kTrialCols = {"seed",  "t",         "abs_alpha_hat", "sigma2_hat",
                                             "mse",   "div_value", "mse_n"};
const std::vector<std::string> kTrialTypes = {"uint64", "int",    "double", "double",
                                              "double", "double", "double"};

int cmd_sim(const json& cfg, const std::string& out, const std::string& format, uint64_t seed) {
  check_keys(cfg, kTrialKeys, "sim");
  if (cfg.contains("deltas")) throw ConfigError("sim takes a single delta");
  json echo{{"command", "sim"}, {"seed", seed}};
  SimConfig sc;
  sc.model = parse_model(cfg, echo);
  sc.n = parse_n(cfg, echo, 2000);
  sc.delta = jget<double>(cfg, "delta", 4.0);
  if (!(sc.delta > 0)) throw ConfigError("delta must be > 0");
  sc.sigma_w2 = jget<double>(cfg, "sigma_w2", 0.0);
  if (sc.sigma_w2 < 0) throw ConfigError("sigma_w2 must be >= 0");
  sc.noise_kind = parse_noise(cfg, echo);
  sc.init = parse_init(cfg, echo, "decoupled_spectral");
  sc.amp = parse_amp(cfg, echo, 1000);
  sc.trials = parse_trials(cfg, echo, 10);
  sc.master_seed = seed;
  sc.se_quad_nodes = jget<int>(cfg, "se_quad_nodes", 512);
  echo["delta"] = sc.delta;
  echo["sigma_w2"] = sc.sigma_w2;
  echo["se_quad_nodes"] = sc.se_quad_nodes;

  Timer timer;
  const SimResult r = sim_experiment(sc);
  StageClock clock;
  clock.add("trials", timer.lap());

  emit_rows(out + "/sim_trials", format, kTrialCols, kTrialTypes, trial_rows(r.records));
  std::vector<std::vector<std::string>> mean_rows;
  for (std::size_t t = 0; t < r.mean_abs_alpha.size(); ++t)
    mean_rows.push_back({std::to_string(t), fmt_g17(r.mean_abs_alpha[t]),
                         fmt_g17(r.mean_sigma2[t]), std::to_string(r.counts[t])});
  emit_rows(out + "/sim_mean", format, {"t", "mean_abs_alpha_hat", "mean_sigma2_hat", "count"},
            {"int", "double", "double", "int"}, mean_rows);
  std::vector<std::vector<std::string>> se_rows;
  for (std::size_t t = 0; t < r.se_path.size(); ++t)
    se_rows.push_back({std::to_string(t), fmt_g17(std::abs(r.se_path[t].alpha)),
                       fmt_g17(r.se_path[t].sigma2), fmt_g17(amse(r.se_path[t]))});
  emit_rows(out + "/sim_se", format, {"t", "abs_alpha", "sigma2", "amse"},
            {"int", "double", "double", "double"}, se_rows);

  int successes = 0, diverged = 0;
  for (const auto& rec : r.records) {
    if (success(rec)) ++successes;
    if (rec.outcome == Outcome::diverged) ++diverged;
  }
  json extra{{"successes", successes},
             {"diverged", diverged},
             {"se_init_abs_alpha", r.se_init_abs_alpha},
             {"se_init_sigma2", r.se_init_sigma2}};
  write_summary(out + "/sim_summary.json", echo, clock, extra);
  return 0;
}

int cmd_phase_transition(const json& cfg, const std::string& out, const std::string& format,
                         uint64_t seed) {
  auto keys = kTrialKeys;
  keys.insert("success_threshold");
  keys.insert("with_baseline");
  check_keys(cfg, keys, "phase-transition");
  if (cfg.contains("delta")) throw ConfigError("phase-transition takes a deltas array");
  json echo{{"command", "phase-transition"}, {"seed", seed}};
  PtConfig pc;
  pc.model = parse_model(cfg, echo);
  pc.n = parse_n(cfg, echo, 1000);
  pc.deltas = jget_vec(cfg, "deltas", {2.2, 2.4, 2.6, 2.8});
  validate_deltas(pc.deltas, 0.0);
  pc.sigma_w2 = jget<double>(cfg, "sigma_w2", 0.0);
  pc.noise_kind = parse_noise(cfg, echo);
  pc.init = parse_init(cfg, echo, "decoupled_spectral");
  pc.amp = parse_amp(cfg, echo, 1000);
  pc.trials = parse_trials(cfg, echo, 100);
  pc.master_seed = seed;
  pc.success_threshold = jget<double>(cfg, "success_threshold", 1e-10);
  pc.with_baseline = jget<bool>(cfg, "with_baseline", false);
  echo["deltas"] = pc.deltas;
  echo["sigma_w2"] = pc.sigma_w2;
  echo["success_threshold"] = pc.success_threshold;
  echo["with_baseline"] = pc.with_baseline;

  Timer timer;
  const auto points = phase_transition(pc);
  StageClock clock;
  clock.add("sweep", timer.lap());

  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points)
    rows.push_back({fmt_g17(p.delta), std::to_string(p.successes), std::to_string(p.failures),
                    std::to_string(p.trials), fmt_g17(p.rate),
                    std::to_string(p.baseline_successes), fmt_g17(p.baseline_rate)});
  emit_rows(out + "/phase_transition", format,
            {"delta", "successes", "failures", "trials", "rate", "baseline_successes",
             "baseline_rate"},
            {"double", "int", "int", "int", "double", "int", "double"}, rows);
  json extra = json::array();
  for (const auto& p : points) extra.push_back({{"delta", p.delta}, {"rate", p.rate}});
  write_summary(out + "/phase_transition_summary.json", echo, clock, json{{"points", extra}});
  return 0;
}

int cmd_noise_curve(const json& cfg, const std::string& out, const std::string& format,
                    uint64_t seed) {
  auto keys = kTrialKeys;
  keys.insert("snr_db");
  check_keys(cfg, keys, "noise-curve");
  json echo{{"command", "noise-curve"}, {"seed", seed}};
  NoiseCurveConfig nc;
  nc.model = parse_model(cfg, echo);
  nc.n = parse_n(cfg, echo, 2000);
  nc.delta = jget<double>(cfg, "delta", 4.0);
  if (!(nc.delta > 0)) throw ConfigError("delta must be > 0");
  nc.snr_db = jget_vec(cfg, "snr_db", {15, 20, 25, 30, 35, 40});
  if (nc.snr_db.empty()) throw ConfigError("snr_db must be non-empty");
  nc.noise_kind = parse_noise(cfg, echo);
  nc.init = parse_init(cfg, echo, "decoupled_spectral");
  nc.amp = parse_amp(cfg, echo, 100);
  nc.trials = parse_trials(cfg, echo, 10);
  nc.master_seed = seed;
  nc.se_quad_nodes = jget<int>(cfg, "se_quad_nodes", 512);
  echo["delta"] = nc.delta;
  echo["snr_db"] = nc.snr_db;
  echo["se_quad_nodes"] = nc.se_quad_nodes;

  Timer timer;
  const auto points = noise_curve(nc);
  StageClock clock;
  clock.add("sweep", timer.lap());

  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points)
    rows.push_back({fmt_g17(p.snr_db), fmt_g17(p.sigma_w2), fmt_g17(p.mean_mse),
                    fmt_g17(p.std_mse), fmt_g17(p.se_amse), std::to_string(p.trials)});
  emit_rows(out + "/noise_curve", format,
            {"snr_db", "sigma_w2", "mean_mse", "std_mse", "se_amse", "trials"},
            {"double", "double", "double", "double", "double", "int"}, rows);
  json extra = json::array();
  for (const auto& p : points)
    extra.push_back({{"snr_db", p.snr_db}, {"mean_mse", p.mean_mse}, {"se_amse", p.se_amse}});
  write_summary(out + "/noise_curve_summary.json", echo, clock, json{{"points", extra}});
  return 0;
}

int cmd_baseline(const json& cfg, const std::string& out, const std::string& format,
                 uint64_t seed) {
  check_keys(cfg,
             {"model", "n", "deltas", "sigma_w2", "noise", "init", "trials", "eta_scale",
              "max_iter", "stop_mse", "success_threshold"},
             "baseline");
  json echo{{"command", "baseline"}, {"seed", seed}};
  const SignalModel model = parse_model(cfg, echo);
  const std::size_t n = parse_n(cfg, echo, 1000);
  const auto deltas = jget_vec(cfg, "deltas", {2.5});
  validate_deltas(deltas, 0.0);
  const double sigma_w2 = jget<double>(cfg, "sigma_w2", 0.0);
  const NoiseKind nk = parse_noise(cfg, echo);
  const InitKind init = parse_init(cfg, echo, "random");
  const int trials = parse_trials(cfg, echo, 6);
  BaselineConfig bc;
  bc.eta_scale = jget<double>(cfg, "eta_scale", 0.2);
  bc.max_iter = jget<int>(cfg, "max_iter", 1000);
  bc.stop_mse = jget<double>(cfg, "stop_mse", 1e-13);
  if (!(bc.eta_scale > 0)) throw ConfigError("eta_scale must be > 0");
  if (bc.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  const double threshold = jget<double>(cfg, "success_threshold", 1e-10);
  echo["deltas"] = deltas;
  echo["sigma_w2"] = sigma_w2;
  echo["eta_scale"] = bc.eta_scale;
  echo["max_iter"] = bc.max_iter;
  echo["stop_mse"] = bc.stop_mse;
  echo["success_threshold"] = threshold;

  Timer timer;
  std::vector<std::vector<std::string>> rows;
  std::vector<TrialRecord> all_recs;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    int successes = 0;
    for (int trial = 0; trial < trials; ++trial) {
      const uint64_t tseed = derive_seed(seed, d, uint64_t(trial));
      const ProblemInstance inst = gen_instance(model, n, deltas[d], sigma_w2, tseed, nk);
      const MadeInit mi = make_init(inst, init);
      TrialRecord rec = baseline_gd(inst, mi.init.x0, bc);
      if (success(rec, threshold)) ++successes;
      all_recs.push_back(std::move(rec));
    }
    rows.push_back({fmt_g17(deltas[d]), std::to_string(successes), std::to_string(trials),
                    fmt_g17(double(successes) / trials)});
  }
  StageClock clock;
  clock.add("sweep", timer.lap());
  emit_rows(out + "/baseline", format, {"delta", "successes", "trials", "rate"},
            {"double", "int", "int", "double"}, rows);
  json extra{{"points", rows.size()}};
  write_summary(out + "/baseline_summary.json", echo, clock, extra);
  return 0;
}

int cmd_spectral_predict(const json& cfg, const std::string& out, const std::string& format,
                         uint64_t seed) {
  check_keys(cfg, {"deltas", "sigma_w2", "noise"}, "spectral-predict");
  json echo{{"command", "spectral-predict"}, {"seed", seed}};
  const auto deltas = jget_vec(cfg, "deltas", {2.5, 3.0, 4.0, 6.0});
  validate_deltas(deltas, 2.0);
  const double sigma_w2 = jget<double>(cfg, "sigma_w2", 0.0);
  if (sigma_w2 < 0) throw ConfigError("sigma_w2 must be >= 0");
  const NoiseKind nk = parse_noise(cfg, echo);
  echo["deltas"] = deltas;
  echo["sigma_w2"] = sigma_w2;

  Timer timer;
  std::vector<std::vector<std::string>> rows;
  for (double d : deltas) {
    const auto [tau, tau_star] = solve_tau(d, sigma_w2, nk);
    const auto [a2, s2] = predict_finding1(d, sigma_w2, nk);
    rows.push_back({fmt_g17(d), fmt_g17(tau), fmt_g17(tau_star), fmt_g17(a2), fmt_g17(s2)});
  }
  StageClock clock;
  clock.add("predict", timer.lap());
  emit_rows(out + "/spectral_predict", format,
            {"delta", "tau", "tau_star", "alpha0_sq", "sigma2_0"},
            {"double", "double", "double", "double", "double"}, rows);
  write_summary(out + "/spectral_predict_summary.json", echo, clock,
                json{{"points", rows.size()}});
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"amplitude message passing experiment harness"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", format = "csv";
  uint64_t seed = 1;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker thread count (0 = runtime default)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"se-run", "state evolution trajectory from a given or predicted start"},
      {"basin", "state evolution basin-of-attraction grids"},
      {"sim", "AMP trials at one (n, delta) with matched SE prediction"},
      {"phase-transition", "success rate sweep over delta"},
      {"noise-curve", "final MSE vs SNR with SE prediction"},
      {"baseline", "gradient descent baseline success rates"},
      {"spectral-predict", "tau, tau_star and predicted init quality per delta"}};
  for (const auto& [name, desc] : cmds) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_threads(threads);
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot open config file " + config_path);
      try {
        f >> cfg;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
      }
      if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
    }
    std::filesystem::create_directories(out_dir);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "se-run") return cmd_se_run(cfg, out_dir, format, seed);
    if (cmd == "basin") return cmd_basin(cfg, out_dir, format, seed);
    if (cmd == "sim") return cmd_sim(cfg, out_dir, format, seed);
    if (cmd == "phase-transition") return cmd_phase_transition(cfg, out_dir, format, seed);
    if (cmd == "noise-curve") return cmd_noise_curve(cfg, out_dir, format, seed);
    if (cmd == "baseline") return cmd_baseline(cfg, out_dir, format, seed);
    if (cmd == "spectral-predict") return cmd_spectral_predict(cfg, out_dir, format, seed);
    std::cerr << "unknown command\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
