// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fcvi/instance_io.hpp"

namespace fcvi {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Vector vec_from(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

ExperimentConfig config_from_json(const ordered_json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.echo = j;

  if (!j.contains("instance")) throw ConfigError("config: missing 'instance'");
  ordered_json inst_json = j.at("instance");
  if (inst_json.is_string()) {
    fs::path p = inst_json.get<std::string>();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    if (!fs::exists(p)) throw ConfigError("config: instance file '" + p.string() + "' not found");
    std::ifstream in(p);
    try {
      inst_json = ordered_json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: parse error in '" + p.string() + "': " + e.what());
    }
  }
  if (is_saddle_schema(inst_json)) {
    auto sp = std::make_shared<SaddleProblem>(saddle_from_json(inst_json));
    cfg.saddle = sp;
    cfg.instance = std::make_shared<ProblemInstance>(saddle_to_vi(*sp));
  } else {
    cfg.instance = std::make_shared<ProblemInstance>(instance_from_json(inst_json));
  }

  cfg.method = j.value("method", std::string{});
  if (cfg.method.empty()) throw ConfigError("config: missing 'method'");
  method_from_name(cfg.method);  // validates

  if (!j.contains("policy") || !j.at("policy").is_object())
    throw ConfigError("config: missing 'policy' object");
  const auto& pol = j.at("policy");
  cfg.policy_name = pol.value("name", std::string{});
  if (cfg.policy_name.empty()) throw ConfigError("config: policy needs a 'name'");
  cfg.policy.B = pol.value("B", 1.0);
  cfg.policy.c = pol.value("c", -1.0);
  cfg.policy.c1 = pol.value("c1", 6.0);
  cfg.policy.c2 = pol.value("c2", 6.0);
  const std::string mode = pol.value("mode", std::string{"sum"});
  if (mode == "sum")
    cfg.policy.mode = EtaMode::Sum;
  else if (mode == "max")
    cfg.policy.mode = EtaMode::Max;
  else
    throw ConfigError("config: policy.mode must be 'sum' or 'max'");

  if (!j.contains("horizons") || !j.at("horizons").is_array() || j.at("horizons").empty())
    throw ConfigError("config: 'horizons' must be a non-empty array");
  for (const auto& h : j.at("horizons")) {
    const long T = h.get<long>();
    if (T < 1) throw ConfigError("config: horizons must be >= 1");
    if (!cfg.horizons.empty() && T <= cfg.horizons.back())
      throw ConfigError("config: horizons must be strictly increasing");
    cfg.horizons.push_back(T);
  }

  if (j.contains("seeds")) {
    for (const auto& s : j.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (cfg.seeds.empty()) throw ConfigError("config: needs at least one seed");

  if (j.contains("noise")) {
    const auto& nj = j.at("noise");
    cfg.noise.sigma_F = nj.value("sigma_F", 0.0);
    cfg.noise.sigma_g = nj.value("sigma_g", 0.0);
    if (nj.contains("sigma_Gamma")) {
      const auto& sg = nj.at("sigma_Gamma");
      if (sg.is_number()) {
        cfg.noise.sigma_Gamma =
            Vector::Constant(cfg.instance->num_constraints(), sg.get<double>());
      } else {
        cfg.noise.sigma_Gamma = vec_from(sg, "noise.sigma_Gamma");
      }
    }
    const std::string shape = nj.value("shape", std::string{"gaussian"});
    if (shape == "gaussian")
      cfg.noise.shape = NoiseShape::Gaussian;
    else if (shape == "bounded_uniform")
      cfg.noise.shape = NoiseShape::BoundedUniform;
    else
      throw ConfigError("config: noise.shape must be 'gaussian' or 'bounded_uniform'");
    cfg.noise.validate(cfg.instance->num_constraints());
  }

  if (j.contains("x0")) {
    cfg.x0 = vec_from(j.at("x0"), "x0");
    if (cfg.x0->size() != cfg.instance->dim())
      throw ConfigError("config: x0 dimension does not match the instance");
  }
  if (j.contains("probes")) {
    const auto& pj = j.at("probes");
    cfg.probes.n_random = pj.value("n_random", cfg.probes.n_random);
    cfg.probes.seed = pj.value("seed", cfg.probes.seed);
  }
  cfg.record_timings = j.value("record_timings", false);
  cfg.label = j.value("label", cfg.instance->label());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j, fs::path(path).parent_path().string());
}

std::optional<double> theorem_bound(const ProblemInstance& inst, const StepSchedule& schedule,
                                    const StochasticOracleSpec& noise, long T, const Vector& x0) {
  const double L = inst.L(), H = inst.H(), Lg = inst.L_g(), Hg = inst.H_g(), Mg = inst.M_g(),
               D = inst.D_X();
  const double sqrtT = std::sqrt(static_cast<double>(T));
  const bool known = inst.known_solution().has_value();
  const double lam1 = known ? inst.known_solution()->lambda_star.norm() + 1.0 : 0.0;
  const auto& name = schedule.policy_name;

  if (name == "det_known_lambda") {
    if (!known) return std::nullopt;
    return (3.0 * L * D * D + lam1 * D * (Lg * D / 2.0 + 6.0 * Mg)) / T +
           std::sqrt(3.0) * (H + Hg * lam1) * D / sqrtT;
  }
  if (name == "det_B" || name == "stoch_B") {
    if (!known) return std::nullopt;
    const double B = schedule.B;
    const double Hstar = Hg * lam1 + Lg * D * std::max(lam1 - B, 0.0) / 2.0;
    const double lead = name == "det_B" ? 3.0 : 4.0;
    const double fast =
        (lead * L * D * D + B * Lg * D * D / 2.0 + 3.0 * Mg * D * (B + lam1 * lam1 / B)) / T;
    if (name == "det_B") {
      const double denom = H + Hg * B + schedule.c;
      double slow_term = H;
      if (Hstar > 0) {
        if (denom <= 0) return std::numeric_limits<double>::infinity();
        slow_term += Hstar * Hstar / denom;
      }
      return fast + std::sqrt(3.0) * D * slow_term / sqrtT;
    }
    const double denom = H + Hg * B + std::sqrt(3.0) * noise.sigma_F;
    double slow_term = H + std::sqrt(2.0) * noise.sigma_F;
    if (Hstar > 0) {
      if (denom <= 0) return std::numeric_limits<double>::infinity();
      slow_term += Hstar * Hstar / denom;
    }
    return fast + 4.0 * D * slow_term / sqrtT;
  }
  if (name == "adaptive") {
    if (!known) return std::nullopt;
    const auto& ks = *inst.known_solution();
    const double dist0 = (x0 - ks.x_star).norm();
    const double lam = ks.lambda_star.norm();
    const double beta = schedule.beta;
    const double B_ad =
        (beta > 0 ? std::sqrt(2.0 / beta) * dist0 : 0.0) + (std::sqrt(2.0) + 1.0) * lam;
    const double c1L = schedule.c1 * L;
    const double gamma_lb = c1L / (c1L + schedule.c2 * Lg * B_ad);
    const double Gamma_lb = gamma_lb * static_cast<double>(T);
    return (c1L / 2.0 * dist0 * dist0 + beta * c1L / 2.0 * lam1 * lam1) / Gamma_lb;
  }
  return std::nullopt;  // fully_stoch_B has no closed-form bound coded here
}

namespace {

struct CellResult {
  long T = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double infeas = 0.0;
  double gap = 0.0;
  double lambda_norm = 0.0;
  long operator_draws = 0;
  long constraint_draws = 0;
  std::string trace_file;
};

std::string trace_filename(long T, std::uint64_t seed) {
  return "trace_T" + std::to_string(T) + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 int workers) {
  const ProblemInstance& inst = *config.instance;
  fs::create_directories(out_dir);

  const Vector x0 = config.x0 ? inst.set().project(*config.x0) : inst.set().anchor();
  const auto probes = default_probes(inst, config.probes);
  const auto criteria = make_criteria(inst, probes);

  struct Cell {
    long T;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (long T : config.horizons)
    for (std::uint64_t seed : config.seeds) cells.push_back({T, seed});
  std::vector<CellResult> results(cells.size());

  const Method method = method_from_name(config.method);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      CellResult& r = results[i];
      r.T = cells[i].T;
      r.seed = cells[i].seed;
      try {
        StepSchedule schedule =
            make_policy(config.policy_name, inst,
                        [&] {
                          PolicyParams p = config.policy;
                          p.T = cells[i].T;
                          return p;
                        }(),
                        config.noise);
        StochasticOracleSpec noise = config.noise;
        noise.master_seed = cells[i].seed;
        RunOptions opts;
        opts.criteria = criteria;
        opts.record_timing = config.record_timings;
        RunResult run = run_solver(inst, method, schedule, cells[i].T, noise, x0, opts);
        const auto [infeas, gap] = criteria(run.x_bar);
        r.infeas = infeas;
        r.gap = gap;
        r.lambda_norm = run.lambda_bar.norm();
        r.operator_draws = run.oracle_calls.operator_draws;
        r.constraint_draws = run.oracle_calls.constraint_draws;
        r.trace_file = trace_filename(cells[i].T, cells[i].seed);
        write_atomic((fs::path(out_dir) / r.trace_file).string(), run.trace.to_csv());
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  const int nworkers = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nworkers; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction over completed cells, in cell order.
  ordered_json summary;
  summary["label"] = config.label;
  summary["instance"] = inst.label();
  summary["method"] = config.method;
  summary["policy"] = config.policy_name;
  summary["channels"] = {"infeas", "gap_restricted"};
  summary["x0"] = [&] {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < x0.size(); ++i) a.push_back(x0[i]);
    return a;
  }();
  summary["config"] = config.echo;

  ordered_json jcells = ordered_json::array();
  for (const auto& r : results) {
    ordered_json c;
    c["T"] = r.T;
    c["seed"] = r.seed;
    c["status"] = r.ok ? "ok" : "failed";
    if (r.ok) {
      c["infeas"] = r.infeas;
      c["gap_restricted"] = r.gap;
      c["lambda_norm"] = r.lambda_norm;
      c["operator_draws"] = r.operator_draws;
      c["constraint_draws"] = r.constraint_draws;
      c["trace"] = r.trace_file;
    } else {
      c["error"] = r.error;
    }
    jcells.push_back(std::move(c));
  }
  summary["cells"] = std::move(jcells);

  ordered_json aggregates = ordered_json::array();
  std::vector<double> fit_ts, fit_infeas, fit_gap;
  for (long T : config.horizons) {
    std::vector<double> infeas, gap;
    for (const auto& r : results)
      if (r.ok && r.T == T) {
        infeas.push_back(r.infeas);
        gap.push_back(r.gap);
      }
    if (infeas.empty()) continue;
    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto stdev = [&](const std::vector<double>& v, double mu) {
      if (v.size() < 2) return 0.0;
      double s = 0;
      for (double x : v) s += (x - mu) * (x - mu);
      return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    const double mi = mean(infeas), mg = mean(gap);
    ordered_json a;
    a["T"] = T;
    a["seeds"] = infeas.size();
    a["infeas_mean"] = mi;
    a["infeas_std"] = stdev(infeas, mi);
    a["gap_mean"] = mg;
    a["gap_std"] = stdev(gap, mg);
    StepSchedule schedule = make_policy(config.policy_name, inst,
                                        [&] {
                                          PolicyParams p = config.policy;
                                          p.T = T;
                                          return p;
                                        }(),
                                        config.noise);
    if (auto bound = theorem_bound(inst, schedule, config.noise, T, x0)) {
      a["theorem_bound"] = *bound;
      a["bound_satisfied"] = mi <= *bound;
    } else {
      a["theorem_bound"] = nullptr;
      a["bound_satisfied"] = nullptr;
    }
    aggregates.push_back(std::move(a));
    fit_ts.push_back(static_cast<double>(T));
    fit_infeas.push_back(mi);
    fit_gap.push_back(mg);
  }
  summary["aggregates"] = std::move(aggregates);

  ordered_json fits;
  auto emit_fit = [&](const char* key, const std::vector<double>& errs, ErrorChannel ch) {
    try {
      const RateFit fit = fit_rate_points(fit_ts, errs, ch);
      ordered_json f;
      f["slope"] = fit.slope;
      f["intercept"] = fit.intercept;
      f["residual"] = fit.residual;
      f["points"] = fit.points_used;
      fits[key] = std::move(f);
    } catch (const std::exception&) {
      fits[key] = nullptr;  // fewer than 4 usable horizons
    }
  };
  emit_fit("infeas", fit_infeas, ErrorChannel::Infeasibility);
  emit_fit("gap_restricted", fit_gap, ErrorChannel::GapRestricted);
  summary["rate_fits"] = std::move(fits);

  ExperimentOutcome outcome;
  outcome.summary_path = (fs::path(out_dir) / "summary.json").string();
  write_atomic(outcome.summary_path, summary.dump(2) + "\n");
  for (const auto& r : results)
    if (!r.ok) outcome.exit_code = 1;
  return outcome;
}

ReportOutput build_report(const std::vector<std::string>& summary_paths) {
  if (summary_paths.empty()) throw ConfigError("report: no summaries given");
  std::vector<ordered_json> summaries;
  ordered_json channels;
  for (const auto& path : summary_paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open '" + path + "'");
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("report: '" + path + "': " + e.what());
    }
    if (channels.is_null())
      channels = j.value("channels", ordered_json::array());
    else if (channels != j.value("channels", ordered_json::array()))
      throw ConfigError("report: summaries carry incompatible channel sets; refuse to mix");
    summaries.push_back(std::move(j));
  }

  std::ostringstream text, csv, plot;
  csv << "instance,method,policy,T,seeds,infeas_mean,infeas_std,gap_mean,gap_std,"
         "slope_infeas,slope_gap,theorem_bound,within_bound\n";
  plot << "instance,method,policy,T,seed,channel,value\n";
  text << "instance      method      policy            T        seeds  infeas        gap    "
          "       slope(i)  bound         ok\n";

  for (const auto& s : summaries) {
    const std::string inst = s.value("instance", std::string{"?"});
    const std::string method = s.value("method", std::string{"?"});
    const std::string policy = s.value("policy", std::string{"?"});
    const auto& fits = s.at("rate_fits");
    const bool have_fit_i = fits.contains("infeas") && !fits.at("infeas").is_null();
    const bool have_fit_g =
        fits.contains("gap_restricted") && !fits.at("gap_restricted").is_null();
    const std::string slope_i = have_fit_i ? fmt6(fits.at("infeas").at("slope").get<double>()) : "-";
    const std::string slope_g =
        have_fit_g ? fmt6(fits.at("gap_restricted").at("slope").get<double>()) : "-";
    for (const auto& a : s.at("aggregates")) {
      const bool has_bound = !a.at("theorem_bound").is_null();
      const std::string bound = has_bound ? fmt6(a.at("theorem_bound").get<double>()) : "-";
      const std::string ok =
          has_bound ? (a.at("bound_satisfied").get<bool>() ? "yes" : "NO") : "-";
      csv << inst << ',' << method << ',' << policy << ',' << a.at("T").get<long>() << ','
          << a.at("seeds").get<long>() << ',' << fmt(a.at("infeas_mean").get<double>()) << ','
          << fmt(a.at("infeas_std").get<double>()) << ',' << fmt(a.at("gap_mean").get<double>())
          << ',' << fmt(a.at("gap_std").get<double>()) << ',' << slope_i << ',' << slope_g << ','
          << bound << ',' << ok << '\n';
      char line[256];
      std::snprintf(line, sizeof line, "%-13s %-11s %-17s %-8ld %-6ld %-13s %-13s %-9s %-13s %s\n",
                    inst.c_str(), method.c_str(), policy.c_str(), a.at("T").get<long>(),
                    a.at("seeds").get<long>(), fmt6(a.at("infeas_mean").get<double>()).c_str(),
                    fmt6(a.at("gap_mean").get<double>()).c_str(), slope_i.c_str(), bound.c_str(),
                    ok.c_str());
      text << line;
    }
    for (const auto& c : s.at("cells")) {
      if (c.at("status").get<std::string>() != "ok") continue;
      plot << inst << ',' << method << ',' << policy << ',' << c.at("T").get<long>() << ','
           << c.at("seed").get<std::uint64_t>() << ",infeas," << fmt(c.at("infeas").get<double>())
           << '\n';
      plot << inst << ',' << method << ',' << policy << ',' << c.at("T").get<long>() << ','
           << c.at("seed").get<std::uint64_t>() << ",gap_restricted,"
           << fmt(c.at("gap_restricted").get<double>()) << '\n';
    }
  }
  return {text.str(), csv.str(), plot.str()};
}

int default_workers() {
  if (const char* env = std::getenv("FCVI_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"fcvi: function constrained variational inequality solvers and benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = default_workers();
  bool timings = false;

  auto* solve = app.add_subcommand("solve", "run one experiment config");
  solve->add_option("--config", config_path, "experiment config JSON")->required();
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_flag("--timings", timings, "record wall-clock times in outputs");

  auto* sweep = app.add_subcommand("sweep", "run a config with concurrent cells");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--workers", workers, "concurrent cells (default FCVI_WORKERS or 1)");
  sweep->add_flag("--timings", timings, "record wall-clock times in outputs");

  std::vector<std::string> summary_paths;
  std::string report_csv, plot_data;
  auto* report = app.add_subcommand("report", "consolidate sweep summaries into a table");
  report->add_option("summaries", summary_paths, "summary.json paths")->required();
  report->add_option("--csv", report_csv, "also write the table as CSV here");
  report->add_option("--plot-data", plot_data, "write tidy long-format CSV here");

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "experiment config JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed() || sweep->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      cfg.record_timings = cfg.record_timings || timings;
      const auto outcome = run_experiment(cfg, out_dir, solve->parsed() ? 1 : workers);
      std::cout << "wrote " << outcome.summary_path << "\n";
      return outcome.exit_code;
    }
    if (report->parsed()) {
      const ReportOutput out = build_report(summary_paths);
      std::cout << out.table_text;
      if (!report_csv.empty()) write_atomic(report_csv, out.table_csv);
      if (!plot_data.empty()) write_atomic(plot_data, out.plot_data_csv);
      return 0;
    }
    if (validate->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      // Policies must also build for every horizon.
      for (long T : cfg.horizons) {
        PolicyParams p = cfg.policy;
        p.T = T;
        make_policy(cfg.policy_name, *cfg.instance, p, cfg.noise);
      }
      std::cout << "config ok: " << cfg.label << ", " << cfg.horizons.size() << " horizon(s), "
                << cfg.seeds.size() << " seed(s)\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fcvi
