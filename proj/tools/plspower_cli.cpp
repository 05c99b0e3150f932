// Command-line front end: dataset ingestion, the synthetic pilot generator,
// fit/test/power/samplesize/curve/simulate runs, and JSON/CSV/SVG reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "plspower/plspower.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace plspower;

// full-data statistic from an already fitted model (used by the fit table)
static double fitted_stat(const PlscModel& m, const Matrix& x, StatKind kind) {
  return plspower::detail::statistic_from_model(m, x, m.labels, kind);
}

namespace {

struct CliOptions {
  std::string input;
  std::string label_col = "class";
  std::string out_dir = "plspower_out";
  std::string stat = "all";  // mcc | score | r2 | all
  std::string config_file;
  int components = 1;
  double alpha = 0.05;
  double beta = 0.2;
  int perms = 200;
  int sims = 100;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  int n_per_class = 0;  // 0 = pilot class sizes
  int n_min = 5;
  int n_max = 30;
  int step = 5;
  double variance_threshold = 0.8;
  bool autoscale = true;
  bool plot = false;
  // gen-pilot specifics
  int a_pilot = 2;
  double mu = 5.0;
};

std::vector<StatKind> parse_stats(const std::string& s) {
  if (s == "mcc") return {StatKind::mcc};
  if (s == "score") return {StatKind::score_t};
  if (s == "r2") return {StatKind::r2};
  if (s == "all") return {StatKind::mcc, StatKind::score_t, StatKind::r2};
  fail(errc::invalid_input, "unknown statistic '" + s + "' (use mcc, score, r2, or all)");
}

/// JSON config file mirrors the long flag names; values here are defaults
/// that explicit command-line flags override.
void apply_config_file(CliOptions& opt) {
  if (opt.config_file.empty()) return;
  std::ifstream in(opt.config_file);
  if (!in) fail(errc::invalid_input, "config: cannot open " + opt.config_file);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::invalid_input, std::string("config: invalid JSON: ") + e.what());
  }
  for (auto& [key, value] : j.items()) {
    if (key == "components") opt.components = value.get<int>();
    else if (key == "stat") opt.stat = value.get<std::string>();
    else if (key == "alpha") opt.alpha = value.get<double>();
    else if (key == "beta") opt.beta = value.get<double>();
    else if (key == "perms") opt.perms = value.get<int>();
    else if (key == "sims") opt.sims = value.get<int>();
    else if (key == "epsilon") opt.epsilon = value.get<double>();
    else if (key == "seed") opt.seed = value.get<std::uint64_t>();
    else if (key == "n-per-class") opt.n_per_class = value.get<int>();
    else if (key == "n-min") opt.n_min = value.get<int>();
    else if (key == "n-max") opt.n_max = value.get<int>();
    else if (key == "step") opt.step = value.get<int>();
    else if (key == "variance-threshold") opt.variance_threshold = value.get<double>();
    else if (key == "autoscale") opt.autoscale = value.get<bool>();
    else if (key == "plot") opt.plot = value.get<bool>();
    else if (key == "label-col") opt.label_col = value.get<std::string>();
    else if (key == "out-dir") opt.out_dir = value.get<std::string>();
    else if (key == "a-pilot") opt.a_pilot = value.get<int>();
    else if (key == "mu") opt.mu = value.get<double>();
    else fail(errc::invalid_input, "config: unknown key '" + key + "'");
  }
}

struct RunContext {
  CliOptions opt;
  std::string command;
  Json report;
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path out_path(const std::string& name) const { return fs::path(opt.out_dir) / name; }

  void warn(const std::string& msg) {
    warnings.push_back(msg);
    std::cerr << "warning: " << msg << '\n';
  }

  void echo_config() {
    Json cfg;
    cfg["input"] = opt.input;
    cfg["label_col"] = opt.label_col;
    cfg["out_dir"] = opt.out_dir;
    cfg["stat"] = opt.stat;
    cfg["components"] = opt.components;
    cfg["alpha"] = opt.alpha;
    cfg["beta"] = opt.beta;
    cfg["perms"] = opt.perms;
    cfg["sims"] = opt.sims;
    cfg["epsilon"] = opt.epsilon;
    cfg["seed"] = opt.seed;
    cfg["n_per_class"] = opt.n_per_class;
    cfg["n_min"] = opt.n_min;
    cfg["n_max"] = opt.n_max;
    cfg["step"] = opt.step;
    cfg["variance_threshold"] = opt.variance_threshold;
    cfg["autoscale"] = opt.autoscale;
    cfg["plot"] = opt.plot;
    cfg["a_pilot"] = opt.a_pilot;
    cfg["mu"] = opt.mu;
    report["command"] = command;
    report["config"] = cfg;
  }

  void finish() {
    report["warnings"] = warnings;
    // wall time and worker count live in their own block so that reports
    // from reruns stay byte-comparable once "timing" is dropped
    Json timing;
    timing["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    timing["threads"] = max_workers();
    report["timing"] = timing;
    fs::create_directories(opt.out_dir);
    std::ofstream out(out_path("report.json"));
    out << report.dump(2) << '\n';
    std::cout << "report written to " << out_path("report.json").string() << '\n';
  }
};

Dataset load_pilot(RunContext& ctx) {
  Dataset d = load_csv(ctx.opt.input, ctx.opt.label_col);
  if (!d.label_mapping.empty())
    ctx.report["label_mapping"] =
        Json{{"class_1", d.label_mapping[0]}, {"class_2", d.label_mapping[1]}};
  if (ctx.opt.autoscale) {
    std::vector<Index> dead = zero_variance_columns(d.x);
    if (!dead.empty()) {
      std::vector<std::string> kept_names;
      Matrix kept(d.x.rows(), d.x.cols() - static_cast<Index>(dead.size()));
      Index k = 0;
      std::size_t next_dead = 0;
      for (Index j = 0; j < d.x.cols(); ++j) {
        if (next_dead < dead.size() && dead[next_dead] == j) {
          ctx.warn("dropping zero-variance column '" +
                   d.variable_names[static_cast<std::size_t>(j)] + "'");
          ++next_dead;
          continue;
        }
        kept.col(k) = d.x.col(j);
        kept_names.push_back(d.variable_names[static_cast<std::size_t>(j)]);
        ++k;
      }
      d.x = std::move(kept);
      d.variable_names = std::move(kept_names);
    }
    autoscale_dataset(d);
  } else {
    center_dataset(d);
  }
  return d;
}

Json diagnostics_summary(const std::vector<IterationRecord>& records) {
  double rv_min = 2, proc_min = 2, ratio_min = 1e300;
  int used = 0;
  for (const auto& rec : records) {
    if (rec.failed) continue;
    ++used;
    rv_min = std::min(rv_min, rec.diagnostics.rv);
    proc_min = std::min(proc_min, rec.diagnostics.procrustes);
    ratio_min = std::min(ratio_min, rec.diagnostics.signal_ratio);
  }
  Json out;
  out["iterations_used"] = used;
  out["rv_min"] = rv_min;
  out["procrustes_min"] = proc_min;
  out["signal_ratio_min"] = ratio_min;
  return out;
}

Json estimate_to_json(const PowerEstimate& est, bool with_iterations) {
  Json j;
  j["stat"] = stat_name(est.stat);
  j["power"] = est.power;
  j["rejections"] = est.rejections;
  j["iterations"] = est.iterations;
  j["mc_stderr"] = est.mc_stderr;
  if (with_iterations) {
    Json raw = Json::array(), adj = Json::array();
    for (const auto& rec : est.per_iteration) {
      if (rec.failed) continue;
      raw.push_back(rec.raw_p);
      adj.push_back(rec.adjusted_p);
    }
    j["raw_p"] = raw;
    j["adjusted_p"] = adj;
  }
  j["diagnostics"] = diagnostics_summary(est.per_iteration);
  return j;
}

PowerConfig make_power_config(const RunContext& ctx, const Dataset& pilot) {
  PowerConfig cfg;
  cfg.components = ctx.opt.components;
  cfg.alpha = ctx.opt.alpha;
  cfg.simulations = ctx.opt.sims;
  cfg.permutations = ctx.opt.perms;
  cfg.epsilon = ctx.opt.epsilon;
  cfg.seed = ctx.opt.seed;
  cfg.variance_threshold = ctx.opt.variance_threshold;
  auto [n1, n2] = class_counts(pilot.labels);
  cfg.n1 = ctx.opt.n_per_class > 0 ? ctx.opt.n_per_class : n1;
  cfg.n2 = ctx.opt.n_per_class > 0 ? ctx.opt.n_per_class : n2;
  return cfg;
}

void cmd_gen_pilot(RunContext& ctx) {
  PilotSpec spec;
  spec.n_per_class = ctx.opt.n_per_class > 0 ? ctx.opt.n_per_class : 5;
  spec.latent_components = ctx.opt.a_pilot;
  spec.mu = ctx.opt.mu;
  spec.seed = ctx.opt.seed;
  Dataset d = gen_pilot(spec);
  fs::create_directories(ctx.opt.out_dir);
  save_dataset_csv(ctx.out_path("pilot.csv").string(), d, ctx.opt.label_col);
  ctx.report["results"] = Json{{"rows", d.x.rows()},
                               {"cols", d.x.cols()},
                               {"signal_vars", spec.signal_vars},
                               {"noise_vars", spec.noise_vars},
                               {"file", ctx.out_path("pilot.csv").string()}};
}

void cmd_fit(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  PlscModel full = fit_plsc(pilot.x, pilot.labels, ctx.opt.components, ctx.opt.epsilon);
  ExplainedVariance ev = explained_variance(full.pls);

  Json table = Json::array();
  for (int a = 1; a <= ctx.opt.components; ++a) {
    PlscModel m;
    m.coding = full.coding;
    m.labels = full.labels;
    m.pls = prefix_model(full.pls, a);
    m.pt = post_transform(m.pls);
    Json row;
    row["A"] = a;
    row["mcc"] = fitted_stat(m, pilot.x, StatKind::mcc);
    row["score"] = fitted_stat(m, pilot.x, StatKind::score_t);
    row["r2"] = fitted_stat(m, pilot.x, StatKind::r2);
    row["explained_variance"] = ev.per_component.head(a).sum();
    table.push_back(row);
  }
  Json results;
  results["per_component_variance"] = std::vector<double>(
      ev.per_component.data(), ev.per_component.data() + ev.per_component.size());
  results["residual_variance"] = ev.residual;
  results["statistics"] = table;
  ctx.report["results"] = results;
}

void cmd_test(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  std::vector<StatKind> kinds = parse_stats(ctx.opt.stat);
  std::vector<PermutationResult> tests =
      permutation_pvalues(pilot.x, pilot.labels, kinds, ctx.opt.components, ctx.opt.epsilon,
                          ctx.opt.perms, ctx.opt.seed, /*parallel=*/true);
  Json rows = Json::array();
  for (const auto& t : tests) {
    Json row;
    row["stat"] = stat_name(t.observed.kind);
    row["observed"] = t.observed.value;
    row["p_value"] = t.p_value;
    row["adjusted_p"] = adjust_bonferroni(t.p_value, ctx.opt.components);
    row["permutations"] = t.permutations;
    rows.push_back(row);
  }
  ctx.report["results"] = Json{{"tests", rows}};
}

void cmd_power(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  PowerConfig cfg = make_power_config(ctx, pilot);
  std::vector<StatKind> kinds = parse_stats(ctx.opt.stat);
  std::vector<PowerEstimate> ests = estimate_power_multi(pilot, cfg, kinds);
  Json rows = Json::array();
  for (const auto& est : ests) {
    rows.push_back(estimate_to_json(est, true));
    for (const auto& rec : est.per_iteration)
      if (!rec.failed && rec.diagnostics.signal_ratio < 3.0) {
        ctx.warn("signal-to-residual ratio below 3 in at least one simulation");
        break;
      }
  }
  ctx.report["results"] = Json{{"n1", cfg.n1}, {"n2", cfg.n2}, {"power", rows}};
}

void cmd_samplesize(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  PowerConfig cfg = make_power_config(ctx, pilot);
  std::vector<StatKind> kinds = parse_stats(ctx.opt.stat);
  if (kinds.size() != 1)
    fail(errc::invalid_input, "samplesize: pick one statistic with --stat");
  cfg.stat = kinds[0];
  SampleSizeResult res =
      estimate_sample_size(pilot, cfg, ctx.opt.beta, ctx.opt.n_min, ctx.opt.n_max, ctx.opt.step);
  Json trace = Json::array();
  for (const auto& [n, est] : res.trace) {
    Json row = estimate_to_json(est, false);
    row["n_per_class"] = n;
    trace.push_back(row);
  }
  Json results;
  results["target_power"] = 1.0 - ctx.opt.beta;
  results["reached"] = res.reached;
  if (res.reached) results["n_hat"] = res.n_hat;
  results["trace"] = trace;
  ctx.report["results"] = results;
  if (!res.reached)
    ctx.warn("target power not reached by n-max = " + std::to_string(ctx.opt.n_max));
}

void cmd_curve(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  PowerConfig cfg = make_power_config(ctx, pilot);
  std::vector<StatKind> kinds = parse_stats(ctx.opt.stat);
  if (kinds.size() != 1) fail(errc::invalid_input, "curve: pick one statistic with --stat");
  cfg.stat = kinds[0];

  std::vector<int> n_list;
  for (int n = ctx.opt.n_min; n <= ctx.opt.n_max; n += ctx.opt.step) n_list.push_back(n);
  std::vector<int> a_list;
  for (int a = 1; a <= ctx.opt.components; ++a) a_list.push_back(a);

  std::vector<PowerCell> cells = power_curve(pilot, cfg, n_list, a_list);

  fs::create_directories(ctx.opt.out_dir);
  std::ofstream csv(ctx.out_path("power_curve.csv"));
  csv << "A,n_per_class,power,stderr,rejections\n";
  for (const PowerCell& cell : cells)
    csv << cell.components << ',' << cell.n_per_class << ','
        << plspower::detail::format_double(cell.estimate.power) << ','
        << plspower::detail::format_double(cell.estimate.mc_stderr) << ','
        << cell.estimate.rejections << '\n';
  csv.close();

  Json rows = Json::array();
  for (const PowerCell& cell : cells) {
    Json row = estimate_to_json(cell.estimate, false);
    row["A"] = cell.components;
    row["n_per_class"] = cell.n_per_class;
    rows.push_back(row);
  }
  ctx.report["results"] = Json{{"stat", stat_name(cfg.stat)},
                               {"cells", rows},
                               {"csv", ctx.out_path("power_curve.csv").string()}};

  if (ctx.opt.plot) {
    std::vector<Curve> curves;
    for (int a : a_list) {
      Curve c;
      c.label = "A = " + std::to_string(a);
      for (const PowerCell& cell : cells)
        if (cell.components == a)
          c.points.push_back({static_cast<double>(cell.n_per_class), cell.estimate.power,
                              cell.estimate.mc_stderr});
      curves.push_back(std::move(c));
    }
    write_power_curve_svg(ctx.out_path("power_curve.svg").string(), curves,
                          "Estimated power (" + std::string(stat_name(cfg.stat)) + ")");
    ctx.report["results"]["svg"] = ctx.out_path("power_curve.svg").string();
  }
}

void cmd_simulate(RunContext& ctx) {
  Dataset pilot = load_pilot(ctx);
  PowerConfig cfg = make_power_config(ctx, pilot);
  PlscModel model = fit_plsc(pilot.x, pilot.labels, cfg.components, cfg.epsilon);
  AugmentedScoreModel aug = augment_with_residual_pca(model, cfg.variance_threshold);
  if (!aug.threshold_reached)
    ctx.warn("residual PCA exhausted before reaching the variance threshold");

  fs::create_directories(ctx.opt.out_dir);
  Json rows = Json::array();
  for (int i = 0; i < cfg.simulations; ++i) {
    auto rng = substream(cfg.seed, {stream_tag::simulation, static_cast<std::uint64_t>(i)});
    SimulatedDataset sim = simulate_dataset(model, aug, cfg.n1, cfg.n2, rng);
    std::string name = "simulated_" + std::to_string(i + 1) + ".csv";
    save_csv(ctx.out_path(name).string(), sim.x, pilot.variable_names, sim.labels,
             ctx.opt.label_col);
    if (sim.diagnostics.signal_ratio < 3.0)
      ctx.warn("simulation " + std::to_string(i + 1) + ": signal-to-residual ratio " +
               std::to_string(sim.diagnostics.signal_ratio) + " below 3");
    Json row;
    row["file"] = name;
    row["gram_error"] = sim.diagnostics.gram_error;
    row["cross_error"] = sim.diagnostics.cross_error;
    row["rv"] = sim.diagnostics.rv;
    row["procrustes"] = sim.diagnostics.procrustes;
    row["signal_ratio"] = sim.diagnostics.signal_ratio;
    rows.push_back(row);
  }
  ctx.report["results"] = Json{{"augmented_components", aug.scores.cols()},
                               {"pca_components", aug.pca_components},
                               {"explained_variance", aug.explained},
                               {"simulations", rows}};
}

int exit_code_for(errc code) {
  switch (code) {
    case errc::simulation_failed:
    case errc::power_run_failed:
    case errc::post_transform_inconsistent:
      return 2;
    default:
      return 1;  // validation of inputs, shapes, files
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power analysis and sample-size estimation for 2-class PLS classification"};
  app.require_subcommand(1);

  CliOptions opt;
  // config file values are applied before parse; explicit flags then override
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--config") opt.config_file = argv[i + 1];
  try {
    apply_config_file(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("input", opt.input, "input CSV file")->required();
    cmd->add_option("--config", opt.config_file, "JSON config file mirroring the flags");
    cmd->add_option("--label-col", opt.label_col, "name of the label column");
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
    cmd->add_option("--components,-A", opt.components, "number of score components");
    cmd->add_option("--stat", opt.stat, "statistic: mcc, score, r2, or all");
    cmd->add_option("--alpha", opt.alpha, "significance level");
    cmd->add_option("--beta", opt.beta, "type-II error target (power = 1 - beta)");
    cmd->add_option("--perms,-J", opt.perms, "permutations per test");
    cmd->add_option("--sims,-I", opt.sims, "Monte Carlo simulations");
    cmd->add_option("--epsilon", opt.epsilon, "composition coding epsilon");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--n-per-class", opt.n_per_class, "simulated observations per class");
    cmd->add_option("--n-min", opt.n_min, "smallest per-class size");
    cmd->add_option("--n-max", opt.n_max, "largest per-class size");
    cmd->add_option("--step", opt.step, "per-class size step");
    cmd->add_option("--variance-threshold", opt.variance_threshold,
                    "residual-PCA explained-variance target");
    cmd->add_flag("--autoscale,!--no-autoscale", opt.autoscale,
                  "autoscale columns (default on; centering always applies)");
    cmd->add_flag("--plot", opt.plot, "emit an SVG power-curve plot");
    return cmd;
  };

  auto* c_gen = add_common(app.add_subcommand("gen-pilot", "generate a synthetic pilot dataset"),
                           false);
  c_gen->add_option("--a-pilot", opt.a_pilot, "latent dimensions of the pilot");
  c_gen->add_option("--mu", opt.mu, "class-center separation");
  auto* c_fit = add_common(app.add_subcommand("fit", "PLSc fit summary"), true);
  auto* c_test = add_common(app.add_subcommand("test", "permutation tests"), true);
  auto* c_power = add_common(app.add_subcommand("power", "Monte Carlo power estimate"), true);
  auto* c_size = add_common(app.add_subcommand("samplesize", "smallest size reaching power"),
                            true);
  auto* c_curve = add_common(app.add_subcommand("curve", "power curve over a size grid"), true);
  auto* c_sim = add_common(app.add_subcommand("simulate", "emit simulated datasets"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunContext ctx;
  ctx.opt = opt;
  try {
    if (app.got_subcommand(c_gen)) ctx.command = "gen-pilot";
    if (app.got_subcommand(c_fit)) ctx.command = "fit";
    if (app.got_subcommand(c_test)) ctx.command = "test";
    if (app.got_subcommand(c_power)) ctx.command = "power";
    if (app.got_subcommand(c_size)) ctx.command = "samplesize";
    if (app.got_subcommand(c_curve)) ctx.command = "curve";
    if (app.got_subcommand(c_sim)) ctx.command = "simulate";
    ctx.echo_config();

    if (ctx.command == "gen-pilot") cmd_gen_pilot(ctx);
    else if (ctx.command == "fit") cmd_fit(ctx);
    else if (ctx.command == "test") cmd_test(ctx);
    else if (ctx.command == "power") cmd_power(ctx);
    else if (ctx.command == "samplesize") cmd_samplesize(ctx);
    else if (ctx.command == "curve") cmd_curve(ctx);
    else if (ctx.command == "simulate") cmd_simulate(ctx);

    ctx.finish();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
