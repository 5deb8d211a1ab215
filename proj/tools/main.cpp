// Command line front end: batch subcommands over datasets, QUBO models,
// solvers, the brute-force baseline and the validation experiments.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ratescale/baseline.hpp"
#include "ratescale/experiments.hpp"
#include "ratescale/solver.hpp"

using namespace ratescale;

namespace {

struct DatasetFlags {
  std::string path;
  int n = 0;
  std::vector<int> default_positions;
  bool has_defaults_flag = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
  auto* file = cmd->add_option("--dataset", flags.path, "Dataset CSV path");
  auto* n = cmd->add_option("--n", flags.n, "Counterpart count");
  auto* defaults =
      cmd->add_option("--defaults", flags.default_positions,
                      "1-based default positions (comma separated)")
          ->delimiter(',');
  n->excludes(file);
  defaults->excludes(file);
  defaults->needs(n);
  cmd->callback([&flags, defaults]() {
    flags.has_defaults_flag = defaults->count() > 0;
  });
}

Dataset resolve_dataset(const DatasetFlags& flags) {
  if (!flags.path.empty()) return Dataset::load(flags.path);
  if (flags.n <= 0)
    throw CLI::ValidationError("dataset", "need --dataset or --n/--defaults");
  return Dataset::from_default_positions(flags.n, flags.default_positions);
}

struct ModelFlags {
  int m = 0;
  int preset = 1;
  bool no_thresholds = false;
  bool no_concentration = false;
  std::string logical = "global";
  std::string monotonicity = "approx";
  std::optional<int> lambda1, lambda2;
  std::optional<double> mu01, mu02, mu03, mu04, mu1, mu3, mu41, mu42;
  std::optional<double> lambda0, lambda_exact;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--m", flags.m, "Number of grades")->required();
  cmd->add_option("--preset", flags.preset, "Weight preset (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_flag("--no-thresholds", flags.no_thresholds,
                "Drop the cardinality threshold constraint and its slacks");
  cmd->add_flag("--no-concentration", flags.no_concentration,
                "Drop the concentration penalty");
  cmd->add_option("--logical", flags.logical, "Staircase encoding")
      ->check(CLI::IsMember({"global", "local"}));
  cmd->add_option("--monotonicity", flags.monotonicity,
                  "Monotonicity encoding")
      ->check(CLI::IsMember({"approx", "exact", "none"}));
  cmd->add_flag_callback(
      "--exact-monotonicity",
      [&flags]() { flags.monotonicity = "exact"; },
      "Shorthand for --monotonicity exact");
  cmd->add_option("--lambda1", flags.lambda1, "Lower cardinality threshold");
  cmd->add_option("--lambda2", flags.lambda2, "Upper cardinality threshold");
  cmd->add_option("--mu01", flags.mu01, "Grade uniqueness weight");
  cmd->add_option("--mu02", flags.mu02, "Endpoint weight");
  cmd->add_option("--mu03", flags.mu03, "Vertical adjacency weight");
  cmd->add_option("--mu04", flags.mu04, "Diagonal transition weight");
  cmd->add_option("--mu1", flags.mu1, "Monotonicity weight");
  cmd->add_option("--mu3", flags.mu3, "Concentration weight");
  cmd->add_option("--mu41", flags.mu41, "Lower threshold weight");
  cmd->add_option("--mu42", flags.mu42, "Upper threshold weight");
  cmd->add_option("--lambda0", flags.lambda0,
                  "Product-consistency weight (exact monotonicity)");
  cmd->add_option("--lambda-exact", flags.lambda_exact,
                  "Squared-form weight (exact monotonicity)");
}

LayoutOptions layout_options_from(const ModelFlags& flags, const Dataset& ds) {
  LayoutOptions options;
  options.include_thresholds = !flags.no_thresholds;
  options.lambda1 = flags.lambda1;
  options.lambda2 = flags.lambda2;
  options.exact_monotonicity = flags.monotonicity == "exact";
  options.default_count = ds.default_count();
  return options;
}

ComposeOptions compose_options_from(const ModelFlags& flags) {
  ComposeOptions options;
  options.logical = flags.logical == "local" ? LogicalEncoding::local
                                             : LogicalEncoding::global;
  options.monotonicity = flags.monotonicity == "exact"
                             ? MonotonicityEncoding::exact
                         : flags.monotonicity == "none"
                             ? MonotonicityEncoding::none
                             : MonotonicityEncoding::approximate;
  options.concentration = !flags.no_concentration;
  return options;
}

PenaltyWeights weights_from(const ModelFlags& flags, const Dataset& ds, int m) {
  PenaltyWeights w = preset_weights(flags.preset, ds.n(), m,
                                    std::max(1, ds.default_count()));
  if (flags.mu01) w.mu01 = *flags.mu01;
  if (flags.mu02) w.mu02 = *flags.mu02;
  if (flags.mu03) w.mu03 = *flags.mu03;
  if (flags.mu04) w.mu04 = *flags.mu04;
  if (flags.mu1) w.mu1 = *flags.mu1;
  if (flags.mu3) w.mu3 = *flags.mu3;
  if (flags.mu41) w.mu41 = *flags.mu41;
  if (flags.mu42) w.mu42 = *flags.mu42;
  if (flags.lambda0) w.rosenberg_lambda0 = *flags.lambda0;
  if (flags.lambda_exact) w.exact_lambda = *flags.lambda_exact;
  return w;
}

struct SolverFlags {
  std::string solver = "auto";
  int cap = 26;
  long long sweeps = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  int restarts = 8;
  std::uint64_t seed = 0;
  bool force = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--solver", flags.solver, "Solver selection")
      ->check(CLI::IsMember({"auto", "exact", "anneal"}));
  cmd->add_option("--cap", flags.cap, "Exhaustive-scan variable cap");
  cmd->add_option("--sweeps", flags.sweeps, "Annealing sweeps");
  cmd->add_option("--t-start", flags.t_start, "Initial temperature");
  cmd->add_option("--t-end", flags.t_end, "Final temperature");
  cmd->add_option("--restarts", flags.restarts, "Annealing restarts");
  cmd->add_option("--seed", flags.seed, "Master seed");
  cmd->add_flag("--force", flags.force,
                "Solve oversized exact-monotonicity models anyway");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int g_threads = 0;

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Credit rating scale definition via QUBO models"};
  app.require_subcommand(1);
  app.add_option("--threads", g_threads, "Worker threads (0 = all cores)")
      ->capture_default_str();

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
  int gen_n = 0;
  double gen_fraction = 0.0;
  int gen_count = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "-";
  generate->add_option("--n", gen_n, "Counterpart count")->required();
  auto* frac = generate->add_option("--fraction", gen_fraction,
                                    "Default fraction in (0,1)");
  auto* count = generate->add_option("--defaults-count", gen_count,
                                     "Exact number of defaults");
  count->excludes(frac);
  generate->add_option("--seed", gen_seed, "Master seed");
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate compositions");
  int enum_n = 0, enum_m = 0;
  bool enum_count_only = false;
  std::string enum_out = "-";
  enumerate->add_option("--n", enum_n, "Counterpart count")->required();
  enumerate->add_option("--m", enum_m, "Number of grades")->required();
  enumerate->add_flag("--count-only", enum_count_only,
                      "Print the configuration count only");
  enumerate->add_option("--out", enum_out, "Output path (default stdout)");

  // build
  auto* build = app.add_subcommand("build", "Compose a QUBO model file");
  DatasetFlags build_ds;
  ModelFlags build_model;
  std::string build_out;
  add_dataset_flags(build, build_ds);
  add_model_flags(build, build_model);
  build->add_option("--out", build_out, "Output model path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Minimize a model and decode");
  DatasetFlags solve_ds;
  ModelFlags solve_model;
  SolverFlags solve_flags;
  std::string solve_model_path, solve_out = "-";
  bool solve_pretty = false;
  add_dataset_flags(solve, solve_ds);
  add_model_flags(solve, solve_model);
  add_solver_flags(solve, solve_flags);
  solve->add_option("--model", solve_model_path,
                    "Solve this model file instead of composing");
  solve->add_option("--out", solve_out, "Result JSON path (default stdout)");
  solve->add_flag("--pretty", solve_pretty, "Append a human-readable table");

  // confusion
  auto* confusion = app.add_subcommand(
      "confusion", "Monotonicity-approximation confusion matrix");
  DatasetFlags conf_ds;
  int conf_m = 0, conf_preset = 1;
  std::optional<double> conf_mu1;
  std::string conf_hist_out, conf_out = "-";
  add_dataset_flags(confusion, conf_ds);
  confusion->add_option("--m", conf_m, "Number of grades")->required();
  confusion->add_option("--preset", conf_preset, "Weight preset for the ratio")
      ->check(CLI::IsMember({1, 2}));
  confusion->add_option("--mu1", conf_mu1,
                        "Override the monotonicity weight");
  confusion->add_option("--hist-out", conf_hist_out,
                        "Write energy,label histogram CSV here");
  confusion->add_option("--out", conf_out, "JSON output (default stdout)");

  // benchmark
  auto* benchmark =
      app.add_subcommand("benchmark", "Constrained brute-force benchmark");
  std::vector<std::string> bench_cases;
  int bench_defaults = 0;
  double bench_fraction = 0.03;
  std::uint64_t bench_seed = 0;
  int bench_repeats = 1;
  bool bench_fit = false;
  bool bench_het = false, bench_hom = false;
  double bench_threshold = 0.05;
  std::optional<int> bench_lambda1, bench_lambda2;
  std::vector<std::string> bench_extrapolate;
  std::string bench_out = "-";
  benchmark
      ->add_option("--cases", bench_cases,
                   "Problem sizes as n:m pairs (e.g. 8:3,12:3)")
      ->required()
      ->delimiter(',');
  benchmark->add_option("--defaults-count", bench_defaults,
                        "Defaults per dataset (0 = max(1, round(n*fraction)))");
  benchmark->add_option("--fraction", bench_fraction,
                        "Default fraction when --defaults-count is 0");
  benchmark->add_option("--seed", bench_seed, "Master seed");
  benchmark->add_option("--repeats", bench_repeats,
                        "Datasets per case; elapsed is their mean");
  benchmark->add_flag("--fit", bench_fit, "Fit the power law to the rows");
  benchmark->add_flag("--heterogeneity", bench_het,
                      "Enable the heterogeneity check");
  benchmark->add_flag("--homogeneity", bench_hom,
                      "Enable the homogeneity check");
  benchmark->add_option("--threshold", bench_threshold,
                        "Concentration threshold");
  benchmark->add_option("--lambda1", bench_lambda1, "Lower threshold");
  benchmark->add_option("--lambda2", bench_lambda2, "Upper threshold");
  benchmark
      ->add_option("--extrapolate", bench_extrapolate,
                   "Extra n:m sizes to extrapolate with the fitted law")
      ->delimiter(',');
  benchmark->add_option("--out", bench_out, "CSV output (default stdout)");

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a partition against a dataset");
  DatasetFlags val_ds;
  std::vector<int> val_partition;
  ValidationConfig val_config;
  std::string val_out = "-";
  bool val_pretty = false;
  add_dataset_flags(validate_cmd, val_ds);
  validate_cmd
      ->add_option("--partition", val_partition,
                   "Grade cardinalities (comma separated)")
      ->required()
      ->delimiter(',');
  validate_cmd->add_option("--threshold", val_config.concentration_threshold,
                           "Concentration threshold");
  validate_cmd->add_option("--lambda1", val_config.lambda1, "Lower threshold");
  validate_cmd->add_option("--lambda2", val_config.lambda2, "Upper threshold");
  validate_cmd->add_option("--het-alpha", val_config.heterogeneity_alpha,
                           "Heterogeneity significance level");
  validate_cmd->add_option("--hom-alpha", val_config.homogeneity_alpha,
                           "Homogeneity significance level");
  validate_cmd->add_option("--hom-iterations",
                           val_config.homogeneity_iterations,
                           "Homogeneity split count");
  validate_cmd->add_option("--seed", val_config.seed, "Master seed");
  validate_cmd->add_option("--out", val_out, "JSON output (default stdout)");
  validate_cmd->add_flag("--pretty", val_pretty,
                         "Append a human-readable table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) {
      const Dataset ds =
          count->count() > 0
              ? Dataset::generate_with_default_count(gen_n, gen_count, gen_seed)
              : Dataset::generate(gen_n, gen_fraction, gen_seed);
      ds.save(gen_out);
      std::cerr << "wrote " << gen_out << " (" << ds.default_count()
                << " defaults)\n";
    }

    if (*enumerate) {
      if (enum_count_only) {
        write_text(enum_out, count_configurations(enum_n, enum_m).str() + "\n");
      } else {
        std::string text = "composition\n";
        CompositionEnumerator enumerator(enum_n, enum_m);
        std::vector<int> parts;
        while (enumerator.next(parts)) {
          for (std::size_t k = 0; k < parts.size(); ++k)
            text += (k ? "|" : "") + std::to_string(parts[k]);
          text += '\n';
        }
        write_text(enum_out, text);
      }
    }

    if (*build) {
      const Dataset ds = resolve_dataset(build_ds);
      const auto layout =
          VariableLayout::create(ds.n(), build_model.m,
                                 layout_options_from(build_model, ds));
      const auto model = compose(layout, weights_from(build_model, ds,
                                                      build_model.m),
                                 ds, compose_options_from(build_model));
      save_qubo(model, build_out);
      std::cerr << "wrote " << build_out << " (dim=" << model.dimension << ", "
                << model.term_count() << " terms)\n";
    }

    if (*solve) {
      const Dataset ds = resolve_dataset(solve_ds);
      SolveAndValidateOptions options;
      options.layout = layout_options_from(solve_model, ds);
      options.compose = compose_options_from(solve_model);
      options.weights = weights_from(solve_model, ds, solve_model.m);
      options.solve.exact_cap = solve_flags.cap;
      options.solve.schedule = {solve_flags.t_start, solve_flags.t_end,
                                solve_flags.sweeps};
      options.solve.restarts = solve_flags.restarts;
      options.solve.seed = solve_flags.seed;
      options.solve.threads = g_threads;
      options.force = solve_flags.force;
      if (solve_flags.solver == "exact")
        options.solve.exact_cap = std::max(solve_flags.cap, 1);
      if (solve_flags.solver == "anneal") options.solve.exact_cap = -1;

      SolveResult result;
      if (!solve_model_path.empty()) {
        // Solve a prebuilt model file; decoding still needs the layout.
        const QuboModel model = load_qubo(solve_model_path);
        const auto layout = VariableLayout::create(
            ds.n(), solve_model.m, layout_options_from(solve_model, ds));
        result = solve_model_and_validate(model, layout, ds, options);
      } else {
        result = solve_and_validate(ds, solve_model.m, options);
      }

      std::string text = result.to_json().dump(2) + "\n";
      if (solve_pretty && result.validity) {
        PresetExperimentReport report;
        report.result = result;
        text += report.grade_table();
      }
      write_text(solve_out, text);
      if (!result.decoded) {
        std::cerr << "no valid staircase decoded from the best state\n";
        return 1;
      }
    }

    if (*confusion) {
      const Dataset ds = resolve_dataset(conf_ds);
      ConfusionOptions options;
      options.threads = g_threads;
      PenaltyWeights w = preset_weights(conf_preset, ds.n(), conf_m,
                                        std::max(1, ds.default_count()));
      if (conf_mu1) w.mu1 = *conf_mu1;
      options.weights = w;
      const auto result = monotonicity_confusion(ds, conf_m, options);
      if (!conf_hist_out.empty()) write_text(conf_hist_out, result.histogram_csv());
      write_text(conf_out, result.to_json().dump(2) + "\n");
      std::fprintf(stderr, "TP=%llu FP=%llu TN=%llu FN=%llu\n",
                   (unsigned long long)result.matrix.tp,
                   (unsigned long long)result.matrix.fp,
                   (unsigned long long)result.matrix.tn,
                   (unsigned long long)result.matrix.fn);
    }

    if (*benchmark) {
      std::vector<BenchmarkRow> rows;
      for (const auto& text : bench_cases) {
        const auto colon = text.find(':');
        if (colon == std::string::npos)
          throw std::runtime_error("bad case '" + text + "', expected n:m");
        const int n = std::stoi(text.substr(0, colon));
        const int m = std::stoi(text.substr(colon + 1));

        BenchmarkRow mean_row;
        for (int rep = 0; rep < std::max(1, bench_repeats); ++rep) {
          const int defaults =
              bench_defaults > 0
                  ? bench_defaults
                  : std::max(1, static_cast<int>(std::lround(n * bench_fraction)));
          const Dataset ds = Dataset::generate_with_default_count(
              n, defaults, bench_seed + 1000 * rep);
          BruteForceConfig config;
          config.heterogeneity = bench_het;
          config.homogeneity = bench_hom;
          config.concentration_threshold = bench_threshold;
          config.lambda1 = bench_lambda1;
          config.lambda2 = bench_lambda2;
          config.threads = g_threads;
          config.seed = bench_seed;
          const auto result = brute_force_search(ds, m, config);
          if (rep == 0) mean_row = result.row;
          else {
            mean_row.valid_count += result.row.valid_count;
            mean_row.elapsed += result.row.elapsed;
          }
        }
        mean_row.valid_count /= std::max(1, bench_repeats);
        mean_row.elapsed /= std::max(1, bench_repeats);
        rows.push_back(mean_row);
        std::fprintf(stderr, "n=%d m=%d done (%.3fs)\n", mean_row.n, mean_row.m,
                     mean_row.elapsed.count());
      }
      std::string text = benchmark_csv(rows);
      if (bench_fit || !bench_extrapolate.empty()) {
        const auto fit = fit_power_law(rows);
        char line[160];
        std::snprintf(line, sizeof line, "# fit: a=%.6g b=%.6f\n", fit.a, fit.b);
        text += line;
        for (const auto& target : bench_extrapolate) {
          const auto colon = target.find(':');
          const int n = std::stoi(target.substr(0, colon));
          const int m = std::stoi(target.substr(colon + 1));
          const auto extra = extrapolate_runtime(fit.a, fit.b, n, m);
          std::snprintf(line, sizeof line,
                        "# extrapolate n=%d m=%d: %.4g s = %.4g days\n", n, m,
                        extra.seconds, extra.days);
          text += line;
        }
      }
      write_text(bench_out, text);
    }

    if (*validate_cmd) {
      const Dataset ds = resolve_dataset(val_ds);
      const Partition p(val_partition);
      const auto report = validate(ds, p, val_config);
      std::string text = report.to_json().dump(2) + "\n";
      if (val_pretty) {
        SolveResult carrier;
        carrier.validity = report;
        PresetExperimentReport pretty;
        pretty.result = std::move(carrier);
        text += pretty.grade_table();
      }
      write_text(val_out, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
