// Compares the serial reference implementations against the OpenMP kernels:
// exhaustive Gray-code scan, brute-force composition filter, confusion-matrix
// enumeration, and annealing restarts.

#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "ratescale/experiments.hpp"

using namespace ratescale;

namespace {

using Clock = std::chrono::steady_clock;

double time_once(auto&& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-34s %10.3f s %10.3f s %8.2fx\n", name, serial, parallel,
              serial / parallel);
}

QuboModel random_model(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuboBuilder builder(dim);
  for (int i = 0; i < dim; ++i) builder.add_linear(i, coeff(rng));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (u(rng) < 0.3) builder.add_quadratic(i, j, coeff(rng));
  return builder.build();
}

} // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  {
    const auto model = random_model(24, 7);
    SolveResult serial_result, parallel_result;
    const double serial =
        time_once([&] { serial_result = solve_exact_serial(model); });
    const double parallel =
        time_once([&] { parallel_result = solve_exact(model); });
    row("exhaustive scan (24 vars)", serial, parallel);
    if (serial_result.best_energy != parallel_result.best_energy)
      std::printf("  !! energy mismatch\n");
  }

  {
    const auto ds = Dataset::generate_with_default_count(40, 2, 11);
    BruteForceConfig serial_config;
    serial_config.threads = 1;
    serial_config.lambda1 = 1;
    serial_config.lambda2 = 10;
    BruteForceConfig parallel_config = serial_config;
    parallel_config.threads = 0;
    BruteForceResult a, b;
    const double serial =
        time_once([&] { a = brute_force_search(ds, 6, serial_config); });
    const double parallel =
        time_once([&] { b = brute_force_search(ds, 6, parallel_config); });
    row("brute force filter (40/6)", serial, parallel);
    if (a.row.valid_count != b.row.valid_count)
      std::printf("  !! survivor mismatch\n");
  }

  {
    const auto ds = Dataset::generate_with_default_count(90, 4, 3);
    ConfusionOptions serial_options;
    serial_options.threads = 1;
    ConfusionOptions parallel_options;
    parallel_options.threads = 0;
    ConfusionResult a, b;
    const double serial = time_once(
        [&] { a = monotonicity_confusion(ds, 4, serial_options); });
    const double parallel = time_once(
        [&] { b = monotonicity_confusion(ds, 4, parallel_options); });
    row("confusion enumeration (90/4)", serial, parallel);
    if (a.matrix.tp != b.matrix.tp || a.matrix.tn != b.matrix.tn)
      std::printf("  !! matrix mismatch\n");
  }

  {
    const auto ds =
        Dataset::from_default_positions(150, {115, 131, 133, 147, 149, 150});
    SolveAndValidateOptions base;
    base.preset = 1;
    base.solve.seed = 0;
    base.solve.schedule.sweeps = 4000;
    SolveAndValidateOptions serial_options = base;
    serial_options.solve.threads = 1;
    SolveAndValidateOptions parallel_options = base;
    parallel_options.solve.threads = 0;
    SolveResult a, b;
    const double serial =
        time_once([&] { a = solve_and_validate(ds, 9, serial_options); });
    const double parallel =
        time_once([&] { b = solve_and_validate(ds, 9, parallel_options); });
    row("annealing restarts (150/9)", serial, parallel);
    if (a.best_energy != b.best_energy)
      std::printf("  !! non-deterministic result\n");
  }

  return 0;
}
