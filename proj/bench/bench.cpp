// Times the OpenMP kernels against their serial reference paths and checks
// that both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#include "centqre/bayes.hpp"
#include "centqre/data.hpp"
#include "centqre/inference.hpp"
#include "centqre/parallel.hpp"
#include "centqre/resampling.hpp"

using namespace centqre;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count() /
         1e6;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-34s %9.3fs %9.3fs %7.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : hardware_threads();
  std::printf("threads: %d\n", threads);
  std::printf("%-34s %10s %10s %8s   %s\n", "kernel", "serial", "parallel", "speedup",
              "check");

  // A larger-than-paper experiment so the kernels have real work.
  const auto design = DesignSpec::cyclic(std::vector<int>(12, 10));
  HierarchySpec hyper;
  hyper.mu_delta_a = 0.8;
  hyper.sigma2_delta_a = 0.4;
  hyper.mu_delta_b = 0.1;
  hyper.sigma2_delta_b = 0.4;
  const auto exp = generate_synthetic(design, hyper, 1);

  {
    const int repeats = 200;
    auto t0 = Clock::now();
    double acc_serial = 0.0;
    for (int r = 0; r < repeats; ++r)
      acc_serial += log_likelihood(exp.truth, exp.data, nullptr, 1);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    double acc_parallel = 0.0;
    for (int r = 0; r < repeats; ++r)
      acc_parallel += log_likelihood(exp.truth, exp.data, nullptr, threads);
    report("random-effects log-likelihood", serial, seconds_since(t0),
           acc_serial == acc_parallel);
  }

  {
    const int n_perm = 4000;
    auto t0 = Clock::now();
    const auto serial_run =
        randomization_test(exp.data, TestStatistic::Slope, n_perm, 7, 1);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel_run =
        randomization_test(exp.data, TestStatistic::Slope, n_perm, 7, threads);
    report("randomization test (slope)", serial, seconds_since(t0),
           serial_run.null_values == parallel_run.null_values);
  }

  {
    const int n_perm = 4000;
    auto t0 = Clock::now();
    const auto serial_run =
        randomization_test(exp.data, TestStatistic::FPlayersA, n_perm, 7, 1);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel_run =
        randomization_test(exp.data, TestStatistic::FPlayersA, n_perm, 7, threads);
    report("randomization test (F players A)", serial, seconds_since(t0),
           serial_run.null_values == parallel_run.null_values);
  }

  {
    PosteriorSamples point;
    point.names = {"lambda_A", "lambda_B", "beta"};
    point.draws.assign(3000, {2.2, 1.1, 0.04});
    auto t0 = Clock::now();
    const auto serial_run = posterior_predictive_test(point, Family::Hetero, design,
                                                      TestStatistic::Slope, exp.data, 13, 1);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel_run = posterior_predictive_test(
        point, Family::Hetero, design, TestStatistic::Slope, exp.data, 13, threads);
    report("posterior predictive replicates", serial, seconds_since(t0),
           serial_run.null_values == parallel_run.null_values);
  }

  {
    FitConfig serial_config;
    serial_config.threads = 1;
    FitConfig parallel_config;
    parallel_config.threads = threads;
    auto t0 = Clock::now();
    const auto serial_fit = fit_mle(Family::Hetero, exp.data, serial_config);
    const double serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel_fit = fit_mle(Family::Hetero, exp.data, parallel_config);
    report("maximum-likelihood multi-start", serial, seconds_since(t0),
           serial_fit.log_lik == parallel_fit.log_lik);
  }

  return 0;
}
