#include "doctest.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "centqre/bayes.hpp"
#include "centqre/inference.hpp"
#include "centqre/rng.hpp"

using namespace centqre;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("retained draw count formula holds for all config combinations") {
  Dataset empty;
  for (std::int64_t total : {10, 53, 201}) {
    for (std::int64_t burn : {0, 9}) {
      for (std::int64_t thin : {1, 3, 7}) {
        SamplerConfig config;
        config.total_iterations = total;
        config.burn_in = burn;
        config.thin = thin;
        config.likelihood_off = true;
        config.seed = 5;
        CHECK(retained_draw_count(config) == (total - burn) / thin);
        const auto run = metropolis_fixed(empty, PriorSpec{}, config);
        CHECK(static_cast<std::int64_t>(run.n_draws()) == retained_draw_count(config));
      }
    }
  }
  SamplerConfig paper;
  paper.total_iterations = 500000;
  paper.burn_in = 20000;
  paper.thin = 25;
  CHECK(retained_draw_count(paper) == 19200);

  SamplerConfig bad;
  bad.burn_in = bad.total_iterations;
  Dataset none;
  CHECK_THROWS_AS(metropolis_fixed(none, PriorSpec{}, bad), std::invalid_argument);
}

TEST_CASE("prior-only target recovers the prior moments") {
  Dataset empty;
  SamplerConfig config;
  config.total_iterations = 60000;
  config.burn_in = 5000;
  config.thin = 5;
  config.seed = 314;
  config.likelihood_off = true;
  PriorSpec priors;  // N(0,100) everywhere
  const auto run = metropolis_fixed(empty, priors, config);
  REQUIRE(run.n_draws() == 11000);

  // Columns hold lambda = exp(coordinate); compare on the sampling scale.
  for (const auto& name : {"lambda_A", "lambda_B", "beta"}) {
    auto col = run.column_values(run.column(name));
    if (std::string(name) != "beta")
      for (auto& v : col) v = std::log(v);
    const double ess = effective_sample_size(col);
    const double se_mean = std::sqrt(100.0 / ess);
    CHECK(std::fabs(mean_of(col) - 0.0) <= 3.0 * se_mean);
    const double se_var = 100.0 * std::sqrt(2.0 / ess);
    CHECK(std::fabs(var_of(col) - 100.0) <= 3.0 * se_var);
  }
}

TEST_CASE("a narrow prior is also recovered (toy normal target)") {
  Dataset empty;
  SamplerConfig config;
  config.total_iterations = 40000;
  config.burn_in = 4000;
  config.thin = 4;
  config.seed = 2718;
  config.likelihood_off = true;
  PriorSpec priors;
  priors.beta = {1.5, 4.0};
  const auto run = metropolis_fixed(empty, priors, config);
  auto col = run.column_values(run.column("beta"));
  const double ess = effective_sample_size(col);
  CHECK(std::fabs(mean_of(col) - 1.5) <= 3.0 * std::sqrt(4.0 / ess));
  CHECK(std::fabs(var_of(col) - 4.0) <= 3.0 * 4.0 * std::sqrt(2.0 / ess));
}

TEST_CASE("sampler is deterministic given the seed") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(),
                                      HeteroLearningModel{2.0, 1.0, 0.05}, 5);
  SamplerConfig config;
  config.total_iterations = 3000;
  config.burn_in = 500;
  config.thin = 5;
  config.seed = 99;
  const auto a = metropolis_fixed(exp.data, PriorSpec{}, config);
  const auto b = metropolis_fixed(exp.data, PriorSpec{}, config);
  CHECK(a.draws == b.draws);
  CHECK(a.acceptance_rates == b.acceptance_rates);
  config.seed = 100;
  const auto c = metropolis_fixed(exp.data, PriorSpec{}, config);
  CHECK(a.draws != c.draws);
}

TEST_CASE("posterior concentrates near the generating values on a large sample") {
  const auto design = DesignSpec::cyclic({10, 9, 10, 10, 9, 10, 10, 9, 10, 10, 9, 10});
  const auto exp =
      generate_synthetic(design, HeteroLearningModel{3.275, 1.082, 0.034}, 424242);
  SamplerConfig config;
  config.total_iterations = 20000;
  config.burn_in = 3000;
  config.thin = 5;
  config.seed = 31;
  const auto run = metropolis_fixed(exp.data, PriorSpec{}, config);
  const auto summary = posterior_summary(run);
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].q025 < 3.275);
  CHECK(summary[0].q975 > 3.275 * 0.8);
  CHECK(summary[2].prob_positive > 0.9);

  // Acceptance rates should sit in a sane Metropolis band after adaptation.
  for (double rate : run.acceptance_rates) {
    CHECK(rate > 0.1);
    CHECK(rate < 0.8);
  }
}

TEST_CASE("non-finite initial log posterior is an initialization error") {
  const auto exp = generate_synthetic(DesignSpec::cyclic({4}), OneParamModel{0.5}, 8);
  bool has_five = false;
  for (const auto& r : exp.data.records()) has_five = has_five || r.y == 5;
  REQUIRE(has_five);  // huge precision assigns probability zero to outcome 5
  SamplerConfig config;
  config.total_iterations = 100;
  config.burn_in = 10;
  config.thin = 1;
  config.init = {200.0, 200.0, 0.0};
  CHECK_THROWS_WITH_AS(metropolis_fixed(exp.data, PriorSpec{}, config),
                       doctest::Contains("initial"), std::runtime_error);
}

TEST_CASE("conjugate conditionals match the closed forms") {
  const std::vector<double> values{0.4, -0.2, 1.1, 0.9, 0.3};
  const NormalPrior prior{0.5, 2.0};
  const double sigma2 = 0.6;
  const auto post = normal_mean_conditional(values, sigma2, prior);
  const double prec = 5.0 / sigma2 + 1.0 / 2.0;
  const double want_var = 1.0 / prec;
  const double want_mean = want_var * (mean_of(values) * 5.0 / sigma2 + 0.5 / 2.0);
  CHECK(post.var == doctest::Approx(want_var).epsilon(1e-12));
  CHECK(post.mean == doctest::Approx(want_mean).epsilon(1e-12));

  const InverseGammaPrior ig{1.0, 1.0};
  const auto ig_post = sigma2_conditional(values, 0.5, ig);
  double ss = 0.0;
  for (double v : values) ss += (v - 0.5) * (v - 0.5);
  CHECK(ig_post.shape == doctest::Approx(1.0 + 2.5));
  CHECK(ig_post.scale == doctest::Approx(1.0 + 0.5 * ss));

  // Moment check of the samplers against those conditionals.
  Rng rng(4096);
  const int n = 40000;
  std::vector<double> mu_draws(n), s2_draws(n);
  for (int k = 0; k < n; ++k) {
    mu_draws[k] = rng.normal(post.mean, std::sqrt(post.var));
    s2_draws[k] = rng.inverse_gamma(ig_post.shape, ig_post.scale);
  }
  CHECK(std::fabs(mean_of(mu_draws) - post.mean) <=
        3.0 * std::sqrt(post.var / static_cast<double>(n)));
  const double ig_mean = ig_post.scale / (ig_post.shape - 1.0);
  const double ig_var = ig_post.scale * ig_post.scale /
                        ((ig_post.shape - 1) * (ig_post.shape - 1) * (ig_post.shape - 2));
  CHECK(std::fabs(mean_of(s2_draws) - ig_mean) <=
        3.0 * std::sqrt(ig_var / static_cast<double>(n)));
}

TEST_CASE("posterior summary on constructed columns") {
  PosteriorSamples s;
  s.names = {"const", "alternating"};
  for (int k = 0; k < 200; ++k)
    s.draws.push_back({3.5, k % 2 == 0 ? 1.0 : -1.0});
  const auto summary = posterior_summary(s);
  CHECK(summary[0].mean == doctest::Approx(3.5));
  CHECK(summary[0].median == doctest::Approx(3.5));
  CHECK(summary[0].q025 == doctest::Approx(3.5));
  CHECK(summary[0].q975 == doctest::Approx(3.5));
  CHECK(summary[1].prob_positive == doctest::Approx(0.5));

  PosteriorSamples tiny;
  tiny.names = {"x"};
  tiny.draws.assign(50, {1.0});
  CHECK_THROWS_AS(posterior_summary(tiny), std::invalid_argument);
}

TEST_CASE("diagnostics: ESS and split scale reduction") {
  Rng rng(777);
  PosteriorSamples iid;
  iid.names = {"z"};
  for (int k = 0; k < 4000; ++k) iid.draws.push_back({rng.normal()});
  const auto report = diagnostics(iid);
  CHECK(report.rows[0].ess >= 0.8 * 4000);
  CHECK(report.rows[0].ess <= 1.2 * 4000);
  CHECK(report.rows[0].rhat < 1.01);

  // Two identical chains: no between-chain spread.
  PosteriorSamples dup;
  dup.names = {"z"};
  dup.n_chains = 2;
  std::vector<double> chain;
  for (int k = 0; k < 1000; ++k) chain.push_back(rng.normal());
  for (double v : chain) dup.draws.push_back({v});
  for (double v : chain) dup.draws.push_back({v});
  const auto dup_report = diagnostics(dup);
  CHECK(std::fabs(dup_report.rows[0].rhat - 1.0) < 0.01);

  // A chain and its shifted copy: clear scale-reduction signal.
  PosteriorSamples shifted;
  shifted.names = {"z"};
  shifted.n_chains = 2;
  for (double v : chain) shifted.draws.push_back({v});
  for (double v : chain) shifted.draws.push_back({v + 4.0});  // > 3 within-chain SDs
  const auto shift_report = diagnostics(shifted);
  CHECK(shift_report.rows[0].rhat > 1.2);

  PosteriorSamples small;
  small.names = {"z"};
  small.draws.assign(50, {0.0});
  CHECK_THROWS_AS(diagnostics(small), std::invalid_argument);

  CHECK(shift_report.to_json_text().find("rhat") != std::string::npos);
}

TEST_CASE("samples CSV and sidecar round trip") {
  Dataset empty;
  SamplerConfig config;
  config.total_iterations = 500;
  config.burn_in = 100;
  config.thin = 2;
  config.seed = 17;
  config.likelihood_off = true;
  const auto run = metropolis_fixed(empty, PriorSpec{}, config);

  run.save_csv("samples_test.csv");
  std::ofstream("samples_test.json") << run.sidecar_json();
  const auto back = PosteriorSamples::load_csv("samples_test.csv", "samples_test.json");
  CHECK(back.names == run.names);
  REQUIRE(back.n_draws() == run.n_draws());
  for (std::size_t k = 0; k < run.n_draws(); ++k)
    for (int c = 0; c < run.n_params(); ++c)
      CHECK(back.draws[k][c] == doctest::Approx(run.draws[k][c]).epsilon(1e-14));
  CHECK(back.seed == 17);
  CHECK(back.thin == 2);
}

TEST_CASE("random-effects sampler: shapes, determinism, stall detection") {
  HierarchySpec hyper;
  hyper.mu_delta_a = 0.7;
  hyper.sigma2_delta_a = 0.2;
  hyper.mu_delta_b = 0.0;
  hyper.sigma2_delta_b = 0.2;
  const auto exp = generate_synthetic(DesignSpec::cyclic({4, 3}), hyper, 60);

  SamplerConfig config;
  config.total_iterations = 1200;
  config.burn_in = 200;
  config.thin = 2;
  config.seed = 1001;
  const auto run = sampler_random_effects(exp.data, PriorSpec{}, config);
  CHECK(run.n_draws() == 500);
  CHECK(run.names.size() == 8u + 4u * 7u);
  CHECK(run.column("mu_delta_A") == 0);
  CHECK(run.column("delta_A[0]") == 8);
  CHECK(run.acceptance_rates.size() == run.names.size());
  for (int k = 0; k < 8; ++k) CHECK(run.acceptance_rates[k] == 1.0);

  const auto again = sampler_random_effects(exp.data, PriorSpec{}, config);
  CHECK(run.draws == again.draws);

  // Absurd frozen proposal scales stall every subject parameter.
  SamplerConfig stalled = config;
  stalled.adapt_during_burnin = false;
  stalled.proposal_scales.assign(4 * 7, 1e8);
  const auto bad = sampler_random_effects(exp.data, PriorSpec{}, stalled);
  CHECK_FALSE(bad.warnings.empty());
  CHECK(bad.warnings[0].find("stalled") != std::string::npos);
}

TEST_CASE("random-effects population means cover the generating hyperparameters") {
  // Simulation-based calibration at desk scale: subjects drawn from a known
  // hierarchy, 95% intervals for the population means checked across
  // replicates.
  HierarchySpec hyper;
  hyper.mu_delta_a = 0.9;
  hyper.sigma2_delta_a = 0.25;
  hyper.mu_beta_a = 0.05;
  hyper.sigma2_beta_a = 0.004;
  hyper.mu_delta_b = 0.1;
  hyper.sigma2_delta_b = 0.25;
  hyper.mu_beta_b = 0.02;
  hyper.sigma2_beta_b = 0.004;
  const auto design = DesignSpec::cyclic({6, 6});
  const std::array<double, 4> truth{hyper.mu_delta_a, hyper.mu_delta_b, hyper.mu_beta_a,
                                    hyper.mu_beta_b};

  const int reps = 20;
  std::array<int, 4> covered{};
  for (int r = 0; r < reps; ++r) {
    const auto exp = generate_synthetic(design, hyper, 30000 + static_cast<std::uint64_t>(r));
    SamplerConfig config;
    config.total_iterations = 12000;
    config.burn_in = 3000;
    config.thin = 9;
    config.seed = 31000 + static_cast<std::uint64_t>(r);
    const auto run = sampler_random_effects(exp.data, PriorSpec{}, config);
    for (int c = 0; c < 4; ++c) {
      auto col = run.column_values(c);
      if (empirical_quantile(col, 0.025) <= truth[c] &&
          truth[c] <= empirical_quantile(col, 0.975))
        ++covered[c];
    }
  }
  for (int c = 0; c < 4; ++c) CHECK(covered[c] >= 18);
}

TEST_CASE("random-effects prior-only run recovers the population mean prior") {
  const auto exp = generate_synthetic(DesignSpec::cyclic({3}), OneParamModel{1.0}, 61);
  SamplerConfig config;
  config.total_iterations = 30000;
  config.burn_in = 2000;
  config.thin = 10;
  config.seed = 7007;
  config.likelihood_off = true;
  PriorSpec priors;
  priors.mu_delta_a = {2.0, 0.5};
  const auto run = sampler_random_effects(exp.data, priors, config);
  auto col = run.column_values(run.column("mu_delta_A"));
  const double ess = effective_sample_size(col);
  // mu | subjects, sigma2 mixes through the subjects; moments must match the
  // N(2, 0.5) prior.
  CHECK(std::fabs(mean_of(col) - 2.0) <= 4.0 * std::sqrt(0.5 / ess));
}

}  // TEST_SUITE
