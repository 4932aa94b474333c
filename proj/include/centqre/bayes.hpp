#pragma once

// Posterior sampling: single-site random-walk Metropolis for the fixed-effects
// learning model and Gibbs-within-Metropolis for the hierarchical
// random-effects model, plus summaries and convergence diagnostics.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "centqre/data.hpp"

namespace centqre {

struct NormalPrior {
  double mean = 0.0;
  double var = 100.0;
};

struct InverseGammaPrior {
  double shape = 1.0;
  double scale = 1.0;  // density ~ x^{-shape-1} exp(-scale/x)
};

struct PriorSpec {
  // Fixed effects: diffuse normals on (log lambda_A, log lambda_B, beta).
  NormalPrior log_lambda_a, log_lambda_b, beta;
  // Hierarchy: normals on the four population means, inverse-gammas on the
  // four population variances.
  NormalPrior mu_delta_a, mu_delta_b, mu_beta_a, mu_beta_b;
  InverseGammaPrior sigma2_delta_a, sigma2_delta_b, sigma2_beta_a, sigma2_beta_b;
};

struct SamplerConfig {
  std::int64_t total_iterations = 500000;
  std::int64_t burn_in = 20000;
  std::int64_t thin = 25;
  std::uint64_t seed = 0;
  std::vector<double> proposal_scales;  // initial, per parameter; defaults if empty
  bool adapt_during_burnin = true;      // proposals freeze after burn-in
  bool likelihood_off = false;          // debug: target is the prior alone
  bool init_from_mle = true;
  std::vector<double> init;             // explicit start in sampling coordinates
};

// floor((total - burn) / thin)
std::int64_t retained_draw_count(const SamplerConfig& config);

struct PosteriorSamples {
  std::vector<std::string> names;
  std::vector<std::vector<double>> draws;  // [draw][parameter]
  std::vector<double> acceptance_rates;    // post burn-in; 1.0 for Gibbs blocks
  std::vector<std::string> warnings;
  std::int64_t total_iterations = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  int n_chains = 1;

  std::size_t n_draws() const { return draws.size(); }
  int n_params() const { return static_cast<int>(names.size()); }
  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> column_values(int col) const;

  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;
  std::string sidecar_json() const;
  static PosteriorSamples load_csv(const std::string& csv_path,
                                   const std::string& sidecar_path = "");
};

// Cycles (log lambda_A, log lambda_B, beta) each scan with Gaussian
// random-walk proposals; draws are stored on the natural lambda scale.
PosteriorSamples metropolis_fixed(const Dataset& data, const PriorSpec& priors,
                                  const SamplerConfig& config);

// Per scan: conjugate draws for the four population means and variances, then
// single-site Metropolis for every subject's (delta, beta). A proposal is
// scored against the likelihood of the subject's whole session with the
// belief means implied by it: the subject's parameters enter every game of
// the session through those means, so scoring only the subject's own games
// targets the wrong distribution.
PosteriorSamples sampler_random_effects(const Dataset& data, const PriorSpec& priors,
                                        const SamplerConfig& config);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double prob_positive = 0.0;
};

// Requires >= 100 retained draws.
std::vector<ParameterSummary> posterior_summary(const PosteriorSamples& samples);

struct DiagnosticRow {
  std::string name;
  double ess = 0.0;
  double rhat = 0.0;
  double acceptance = 0.0;
};

struct DiagnosticReport {
  std::vector<DiagnosticRow> rows;
  std::string to_json_text() const;
};

// ESS via autocorrelation truncation and split-chain scale reduction.
// Requires >= 2 chains or >= 200 draws.
DiagnosticReport diagnostics(const PosteriorSamples& samples);

double effective_sample_size(std::span<const double> chain);
double split_rhat(const std::vector<std::vector<double>>& chains);

// Conjugate conditionals, exposed so tests can check the Gibbs blocks against
// the closed forms.
struct NormalPosterior {
  double mean = 0.0;
  double var = 0.0;
};
NormalPosterior normal_mean_conditional(std::span<const double> values, double sigma2,
                                        const NormalPrior& prior);
InverseGammaPrior sigma2_conditional(std::span<const double> values, double mu,
                                     const InverseGammaPrior& prior);

double empirical_quantile(std::vector<double> sorted_or_not, double p);

}  // namespace centqre
