#pragma once

// Multinomial log-likelihood, simplex-based maximum likelihood, and BIC
// model comparison for the five fixed-effect families.

#include <cstdint>
#include <optional>
#include <string>

#include "centqre/data.hpp"
#include "centqre/models.hpp"

namespace centqre {

// Sum over records of ln theta^(y) at that record's matchup and game number.
// When beliefs is null, a random-effects model uses per-session means derived
// from its own subject parameters. threads parallelizes the per-record path;
// terms are accumulated in record order so the value is thread-count
// independent.
double log_likelihood(const ModelSpec& model, const Dataset& data,
                      const BeliefMeans* beliefs = nullptr, int threads = 1);

// Slow reference: always per record, never via pooled counts.
double log_likelihood_by_record(const ModelSpec& model, const Dataset& data,
                                const BeliefMeans* beliefs = nullptr);

// Comparison convention used throughout: 2*LL - k*ln(n), larger is better.
double bic(double log_lik, int n_params, std::int64_t n_obs);
// The usual -2*LL + k*ln(n), emitted alongside for reference.
double bic_textbook(double log_lik, int n_params, std::int64_t n_obs);

struct FitResult {
  ModelSpec model;
  double log_lik = 0.0;
  double bic = 0.0;
  double bic_textbook = 0.0;
  int n_params = 0;
  std::int64_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
  std::string warning;  // empty when clean

  std::string to_json_text() const;
};

struct FitConfig {
  int max_iterations = 5000;
  double diameter_tol = 1e-8;
  int threads = 1;
};

// Maximizes the log-likelihood over the family's parameter space with a
// Nelder-Mead search from 8 deterministic starts (positivity via log lambda,
// probit thresholds via log increments). Starts may run concurrently; the
// merge keeps the best LL, ties broken by the lexicographically smallest
// parameter vector.
FitResult fit_mle(Family family, const Dataset& data, const FitConfig& config = {},
                  std::uint64_t seed = 0);

}  // namespace centqre
