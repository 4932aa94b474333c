#pragma once

// Design-faithful randomization tests over the Latin-square sessions and
// posterior predictive tests over the same statistics.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "centqre/bayes.hpp"
#include "centqre/data.hpp"
#include "centqre/rng.hpp"

namespace centqre {

enum class Grouping { PlayersA, PlayersB, Sessions };

enum class TestStatistic { Slope, FPlayersA, FPlayersB, FSessions };

const char* statistic_name(TestStatistic s);
TestStatistic statistic_from_name(const std::string& name);

// One session as a Latin square: the game-number grid carries the design,
// outcomes stay attached to (A row, B column) pairs.
struct SessionSquare {
  std::string session_id;
  int n = 0;
  std::vector<std::string> a_ids, b_ids;
  std::vector<int> t;  // n*n row-major, each value 1..n once per row/column
  std::vector<int> y;  // outcomes 1..5

  int cell(int i, int j) const { return i * n + j; }
};

// Squares in first-appearance order; throws if the dataset is not a valid
// design.
std::vector<SessionSquare> squares_from_dataset(const Dataset& data);

// Uniformly random row and column permutation of the game-number grid only;
// every pair keeps its outcome and receives the game number now at its
// position. Latin structure is preserved.
SessionSquare permute_session(const SessionSquare& square, Rng& rng);

// Least-squares slope of outcome on game number, pooled over sessions.
double slope_statistic(const Dataset& data);

// Between-group over within-group mean square; df are (groups-1) and
// (total-groups). Zero within-variance is reported via the degenerate flag:
// 0 when between-variance is zero too, +inf otherwise.
double f_statistic(const Dataset& data, Grouping grouping, bool* degenerate = nullptr);

struct TestOutcome {
  std::string statistic;
  std::string tail;  // "lower" or "upper"
  double observed = 0.0;
  bool observed_degenerate = false;
  std::vector<double> null_values;
  double p_value = 0.0;

  // (k+1)/(n+1) continuity-corrected variant.
  double p_value_corrected() const;
  std::string to_json_text() const;
  void write_null_csv(std::ostream& out) const;
  void save_null_csv(const std::string& path) const;
};

// Permutation null for the slope (joint row+column permutations per session)
// or the Players A / Players B F statistics (role-specific permutations).
// A sessions F test is refused: subjects are nested within sessions and
// cannot be permuted across them without destroying the Latin square design.
TestOutcome randomization_test(const Dataset& data, TestStatistic statistic, int n_perm,
                               std::uint64_t seed, int threads = 1);

// One dataset sampled from the model on the design, preserving it exactly.
Dataset simulate_replicate(const ModelSpec& model, const DesignSpec& design, Rng& rng);

// Bayesian p-value: one replicate per retained draw, lower tail for the
// slope, upper tail for the F statistics (sessions F allowed here).
TestOutcome posterior_predictive_test(const PosteriorSamples& samples, Family family,
                                      const DesignSpec& design, TestStatistic statistic,
                                      const Dataset& observed, std::uint64_t seed,
                                      int threads = 1);

// Model reconstructed from one retained draw of a sampler run.
ModelSpec model_from_draw(const PosteriorSamples& samples, Family family, std::size_t draw);

}  // namespace centqre
