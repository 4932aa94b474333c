#pragma once

// Four-stage centipede game: payoffs, decision profiles, and the outcome tree.
//
// Stage layout (outcome = number of stages played):
//   stage 1: Player A takes (prob p1) -> outcome 1, else pass
//   stage 2: Player B takes (prob q1) -> outcome 2, else pass
//   stage 3: Player A takes (prob p2) -> outcome 3, else pass
//   stage 4: Player B takes (prob q2) -> outcome 4, else outcome 5

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace centqre {

enum class Role { A, B };

inline const char* role_name(Role r) { return r == Role::A ? "A" : "B"; }

constexpr int kNumOutcomes = 5;
constexpr int kNumStages = 4;

// Payoffs are held as exact cents so table arithmetic never drifts; they are
// converted to dollars only when a utility difference is evaluated.
class PayoffTable {
 public:
  // The default schedule of the four-stage game used throughout.
  static PayoffTable standard();

  PayoffTable(std::array<std::int64_t, kNumOutcomes> cents_a,
              std::array<std::int64_t, kNumOutcomes> cents_b);

  std::int64_t cents(int outcome, Role role) const;
  double dollars(int outcome, Role role) const;

  static PayoffTable from_json_text(const std::string& text);
  static PayoffTable load(const std::string& path);
  std::string to_json_text() const;

 private:
  std::array<std::int64_t, kNumOutcomes> a_cents_;
  std::array<std::int64_t, kNumOutcomes> b_cents_;
};

// Conditional take probabilities at the four decision nodes.
struct DecisionProfile {
  double p1 = 0.0;  // A, stage 1
  double q1 = 0.0;  // B, stage 2
  double p2 = 0.0;  // A, stage 3
  double q2 = 0.0;  // B, stage 4
};

struct OutcomeDistribution {
  std::array<double, kNumOutcomes> theta{};

  double operator[](int outcome) const { return theta[outcome - 1]; }
  double sum() const;
};

// Game-ending probabilities implied by a decision profile. The last entry is
// the product of complements, so the five probabilities sum to one exactly.
OutcomeDistribution outcome_distribution(const DecisionProfile& profile);

// Table lookup with range checking; outcome is 1-based.
double payoff(int outcome, Role role, const PayoffTable& table);

}  // namespace centqre
