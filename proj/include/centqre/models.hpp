#pragma once

// Quantal-response model families over the centipede game tree. Decision
// probabilities come from a logistic best response to expected-utility
// differences, solved by backward induction; precision may grow with the
// game number t as lambda * exp(beta * t).

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "centqre/game.hpp"

namespace centqre {

enum class Family { OneParam, Learning, Hetero, Altruistic, OrderedProbit, RandomEffects };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct OneParamModel {
  double lambda = 1.0;
};

struct LearningModel {
  double lambda = 1.0;
  double beta = 0.0;
};

struct HeteroLearningModel {
  double lambda_a = 1.0;
  double lambda_b = 1.0;
  double beta = 0.0;
};

struct AltruisticModel {
  double lambda = 1.0;
  double q_alt = 0.0;  // probability a player passes unconditionally
};

struct OrderedProbitModel {
  std::array<double, 4> alpha{};  // strictly increasing thresholds
  double beta = 0.0;
};

// Per-subject intercepts (delta = log lambda) and slopes, indexed by global
// subject index within each role.
struct RandomEffectsModel {
  std::vector<double> delta_a, beta_a;  // Players A
  std::vector<double> delta_b, beta_b;  // Players B
};

using ModelSpec = std::variant<OneParamModel, LearningModel, HeteroLearningModel,
                               AltruisticModel, OrderedProbitModel, RandomEffectsModel>;

Family family_of(const ModelSpec& model);
int free_parameter_count(Family f);

// What a subject attributes to unseen opponents: arithmetic means of the
// opposing type's (delta, beta), carried on the log-precision scale.
struct BeliefMeans {
  double delta_bar_a = 0.0;
  double beta_bar_a = 0.0;
  double delta_bar_b = 0.0;
  double beta_bar_b = 0.0;
};

// Which game a record belongs to, with subjects resolved to global indices.
// Fixed-effect families only read t.
struct GameContext {
  int a_index = 0;
  int b_index = 0;
  int session_index = 0;
  int t = 1;
};

// The Figure-1 payoff schedule, shared default for every model routine.
const PayoffTable& standard_payoffs();

// 1 / (1 + exp(-precision * utility_diff)); precision 0 is the uniform limit.
double logistic_take_prob(double utility_diff, double precision);

// lambda * exp(beta * t), capped so the logistic saturates instead of
// producing NaN in sampler tails.
double precision_at(double lambda, double beta, int t);
double precision_from_log(double delta, double beta, int t);

// Backward induction with both roles knowing each other's precision exactly.
DecisionProfile decision_profile_two_type(double lambda_a, double lambda_b, double beta, int t,
                                          const PayoffTable& table = standard_payoffs());

struct SubjectParams {
  double delta = 0.0;
  double beta = 0.0;
};

// The pieces of the random-effects induction that depend only on the belief
// means at one game number; own-side probabilities condition on these.
struct BeliefProfile {
  double q2_bar = 0.5;
  double p2_bar = 0.5;
  double q1_bar = 0.5;
};

BeliefProfile belief_profile(const BeliefMeans& beliefs, int t,
                             const PayoffTable& table = standard_payoffs());

// Player A's own (p1, p2) given the belief pieces.
std::pair<double, double> own_probs_a(const SubjectParams& own, const BeliefProfile& bp, int t,
                                      const PayoffTable& table = standard_payoffs());
// Player B's own (q1, q2) given the belief pieces.
std::pair<double, double> own_probs_b(const SubjectParams& own, const BeliefProfile& bp, int t,
                                      const PayoffTable& table = standard_payoffs());

// Backward induction where each subject knows its own parameters and only the
// population means of the opposing type; opponents' private probabilities are
// replaced by belief-mean versions wherever they would be embedded.
DecisionProfile decision_profile_random_effects(const SubjectParams& own_a,
                                                const SubjectParams& own_b,
                                                const BeliefMeans& beliefs, int t,
                                                const PayoffTable& table = standard_payoffs());

// Mixture over independent unconditional passers; rational play does not
// condition on the possibility of facing one.
OutcomeDistribution outcome_distribution_altruistic(double lambda, double q_alt,
                                                    const PayoffTable& table = standard_payoffs());

// theta_k = Phi(alpha_k - beta t) - Phi(alpha_{k-1} - beta t).
OutcomeDistribution outcome_distribution_ordered_probit(const std::array<double, 4>& alpha,
                                                        double beta, int t);

// Dispatch over the family; RandomEffects requires beliefs.
OutcomeDistribution outcome_distribution_for(const ModelSpec& model, const GameContext& ctx,
                                             const BeliefMeans* beliefs = nullptr,
                                             const PayoffTable& table = standard_payoffs());

double normal_cdf(double x);

}  // namespace centqre
