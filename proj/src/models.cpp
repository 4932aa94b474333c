#include "centqre/models.hpp"

#include <cmath>
#include <stdexcept>

namespace centqre {

namespace {

constexpr double kPrecisionCap = 1e30;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(what) + " must be finite");
}

void require_t(int t) {
  if (t < 1) throw std::domain_error("game number t must be >= 1, got " + std::to_string(t));
}

// Expected-utility differences (Take minus Pass) at the four nodes, evaluated
// against the continuation probabilities supplied by the caller.
struct Tree {
  double a1, a2, a3, a4, a5;  // Player A dollars by outcome
  double b1, b2, b3, b4, b5;  // Player B dollars by outcome

  explicit Tree(const PayoffTable& tb)
      : a1(tb.dollars(1, Role::A)), a2(tb.dollars(2, Role::A)), a3(tb.dollars(3, Role::A)),
        a4(tb.dollars(4, Role::A)), a5(tb.dollars(5, Role::A)),
        b1(tb.dollars(1, Role::B)), b2(tb.dollars(2, Role::B)), b3(tb.dollars(3, Role::B)),
        b4(tb.dollars(4, Role::B)), b5(tb.dollars(5, Role::B)) {}

  double diff_q2() const { return b4 - b5; }
  double diff_p2(double q2) const { return a3 - q2 * a4 - (1.0 - q2) * a5; }
  double diff_q1(double p2, double q2) const {
    return b2 - p2 * b3 - (1.0 - p2) * q2 * b4 - (1.0 - p2) * (1.0 - q2) * b5;
  }
  double diff_p1(double q1, double p2, double q2) const {
    return a1 - q1 * a2 -
           (1.0 - q1) * (p2 * a3 + (1.0 - p2) * (q2 * a4 + (1.0 - q2) * a5));
  }
};

}  // namespace

const PayoffTable& standard_payoffs() {
  static const PayoffTable table = PayoffTable::standard();
  return table;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::OneParam: return "one-param";
    case Family::Learning: return "learning";
    case Family::Hetero: return "hetero";
    case Family::Altruistic: return "altruistic";
    case Family::OrderedProbit: return "probit";
    case Family::RandomEffects: return "random-effects";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::OneParam, Family::Learning, Family::Hetero, Family::Altruistic,
                   Family::OrderedProbit, Family::RandomEffects}) {
    if (name == family_name(f)) return f;
  }
  throw std::invalid_argument("unknown model family: " + name);
}

Family family_of(const ModelSpec& model) {
  struct Visitor {
    Family operator()(const OneParamModel&) const { return Family::OneParam; }
    Family operator()(const LearningModel&) const { return Family::Learning; }
    Family operator()(const HeteroLearningModel&) const { return Family::Hetero; }
    Family operator()(const AltruisticModel&) const { return Family::Altruistic; }
    Family operator()(const OrderedProbitModel&) const { return Family::OrderedProbit; }
    Family operator()(const RandomEffectsModel&) const { return Family::RandomEffects; }
  };
  return std::visit(Visitor{}, model);
}

int free_parameter_count(Family f) {
  switch (f) {
    case Family::OneParam: return 1;
    case Family::Learning: return 2;
    case Family::Hetero: return 3;
    case Family::Altruistic: return 2;
    case Family::OrderedProbit: return 5;
    case Family::RandomEffects:
      throw std::invalid_argument("random-effects has no fixed parameter count");
  }
  return 0;
}

double logistic_take_prob(double utility_diff, double precision) {
  require_finite(utility_diff, "utility_diff");
  if (std::isnan(precision) || precision < 0.0)
    throw std::domain_error("precision must be nonnegative");
  if (precision == 0.0) return 0.5;
  if (precision > kPrecisionCap) {
    if (utility_diff > 0.0) return 1.0;
    if (utility_diff < 0.0) return 0.0;
    return 0.5;
  }
  const double x = precision * utility_diff;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double precision_at(double lambda, double beta, int t) {
  if (std::isnan(lambda) || lambda < 0.0) throw std::domain_error("lambda must be nonnegative");
  require_finite(beta, "beta");
  const double kappa = lambda * std::exp(beta * t);
  return kappa < kPrecisionCap ? kappa : kPrecisionCap;
}

double precision_from_log(double delta, double beta, int t) {
  require_finite(delta, "delta");
  require_finite(beta, "beta");
  const double log_kappa = delta + beta * t;
  if (log_kappa > 69.0) return kPrecisionCap;  // ln(1e30) ~ 69.08
  return std::exp(log_kappa);
}

DecisionProfile decision_profile_two_type(double lambda_a, double lambda_b, double beta, int t,
                                          const PayoffTable& table) {
  require_t(t);
  const Tree tree(table);
  const double ka = precision_at(lambda_a, beta, t);
  const double kb = precision_at(lambda_b, beta, t);
  DecisionProfile pr;
  pr.q2 = logistic_take_prob(tree.diff_q2(), kb);
  pr.p2 = logistic_take_prob(tree.diff_p2(pr.q2), ka);
  pr.q1 = logistic_take_prob(tree.diff_q1(pr.p2, pr.q2), kb);
  pr.p1 = logistic_take_prob(tree.diff_p1(pr.q1, pr.p2, pr.q2), ka);
  return pr;
}

BeliefProfile belief_profile(const BeliefMeans& beliefs, int t, const PayoffTable& table) {
  require_t(t);
  const Tree tree(table);
  const double ka_bar = precision_from_log(beliefs.delta_bar_a, beliefs.beta_bar_a, t);
  const double kb_bar = precision_from_log(beliefs.delta_bar_b, beliefs.beta_bar_b, t);
  BeliefProfile bp;
  bp.q2_bar = logistic_take_prob(tree.diff_q2(), kb_bar);
  bp.p2_bar = logistic_take_prob(tree.diff_p2(bp.q2_bar), ka_bar);
  bp.q1_bar = logistic_take_prob(tree.diff_q1(bp.p2_bar, bp.q2_bar), kb_bar);
  return bp;
}

std::pair<double, double> own_probs_a(const SubjectParams& own, const BeliefProfile& bp, int t,
                                      const PayoffTable& table) {
  const Tree tree(table);
  const double ka = precision_from_log(own.delta, own.beta, t);
  const double p2 = logistic_take_prob(tree.diff_p2(bp.q2_bar), ka);
  const double p1 = logistic_take_prob(tree.diff_p1(bp.q1_bar, p2, bp.q2_bar), ka);
  return {p1, p2};
}

std::pair<double, double> own_probs_b(const SubjectParams& own, const BeliefProfile& bp, int t,
                                      const PayoffTable& table) {
  const Tree tree(table);
  const double kb = precision_from_log(own.delta, own.beta, t);
  const double q2 = logistic_take_prob(tree.diff_q2(), kb);
  const double q1 = logistic_take_prob(tree.diff_q1(bp.p2_bar, q2), kb);
  return {q1, q2};
}

// Own probabilities are known wherever they are not embedded in another
// subject's decision; embedded ones are replaced by belief-mean versions.
DecisionProfile decision_profile_random_effects(const SubjectParams& own_a,
                                                const SubjectParams& own_b,
                                                const BeliefMeans& beliefs, int t,
                                                const PayoffTable& table) {
  const BeliefProfile bp = belief_profile(beliefs, t, table);
  const auto [p1, p2] = own_probs_a(own_a, bp, t, table);
  const auto [q1, q2] = own_probs_b(own_b, bp, t, table);
  return DecisionProfile{p1, q1, p2, q2};
}

OutcomeDistribution outcome_distribution_altruistic(double lambda, double q_alt,
                                                    const PayoffTable& table) {
  if (!(q_alt >= 0.0 && q_alt <= 1.0))
    throw std::domain_error("q_alt must be in [0,1], got " + std::to_string(q_alt));
  const DecisionProfile base = decision_profile_two_type(lambda, lambda, 0.0, 1, table);

  const OutcomeDistribution rational = outcome_distribution(base);
  const OutcomeDistribution a_passes =
      outcome_distribution(DecisionProfile{0.0, base.q1, 0.0, base.q2});
  const OutcomeDistribution b_passes =
      outcome_distribution(DecisionProfile{base.p1, 0.0, base.p2, 0.0});
  const OutcomeDistribution both{std::array<double, 5>{0.0, 0.0, 0.0, 0.0, 1.0}};

  const double q = q_alt;
  OutcomeDistribution mix;
  for (int k = 0; k < kNumOutcomes; ++k) {
    mix.theta[k] = (1.0 - q) * (1.0 - q) * rational.theta[k] +
                   q * (1.0 - q) * a_passes.theta[k] +
                   (1.0 - q) * q * b_passes.theta[k] +
                   q * q * both.theta[k];
  }
  return mix;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

OutcomeDistribution outcome_distribution_ordered_probit(const std::array<double, 4>& alpha,
                                                        double beta, int t) {
  require_t(t);
  for (int k = 0; k < 3; ++k) {
    if (!(alpha[k] < alpha[k + 1]))
      throw std::domain_error("probit thresholds must be strictly increasing");
  }
  require_finite(beta, "beta");
  const double shift = beta * t;
  OutcomeDistribution out;
  double prev = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double cdf = normal_cdf(alpha[k] - shift);
    out.theta[k] = cdf - prev;
    prev = cdf;
  }
  out.theta[4] = 1.0 - prev;
  return out;
}

OutcomeDistribution outcome_distribution_for(const ModelSpec& model, const GameContext& ctx,
                                             const BeliefMeans* beliefs,
                                             const PayoffTable& table) {
  require_t(ctx.t);
  if (const auto* m = std::get_if<OneParamModel>(&model)) {
    return outcome_distribution(decision_profile_two_type(m->lambda, m->lambda, 0.0, 1, table));
  }
  if (const auto* m = std::get_if<LearningModel>(&model)) {
    return outcome_distribution(
        decision_profile_two_type(m->lambda, m->lambda, m->beta, ctx.t, table));
  }
  if (const auto* m = std::get_if<HeteroLearningModel>(&model)) {
    return outcome_distribution(
        decision_profile_two_type(m->lambda_a, m->lambda_b, m->beta, ctx.t, table));
  }
  if (const auto* m = std::get_if<AltruisticModel>(&model)) {
    return outcome_distribution_altruistic(m->lambda, m->q_alt, table);
  }
  if (const auto* m = std::get_if<OrderedProbitModel>(&model)) {
    return outcome_distribution_ordered_probit(m->alpha, m->beta, ctx.t);
  }
  const auto& re = std::get<RandomEffectsModel>(model);
  if (beliefs == nullptr)
    throw std::invalid_argument("random-effects outcome distribution requires belief means");
  if (ctx.a_index < 0 || ctx.a_index >= static_cast<int>(re.delta_a.size()) ||
      ctx.b_index < 0 || ctx.b_index >= static_cast<int>(re.delta_b.size()))
    throw std::invalid_argument("subject index out of range for random-effects model");
  const SubjectParams own_a{re.delta_a[ctx.a_index], re.beta_a[ctx.a_index]};
  const SubjectParams own_b{re.delta_b[ctx.b_index], re.beta_b[ctx.b_index]};
  return outcome_distribution(
      decision_profile_random_effects(own_a, own_b, *beliefs, ctx.t, table));
}

}  // namespace centqre
