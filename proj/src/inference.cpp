#include "centqre/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "centqre/model_json.hpp"
#include "centqre/optim.hpp"
#include "centqre/parallel.hpp"

namespace centqre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool depends_only_on_t(Family f) {
  return f == Family::OneParam || f == Family::Learning || f == Family::Hetero ||
         f == Family::Altruistic || f == Family::OrderedProbit;
}

std::vector<BeliefMeans> dataset_session_beliefs(const RandomEffectsModel& model,
                                                 const Dataset& data) {
  std::vector<BeliefMeans> out(data.sessions().size());
  for (std::size_t s = 0; s < data.sessions().size(); ++s) {
    const int na = data.sessions()[s].n_a();
    const int nb = data.sessions()[s].n_b();
    BeliefMeans bm;
    for (int k = 0; k < na; ++k) {
      bm.delta_bar_a += model.delta_a.at(data.a_offset(static_cast<int>(s)) + k);
      bm.beta_bar_a += model.beta_a.at(data.a_offset(static_cast<int>(s)) + k);
    }
    for (int k = 0; k < nb; ++k) {
      bm.delta_bar_b += model.delta_b.at(data.b_offset(static_cast<int>(s)) + k);
      bm.beta_bar_b += model.beta_b.at(data.b_offset(static_cast<int>(s)) + k);
    }
    bm.delta_bar_a /= na;
    bm.beta_bar_a /= na;
    bm.delta_bar_b /= nb;
    bm.beta_bar_b /= nb;
    out[s] = bm;
  }
  return out;
}

double per_record_log_lik(const ModelSpec& model, const Dataset& data,
                          const BeliefMeans* beliefs, int threads) {
  const bool is_re = family_of(model) == Family::RandomEffects;
  std::vector<BeliefMeans> session_beliefs;
  if (is_re && beliefs == nullptr)
    session_beliefs = dataset_session_beliefs(std::get<RandomEffectsModel>(model), data);

  const auto n = static_cast<std::int64_t>(data.size());
  std::vector<double> terms(n);
  parallel_index(n, threads, [&](std::int64_t k) {
    const auto& ctx = data.context(static_cast<std::size_t>(k));
    const BeliefMeans* bm = nullptr;
    if (is_re) bm = beliefs != nullptr ? beliefs : &session_beliefs[ctx.session_index];
    const auto theta = outcome_distribution_for(model, ctx, bm);
    const double p = theta[data.records()[k].y];
    terms[k] = p > 0.0 ? std::log(p) : kNegInf;
  });

  double total = 0.0;
  for (double v : terms) total += v;  // fixed order: value independent of threads
  return total;
}

}  // namespace

double log_likelihood(const ModelSpec& model, const Dataset& data, const BeliefMeans* beliefs,
                      int threads) {
  if (data.empty()) throw std::domain_error("log_likelihood: empty dataset");
  if (!depends_only_on_t(family_of(model)))
    return per_record_log_lik(model, data, beliefs, threads);

  // Probabilities depend only on t for these families, so the pooled
  // (t, outcome) counts are sufficient.
  double total = 0.0;
  GameContext ctx;
  for (int t = 1; t <= data.max_t(); ++t) {
    const auto& counts = data.counts_at(t);
    bool any = false;
    for (auto c : counts) any = any || c > 0;
    if (!any) continue;
    ctx.t = t;
    const auto theta = outcome_distribution_for(model, ctx);
    for (int y = 1; y <= kNumOutcomes; ++y) {
      const auto c = counts[y - 1];
      if (c == 0) continue;
      const double p = theta[y];
      if (p <= 0.0) return kNegInf;
      total += static_cast<double>(c) * std::log(p);
    }
  }
  return total;
}

double log_likelihood_by_record(const ModelSpec& model, const Dataset& data,
                                const BeliefMeans* beliefs) {
  if (data.empty()) throw std::domain_error("log_likelihood: empty dataset");
  return per_record_log_lik(model, data, beliefs, 1);
}

double bic(double log_lik, int n_params, std::int64_t n_obs) {
  if (n_params < 1 || n_obs < 1) throw std::domain_error("bic: n_params and n_obs must be >= 1");
  return 2.0 * log_lik - n_params * std::log(static_cast<double>(n_obs));
}

double bic_textbook(double log_lik, int n_params, std::int64_t n_obs) {
  return -bic(log_lik, n_params, n_obs);
}

std::string FitResult::to_json_text() const {
  nlohmann::json j;
  j["family"] = family_name(family_of(model));
  j["params"] = model_params_to_json(model);
  j["log_lik"] = log_lik;
  j["bic"] = bic;
  j["bic_textbook"] = bic_textbook;
  j["n_params"] = n_params;
  j["n_obs"] = n_obs;
  j["converged"] = converged;
  j["iterations"] = iterations;
  if (!warning.empty()) j["warning"] = warning;
  return j.dump(2);
}

namespace {

// Bijections between unconstrained optimizer coordinates and model parameters.
ModelSpec model_from_coords(Family family, std::span<const double> x) {
  switch (family) {
    case Family::OneParam:
      return OneParamModel{std::exp(x[0])};
    case Family::Learning:
      return LearningModel{std::exp(x[0]), x[1]};
    case Family::Hetero:
      return HeteroLearningModel{std::exp(x[0]), std::exp(x[1]), x[2]};
    case Family::Altruistic:
      return AltruisticModel{std::exp(x[0]), 1.0 / (1.0 + std::exp(-x[1]))};
    case Family::OrderedProbit: {
      OrderedProbitModel m;
      m.alpha[0] = x[0];
      for (int k = 1; k < 4; ++k) m.alpha[k] = m.alpha[k - 1] + std::exp(x[k]);
      m.beta = x[4];
      return m;
    }
    case Family::RandomEffects:
      break;
  }
  throw std::invalid_argument("fit_mle supports the five fixed-effect families only");
}

std::vector<std::vector<double>> starting_points(Family family) {
  std::vector<std::vector<double>> starts;
  switch (family) {
    case Family::OneParam:
      for (int k = 0; k < 8; ++k) starts.push_back({-2.0 + 5.0 * k / 7.0});
      break;
    case Family::Learning:
      for (double ll : {-1.375, -0.125, 1.125, 2.375})
        for (double b : {-0.25, 0.25}) starts.push_back({ll, b});
      break;
    case Family::Hetero:
      for (double la : {-0.75, 1.75})
        for (double lb : {-0.75, 1.75})
          for (double b : {-0.25, 0.25}) starts.push_back({la, lb, b});
      break;
    case Family::Altruistic:
      for (double ll : {-1.375, -0.125, 1.125, 2.375})
        for (double lq : {-2.0, 0.0}) starts.push_back({ll, lq});
      break;
    case Family::OrderedProbit:
      for (double a1 : {-1.5, -0.5})
        for (double d : {std::log(0.5), 0.0})
          for (double b : {-0.25, 0.25}) starts.push_back({a1, d, d, d, b});
      break;
    case Family::RandomEffects:
      break;
  }
  return starts;
}

}  // namespace

FitResult fit_mle(Family family, const Dataset& data, const FitConfig& config,
                  std::uint64_t /*seed*/) {
  if (data.empty()) throw std::domain_error("fit_mle: empty dataset");
  const auto starts = starting_points(family);
  if (starts.empty()) throw std::invalid_argument("fit_mle: unsupported family");

  const auto objective = [&](std::span<const double> x) {
    double ll;
    try {
      ll = log_likelihood(model_from_coords(family, x), data);
    } catch (const std::domain_error&) {
      return 1e100;
    }
    return std::isfinite(ll) ? -ll : 1e100;
  };

  SimplexOptions options;
  options.diameter_tol = config.diameter_tol;
  options.max_iterations = config.max_iterations;
  options.initial_step = 0.5;

  std::vector<SimplexResult> runs(starts.size());
  parallel_index(static_cast<std::int64_t>(starts.size()), config.threads,
                 [&](std::int64_t k) { runs[k] = nelder_mead(objective, starts[k], options); });

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].value < runs[best].value ||
        (runs[k].value == runs[best].value && runs[k].x < runs[best].x))
      best = k;
  }

  FitResult result;
  result.model = model_from_coords(family, runs[best].x);
  result.log_lik = -runs[best].value;
  result.n_params = free_parameter_count(family);
  result.n_obs = static_cast<std::int64_t>(data.size());
  result.bic = bic(result.log_lik, result.n_params, result.n_obs);
  result.bic_textbook = bic_textbook(result.log_lik, result.n_params, result.n_obs);
  result.converged = runs[best].converged;
  result.iterations = runs[best].iterations;

  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (k == best || !runs[k].converged) continue;
    const double gap = std::fabs(runs[k].value - runs[best].value);
    double dist = 0.0;
    for (std::size_t c = 0; c < runs[k].x.size(); ++c)
      dist = std::max(dist, std::fabs(runs[k].x[c] - runs[best].x[c]));
    if (gap < 1e-6 && dist > 1e-2) {
      result.warning = "flat likelihood: distinct optima with equal fit";
      break;
    }
  }
  return result;
}

}  // namespace centqre
