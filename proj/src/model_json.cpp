#include "centqre/model_json.hpp"

#include <stdexcept>

namespace centqre {

nlohmann::json model_params_to_json(const ModelSpec& model) {
  if (const auto* m = std::get_if<OneParamModel>(&model)) {
    return {{"lambda", m->lambda}};
  }
  if (const auto* m = std::get_if<LearningModel>(&model)) {
    return {{"lambda", m->lambda}, {"beta", m->beta}};
  }
  if (const auto* m = std::get_if<HeteroLearningModel>(&model)) {
    return {{"lambda_A", m->lambda_a}, {"lambda_B", m->lambda_b}, {"beta", m->beta}};
  }
  if (const auto* m = std::get_if<AltruisticModel>(&model)) {
    return {{"lambda", m->lambda}, {"q_alt", m->q_alt}};
  }
  if (const auto* m = std::get_if<OrderedProbitModel>(&model)) {
    return {{"alpha", m->alpha}, {"beta", m->beta}};
  }
  const auto& m = std::get<RandomEffectsModel>(model);
  return {{"delta_A", m.delta_a},
          {"beta_A", m.beta_a},
          {"delta_B", m.delta_b},
          {"beta_B", m.beta_b}};
}

ModelSpec model_from_params_json(Family family, const nlohmann::json& p) {
  switch (family) {
    case Family::OneParam:
      return OneParamModel{p.at("lambda").get<double>()};
    case Family::Learning:
      return LearningModel{p.at("lambda").get<double>(), p.at("beta").get<double>()};
    case Family::Hetero:
      return HeteroLearningModel{p.at("lambda_A").get<double>(), p.at("lambda_B").get<double>(),
                                 p.at("beta").get<double>()};
    case Family::Altruistic:
      return AltruisticModel{p.at("lambda").get<double>(), p.at("q_alt").get<double>()};
    case Family::OrderedProbit: {
      OrderedProbitModel m;
      const auto alpha = p.at("alpha").get<std::vector<double>>();
      if (alpha.size() != 4) throw std::invalid_argument("probit alpha must have 4 entries");
      std::copy(alpha.begin(), alpha.end(), m.alpha.begin());
      m.beta = p.at("beta").get<double>();
      return m;
    }
    case Family::RandomEffects: {
      RandomEffectsModel m;
      m.delta_a = p.at("delta_A").get<std::vector<double>>();
      m.beta_a = p.at("beta_A").get<std::vector<double>>();
      m.delta_b = p.at("delta_B").get<std::vector<double>>();
      m.beta_b = p.at("beta_B").get<std::vector<double>>();
      return m;
    }
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace centqre
