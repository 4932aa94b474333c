#pragma once

// JSON (de)serialization of model parameters, shared by fit results, truth
// sidecars and the CLI.

#include <string>

#include "json.hpp"

#include "centqre/models.hpp"

namespace centqre {

nlohmann::json model_params_to_json(const ModelSpec& model);
ModelSpec model_from_params_json(Family family, const nlohmann::json& params);

}  // namespace centqre
