#pragma once

#include <string>

#include <json.hpp>

#include "cubesig/grid_map.hpp"
#include "cubesig/indices.hpp"
#include "cubesig/tensor.hpp"

namespace cubesig {

nlohmann::json injection_to_json(const OrderedInjection& p);
OrderedInjection injection_from_json(const nlohmann::json& j);

nlohmann::json permutation_to_json(const Permutation& p);
Permutation permutation_from_json(const nlohmann::json& j);

// {"P": [[...], ...], "pi": [[...], ...]}
nlohmann::json level_index_to_json(const LevelIndex& idx);
LevelIndex level_index_from_json(const nlohmann::json& j);

// {"d": ..., "n": ..., "breakpoints": [[...], ...], "samples": nested}
nlohmann::json grid_map_to_json(const GridMap& x);
GridMap grid_map_from_json(const nlohmann::json& j);
GridMap load_grid_map(const std::string& path);

// {"level0": ..., "terms": [{"m": ..., "P": ..., "pi": ..., "value": ...}]}
nlohmann::json tensor_to_json(const GradedTensor& t);
GradedTensor tensor_from_json(const nlohmann::json& j, int d, int n);

// columns m,P,pi,value with P and pi flattened using ';'
std::string tensor_to_csv(const GradedTensor& t);

std::string format_double(double v);

}  // namespace cubesig
