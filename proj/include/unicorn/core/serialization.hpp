#pragma once

#include <json.hpp>

#include "unicorn/core/types.hpp"

namespace unicorn {

using json = nlohmann::json;

json to_json(const TaskDefinition& t);
TaskDefinition task_from_json(const json& j);

json to_json(const Prediction& p);
Prediction prediction_from_json(const json& j);

json to_json(const ReferenceLabel& r);
ReferenceLabel reference_from_json(const json& j);

json to_json(const Representation& r);
Representation representation_from_json(const json& j);

json grid_to_json(const Grid<int>& g);
Grid<int> int_grid_from_json(const json& j);

/// Stable text rendering: sorted keys, two-space indent, trailing newline.
std::string dump_stable(const json& j);

}  // namespace unicorn
