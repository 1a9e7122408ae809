#pragma once

#include <string>

#include <json.hpp>

#include "cvlearn/bounds.hpp"
#include "cvlearn/gaussian.hpp"
#include "cvlearn/ggstate.hpp"
#include "cvlearn/learn.hpp"
#include "cvlearn/photocount.hpp"

namespace cvlearn {

using nlohmann::json;

// Matrices serialize row-major; complex numbers as [re, im] pairs.

json to_json(const GaussianState& st);
json to_json(const GaussianChannel& ch);
json to_json(const GeneralDyneEffect& eff);
json to_json(const GGState& st);
json to_json(const GGEffect& eff);
json to_json(const GGChannel& ch);
json to_json(const PhotoCountEffect& eff);
json to_json(const LearningReport& rep);
json to_json(const GapStatistics& gs);
json to_json(const BoundBreakdown& b);
json to_json(const Target& t);
json to_json(const TaskSpec& task);

GaussianState gaussian_state_from_json(const json& j);
GaussianChannel gaussian_channel_from_json(const json& j);
GeneralDyneEffect general_dyne_effect_from_json(const json& j);
GGState gg_state_from_json(const json& j);
GGEffect gg_effect_from_json(const json& j);
GGChannel gg_channel_from_json(const json& j);
PhotoCountEffect photocount_effect_from_json(const json& j);

/// Loads a state-like target: a plain Gaussian state document or a GG
/// component list.
Target target_from_json(const json& j);

TaskSpec task_spec_from_json(const json& j);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Fixed "%.17g" formatting so reruns produce byte-identical metric columns.
std::string csv_number(double v);

}  // namespace cvlearn
