#pragma once

#include <filesystem>
#include <string>

#include "tanhshift/sac.hpp"

namespace tanhshift {

// Serialized layout: {seed, config: {env: {...}, sac: {...}},
// checkpoints: [{steps, scores: [...], normalized: [...]}]}.
std::string run_record_to_json(const RunRecord& record);

// Throws std::runtime_error naming the missing or malformed field.
RunRecord run_record_from_json(const std::string& text);

void save_run_record(const std::filesystem::path& file, const RunRecord& record);
RunRecord load_run_record(const std::filesystem::path& file);

// run_<mode>_<seed>.json
std::string run_record_filename(InferenceMode mode, std::uint64_t seed);

}  // namespace tanhshift
