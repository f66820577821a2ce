#pragma once

// JSON model files. Doubles are written in shortest round-trip form, so a
// saved model predicts bit-identically after loading.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mdlgbc/trainer.hpp"

namespace mdlgbc {

nlohmann::json model_to_json(const TrainedModel& model);

/// Validates schema, version and invariants (weights and priors summing to
/// one, consistent dimensions). Throws DataError on any violation.
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string dump_json(const nlohmann::json& doc);

}  // namespace mdlgbc
