#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "rra/assortment.h"
#include "rra/model.h"

namespace rra {

/// A parsed instance file. `mnl` is set for assortment instances so that the
/// caller can build the LP-based oracle.
struct LoadedInstance {
  Instance instance;
  std::shared_ptr<const MnlOutcomeModel> mnl;
};

/// Parses the JSON instance description (kinds "tabular" and "mnl"; see
/// docs/file_formats.md). Unknown fields and schema errors raise
/// kConfigError; malformed JSON raises kIoError; model validation errors
/// propagate unchanged.
LoadedInstance parse_instance(const std::string& text);
LoadedInstance load_instance(const std::filesystem::path& path);

/// Serializes a tabular or MNL-backed instance. Output is deterministic.
std::string serialize_instance(const Instance& instance);
void save_instance(const Instance& instance, const std::filesystem::path& path);

}  // namespace rra
