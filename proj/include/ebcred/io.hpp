#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ebcred/diagnostics.hpp"
#include "ebcred/experiments.hpp"

namespace ebcred {

using Json = nlohmann::json;

void to_json(Json& j, const DiagnosticsReport& r);
void from_json(const Json& j, DiagnosticsReport& r);

void to_json(Json& j, const CoverageResult& r);
void from_json(const Json& j, CoverageResult& r);

void to_json(Json& j, const PriorCheckResult& r);
void to_json(Json& j, const MinimaxRow& r);
void to_json(Json& j, const DiagnoseResult& r);

void to_json(Json& j, const ExperimentSpec& spec);
/// Strict: unknown keys and wrong types raise ConfigError. Missing keys keep defaults.
ExperimentSpec spec_from_json(const Json& j);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Writes text to path, creating parent directories; errors carry the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Compact file-name form of n ("1000000", "60000", "2.5").
std::string format_n(double n);

}  // namespace ebcred
