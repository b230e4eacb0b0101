#pragma once

// Experiment configuration files and run-report documents.
//
// Config files are line-oriented `key = value` text.  `#` starts a
// comment, blank lines are ignored.  The key schema is strict: unknown
// keys, duplicate keys, malformed numbers and keys that do not apply to
// the selected variant (e.g. an OPO parameter on a squeezer declared with
// a direct r) are all rejected with the offending line number, so a typo
// cannot silently change the physics.  Keys under `note.` are free-form
// and are echoed into reports.
//
// Run reports are JSON documents carrying the full effective config (all
// defaults resolved), the result block and tool/schema versions, so a
// report is reproducible from its own content.

#include "cvqt/teleporter.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>

namespace cvqt {

/// Gain sweep requested in a config file (all three keys or none).
struct SweepSpec {
    double g_min = 0.0;
    double g_max = 0.0;
    int steps = 0;

    bool operator==(const SweepSpec&) const = default;
};

struct ExperimentConfig {
    TeleporterConfig teleporter;
    std::optional<SweepSpec> sweep;
    std::optional<int> sequential_steps;
    std::map<std::string, std::string> notes;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parse config text.  `origin` names the source for error messages.
/// Throws config_error on syntax/schema problems.  Physics bounds are not
/// checked here; they are enforced by TeleporterConfig::validate().
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin);

/// Load and parse a config file.
ExperimentConfig load_experiment_config(const std::string& path);

/// Effective key -> value map of a config with every default resolved;
/// doubles are printed round-trip exact.  parse(serialize(echo)) recovers
/// the identical ExperimentConfig.
std::map<std::string, std::string> config_echo(const ExperimentConfig& config);

/// Render an echo map back to config-file text.
std::string config_text_from_echo(const std::map<std::string, std::string>& echo);

/// A completed run as written to / read from JSON.
struct RunReport {
    int schema_version = 0;
    std::string tool_version;
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> notes;
    TeleportReport report;

    bool operator==(const RunReport&) const = default;
};

nlohmann::json run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& doc);

/// Serialize with a fixed layout (2-space indent, sorted keys, trailing
/// newline).  Deterministic: the same report yields identical bytes.
std::string serialize_run_report(const RunReport& report);

/// Parse a serialized report; throws config_error on malformed documents.
RunReport parse_run_report(const std::string& text);

const char* engine_name(Engine engine);
Engine engine_from_name(const std::string& name);

}  // namespace cvqt
