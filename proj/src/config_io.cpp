#include "cvqt/config_io.hpp"

#include "cvqt/errors.hpp"
#include "cvqt/version.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace cvqt {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
    if (key.empty()) {
        return false;
    }
    return std::all_of(key.begin(), key.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    });
}

/// Every key the schema knows, used to tell "unknown key" apart from
/// "known key that does not apply to this configuration".
const std::vector<std::string>& schema_keys() {
    static const std::vector<std::string> keys = {
        "schema_version",
        "input",
        "input.mean_x",
        "input.mean_p",
        "squeezer_a",
        "squeezer_a.r",
        "squeezer_a.squeezing_db",
        "squeezer_a.pump_gain",
        "squeezer_a.efficiency",
        "squeezer_a.sideband_mhz",
        "squeezer_a.bandwidth_mhz",
        "squeezer_b",
        "squeezer_b.r",
        "squeezer_b.squeezing_db",
        "squeezer_b.pump_gain",
        "squeezer_b.efficiency",
        "squeezer_b.sideband_mhz",
        "squeezer_b.bandwidth_mhz",
        "gain_x",
        "gain_p",
        "gain_step_db",
        "probe_tone",
        "eta.path_a",
        "eta.path_b",
        "eta.alice_x",
        "eta.alice_p",
        "eta.victor",
        "jitter_deg.squeezer_a",
        "jitter_deg.squeezer_b",
        "jitter_deg.epr_hbs",
        "jitter_deg.alice_hbs",
        "jitter_deg.victor_lo",
        "engine",
        "shots",
        "seed",
        "workers",
        "sweep.g_min",
        "sweep.g_max",
        "sweep.steps",
        "sequential.steps",
    };
    return keys;
}

struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry>& entries) : entries_(entries) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    std::string require_string(const std::string& key) {
        Entry* e = take(key);
        if (e == nullptr) {
            throw config_error("missing required key '" + key + "'", 0, key);
        }
        return e->value;
    }

    std::string require_enum(const std::string& key, const std::vector<std::string>& allowed) {
        Entry* e = take(key);
        if (e == nullptr) {
            throw config_error("missing required key '" + key + "'", 0, key);
        }
        return check_enum(key, *e, allowed);
    }

    std::string get_enum(const std::string& key, const std::vector<std::string>& allowed,
                         const std::string& fallback) {
        Entry* e = take(key);
        if (e == nullptr) {
            return fallback;
        }
        return check_enum(key, *e, allowed);
    }

    double require_double(const std::string& key) {
        Entry* e = take(key);
        if (e == nullptr) {
            throw config_error("missing required key '" + key + "'", 0, key);
        }
        return parse_double(key, *e);
    }

    double get_double(const std::string& key, double fallback) {
        Entry* e = take(key);
        return e == nullptr ? fallback : parse_double(key, *e);
    }

    long long require_integer(const std::string& key) {
        Entry* e = take(key);
        if (e == nullptr) {
            throw config_error("missing required key '" + key + "'", 0, key);
        }
        return parse_integer(key, *e);
    }

    long long get_integer(const std::string& key, long long fallback) {
        Entry* e = take(key);
        return e == nullptr ? fallback : parse_integer(key, *e);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        Entry* e = take(key);
        if (e == nullptr) {
            return fallback;
        }
        const std::string& v = e->value;
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size()) {
            throw config_error("key '" + key + "': invalid unsigned integer '" + v + "'",
                               e->line, key);
        }
        return out;
    }

    /// Consume every `note.<label>` entry.
    std::map<std::string, std::string> take_notes() {
        std::map<std::string, std::string> notes;
        for (auto& [key, entry] : entries_) {
            if (key.rfind("note.", 0) == 0 && !entry.consumed) {
                const std::string label = key.substr(5);
                if (label.empty()) {
                    throw config_error("note key needs a label after 'note.'", entry.line, key);
                }
                notes[label] = entry.value;
                entry.consumed = true;
            }
        }
        return notes;
    }

    /// Reject any entry no interpretation consumed.
    void finish() const {
        for (const auto& [key, entry] : entries_) {
            if (entry.consumed) {
                continue;
            }
            const auto& known = schema_keys();
            if (std::find(known.begin(), known.end(), key) != known.end()) {
                throw config_error("key '" + key + "' does not apply to this configuration",
                                   entry.line, key);
            }
            throw config_error("unknown key '" + key + "'", entry.line, key);
        }
    }

private:
    Entry* take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return nullptr;
        }
        it->second.consumed = true;
        return &it->second;
    }

    static std::string check_enum(const std::string& key, const Entry& e,
                                  const std::vector<std::string>& allowed) {
        if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
            std::string options;
            for (const auto& a : allowed) {
                options += options.empty() ? a : (", " + a);
            }
            throw config_error(
                "key '" + key + "': invalid value '" + e.value + "' (expected one of: " +
                    options + ")",
                e.line, key);
        }
        return e.value;
    }

    static double parse_double(const std::string& key, const Entry& e) {
        const std::string& v = e.value;
        size_t offset = (!v.empty() && v[0] == '+') ? 1 : 0;
        double out = 0.0;
        auto [p, ec] = std::from_chars(v.data() + offset, v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size()) {
            throw config_error("key '" + key + "': invalid number '" + v + "'", e.line, key);
        }
        return out;
    }

    static long long parse_integer(const std::string& key, const Entry& e) {
        const std::string& v = e.value;
        size_t offset = (!v.empty() && v[0] == '+') ? 1 : 0;
        long long out = 0;
        auto [p, ec] = std::from_chars(v.data() + offset, v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size()) {
            throw config_error("key '" + key + "': invalid integer '" + v + "'", e.line, key);
        }
        return out;
    }

    std::map<std::string, Entry>& entries_;
};

SqueezerSpec read_squeezer(Reader& reader, const std::string& name) {
    SqueezerSpec spec;
    const std::string kind = reader.require_enum(name, {"r", "db", "opo"});
    if (kind == "r") {
        spec.kind = SqueezerKind::DirectR;
        spec.r = reader.require_double(name + ".r");
    } else if (kind == "db") {
        spec.kind = SqueezerKind::SqueezingDb;
        spec.squeezing_db = reader.require_double(name + ".squeezing_db");
    } else {
        spec.kind = SqueezerKind::Opo;
        spec.opo.pump_gain = reader.require_double(name + ".pump_gain");
        spec.opo.efficiency = reader.get_double(name + ".efficiency", 1.0);
        spec.opo.sideband_mhz = reader.get_double(name + ".sideband_mhz", 0.0);
        spec.opo.cavity_hwhm_mhz = reader.get_double(name + ".bandwidth_mhz", 10.0);
        // Lock jitter for an OPO arm comes from jitter_deg.squeezer_*, so
        // opo.jitter_rms_deg stays 0 for config-born setups.
    }
    return spec;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void echo_squeezer(std::map<std::string, std::string>& echo, const std::string& name,
                   const SqueezerSpec& spec) {
    switch (spec.kind) {
        case SqueezerKind::DirectR:
            echo[name] = "r";
            echo[name + ".r"] = fmt_double(spec.r);
            return;
        case SqueezerKind::SqueezingDb:
            echo[name] = "db";
            echo[name + ".squeezing_db"] = fmt_double(spec.squeezing_db);
            return;
        case SqueezerKind::Opo:
            echo[name] = "opo";
            echo[name + ".pump_gain"] = fmt_double(spec.opo.pump_gain);
            echo[name + ".efficiency"] = fmt_double(spec.opo.efficiency);
            echo[name + ".sideband_mhz"] = fmt_double(spec.opo.sideband_mhz);
            echo[name + ".bandwidth_mhz"] = fmt_double(spec.opo.cavity_hwhm_mhz);
            return;
    }
}

}  // namespace

const char* engine_name(Engine engine) {
    return engine == Engine::Heisenberg ? "heisenberg" : "monte_carlo";
}

Engine engine_from_name(const std::string& name) {
    if (name == "heisenberg") {
        return Engine::Heisenberg;
    }
    if (name == "monte_carlo") {
        return Engine::MonteCarlo;
    }
    throw config_error("unknown engine '" + name + "' (expected heisenberg or monte_carlo)");
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> entries;
    {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            const size_t hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) {
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw config_error(origin + ": expected 'key = value'", lineno);
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!valid_key(key)) {
                throw config_error(origin + ": invalid key '" + key + "'", lineno, key);
            }
            if (value.empty()) {
                throw config_error(origin + ": key '" + key + "' has an empty value", lineno,
                                   key);
            }
            if (entries.count(key) != 0) {
                throw config_error(origin + ": duplicate key '" + key + "'", lineno, key);
            }
            entries[key] = Entry{value, lineno, false};
        }
    }

    Reader reader(entries);
    ExperimentConfig cfg;

    const long long schema = reader.require_integer("schema_version");
    if (schema != kSchemaVersion) {
        throw config_error("unsupported schema_version " + std::to_string(schema) +
                               " (this tool reads version " + std::to_string(kSchemaVersion) +
                               ")",
                           reader.line_of("schema_version"), "schema_version");
    }

    const std::string input_kind = reader.get_enum("input", {"vacuum", "coherent"}, "vacuum");
    if (input_kind == "coherent") {
        cfg.teleporter.input.mean_x = reader.get_double("input.mean_x", 0.0);
        cfg.teleporter.input.mean_p = reader.get_double("input.mean_p", 0.0);
    }

    cfg.teleporter.squeezer_a = read_squeezer(reader, "squeezer_a");
    cfg.teleporter.squeezer_b = read_squeezer(reader, "squeezer_b");

    cfg.teleporter.gain_x = reader.get_double("gain_x", 1.0);
    cfg.teleporter.gain_p = reader.get_double("gain_p", 1.0);
    cfg.teleporter.gain_step_db = reader.get_double("gain_step_db", 0.0);
    cfg.teleporter.probe_tone = reader.get_double("probe_tone", 0.0);

    cfg.teleporter.eta.path_a = reader.get_double("eta.path_a", 1.0);
    cfg.teleporter.eta.path_b = reader.get_double("eta.path_b", 1.0);
    cfg.teleporter.eta.alice_x = reader.get_double("eta.alice_x", 1.0);
    cfg.teleporter.eta.alice_p = reader.get_double("eta.alice_p", 1.0);
    cfg.teleporter.eta.victor = reader.get_double("eta.victor", 1.0);

    cfg.teleporter.jitter.squeezer_a_deg = reader.get_double("jitter_deg.squeezer_a", 0.0);
    cfg.teleporter.jitter.squeezer_b_deg = reader.get_double("jitter_deg.squeezer_b", 0.0);
    cfg.teleporter.jitter.epr_hbs_deg = reader.get_double("jitter_deg.epr_hbs", 0.0);
    cfg.teleporter.jitter.alice_hbs_deg = reader.get_double("jitter_deg.alice_hbs", 0.0);
    cfg.teleporter.jitter.victor_lo_deg = reader.get_double("jitter_deg.victor_lo", 0.0);

    cfg.teleporter.engine =
        engine_from_name(reader.get_enum("engine", {"heisenberg", "monte_carlo"}, "heisenberg"));
    cfg.teleporter.shots = static_cast<long>(reader.get_integer("shots", 100000));
    cfg.teleporter.seed = reader.get_u64("seed", 0);
    cfg.teleporter.workers = static_cast<int>(reader.get_integer("workers", 1));

    const bool any_sweep =
        reader.has("sweep.g_min") || reader.has("sweep.g_max") || reader.has("sweep.steps");
    if (any_sweep) {
        SweepSpec sweep;
        sweep.g_min = reader.require_double("sweep.g_min");
        sweep.g_max = reader.require_double("sweep.g_max");
        sweep.steps = static_cast<int>(reader.require_integer("sweep.steps"));
        if (sweep.steps < 2) {
            throw config_error("sweep.steps must be >= 2", reader.line_of("sweep.steps"),
                               "sweep.steps");
        }
        if (!(sweep.g_min <= sweep.g_max)) {
            throw config_error("sweep.g_min must be <= sweep.g_max",
                               reader.line_of("sweep.g_min"), "sweep.g_min");
        }
        cfg.sweep = sweep;
    }

    if (reader.has("sequential.steps")) {
        const long long steps = reader.require_integer("sequential.steps");
        if (steps < 1 || steps > 1000) {
            throw config_error("sequential.steps must be in [1, 1000]",
                               reader.line_of("sequential.steps"), "sequential.steps");
        }
        cfg.sequential_steps = static_cast<int>(steps);
    }

    cfg.notes = reader.take_notes();
    reader.finish();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str(), path);
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& config) {
    std::map<std::string, std::string> echo;
    const TeleporterConfig& t = config.teleporter;
    echo["schema_version"] = std::to_string(kSchemaVersion);
    if (t.input.mean_x == 0.0 && t.input.mean_p == 0.0) {
        echo["input"] = "vacuum";
    } else {
        echo["input"] = "coherent";
        echo["input.mean_x"] = fmt_double(t.input.mean_x);
        echo["input.mean_p"] = fmt_double(t.input.mean_p);
    }
    echo_squeezer(echo, "squeezer_a", t.squeezer_a);
    echo_squeezer(echo, "squeezer_b", t.squeezer_b);
    echo["gain_x"] = fmt_double(t.gain_x);
    echo["gain_p"] = fmt_double(t.gain_p);
    echo["gain_step_db"] = fmt_double(t.gain_step_db);
    echo["probe_tone"] = fmt_double(t.probe_tone);
    echo["eta.path_a"] = fmt_double(t.eta.path_a);
    echo["eta.path_b"] = fmt_double(t.eta.path_b);
    echo["eta.alice_x"] = fmt_double(t.eta.alice_x);
    echo["eta.alice_p"] = fmt_double(t.eta.alice_p);
    echo["eta.victor"] = fmt_double(t.eta.victor);
    echo["jitter_deg.squeezer_a"] = fmt_double(t.jitter.squeezer_a_deg);
    echo["jitter_deg.squeezer_b"] = fmt_double(t.jitter.squeezer_b_deg);
    echo["jitter_deg.epr_hbs"] = fmt_double(t.jitter.epr_hbs_deg);
    echo["jitter_deg.alice_hbs"] = fmt_double(t.jitter.alice_hbs_deg);
    echo["jitter_deg.victor_lo"] = fmt_double(t.jitter.victor_lo_deg);
    echo["engine"] = engine_name(t.engine);
    echo["shots"] = std::to_string(t.shots);
    echo["seed"] = std::to_string(t.seed);
    echo["workers"] = std::to_string(t.workers);
    if (config.sweep) {
        echo["sweep.g_min"] = fmt_double(config.sweep->g_min);
        echo["sweep.g_max"] = fmt_double(config.sweep->g_max);
        echo["sweep.steps"] = std::to_string(config.sweep->steps);
    }
    if (config.sequential_steps) {
        echo["sequential.steps"] = std::to_string(*config.sequential_steps);
    }
    for (const auto& [label, value] : config.notes) {
        echo["note." + label] = value;
    }
    return echo;
}

std::string config_text_from_echo(const std::map<std::string, std::string>& echo) {
    std::ostringstream out;
    for (const auto& [key, value] : echo) {
        out << key << " = " << value << "\n";
    }
    return out.str();
}

nlohmann::json run_report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["tool_version"] = report.tool_version;
    j["command"] = report.command;
    j["config"] = report.config;
    j["notes"] = report.notes;
    nlohmann::json r;
    r["engine"] = engine_name(report.report.engine);
    r["sigma_x"] = report.report.sigma_x;
    r["sigma_p"] = report.report.sigma_p;
    r["sigma_x_db"] = report.report.sigma_x_db;
    r["sigma_p_db"] = report.report.sigma_p_db;
    r["mean_x"] = report.report.mean_x;
    r["mean_p"] = report.report.mean_p;
    r["fidelity"] = report.report.fidelity;
    r["n_s"] = report.report.n_s;
    r["r_eff"] = report.report.r_eff;
    r["shots"] = report.report.shots;
    r["seed"] = report.report.seed;
    r["workers"] = report.report.workers;
    r["se_sigma_x"] = report.report.se_sigma_x;
    r["se_sigma_p"] = report.report.se_sigma_p;
    r["se_fidelity"] = report.report.se_fidelity;
    j["report"] = r;
    return j;
}

RunReport run_report_from_json(const nlohmann::json& doc) {
    try {
        RunReport out;
        out.schema_version = doc.at("schema_version").get<int>();
        out.tool_version = doc.at("tool_version").get<std::string>();
        out.command = doc.at("command").get<std::string>();
        out.config = doc.at("config").get<std::map<std::string, std::string>>();
        out.notes = doc.at("notes").get<std::map<std::string, std::string>>();
        const nlohmann::json& r = doc.at("report");
        out.report.engine = engine_from_name(r.at("engine").get<std::string>());
        out.report.sigma_x = r.at("sigma_x").get<double>();
        out.report.sigma_p = r.at("sigma_p").get<double>();
        out.report.sigma_x_db = r.at("sigma_x_db").get<double>();
        out.report.sigma_p_db = r.at("sigma_p_db").get<double>();
        out.report.mean_x = r.at("mean_x").get<double>();
        out.report.mean_p = r.at("mean_p").get<double>();
        out.report.fidelity = r.at("fidelity").get<double>();
        out.report.n_s = r.at("n_s").get<double>();
        out.report.r_eff = r.at("r_eff").get<double>();
        out.report.shots = r.at("shots").get<long>();
        out.report.seed = r.at("seed").get<std::uint64_t>();
        out.report.workers = r.at("workers").get<int>();
        out.report.se_sigma_x = r.at("se_sigma_x").get<double>();
        out.report.se_sigma_p = r.at("se_sigma_p").get<double>();
        out.report.se_fidelity = r.at("se_fidelity").get<double>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed run report: ") + e.what());
    }
}

std::string serialize_run_report(const RunReport& report) {
    return run_report_to_json(report).dump(2) + "\n";
}

RunReport parse_run_report(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed run report: ") + e.what());
    }
    return run_report_from_json(doc);
}

}  // namespace cvqt
