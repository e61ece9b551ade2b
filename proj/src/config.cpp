#include "rdsig/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rdsig/csv.hpp"
#include "rdsig/errors.hpp"
#include "rdsig/version.hpp"

namespace rdsig {

namespace {

const std::vector<std::string> kPresetNames = {
    "fig1", "fig_pmiss_sigma", "fig_exponent_vs_bound", "fig_mu1zero",
    "fig_dishwasher"};

const std::set<std::string> kKnownKeys = {
    "preset",        "model.delta", "model.p1",       "model.p2",
    "model.mu1",     "model.mu2",   "model.sigma",    "model.mu0",
    "run.T",         "run.J",       "run.alpha",      "run.seed",
    "run.sigma_grid", "run.scale",  "run.threads",    "output.dir"};

std::string where(const KeyValue& kv) {
    return kv.line > 0 ? " at line " + std::to_string(kv.line) : "";
}

double parse_number(const KeyValue& kv) {
    try {
        size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + kv.key + "'" +
                          where(kv) + ": '" + kv.value + "'");
    }
}

std::uint64_t parse_uint(const KeyValue& kv) {
    try {
        size_t pos = 0;
        std::uint64_t v = std::stoull(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned integer for '" + kv.key + "'" +
                          where(kv) + ": '" + kv.value + "'");
    }
}

std::vector<double> parse_number_list(const KeyValue& kv) {
    std::vector<double> out;
    std::istringstream is(kv.value);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("config: bad list entry for '" + kv.key + "'" +
                              where(kv) + ": '" + cell + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError("config: empty list for '" + kv.key + "'" + where(kv));
    }
    return out;
}

struct PresetSpec {
    std::vector<KeyValue> values;
};

PresetSpec preset_spec(Preset p) {
    auto kv = [](std::string k, std::string v) {
        return KeyValue{std::move(k), std::move(v), 0};
    };
    switch (p) {
        case Preset::fig1:
            return {{kv("model.delta", "3"), kv("model.p1", "uniform"),
                     kv("model.p2", "uniform"), kv("model.mu1", "2"),
                     kv("model.mu2", "5"), kv("model.sigma", "10"),
                     kv("run.alpha", "0.01"), kv("run.T", "300"),
                     kv("run.J", "100000")}};
        case Preset::fig_pmiss_sigma:
            return {{kv("model.delta", "3"), kv("model.p1", "uniform"),
                     kv("model.p2", "uniform"), kv("model.mu1", "2"),
                     kv("model.mu2", "5"), kv("model.sigma", "10"),
                     kv("run.alpha", "0.01"), kv("run.T", "200"),
                     kv("run.J", "100000"),
                     kv("run.sigma_grid", "10,15,20,25,30")}};
        case Preset::fig_exponent_vs_bound:
            return {{kv("model.delta", "3"), kv("model.p1", "uniform"),
                     kv("model.p2", "uniform"), kv("model.mu1", "2"),
                     kv("model.mu2", "5"), kv("model.sigma", "10"),
                     kv("run.alpha", "0.01"), kv("run.T", "200"),
                     kv("run.J", "100000"),
                     kv("run.sigma_grid", "5,10,15,20,25,30,35,40,45,50")}};
        case Preset::fig_mu1zero:
            return {{kv("model.delta", "2"), kv("model.p1", "uniform"),
                     kv("model.p2", "uniform"), kv("model.mu1", "0"),
                     kv("model.mu2", "1"), kv("model.sigma", "0.3"),
                     kv("run.alpha", "0.01"), kv("run.T", "200"),
                     kv("run.J", "100000"),
                     kv("run.sigma_grid",
                        "0.2,0.25,0.3,0.33,0.37,0.4,0.45,0.5,0.55,0.6")}};
        case Preset::fig_dishwasher:
            return {{kv("model.delta", "10"), kv("model.p1", "uniform"),
                     kv("model.p2", "uniform"), kv("model.mu1", "66"),
                     kv("model.mu2", "2200"), kv("model.mu0", "90"),
                     kv("model.sigma", "90"), kv("run.alpha", "0.01"),
                     kv("run.T", "40"), kv("run.J", "100000"),
                     kv("run.sigma_grid", "50,70,90,110,130")}};
    }
    throw ConfigError("config: unknown preset");
}

DurationPmf parse_pmf(const KeyValue& kv, int delta) {
    if (kv.value == "uniform") return DurationPmf::uniform(delta);
    std::vector<double> probs = parse_number_list(kv);
    if (static_cast<int>(probs.size()) != delta) {
        throw ConfigError("config: '" + kv.key + "'" + where(kv) + " has " +
                          std::to_string(probs.size()) + " entries, expected " +
                          std::to_string(delta));
    }
    try {
        return DurationPmf(std::move(probs));
    } catch (const std::exception& e) {
        throw ConfigError("config: invalid pmf for '" + kv.key + "'" + where(kv) +
                          ": " + e.what());
    }
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::optional<Preset> preset_from_name(const std::string& name) {
    for (size_t i = 0; i < kPresetNames.size(); ++i) {
        if (kPresetNames[i] == name) return static_cast<Preset>(i);
    }
    return std::nullopt;
}

std::string preset_name(Preset preset) {
    return kPresetNames[static_cast<size_t>(preset)];
}

const std::vector<std::string>& preset_names() { return kPresetNames; }

int ExperimentConfig::effective_runs() const {
    long long j = std::llround(static_cast<double>(runs) * scale);
    return static_cast<int>(std::max(1LL, j));
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "delta=" << params.delta();
    os << ";p1=" << join_doubles(params.pmf(kState1).probs());
    os << ";p2=" << join_doubles(params.pmf(kState2).probs());
    os << ";mu1=" << format_double(params.mu1());
    os << ";mu2=" << format_double(params.mu2());
    os << ";sigma=" << format_double(params.sigma());
    os << ";mu0=" << format_double(params.mu0());
    os << ";T=" << t_horizon;
    os << ";J=" << runs;
    os << ";scale=" << format_double(scale);
    os << ";J_eff=" << effective_runs();
    os << ";alpha=" << format_double(alpha);
    os << ";seed=" << seed;
    os << ";sigma_grid=" << join_doubles(sigma_grid);
    os << ";preset=" << (preset ? preset_name(*preset) : "none");
    return os.str();
}

std::string ExperimentConfig::config_hash() const {
    std::ostringstream os;
    os << std::hex << fnv1a64(canonical());
    return os.str();
}

std::string ExperimentConfig::metadata() const {
    std::ostringstream os;
    os << "version=" << kVersion << " config_hash=" << config_hash() << " "
       << canonical();
    return os.str();
}

std::vector<KeyValue> parse_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open file: " + path.string());
    }
    std::vector<KeyValue> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: missing '=' at line " +
                              std::to_string(line_no) + ": '" + line + "'");
        }
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        auto strip = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
        };
        strip(key);
        strip(value);
        out.push_back(KeyValue{key, value, line_no});
    }
    return out;
}

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<KeyValue>& flag_overrides) {
    std::vector<KeyValue> file_kvs;
    if (file) file_kvs = parse_key_value_file(*file);

    for (const auto& kvs : {file_kvs, flag_overrides}) {
        for (const KeyValue& kv : kvs) {
            if (!kKnownKeys.contains(kv.key)) {
                throw ConfigError("config: unknown key '" + kv.key + "'" + where(kv));
            }
        }
    }

    // Resolution order: defaults < preset < file < flags. The preset itself
    // may be named in the file or the flags (flags win).
    std::optional<Preset> preset;
    for (const auto& kvs : {file_kvs, flag_overrides}) {
        for (const KeyValue& kv : kvs) {
            if (kv.key == "preset") {
                auto p = preset_from_name(kv.value);
                if (!p) {
                    throw ConfigError("config: unknown preset '" + kv.value + "'" +
                                      where(kv));
                }
                preset = p;
            }
        }
    }

    std::map<std::string, KeyValue> resolved;
    auto apply = [&resolved](const std::vector<KeyValue>& kvs) {
        for (const KeyValue& kv : kvs) {
            if (kv.key == "preset") continue;
            resolved[kv.key] = kv;
        }
    };
    if (preset) apply(preset_spec(*preset).values);
    apply(file_kvs);
    apply(flag_overrides);

    std::vector<std::string> missing;
    for (const char* req :
         {"model.delta", "model.mu1", "model.mu2", "model.sigma"}) {
        if (!resolved.contains(req)) missing.push_back(req);
    }
    if (!missing.empty()) {
        std::string msg = "config: missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }

    auto get = [&resolved](const std::string& key) -> std::optional<KeyValue> {
        auto it = resolved.find(key);
        if (it == resolved.end()) return std::nullopt;
        return it->second;
    };

    double delta_raw = parse_number(*get("model.delta"));
    int delta = static_cast<int>(delta_raw);
    if (delta_raw != static_cast<double>(delta) || delta < 1) {
        throw ConfigError("config: model.delta must be a positive integer");
    }

    DurationPmf p1 = get("model.p1") ? parse_pmf(*get("model.p1"), delta)
                                     : DurationPmf::uniform(delta);
    DurationPmf p2 = get("model.p2") ? parse_pmf(*get("model.p2"), delta)
                                     : DurationPmf::uniform(delta);
    double mu1 = parse_number(*get("model.mu1"));
    double mu2 = parse_number(*get("model.mu2"));
    double sigma = parse_number(*get("model.sigma"));
    double mu0 = get("model.mu0") ? parse_number(*get("model.mu0")) : 0.0;

    ModelParams params = [&]() {
        try {
            return ModelParams(delta, std::move(p1), std::move(p2), mu1, mu2,
                               sigma, mu0);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: invalid model: ") + e.what());
        }
    }();

    ExperimentConfig cfg{std::move(params)};
    cfg.preset = preset;
    if (auto kv = get("run.T")) {
        cfg.t_horizon = static_cast<int>(parse_number(*kv));
        if (cfg.t_horizon < 1) throw ConfigError("config: run.T must be >= 1");
    }
    if (auto kv = get("run.J")) {
        cfg.runs = static_cast<int>(parse_number(*kv));
        if (cfg.runs < 1) throw ConfigError("config: run.J must be >= 1");
    }
    if (auto kv = get("run.alpha")) {
        cfg.alpha = parse_number(*kv);
        if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
            throw ConfigError("config: run.alpha must be in (0, 1)");
        }
    }
    if (auto kv = get("run.seed")) {
        cfg.seed = parse_uint(*kv);
    }
    if (auto kv = get("run.sigma_grid")) {
        cfg.sigma_grid = parse_number_list(*kv);
        for (double s : cfg.sigma_grid) {
            if (!(s > 0.0)) {
                throw ConfigError("config: run.sigma_grid entries must be > 0");
            }
        }
    }
    if (auto kv = get("run.scale")) {
        cfg.scale = parse_number(*kv);
        if (!(cfg.scale > 0.0)) throw ConfigError("config: run.scale must be > 0");
    }
    if (auto kv = get("run.threads")) {
        cfg.threads = static_cast<int>(parse_number(*kv));
        if (cfg.threads < 1) throw ConfigError("config: run.threads must be >= 1");
    }
    if (auto kv = get("output.dir")) {
        cfg.output_dir = kv->value;
    }
    return cfg;
}

}  // namespace rdsig
