#include "spxtrack/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "spxtrack/csv.hpp"
#include "spxtrack/error.hpp"

namespace spx {

namespace {

const std::vector<std::pair<std::string, std::string>>& default_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"kalman.process_noise", "0.05"},
        {"kalman.measurement_noise", "0.5"},
        {"kalman.init_pos_var", "1.0"},
        {"kalman.init_vel_var", "1.0"},
        {"match.weights", "3,1,3,2,2,1,3"},
        {"match.gate.max_jump_px", "50"},
        {"match.gate.max_appearance", "0.35"},
        {"slic.compactness", "10"},
        {"slic.iters", "10"},
        {"slic.workers", "0"},
        {"slic.min_region", "0"},
        {"slic.color_space", "rgb"},
        {"slic.count.default", "10000"},
        {"tracker.roi_w", "100"},
        {"tracker.roi_h", "100"},
        {"tracker.init_padding", "100"},
        {"tracker.loss_frames", "25"},
        {"tracker.mode", "3d"},
        {"eval.tol_px", "10"},
    };
    return table;
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

} // namespace

Config::Config() {
    for (const auto& [key, value] : default_table())
        values_[key] = value;
}

void Config::validate_key(const std::string& key) const {
    if (key.rfind("slic.count.", 0) == 0 && key.size() > 11)
        return; // per-marker override family
    for (const auto& [known, value] : default_table())
        if (known == key)
            return;
    throw ParseError("unknown config key '" + key + "'");
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open config " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value at " + path + ":" +
                             std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        cfg.validate_key(key);
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    validate_key(key);
    values_[key] = value;
}

bool Config::has(const std::string& key) const {
    return values_.count(key) > 0;
}

std::string Config::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ParseError("unknown config key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    return csv_to_double(get_string(key), "config key " + key);
}

int Config::get_int(const std::string& key) const {
    return static_cast<int>(csv_to_long(get_string(key), "config key " + key));
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const auto fields = csv_split(get_string(key));
    std::vector<double> out;
    out.reserve(fields.size());
    for (const auto& f : fields)
        out.push_back(csv_to_double(f, "config key " + key));
    return out;
}

std::map<std::string, int> Config::marker_counts() const {
    std::map<std::string, int> out;
    for (const auto& [key, value] : values_) {
        if (key.rfind("slic.count.", 0) == 0 && key != "slic.count.default")
            out[key.substr(11)] =
                static_cast<int>(csv_to_long(value, "config key " + key));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> Config::defaults() {
    return default_table();
}

} // namespace spx
