#pragma once

#include <map>
#include <string>
#include <vector>

namespace spx {

// Flat key = value configuration with '#' comments. Every key has a
// documented default; unknown keys are rejected by name. The open family
// slic.count.<marker> carries per-marker full-frame superpixel counts.
class Config {
public:
    Config(); // defaults

    static Config from_file(const std::string& path);

    // "key=value", as accepted from CLI overrides.
    void set(const std::string& key, const std::string& value);

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    bool has(const std::string& key) const;

    // All slic.count.<name> overrides present in the config.
    std::map<std::string, int> marker_counts() const;

    // Known keys with their default values, for documentation output.
    static std::vector<std::pair<std::string, std::string>> defaults();

private:
    void validate_key(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

} // namespace spx
