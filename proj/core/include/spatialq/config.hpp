#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spatialq/engine.hpp"

namespace spatialq {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration. Keys are dotted names validated against
/// the known registry, so a typo fails loudly naming the key. Every key
/// can also arrive as a command-line override of the same name.
class ConfigMap {
public:
    ConfigMap() = default;

    /// Parses "key = value" lines; '#' starts a comment. Throws
    /// ConfigError on unreadable files or unknown keys.
    static ConfigMap from_file(const std::string& path);

    /// Throws ConfigError when the key is not in the registry.
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    double get_double(const std::string& key, double def) const;
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& def) const;

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

/// Engine knobs from the cost.*, engine.*, index.*, filter.* and
/// scheduler.* keys.
EngineConfig engine_config_from(const ConfigMap& cfg);

}  // namespace spatialq
