#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace funcint {

/// Sectioned key = value configuration.
///
/// Format: `[section]` headers, `key = value` entries, `#` comments.  All
/// physical parameters are dimensionless.  The canonical serialization (keys
/// sorted) is what run manifests embed and hash, so a manifest alone pins
/// every number a run produced.
class ConfigMap {
public:
    static ConfigMap parse(const std::string& text);
    static ConfigMap load_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Writes the value only when the key is absent.
    void set_default(const std::string& section, const std::string& key,
                     const std::string& value);

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

    /// Canonical dump: sections and keys sorted, one entry per line.
    std::string resolved_text() const;
    /// FNV-1a hash of the canonical dump.
    std::uint64_t hash() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace funcint
