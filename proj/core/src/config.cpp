#include "funcint/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "funcint/errors.hpp"

namespace funcint {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

} // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("config line " + std::to_string(line_no) + ": empty section");
            }
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (section.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": entry outside any section");
        }
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

ConfigMap ConfigMap::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    return sit != sections_.end() && sit->second.count(key) > 0;
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    if (sit == sections_.end() || sit->second.count(key) == 0) {
        throw ConfigError("config: missing [" + section + "] " + key);
    }
    return sit->second.at(key);
}

double ConfigMap::get_double(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " is not a number: " + raw);
    }
}

std::int64_t ConfigMap::get_int(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " is not an integer: " + raw);
    }
}

std::uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " is not an unsigned integer: " +
                          raw);
    }
}

std::vector<double> ConfigMap::get_double_list(const std::string& section,
                                               const std::string& key) const {
    const std::string raw = get_string(section, key);
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: [" + section + "] " + key + " has a bad entry: " + item);
        }
    }
    if (out.empty()) {
        throw ConfigError("config: [" + section + "] " + key + " is an empty list");
    }
    return out;
}

std::vector<int> ConfigMap::get_int_list(const std::string& section,
                                         const std::string& key) const {
    std::vector<int> out;
    for (const double v : get_double_list(section, key)) {
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections_[section][key] = value;
}

void ConfigMap::set_default(const std::string& section, const std::string& key,
                            const std::string& value) {
    auto& sec = sections_[section];
    sec.emplace(key, value);
}

std::string ConfigMap::resolved_text() const {
    std::ostringstream out;
    for (const auto& [section, entries] : sections_) {
        out << '[' << section << "]\n";
        for (const auto& [key, value] : entries) {
            out << key << " = " << value << '\n';
        }
    }
    return out.str();
}

std::uint64_t ConfigMap::hash() const {
    const std::string text = resolved_text();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace funcint
