#include "eakd/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>

namespace eakd::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

} // namespace

bool FlatConfig::has(const std::string& key) const {
    for (const auto& [k, v] : items_) {
        if (k == key) return true;
    }
    return false;
}

const std::string& FlatConfig::get(const std::string& key) const {
    for (const auto& [k, v] : items_) {
        if (k == key) return v;
    }
    throw ConfigError("missing config key '" + key + "'");
}

void FlatConfig::set(const std::string& key, std::string value) {
    for (auto& [k, v] : items_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    items_.emplace_back(key, std::move(value));
}

long FlatConfig::get_int(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0') {
        throw ConfigError("config key '" + key + "' is not an integer: '" + s + "'");
    }
    return v;
}

std::uint64_t FlatConfig::get_u64(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0' || s.find('-') != std::string::npos) {
        throw ConfigError("config key '" + key + "' is not an unsigned integer: '" + s + "'");
    }
    return v;
}

double FlatConfig::get_double(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0') {
        throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
    }
    return v;
}

bool FlatConfig::get_bool(const std::string& key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: '" + s + "'");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& s, Parse parse) {
    std::vector<T> out;
    if (trim(s).empty()) return out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string item = trim(s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        char* end = nullptr;
        errno = 0;
        const T v = parse(item.c_str(), &end);
        if (errno != 0 || end == item.c_str() || *end != '\0') {
            throw ConfigError("config key '" + key + "' has a bad list item: '" + item + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

std::vector<long> FlatConfig::get_int_list(const std::string& key) const {
    return parse_list<long>(key, get(key), [](const char* p, char** end) { return std::strtol(p, end, 10); });
}

std::vector<double> FlatConfig::get_double_list(const std::string& key) const {
    return parse_list<double>(key, get(key), [](const char* p, char** end) { return std::strtod(p, end); });
}

std::string FlatConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : items_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

FlatConfig parse_string(const std::string& text, const std::string& origin) {
    FlatConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        ++line_no;
        const std::string t = trim(line);
        if (!t.empty() && t[0] != '#') {
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ": line " + std::to_string(line_no) + " is not 'key = value'");
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(origin + ": empty key at line " + std::to_string(line_no));
            }
            if (cfg.has(key)) {
                throw ConfigError(origin + ": duplicate key '" + key + "' at line " + std::to_string(line_no));
            }
            cfg.set(key, value);
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return cfg;
}

FlatConfig parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_string(text, path);
}

void write_file(const FlatConfig& cfg, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << cfg.serialize();
    if (!f) throw IoError("failed writing: " + path);
}

} // namespace eakd::config
