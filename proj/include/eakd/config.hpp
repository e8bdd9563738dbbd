#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eakd/errors.hpp"

namespace eakd::config {

// Flat "key = value" text config. Values stay strings until a typed accessor
// parses them; writing preserves insertion order, so a file round-trips byte
// for byte once keys are in canonical order.
class FlatConfig {
public:
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // throws ConfigError if absent
    void set(const std::string& key, std::string value);   // replaces or appends

    long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;  // true/false
    std::vector<long> get_int_list(const std::string& key) const;     // comma list, may be empty
    std::vector<double> get_double_list(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

    std::string serialize() const;

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

// Parser accepts blank lines and '#' comments; errors carry the line number.
FlatConfig parse_string(const std::string& text, const std::string& origin);
FlatConfig parse_file(const std::string& path);
void write_file(const FlatConfig& cfg, const std::string& path);

} // namespace eakd::config
