#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vshift {

/// One `[kind]` or `[kind id]` section of a flat key-value config file.
struct ConfigSection {
    std::string kind;
    std::string id;  // empty for singleton sections
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(std::string_view key) const;
    std::string_view value(std::string_view key) const;
};

struct ConfigDoc {
    std::vector<ConfigSection> sections;

    const ConfigSection* find(std::string_view kind) const;
    std::vector<const ConfigSection*> all(std::string_view kind) const;
};

/// Parses `key = value` lines grouped under `[section]` headers. `#` and `;`
/// start comments. Duplicate keys within a section are rejected; unknown
/// keys are the consumer's job (see SectionReader).
ConfigDoc parse_config_text(std::string_view text);

ConfigDoc load_config_file(const std::string& path);

/// Typed accessor that records which keys were consumed so that leftovers
/// can be rejected as unknown. Every section must end with finish().
class SectionReader {
public:
    explicit SectionReader(const ConfigSection& section);

    bool has(std::string_view key);
    std::string get_string(std::string_view key);
    std::string get_string_or(std::string_view key, std::string_view fallback);
    double get_double(std::string_view key);
    double get_double_or(std::string_view key, double fallback);
    std::uint64_t get_u64(std::string_view key);
    std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback);
    std::size_t get_size(std::string_view key);
    std::size_t get_size_or(std::string_view key, std::size_t fallback);
    bool get_bool_or(std::string_view key, bool fallback);
    std::vector<std::uint64_t> get_u64_list_or(std::string_view key,
                                               std::vector<std::uint64_t> fallback);
    std::vector<std::size_t> get_size_list_or(std::string_view key,
                                              std::vector<std::size_t> fallback);

    /// Throws ConfigError if any key of the section was never consumed.
    void finish();

private:
    std::string_view require(std::string_view key);
    const ConfigSection& section_;
    std::vector<bool> consumed_;
};

}  // namespace vshift
