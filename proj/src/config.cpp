#include "vshift/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vshift/errors.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

std::string section_label(const ConfigSection& s) {
    return s.id.empty() ? "[" + s.kind + "]" : "[" + s.kind + " " + s.id + "]";
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(sep, start);
        if (end == std::string_view::npos) end = text.size();
        parts.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

}  // namespace

bool ConfigSection::has(std::string_view key) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const auto& e) { return e.first == key; });
}

std::string_view ConfigSection::value(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.first == key) return e.second;
    }
    throw ConfigError("missing key '" + std::string(key) + "' in section " +
                      section_label(*this));
}

const ConfigSection* ConfigDoc::find(std::string_view kind) const {
    for (const ConfigSection& s : sections) {
        if (s.kind == kind) return &s;
    }
    return nullptr;
}

std::vector<const ConfigSection*> ConfigDoc::all(std::string_view kind) const {
    std::vector<const ConfigSection*> out;
    for (const ConfigSection& s : sections) {
        if (s.kind == kind) out.push_back(&s);
    }
    return out;
}

ConfigDoc parse_config_text(std::string_view text) {
    ConfigDoc doc;
    ConfigSection* current = nullptr;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (std::size_t hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header at line " +
                                  format_u64(line_no));
            }
            std::string_view inner = trim(line.substr(1, line.size() - 2));
            if (inner.empty()) {
                throw ConfigError("empty section header at line " + format_u64(line_no));
            }
            ConfigSection section;
            if (std::size_t space = inner.find(' '); space != std::string_view::npos) {
                section.kind = std::string(trim(inner.substr(0, space)));
                section.id = std::string(trim(inner.substr(space + 1)));
            } else {
                section.kind = std::string(inner);
            }
            doc.sections.push_back(std::move(section));
            current = &doc.sections.back();
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value' at line " + format_u64(line_no));
        }
        if (current == nullptr) {
            throw ConfigError("key outside any section at line " + format_u64(line_no));
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("empty key at line " + format_u64(line_no));
        }
        if (current->has(key)) {
            throw ConfigError("duplicate key '" + key + "' in section " +
                              section_label(*current));
        }
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

ConfigDoc load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SectionReader::SectionReader(const ConfigSection& section)
    : section_(section), consumed_(section.entries.size(), false) {}

std::string_view SectionReader::require(std::string_view key) {
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
        if (section_.entries[i].first == key) {
            consumed_[i] = true;
            return section_.entries[i].second;
        }
    }
    throw ConfigError("missing key '" + std::string(key) + "' in section " +
                      section_label(section_));
}

bool SectionReader::has(std::string_view key) {
    return section_.has(key);
}

std::string SectionReader::get_string(std::string_view key) {
    return std::string(require(key));
}

std::string SectionReader::get_string_or(std::string_view key, std::string_view fallback) {
    return has(key) ? get_string(key) : std::string(fallback);
}

double SectionReader::get_double(std::string_view key) {
    try {
        return parse_double(require(key));
    } catch (const DomainError&) {
        throw ConfigError("key '" + std::string(key) + "' in section " +
                          section_label(section_) + " is not a number");
    }
}

double SectionReader::get_double_or(std::string_view key, double fallback) {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t SectionReader::get_u64(std::string_view key) {
    try {
        return parse_u64(require(key));
    } catch (const DomainError&) {
        throw ConfigError("key '" + std::string(key) + "' in section " +
                          section_label(section_) + " is not an unsigned integer");
    }
}

std::uint64_t SectionReader::get_u64_or(std::string_view key, std::uint64_t fallback) {
    return has(key) ? get_u64(key) : fallback;
}

std::size_t SectionReader::get_size(std::string_view key) {
    return static_cast<std::size_t>(get_u64(key));
}

std::size_t SectionReader::get_size_or(std::string_view key, std::size_t fallback) {
    return has(key) ? get_size(key) : fallback;
}

bool SectionReader::get_bool_or(std::string_view key, bool fallback) {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError("key '" + std::string(key) + "' in section " +
                      section_label(section_) + " is not a boolean");
}

std::vector<std::uint64_t> SectionReader::get_u64_list_or(
    std::string_view key, std::vector<std::uint64_t> fallback) {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    std::vector<std::uint64_t> out;
    for (std::string_view part : split(v, ',')) {
        part = trim(part);
        if (part.empty()) continue;
        try {
            out.push_back(parse_u64(part));
        } catch (const DomainError&) {
            throw ConfigError("key '" + std::string(key) + "' in section " +
                              section_label(section_) + " has a malformed list entry");
        }
    }
    if (out.empty()) {
        throw ConfigError("key '" + std::string(key) + "' in section " +
                          section_label(section_) + " lists no values");
    }
    return out;
}

std::vector<std::size_t> SectionReader::get_size_list_or(std::string_view key,
                                                         std::vector<std::size_t> fallback) {
    if (!has(key)) return fallback;
    std::vector<std::size_t> out;
    for (std::uint64_t v : get_u64_list_or(key, {})) {
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void SectionReader::finish() {
    for (std::size_t i = 0; i < consumed_.size(); ++i) {
        if (!consumed_[i]) {
            throw ConfigError("unknown key '" + section_.entries[i].first +
                              "' in section " + section_label(section_));
        }
    }
}

}  // namespace vshift
