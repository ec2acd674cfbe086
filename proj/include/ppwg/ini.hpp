#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppwg {

// Minimal strict INI: [section] headers, key = value pairs, '#' comments.
// Values keep everything after '=' (trimmed); optional double quotes are
// stripped. Duplicate keys within a section are an error.
class IniFile {
  public:
    static IniFile load(const std::filesystem::path& path);
    static IniFile from_string(const std::string& text, const std::string& origin);

    bool has_section(const std::string& section) const;
    bool has_key(const std::string& section, const std::string& key) const;

    std::vector<std::string> sections() const;
    std::vector<std::string> keys(const std::string& section) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key) const;

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    long get_int_or(const std::string& section, const std::string& key,
                    long fallback) const;

    /// Comma-separated list value.
    std::vector<std::string> get_list(const std::string& section,
                                      const std::string& key) const;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    // section -> ordered (key, value)
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> data_;

    const std::string* find(const std::string& section, const std::string& key) const;
};

}  // namespace ppwg
