#include "ppwg/ini.hpp"

#include <charconv>
#include <format>
#include <fstream>
#include <sstream>

#include "ppwg/errors.hpp"

namespace ppwg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_inline_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"') quoted = !quoted;
        if (s[k] == '#' && !quoted) return s.substr(0, k);
    }
    return s;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

IniFile IniFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    IniFile f = from_string(ss.str(), path.string());
    f.path_ = path;
    return f;
}

IniFile IniFile::from_string(const std::string& text, const std::string& origin) {
    IniFile f;
    f.path_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(strip_inline_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(std::format("{}:{}: unterminated section header",
                                             origin, line_no));
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ParseError(std::format("{}:{}: empty section name", origin,
                                             line_no));
            f.data_[section];  // sections may be empty
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(std::format("{}:{}: expected 'key = value'", origin,
                                         line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = unquote(trim(t.substr(eq + 1)));
        if (key.empty())
            throw ParseError(std::format("{}:{}: empty key", origin, line_no));
        if (section.empty())
            throw ParseError(std::format("{}:{}: key outside any [section]", origin,
                                         line_no));
        auto& entries = f.data_[section];
        for (const auto& [k, v] : entries)
            if (k == key)
                throw ParseError(std::format("{}:{}: duplicate key '{}' in [{}]",
                                             origin, line_no, key, section));
        entries.emplace_back(key, value);
    }
    return f;
}

bool IniFile::has_section(const std::string& section) const {
    return data_.contains(section);
}

bool IniFile::has_key(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::vector<std::string> IniFile::sections() const {
    std::vector<std::string> out;
    for (const auto& [s, _] : data_) out.push_back(s);
    return out;
}

std::vector<std::string> IniFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto it = data_.find(section);
    if (it == data_.end()) return out;
    for (const auto& [k, _] : it->second) out.push_back(k);
    return out;
}

const std::string* IniFile::find(const std::string& section,
                                 const std::string& key) const {
    const auto it = data_.find(section);
    if (it == data_.end()) return nullptr;
    for (const auto& [k, v] : it->second)
        if (k == key) return &v;
    return nullptr;
}

std::string IniFile::get_string(const std::string& section,
                                const std::string& key) const {
    const std::string* v = find(section, key);
    if (!v)
        throw ValidationError(std::format("{}: missing key '{}' in section [{}]",
                                          path_.string(), key, section));
    return *v;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string s = get_string(section, key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(std::format("{}: key '{}' in [{}]: '{}' is not a number",
                                     path_.string(), key, section, s));
    return v;
}

long IniFile::get_int(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
        throw ParseError(std::format("{}: key '{}' in [{}] must be an integer",
                                     path_.string(), key, section));
    return n;
}

std::string IniFile::get_string_or(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has_key(section, key) ? get_double(section, key) : fallback;
}

long IniFile::get_int_or(const std::string& section, const std::string& key,
                         long fallback) const {
    return has_key(section, key) ? get_int(section, key) : fallback;
}

std::vector<std::string> IniFile::get_list(const std::string& section,
                                           const std::string& key) const {
    const std::string s = get_string(section, key);
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace ppwg
