#include "ppwg/manifest.hpp"

#include <format>
#include <fstream>
#include <sstream>

#include "ppwg/errors.hpp"

namespace ppwg {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string() + " for hashing");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

RunManifest::RunManifest(std::string command, const std::filesystem::path& config_path)
    : command_(std::move(command)) {
    entries_.emplace_back("tool_version", kToolVersion);
    entries_.emplace_back("config", config_path.filename().string());
    entries_.emplace_back("config_fnv64",
                          std::format("{:016x}", fnv1a64_file(config_path)));
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {
    entries_.emplace_back("tool_version", kToolVersion);
}

void RunManifest::add_input(const std::filesystem::path& path) {
    entries_.emplace_back("input " + path.filename().string(),
                          std::format("{:016x}", fnv1a64_file(path)));
}

void RunManifest::add_output(const std::filesystem::path& path) {
    entries_.emplace_back("output " + path.filename().string(),
                          std::format("{:016x}", fnv1a64_file(path)));
}

void RunManifest::add_note(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

std::string RunManifest::to_string() const {
    std::string out = "command = " + command_ + "\n";
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_string();
}

}  // namespace ppwg
