#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ppwg {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// FNV-1a 64-bit over a file's contents. Throws Error when unreadable.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Record of one command run. Contains no clock values: a rerun with the same
// command, config and inputs must produce a byte-identical manifest, which is
// what makes output determinism checkable from the outside.
class RunManifest {
  public:
    RunManifest(std::string command, const std::filesystem::path& config_path);
    explicit RunManifest(std::string command);

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void add_note(const std::string& key, const std::string& value);

    /// Serialize and write to `path` (conventionally <out-dir>/manifest.txt).
    void write(const std::filesystem::path& path) const;
    std::string to_string() const;

  private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace ppwg
