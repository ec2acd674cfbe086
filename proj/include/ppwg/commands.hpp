#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppwg/config.hpp"

namespace ppwg {

// Command implementations behind the CLI. Each writes its artifacts plus a
// manifest.txt into out_dir and throws on failure (the CLI maps exception
// categories onto exit codes).

struct CommonOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // overrides config seeds
};

void cmd_calibrate(const CommonOptions& opt, const std::filesystem::path& sfg_csv);

struct BandsOptions {
    std::filesystem::path table_path;  // output of calibrate
    bool pump_00_only = false;
    std::optional<int> points;  // grid override for exports
};
void cmd_bands(const CommonOptions& opt, const BandsOptions& bands);

struct JsaOptions {
    std::filesystem::path table_path;
    std::optional<int> points;
};
void cmd_jsa(const CommonOptions& opt, const JsaOptions& jsa);

struct KnifeSynthOptions {
    std::optional<std::vector<double>> order_weights;  // overrides config
    ScanDirection direction = ScanDirection::vertical;
};
void cmd_knife_synth(const CommonOptions& opt, const KnifeSynthOptions& synth);

void cmd_knife_fit(const CommonOptions& opt, const std::filesystem::path& scan_csv);

void cmd_knife_m2(const CommonOptions& opt, const std::filesystem::path& scan_csv);

void cmd_bell_simulate(const CommonOptions& opt);

struct BellAnalysisOptions {
    std::vector<std::filesystem::path> record_files;
    bool apply_corrections = true;
};
void cmd_bell_visibility(const CommonOptions& opt, const BellAnalysisOptions& bell);
void cmd_bell_chsh(const CommonOptions& opt, const BellAnalysisOptions& bell);

}  // namespace ppwg
