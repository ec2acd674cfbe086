#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppwg/beamquality.hpp"
#include "ppwg/modes.hpp"
#include "ppwg/phasematch.hpp"
#include "ppwg/polarization.hpp"
#include "ppwg/spectra.hpp"

namespace ppwg {

// Everything a command needs, loaded from one self-describing key-value file
// (units spelled out in key names, unknown keys rejected, referenced files
// checked for existence).
struct ProjectConfig {
    std::filesystem::path config_path;
    std::filesystem::path sellmeier_path;

    SellmeierModel sellmeier;
    QpmGrating grating;
    HGModeBasis basis;
    QuadratureSpec quadrature;
    RootSearch search;

    std::vector<ModeIndex> pump_modes, h_modes, v_modes;
    std::map<ModeIndex, double> pump_occupancy;  // power fractions, sum 1

    PumpEnvelope pump;
    SpectralFilter herald;
    GridSpec grid_bands;
    GridSpec grid_jsa;

    // [bell]
    std::optional<double> pulse_rate_hz;  // required only when corrections run
    NoiseParams bell_noise;
    double bell_pairs_per_setting = 2.0e5;
    double bell_scan_peak_counts = 2000.0;
    double bell_singles_hz = 1.0e4;
    double bell_power_mw = 250.0;
    double drift_exponent = 1.0;
    std::uint64_t bell_seed = 1;

    // [knife]
    std::vector<double> knife_order_weights = {1.0};
    double knife_waist_um = 100.0;
    double knife_lambda_nm = 800.0;
    double knife_z0_mm = 0.0;
    double knife_peak_rate_hz = 1.0e4;
    double knife_background_hz = 0.0;
    double knife_duration_s = 1.0;
    std::vector<double> knife_z_planes_mm;
    int knife_x_points = 25;
    double knife_span_factor = 3.0;
    std::uint64_t knife_seed = 1;

    /// All pump x H x V mode combinations of the configured universe.
    std::vector<ModeTriplet> triplet_universe() const;

    /// Layer weights for the joint spectrum: overlap efficiency times the
    /// pump-mode occupancy (triplets of unoccupied pump modes are dropped).
    std::vector<TripletWeight> jsa_weights() const;

    /// Dispersion model with an empty (uncalibrated) correction table.
    DispersionModel dispersion_base() const;
};

ProjectConfig load_project_config(const std::filesystem::path& path);

// Fitted-table artifact produced by `calibrate` and consumed by the band and
// spectrum commands.
void write_dispersion_table(const std::filesystem::path& path,
                            const CalibrationResult& result);
GeometricDispersionTable read_dispersion_table(const std::filesystem::path& path);

}  // namespace ppwg
