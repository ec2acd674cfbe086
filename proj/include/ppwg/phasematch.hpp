#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppwg/modes.hpp"

namespace ppwg {

struct QpmGrating {
    double poling_period_um = 7.5;
    int qpm_order = 1;
    double length_mm = 1.0;
};

struct SfgObservation {
    double lambda_deg_nm = 0.0;  // frequency-degenerate wavelength of H and V
    ModeTriplet triplet;
    std::optional<double> rel_eff_pct;
};

/// Signed quasi-phase-matched wavevector mismatch (rad/m) for one triplet,
/// with the pump wavelength fixed by energy conservation:
///   k_P(lamP) - k_H(lamH) - k_V(lamV) - 2*pi*n/Lambda - offset.
double mismatch(const DispersionModel& dm, const QpmGrating& g, const ModeTriplet& t,
                double lambda_h_nm, double lambda_v_nm);

/// sinc(L * dbeta / 2); even in dbeta, in [-0.21723..., 1].
double pm_amplitude(double dbeta_rad_per_m, double length_mm);

struct RootSearch {
    double window_min_nm = 780.0;
    double window_max_nm = 830.0;
    double prescan_step_nm = 0.05;
    double bisect_tol_nm = 1e-4;
};

/// Wavelength at which the triplet is frequency-degenerately phase matched
/// (mismatch(l, l) = 0), found by bracketing plus bisection. Throws
/// NotPhaseMatchedError when no sign change exists in the window.
double degenerate_pm_wavelength(const DispersionModel& dm, const QpmGrating& g,
                                const ModeTriplet& t, const RootSearch& search = {});

/// |lambda_deg(t1) - lambda_deg(t2)| in nm.
double band_separation(const DispersionModel& dm, const QpmGrating& g,
                       const ModeTriplet& t1, const ModeTriplet& t2,
                       const RootSearch& search = {});

struct CalibrationOptions {
    // Rank-deficient observation sets (parameter combinations that no
    // observation constrains) are solved in the minimum-norm sense by
    // default and the unresolved combinations are reported. With
    // require_full_rank the same condition throws UnderdeterminedError.
    bool require_full_rank = false;
    double rank_tolerance = 1e-10;  // relative to the largest singular value
};

struct CalibrationRow {
    SfgObservation obs;
    double residual_rad_per_m = 0.0;  // fitted-model mismatch at the observed wavelength
    double residual_nm = 0.0;         // the same, divided by d(mismatch)/d(lambda)
};

struct CalibrationResult {
    GeometricDispersionTable table;
    std::vector<CalibrationRow> rows;
    double rms_rad_per_m = 0.0;
    double rms_nm = 0.0;
    int rank = 0;
    int unknowns = 0;
    std::vector<std::string> unresolved;  // null-space combinations, human readable
};

/// Linear least-squares fit of {Delta k^(ij != 00), offset} to degenerate SFG
/// observations. Each observation contributes one linear equation; the bulk
/// mismatch at the measured wavelength enters as a known constant. Unknowns
/// are taken from the modes present in the observation list.
CalibrationResult calibrate(std::span<const SfgObservation> observations,
                            const DispersionModel& dm_initial,
                            const QpmGrating& grating,
                            const CalibrationOptions& options = {});

// Square (lambda_h x lambda_v) evaluation grid. Samples are uniform in
// frequency; axis labels are vacuum wavelengths in nm, ascending.
struct GridSpec {
    double lambda_min_nm = 790.0;
    double lambda_max_nm = 820.0;
    int points = 512;

    std::vector<double> wavelengths() const;
};

struct BandLayer {
    ModeTriplet triplet;
    std::vector<double> value;  // row-major, index ih*points + iv, in [0, 1]
};

struct BandMap {
    GridSpec spec;
    std::vector<double> lambda_h_nm;
    std::vector<double> lambda_v_nm;
    std::vector<BandLayer> layers;
};

/// |pm_amplitude|^2 over the grid, one layer per triplet.
BandMap band_map(const DispersionModel& dm, const QpmGrating& g,
                 std::span<const ModeTriplet> triplets, const GridSpec& spec);

}  // namespace ppwg
