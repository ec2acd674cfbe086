#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ppwg {

enum class ScanDirection { horizontal, vertical };

const char* to_string(ScanDirection d);
ScanDirection scan_direction_from_string(const std::string& s);

// One knife-edge sample: photon counts accumulated over `duration_s` with the
// edge at transverse position x in plane z.
struct ScanPoint {
    double z_mm = 0.0;
    double x_um = 0.0;
    double counts = 0.0;
    double duration_s = 1.0;
    ScanDirection direction = ScanDirection::vertical;
};

using KnifeEdgeScan = std::vector<ScanPoint>;

/// Transmitted power fraction past a knife at position x for a Gaussian beam
/// of half-width w (1/e^2) centered at x0: erfc(sqrt(2) (x - x0)/w) / 2.
double knife_transmission(double w_um, double x0_um, double x_um);

struct EdgeFit {
    double w_um = 0.0;
    double x0_um = 0.0;
    double amplitude = 0.0;   // counts at full transmission above background
    double background = 0.0;  // counts at full blockage
    double r_squared = 0.0;
    double sigma_w_um = 0.0;
    double sigma_x0_um = 0.0;
    int orientation = -1;  // -1: counts fall with x, +1: counts rise with x
    int iterations = 0;
};

/// Damped least-squares fit of {amplitude, background, x0, w} to the points
/// of a single plane. Throws ValidationError when the scan does not span
/// both asymptotes, NumericalError on non-convergence.
EdgeFit fit_edge_scan(std::span<const ScanPoint> plane);

struct CausticPoint {
    double z_mm = 0.0;
    double w_um = 0.0;
    double sigma_w_um = 0.0;  // 0 -> uniform weighting
};

struct M2Fit {
    double w0_um = 0.0;
    double z0_mm = 0.0;
    double m2 = 0.0;
    double sigma_m2 = 0.0;
    double lambda_nm = 0.0;
    double z_r_mm = 0.0;  // pi w0^2 / (M^2 lambda)
};

/// Weighted linear least squares of w^2(z) = a + b z + c z^2, with the
/// caustic parameters recovered from the parabola coefficients. Throws
/// ValidationError for fewer than 5 planes and NumericalError for
/// non-physical fits (c <= 0 or b^2 - 4ac >= 0).
M2Fit fit_caustic(std::span<const CausticPoint> widths, double lambda_nm);

struct IsoSamplingCheck {
    bool pass = false;
    int inner = 0;  // planes with |z - z0| <= z_R
    int outer = 0;  // planes with |z - z0| >= 2 z_R
    std::string diagnostic;
};

/// ISO-style plan check: at least 5 planes inside one Rayleigh range and at
/// least 5 beyond twice the Rayleigh range.
IsoSamplingCheck iso_sampling_check(std::span<const double> z_mm, const M2Fit& fit);

/// M^2 of an incoherent mixture of 1-D Hermite-Gauss modes sharing one waist:
/// sum_n p_n (2n + 1). Weights must be nonnegative and sum to 1 (1e-6).
double predict_m2(std::span<const double> order_weights);

// Beam model for scan synthesis: an incoherent mixture of 1-D HG modes of a
// common fundamental waist w0 focused at z0. Counts are Poisson with mean
// rate peak_rate * transmitted-fraction + background_rate.
struct BeamModel {
    std::vector<double> order_weights;
    double waist_um = 100.0;
    double lambda_nm = 800.0;
    double z0_mm = 0.0;
    double peak_rate_hz = 1.0e4;
    double background_rate_hz = 0.0;
};

struct ScanPlan {
    std::vector<double> z_mm;
    std::vector<double> x_um;
    double duration_s = 1.0;
    ScanDirection direction = ScanDirection::vertical;
};

/// Deterministic scan synthesis. With `poisson_noise` the counts are Poisson
/// samples from the per-point mean, reproducible for a fixed seed; without
/// it the exact means are returned.
KnifeEdgeScan synth_scan(const BeamModel& beam, const ScanPlan& plan,
                         std::uint64_t seed, bool poisson_noise = true);

/// Group a scan by plane, fit every plane, and return caustic points sorted
/// by z (planes of the requested direction only).
std::vector<CausticPoint> fit_all_planes(const KnifeEdgeScan& scan,
                                         ScanDirection direction,
                                         std::vector<EdgeFit>* fits = nullptr);

}  // namespace ppwg
