#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppwg {

// The three interacting fields of the type-II process. P is the pump near
// 400 nm; H and V are the orthogonally polarized down-converted fields near
// 800 nm (H parallel to the chip surface).
enum class Field { P, H, V };

const char* to_string(Field f);
Field field_from_string(const std::string& s);

// Transverse-mode label "ij".
//
// Coordinate convention used throughout: x is the narrow waveguide axis with
// a symmetric profile (first digit i counts nodes along x), y is the deep
// axis with the asymmetric, surface-bound index profile (second digit j
// counts nodes along y). Knife-edge scan directions map onto the same axes.
struct ModeIndex {
    int i = 0;
    int j = 0;

    std::string label() const;
    static ModeIndex from_label(const std::string& s);
    auto operator<=>(const ModeIndex&) const = default;
};

struct ModeTriplet {
    ModeIndex pump;
    ModeIndex h;
    ModeIndex v;

    std::string label() const;  // e.g. "01P->00H+02V"
    auto operator<=>(const ModeTriplet&) const = default;
};

// One axis of the bulk index model:
//   n^2(lam) = a + sum_k b_k/(lam^2 - c_k) + d*lam^2,   lam in um.
// Covers the usual one- and two-pole Sellmeier forms used for KTP.
struct SellmeierCoeffs {
    double a = 0.0;
    std::vector<std::pair<double, double>> poles;  // (b_k, c_k)
    double d = 0.0;
    double valid_min_um = 0.0;
    double valid_max_um = 0.0;
    std::string source;
};

/// Bulk refractive index at vacuum wavelength lambda_nm.
/// Throws RangeError outside the validity range, ValidationError if the
/// coefficient set yields n <= 1.
double sellmeier_index(const SellmeierCoeffs& c, double lambda_nm);

// Bulk dispersion per crystal axis plus the field -> axis assignment.
struct SellmeierModel {
    std::map<std::string, SellmeierCoeffs> axes;
    std::map<Field, std::string> field_axis;

    const SellmeierCoeffs& axis(const std::string& name) const;
    const SellmeierCoeffs& axis_for(Field f) const;
};

double bulk_index(const SellmeierModel& m, const std::string& axis, double lambda_nm);
double bulk_index(const SellmeierModel& m, Field f, double lambda_nm);

// Mode-dependent wavevector corrections Delta k (rad/m), frequency
// independent over the working range. Gauge: the fundamental 00 mode of
// every field carries zero correction; `offset` absorbs the remaining
// fundamental-band mismatch including poling-period uncertainty.
struct GeometricDispersionTable {
    std::map<std::pair<Field, ModeIndex>, double> delta_k;
    double offset_rad_per_m = 0.0;

    /// Correction for (field, mode). 00 defaults to 0 when absent; any other
    /// missing mode throws LookupError.
    double correction(Field f, ModeIndex m) const;
    bool gauge_fixed(double tol = 0.0) const;
};

struct DispersionModel {
    SellmeierModel sellmeier;
    GeometricDispersionTable table;
};

/// k^ij = 2*pi*n(lambda)/lambda + Delta k^ij, in rad/m.
double guided_wavevector(const DispersionModel& dm, Field f, ModeIndex mode,
                         double lambda_nm);

// Hermite-Gauss product basis, one waist pair per field. center_y_um shifts
// the whole basis of a field along the deep axis; distinct per-field centers
// are what break the even/odd selection rule in y, standing in for the
// exponential depth profile that cannot be captured by a symmetric basis.
struct HGFieldParams {
    double waist_x_um = 0.0;
    double waist_y_um = 0.0;
    double center_y_um = 0.0;
};

struct HGModeBasis {
    HGFieldParams p, h, v;

    const HGFieldParams& params(Field f) const;
};

/// Normalized 1-D Hermite-Gauss function of order n (unit L2 norm, waist w
/// at 1/e^2 intensity radius, centered at c).
double hermite_gauss_1d(int n, double t_um, double w_um, double c_um);

/// u_ij(x, y) = hg_i(x) * hg_j(y), unit L2 norm over the transverse plane.
double mode_function(const HGModeBasis& basis, Field f, ModeIndex mode,
                     double x_um, double y_um);

// Fixed tensor-grid quadrature for transverse overlap integrals. The grid
// spans extent_waists times the largest waist (plus the largest |center|)
// per axis; doubling `points` moves results by < 1e-6.
struct QuadratureSpec {
    int points = 256;
    double extent_waists = 4.0;
};

/// |integral u_P u_H u_V dx dy|^2 normalized so (00,00,00) -> 1.
double triplet_overlap_efficiency(const HGModeBasis& basis, const ModeTriplet& t,
                                  const QuadratureSpec& quad = {});

// Sampled 2-D intensity distribution, row-major over (x, y).
struct Grid2D {
    std::vector<double> x_um;
    std::vector<double> y_um;
    std::vector<double> value;  // size x.size()*y.size(), index ix*y.size()+iy

    double& at(std::size_t ix, std::size_t iy) { return value[ix * y_um.size() + iy]; }
    double at(std::size_t ix, std::size_t iy) const { return value[ix * y_um.size() + iy]; }
};

/// Overlap integral of two normalized intensity distributions assuming
/// constant phase: integral sqrt(Ia_hat * Ib_hat) dx dy, in [0, 1].
/// Throws DegenerateInputError when either grid integrates to zero,
/// ValidationError on mismatched geometry or negative values.
double intensity_overlap(const Grid2D& a, const Grid2D& b);

/// Sample |u_ij|^2 for one field on a regular grid (helper for exports and
/// the pump-overlap diagnostic).
Grid2D sample_mode_intensity(const HGModeBasis& basis, Field f, ModeIndex mode,
                             double half_extent_um, int points);

}  // namespace ppwg
