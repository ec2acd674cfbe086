#include "ppwg/modes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <format>
#include <numbers>

#include "ppwg/errors.hpp"
#include "ppwg/numeric.hpp"

namespace ppwg {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* to_string(Field f) {
    switch (f) {
        case Field::P: return "P";
        case Field::H: return "H";
        case Field::V: return "V";
    }
    return "?";
}

Field field_from_string(const std::string& s) {
    if (s == "P" || s == "p") return Field::P;
    if (s == "H" || s == "h") return Field::H;
    if (s == "V" || s == "v") return Field::V;
    throw ParseError("unknown field label '" + s + "' (expected P, H or V)");
}

std::string ModeIndex::label() const {
    return std::to_string(i) + std::to_string(j);
}

ModeIndex ModeIndex::from_label(const std::string& s) {
    if (s.size() != 2 || !std::isdigit(static_cast<unsigned char>(s[0])) ||
        !std::isdigit(static_cast<unsigned char>(s[1]))) {
        throw ParseError("mode label '" + s + "' is not two digits");
    }
    return ModeIndex{s[0] - '0', s[1] - '0'};
}

std::string ModeTriplet::label() const {
    return pump.label() + "P->" + h.label() + "H+" + v.label() + "V";
}

double sellmeier_index(const SellmeierCoeffs& c, double lambda_nm) {
    const double lam = lambda_nm * 1e-3;  // um
    if (!(lam >= c.valid_min_um && lam <= c.valid_max_um)) {
        throw RangeError(std::format(
            "wavelength {:.6g} nm outside Sellmeier validity range [{:.6g}, {:.6g}] um",
            lambda_nm, c.valid_min_um, c.valid_max_um));
    }
    const double lam2 = lam * lam;
    double n2 = c.a + c.d * lam2;
    for (const auto& [b, cpole] : c.poles) n2 += b / (lam2 - cpole);
    if (!(n2 > 1.0)) {
        throw ValidationError(std::format(
            "Sellmeier set '{}' gives n^2 = {:.6g} <= 1 at {:.6g} nm", c.source, n2,
            lambda_nm));
    }
    return std::sqrt(n2);
}

const SellmeierCoeffs& SellmeierModel::axis(const std::string& name) const {
    auto it = axes.find(name);
    if (it == axes.end()) throw LookupError("no Sellmeier axis '" + name + "'");
    return it->second;
}

const SellmeierCoeffs& SellmeierModel::axis_for(Field f) const {
    auto it = field_axis.find(f);
    if (it == field_axis.end())
        throw LookupError(std::string("field ") + to_string(f) + " has no axis assignment");
    return axis(it->second);
}

double bulk_index(const SellmeierModel& m, const std::string& axis, double lambda_nm) {
    return sellmeier_index(m.axis(axis), lambda_nm);
}

double bulk_index(const SellmeierModel& m, Field f, double lambda_nm) {
    return sellmeier_index(m.axis_for(f), lambda_nm);
}

double GeometricDispersionTable::correction(Field f, ModeIndex m) const {
    auto it = delta_k.find({f, m});
    if (it != delta_k.end()) return it->second;
    if (m == ModeIndex{0, 0}) return 0.0;  // gauge
    throw LookupError(std::string("no dispersion entry for mode ") + m.label() +
                      " of field " + to_string(f));
}

bool GeometricDispersionTable::gauge_fixed(double tol) const {
    for (const auto& [key, dk] : delta_k) {
        if (key.second == ModeIndex{0, 0} && std::abs(dk) > tol) return false;
        if (!std::isfinite(dk)) return false;
    }
    return std::isfinite(offset_rad_per_m);
}

double guided_wavevector(const DispersionModel& dm, Field f, ModeIndex mode,
                         double lambda_nm) {
    const double n = bulk_index(dm.sellmeier, f, lambda_nm);
    return 2.0 * kPi * n / (lambda_nm * 1e-9) + dm.table.correction(f, mode);
}

const HGFieldParams& HGModeBasis::params(Field f) const {
    switch (f) {
        case Field::P: return p;
        case Field::H: return h;
        case Field::V: return v;
    }
    throw LookupError("bad field");
}

double hermite_gauss_1d(int n, double t_um, double w_um, double c_um) {
    // (2/pi)^(1/4) / sqrt(w 2^n n!) H_n(sqrt(2) u / w) exp(-u^2/w^2), u = t - c
    const double u = t_um - c_um;
    const double xi = std::numbers::sqrt2 * u / w_um;
    // recurrence H_{k+1} = 2 xi H_k - 2 k H_{k-1}
    double hkm1 = 0.0, hk = 1.0;
    for (int k = 0; k < n; ++k) {
        const double hkp1 = 2.0 * xi * hk - 2.0 * k * hkm1;
        hkm1 = hk;
        hk = hkp1;
    }
    double norm = std::pow(2.0 / kPi, 0.25) / std::sqrt(w_um);
    for (int k = 1; k <= n; ++k) norm /= std::sqrt(2.0 * k);
    return norm * hk * std::exp(-u * u / (w_um * w_um));
}

double mode_function(const HGModeBasis& basis, Field f, ModeIndex mode, double x_um,
                     double y_um) {
    const HGFieldParams& par = basis.params(f);
    if (!(par.waist_x_um > 0.0 && par.waist_y_um > 0.0))
        throw ValidationError("mode basis waists must be positive");
    return hermite_gauss_1d(mode.i, x_um, par.waist_x_um, 0.0) *
           hermite_gauss_1d(mode.j, y_um, par.waist_y_um, par.center_y_um);
}

namespace {

struct QuadGrid {
    std::vector<double> t;
    double dt;
};

QuadGrid quad_axis(double extent, int points) {
    QuadGrid g;
    g.t.resize(points);
    g.dt = 2.0 * extent / (points - 1);
    for (int k = 0; k < points; ++k) g.t[k] = -extent + k * g.dt;
    return g;
}

// 1-D triple product integral of HG functions for the three fields.
double triple_overlap_1d(int nP, double wP, double cP, int nH, double wH, double cH,
                         int nV, double wV, double cV, double extent, int points) {
    const QuadGrid g = quad_axis(extent, points);
    KahanSum s;
    for (double t : g.t) {
        s.add(hermite_gauss_1d(nP, t, wP, cP) * hermite_gauss_1d(nH, t, wH, cH) *
              hermite_gauss_1d(nV, t, wV, cV));
    }
    return s.value() * g.dt;
}

}  // namespace

double triplet_overlap_efficiency(const HGModeBasis& basis, const ModeTriplet& t,
                                  const QuadratureSpec& quad) {
    const auto& p = basis.p;
    const auto& h = basis.h;
    const auto& v = basis.v;
    for (const auto* f : {&p, &h, &v}) {
        if (!(f->waist_x_um > 0.0 && f->waist_y_um > 0.0))
            throw ValidationError("mode basis waists must be positive");
    }
    const double wx = std::max({p.waist_x_um, h.waist_x_um, v.waist_x_um});
    const double wy = std::max({p.waist_y_um, h.waist_y_um, v.waist_y_um});
    const double cy = std::max({std::abs(p.center_y_um), std::abs(h.center_y_um),
                                std::abs(v.center_y_um)});
    const double ex = quad.extent_waists * wx;
    const double ey = quad.extent_waists * wy + cy;

    // HG products are separable, so the 2-D tensor quadrature factorizes.
    const double ax = triple_overlap_1d(t.pump.i, p.waist_x_um, 0.0, t.h.i, h.waist_x_um,
                                        0.0, t.v.i, v.waist_x_um, 0.0, ex, quad.points);
    const double ay = triple_overlap_1d(t.pump.j, p.waist_y_um, p.center_y_um, t.h.j,
                                        h.waist_y_um, h.center_y_um, t.v.j, v.waist_y_um,
                                        v.center_y_um, ey, quad.points);
    const double rx = triple_overlap_1d(0, p.waist_x_um, 0.0, 0, h.waist_x_um, 0.0, 0,
                                        v.waist_x_um, 0.0, ex, quad.points);
    const double ry = triple_overlap_1d(0, p.waist_y_um, p.center_y_um, 0, h.waist_y_um,
                                        h.center_y_um, 0, v.waist_y_um, v.center_y_um,
                                        ey, quad.points);
    const double amp = (ax * ay) / (rx * ry);
    return amp * amp;
}

namespace {

// Trapezoid weights for a monotone axis.
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    const std::size_t n = t.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) throw ValidationError("intensity grid axis needs at least 2 samples");
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = t[k + 1] - t[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

double intensity_overlap(const Grid2D& a, const Grid2D& b) {
    if (a.x_um != b.x_um || a.y_um != b.y_um)
        throw ValidationError("intensity grids have different geometry");
    if (a.value.size() != a.x_um.size() * a.y_um.size() ||
        b.value.size() != b.x_um.size() * b.y_um.size())
        throw ValidationError("intensity grid size does not match its axes");
    for (double v : a.value)
        if (!(v >= 0.0)) throw ValidationError("intensity grid has negative values");
    for (double v : b.value)
        if (!(v >= 0.0)) throw ValidationError("intensity grid has negative values");

    const auto wx = trapezoid_weights(a.x_um);
    const auto wy = trapezoid_weights(a.y_um);
    KahanSum ia, ib;
    for (std::size_t ix = 0; ix < a.x_um.size(); ++ix)
        for (std::size_t iy = 0; iy < a.y_um.size(); ++iy) {
            ia.add(a.at(ix, iy) * wx[ix] * wy[iy]);
            ib.add(b.at(ix, iy) * wx[ix] * wy[iy]);
        }
    if (!(ia.value() > 0.0) || !(ib.value() > 0.0))
        throw DegenerateInputError("intensity grid integrates to zero");

    KahanSum s;
    const double norm = 1.0 / std::sqrt(ia.value() * ib.value());
    for (std::size_t ix = 0; ix < a.x_um.size(); ++ix)
        for (std::size_t iy = 0; iy < a.y_um.size(); ++iy)
            s.add(std::sqrt(a.at(ix, iy) * b.at(ix, iy)) * wx[ix] * wy[iy]);
    return std::min(1.0, s.value() * norm);
}

Grid2D sample_mode_intensity(const HGModeBasis& basis, Field f, ModeIndex mode,
                             double half_extent_um, int points) {
    Grid2D g;
    g.x_um.resize(points);
    g.y_um.resize(points);
    const double dt = 2.0 * half_extent_um / (points - 1);
    for (int k = 0; k < points; ++k) {
        g.x_um[k] = -half_extent_um + k * dt;
        g.y_um[k] = -half_extent_um + k * dt;
    }
    g.value.resize(static_cast<std::size_t>(points) * points);
    for (int ix = 0; ix < points; ++ix)
        for (int iy = 0; iy < points; ++iy) {
            const double u = mode_function(basis, f, mode, g.x_um[ix], g.y_um[iy]);
            g.at(ix, iy) = u * u;
        }
    return g;
}

}  // namespace ppwg
