#include "ppwg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppwg/errors.hpp"
#include "ppwg/numeric.hpp"

namespace ppwg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kLn2x4 = 4.0 * std::numbers::ln2;
}  // namespace

double pump_amplitude(const PumpEnvelope& pump, double nu_sum_per_nm) {
    if (!(pump.fwhm_nm > 0.0)) throw ValidationError("pump FWHM must be positive");
    if (!(nu_sum_per_nm > 0.0)) throw ValidationError("frequency sum must be positive");
    const double nu0 = 1.0 / pump.center_nm;
    const double dnu = pump.fwhm_nm / (pump.center_nm * pump.center_nm);
    const double u = (nu_sum_per_nm - nu0) / dnu;
    // |amplitude|^2 drops to 1/2 at half the intensity FWHM.
    return std::exp(-0.5 * kLn2x4 * u * u);
}

const char* to_string(Arm a) { return a == Arm::H ? "H" : "V"; }

Arm arm_from_string(const std::string& s) {
    if (s == "H" || s == "h") return Arm::H;
    if (s == "V" || s == "v") return Arm::V;
    throw ParseError("unknown arm '" + s + "' (expected H or V)");
}

double filter_transmission(const SpectralFilter& f, double lambda_nm) {
    if (!(f.fwhm_nm > 0.0)) throw ValidationError("filter FWHM must be positive");
    if (f.shape == SpectralFilter::Shape::rectangular)
        return std::abs(lambda_nm - f.center_nm) <= 0.5 * f.fwhm_nm ? 1.0 : 0.0;
    const double u = (lambda_nm - f.center_nm) / f.fwhm_nm;
    return std::exp(-kLn2x4 * u * u);
}

double JointSpectrum::layer_integral(std::size_t layer) const {
    const std::size_t n = lambda_h_nm.size();
    KahanSum s;
    for (std::size_t ih = 0; ih < n; ++ih) {
        const double wh = (ih == 0 || ih + 1 == n) ? 0.5 : 1.0;
        for (std::size_t iv = 0; iv < n; ++iv) {
            const double wv = (iv == 0 || iv + 1 == n) ? 0.5 : 1.0;
            s.add(wh * wv * value(layer, ih, iv));
        }
    }
    // Uniform frequency spacing; the constant cell area cancels in every
    // normalized quantity but is kept for dimensional sanity.
    const double dnu = (1.0 / spec.lambda_min_nm - 1.0 / spec.lambda_max_nm) /
                       (spec.points - 1);
    return s.value() * dnu * dnu;
}

JointSpectrum joint_spectrum(const DispersionModel& dm, const QpmGrating& g,
                             const PumpEnvelope& pump,
                             std::span<const TripletWeight> triplets,
                             const GridSpec& spec) {
    if (triplets.empty())
        throw ValidationError("joint spectrum needs at least one triplet");
    JointSpectrum js;
    js.spec = spec;
    js.grating = g;
    js.pump = pump;
    js.lambda_h_nm = spec.wavelengths();
    js.lambda_v_nm = js.lambda_h_nm;
    const int n = spec.points;
    js.trans_h.assign(n, 1.0);
    js.trans_v.assign(n, 1.0);

    const double nu_max = 1.0 / spec.lambda_min_nm;
    const double nu_min = 1.0 / spec.lambda_max_nm;
    const double dnu = (nu_max - nu_min) / (n - 1);

    // Shared factors over the frequency-sum diagonal: pump intensity and the
    // bulk pump wavevector.
    std::vector<double> pump_int(2 * n - 1), k_pump_bulk(2 * n - 1);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const double nu_sum = 2.0 * nu_min + s * dnu;
        const double a = pump_amplitude(pump, nu_sum);
        pump_int[s] = a * a;
        const double lam_p = 1.0 / nu_sum;
        k_pump_bulk[s] =
            kTwoPi * bulk_index(dm.sellmeier, Field::P, lam_p) / (lam_p * 1e-9);
    }
    std::vector<double> k_h(n), k_v(n);
    for (int i = 0; i < n; ++i) {
        k_h[i] = kTwoPi * bulk_index(dm.sellmeier, Field::H, js.lambda_h_nm[i]) /
                 (js.lambda_h_nm[i] * 1e-9);
        k_v[i] = kTwoPi * bulk_index(dm.sellmeier, Field::V, js.lambda_v_nm[i]) /
                 (js.lambda_v_nm[i] * 1e-9);
    }
    const double qpm = kTwoPi * g.qpm_order / (g.poling_period_um * 1e-6);
    const double len_m = g.length_mm * 1e-3;

    for (const TripletWeight& tw : triplets) {
        if (!(tw.weight >= 0.0))
            throw ValidationError("triplet weight must be nonnegative");
        JointSpectrum::Layer layer;
        layer.triplet = tw.triplet;
        layer.weight = tw.weight;
        layer.raw.resize(static_cast<std::size_t>(n) * n);
        const double dk_const = dm.table.correction(Field::P, tw.triplet.pump) -
                                dm.table.correction(Field::H, tw.triplet.h) -
                                dm.table.correction(Field::V, tw.triplet.v) - qpm -
                                dm.table.offset_rad_per_m;
        for (int ih = 0; ih < n; ++ih) {
            for (int iv = 0; iv < n; ++iv) {
                const int s = 2 * (n - 1) - ih - iv;
                const double db = k_pump_bulk[s] - k_h[ih] - k_v[iv] + dk_const;
                const double a = sinc(0.5 * db * len_m);
                layer.raw[static_cast<std::size_t>(ih) * n + iv] =
                    tw.weight * pump_int[s] * a * a;
            }
        }
        js.layers.push_back(std::move(layer));
    }
    return js;
}

JointSpectrum joint_spectrum(const DispersionModel& dm, const QpmGrating& g,
                             const HGModeBasis& basis, const PumpEnvelope& pump,
                             std::span<const ModeTriplet> triplets, const GridSpec& spec,
                             const QuadratureSpec& quad) {
    std::vector<TripletWeight> tw;
    tw.reserve(triplets.size());
    for (const ModeTriplet& t : triplets)
        tw.push_back({t, triplet_overlap_efficiency(basis, t, quad)});
    return joint_spectrum(dm, g, pump, tw, spec);
}

JointSpectrum apply_filter(const JointSpectrum& js, const SpectralFilter& filter) {
    JointSpectrum out = js;
    auto& trans = (filter.arm == Arm::H) ? out.trans_h : out.trans_v;
    const auto& lam = (filter.arm == Arm::H) ? out.lambda_h_nm : out.lambda_v_nm;
    for (std::size_t k = 0; k < trans.size(); ++k)
        trans[k] *= filter_transmission(filter, lam[k]);
    return out;
}

std::vector<std::pair<ModeTriplet, double>> island_weights(const JointSpectrum& js) {
    if (js.layers.empty()) throw ValidationError("joint spectrum has no layers");
    std::vector<std::pair<ModeTriplet, double>> w;
    KahanSum total;
    for (std::size_t l = 0; l < js.layers.size(); ++l) {
        const double integral = js.layer_integral(l);
        w.emplace_back(js.layers[l].triplet, integral);
        total.add(integral);
    }
    if (!(total.value() > 0.0))
        throw DegenerateInputError("joint spectrum is identically zero");
    for (auto& [t, v] : w) v /= total.value();
    return w;
}

double spatial_purity(const JointSpectrum& js, const ModeTriplet& target) {
    KahanSum acc;
    bool found = false;
    for (const auto& [t, v] : island_weights(js)) {
        if (t == target) {
            acc.add(v);
            found = true;
        }
    }
    return found ? acc.value() : 0.0;
}

std::vector<double> HeraldedWeights::axis_orders(int axis) const {
    int max_order = 0;
    for (const auto& [m, _] : modes)
        max_order = std::max(max_order, axis == 0 ? m.i : m.j);
    std::vector<double> p(max_order + 1, 0.0);
    for (const auto& [m, w] : modes) p[axis == 0 ? m.i : m.j] += w;
    return p;
}

namespace {

HeraldedWeights marginalize(const JointSpectrum& js, Arm arm) {
    HeraldedWeights hw;
    hw.conjugate_arm = arm;
    double total = 0.0;
    std::vector<std::pair<ModeTriplet, double>> weights;
    try {
        weights = island_weights(js);
    } catch (const DegenerateInputError&) {
        throw DegenerateInputError("no intensity left after herald filter");
    }
    for (const auto& [t, v] : weights) {
        const ModeIndex m = (arm == Arm::H) ? t.h : t.v;
        hw.modes[m] += v;
        total += v;
    }
    for (auto& [m, w] : hw.modes) w /= total;
    return hw;
}

}  // namespace

HeraldedWeights heralded_mode_weights(const JointSpectrum& js,
                                      const SpectralFilter& herald) {
    const JointSpectrum filtered = apply_filter(js, herald);
    return marginalize(filtered, herald.arm == Arm::H ? Arm::V : Arm::H);
}

HeraldedWeights unheralded_mode_weights(const JointSpectrum& js, Arm arm) {
    return marginalize(js, arm);
}

}  // namespace ppwg
