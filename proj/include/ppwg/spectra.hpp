#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ppwg/modes.hpp"
#include "ppwg/phasematch.hpp"

namespace ppwg {

// Gaussian pump spectral envelope; FWHM refers to the intensity spectrum.
struct PumpEnvelope {
    double center_nm = 399.9;
    double fwhm_nm = 1.0;
};

/// Amplitude of the pump envelope at a given photon-frequency sum, expressed
/// as inverse vacuum wavelength nu = 1/lambda in nm^-1 (proportional to
/// angular frequency). Peak value 1 at the pump center.
double pump_amplitude(const PumpEnvelope& pump, double nu_sum_per_nm);

enum class Arm { H, V };

const char* to_string(Arm a);
Arm arm_from_string(const std::string& s);

struct SpectralFilter {
    double center_nm = 800.0;
    double fwhm_nm = 10.0;
    enum class Shape { gaussian, rectangular } shape = Shape::gaussian;
    Arm arm = Arm::V;
};

/// Intensity transmission of the filter at a wavelength, in [0, 1].
double filter_transmission(const SpectralFilter& f, double lambda_nm);

// A mode triplet with the weight its layer carries in the joint spectrum
// (relative overlap efficiency times pump-mode occupancy).
struct TripletWeight {
    ModeTriplet triplet;
    double weight = 1.0;
};

// Per-triplet pair-generation intensity over the (lambda_H, lambda_V) grid.
//
// Layers store the unfiltered product weight * |pump|^2 * |phasematch|^2;
// filters accumulate multiplicatively into per-axis transmission vectors so
// that the effective value trans_h[ih] * trans_v[iv] * raw is independent of
// the order in which filters were applied.
struct JointSpectrum {
    GridSpec spec;
    std::vector<double> lambda_h_nm;
    std::vector<double> lambda_v_nm;
    std::vector<double> trans_h;  // accumulated filter transmission per row
    std::vector<double> trans_v;  // accumulated filter transmission per column

    struct Layer {
        ModeTriplet triplet;
        double weight = 1.0;
        std::vector<double> raw;  // row-major, index ih*points + iv
    };
    std::vector<Layer> layers;

    QpmGrating grating;
    PumpEnvelope pump;

    double value(std::size_t layer, std::size_t ih, std::size_t iv) const {
        return layers[layer].raw[ih * lambda_v_nm.size() + iv] * trans_h[ih] *
               trans_v[iv];
    }
    /// Filtered layer integral over the frequency grid (trapezoid rule).
    double layer_integral(std::size_t layer) const;
};

/// Assemble the joint spectrum: layer_t = w_t * |alpha(nu_H + nu_V)|^2 *
/// |Phi_t|^2, summed incoherently across triplets (layers kept separate).
JointSpectrum joint_spectrum(const DispersionModel& dm, const QpmGrating& g,
                             const PumpEnvelope& pump,
                             std::span<const TripletWeight> triplets,
                             const GridSpec& spec);

/// Convenience overload: weights from triplet_overlap_efficiency of `basis`.
JointSpectrum joint_spectrum(const DispersionModel& dm, const QpmGrating& g,
                             const HGModeBasis& basis, const PumpEnvelope& pump,
                             std::span<const ModeTriplet> triplets,
                             const GridSpec& spec,
                             const QuadratureSpec& quad = {});

/// Multiply the filter into the addressed arm. Pure; returns a copy.
JointSpectrum apply_filter(const JointSpectrum& js, const SpectralFilter& filter);

/// Per-triplet integral normalized to a total of 1.
/// Throws DegenerateInputError when every layer integrates to zero.
std::vector<std::pair<ModeTriplet, double>> island_weights(const JointSpectrum& js);

/// Island weight of the target triplet (0 when absent from the layer list).
double spatial_purity(const JointSpectrum& js, const ModeTriplet& target);

struct HeraldedWeights {
    Arm conjugate_arm;                  // the arm the weights describe
    std::map<ModeIndex, double> modes;  // sums to 1

    /// Marginal weights per 1-D order along one transverse axis
    /// (0 -> x / first digit, 1 -> y / second digit).
    std::vector<double> axis_orders(int axis) const;
};

/// Distribution over transverse modes of the arm conjugate to the filtered
/// (heralding) arm, after applying the herald filter.
HeraldedWeights heralded_mode_weights(const JointSpectrum& js,
                                      const SpectralFilter& herald);

/// Mode weights of one arm without any heralding filter (same marginal).
HeraldedWeights unheralded_mode_weights(const JointSpectrum& js, Arm arm);

}  // namespace ppwg
