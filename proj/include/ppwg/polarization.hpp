#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppwg {

using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec2c = Eigen::Vector2cd;

// Two-photon polarization density operator over the basis {HH, HV, VH, VV}.
struct TwoPhotonPolState {
    Mat4c rho = Mat4c::Zero();

    /// Hermiticity within 1e-12, unit trace within 1e-12, and positive
    /// semidefiniteness (min eigenvalue >= -1e-10). Throws ValidationError.
    void validate() const;
};

// Noise model of the postselected Shih-Alley state:
//   werner_p   weight of the coherent two-photon term vs white noise,
//   coherence  residual HV<->VH coherence (1 = fully indistinguishable),
//   epsilon    relative admixture of same-polarization pairs (HH + VV)/2,
//   mu         mean SPDC pairs per pulse; multi-pair pulses contribute an
//              additional unpolarized background in the postselected space,
//   phi_rad    relative phase of the |HV> and |VH> amplitudes.
struct NoiseParams {
    double werner_p = 1.0;
    double coherence = 1.0;
    double epsilon = 0.0;
    double mu = 0.0;
    double phi_rad = 3.14159265358979323846;

    /// Fraction of pair-generating pulses that carry more than one pair.
    double multi_pair_fraction() const;
};

/// Build the noisy postselected polarization state.
TwoPhotonPolState shih_alley_state(const NoiseParams& noise);

// Analyzer chain of one arm: quarter-wave plate, half-wave plate, polarizer.
// Angles are fast-axis (plate) and pass-axis (polarizer) angles from H.
struct AnalyzerSetting {
    double qwp_deg = 0.0;
    double hwp_deg = 0.0;
    double pol_deg = 0.0;
};

/// Rotated retarder Jones matrix with retardance gamma (pi/2 for a QWP, pi
/// for a HWP): R(theta) diag(1, e^{i gamma}) R(-theta).
Mat2c waveplate(double theta_deg, double retardance_rad);

/// Rank-1 projector of the analyzer chain. Convention (fixed by the D/A/L/R
/// checks in the tests): the QWP and then the HWP matrix are applied to the
/// polarizer pass state, |psi> = HWP(hwp) QWP(qwp) |pol>.
Mat2c analyzer_projector(const AnalyzerSetting& s);

/// Tr[rho (P1 x P2)], clamped to [0, 1] at the 1e-12 level.
double coincidence_prob(const TwoPhotonPolState& state, const AnalyzerSetting& s1,
                        const AnalyzerSetting& s2);

// Analyzer settings that realize common projections with this convention.
AnalyzerSetting linear_setting(double theta_deg);  // linear polarization at theta
AnalyzerSetting circular_setting(bool right);      // R (true) or L (false)

struct CountRecord {
    AnalyzerSetting arm1;
    AnalyzerSetting arm2;
    double coincidences = 0.0;
    double singles1_hz = 0.0;
    double singles2_hz = 0.0;
    double duration_s = 1.0;
    double power_mw = 0.0;  // 0 = unknown
};

struct VisibilityFit {
    double visibility = 0.0;
    double sigma = 0.0;
    double c0 = 0.0;         // mean level
    double theta0_deg = 0.0;  // fringe phase
};

/// Least-squares fit of C(theta) = C0 (1 + V cos 2(theta - theta0)) through
/// the linear reparameterization a0 + a1 cos 2theta + a2 sin 2theta.
/// Needs >= 6 angles spanning at least half a period (90 deg).
VisibilityFit fit_visibility(std::span<const std::pair<double, double>> angle_counts);

/// Uncorrelated-pulse accidental coincidence rate S1 S2 / f_rep.
double accidental_rate(double singles1_hz, double singles2_hz, double pulse_rate_hz);

struct CorrectionOptions {
    double pulse_rate_hz = 0.0;              // required for accidental subtraction
    std::optional<double> reference_power_mw;  // default: first record with power
    double drift_exponent = 1.0;
    bool subtract_accidentals = true;
};

/// Pump-drift rescaling followed by accidental subtraction, floored at zero
/// counts. Records without power data skip the drift step.
std::vector<CountRecord> correct_counts(std::span<const CountRecord> records,
                                        const CorrectionOptions& options);

struct ChshResult {
    double e_ab = 0.0, e_ab2 = 0.0, e_a2b = 0.0, e_a2b2 = 0.0;
    double s = 0.0;
    double sigma = 0.0;            // Poisson propagation (0 for state input)
    double violation_sigmas = 0.0;  // (S - 2)/sigma when sigma > 0
};

// Standard CHSH analyzer bases: a = 0 deg, a' = 45 deg, b = 22.5 deg,
// b' = 67.5 deg, each measured with the +/- outcome pair (theta, theta+90).
inline constexpr double kChshAliceDeg[2] = {0.0, 45.0};
inline constexpr double kChshBobDeg[2] = {22.5, 67.5};

/// S from 16 coincidence records at the standard settings. Throws
/// ValidationError listing missing combinations.
ChshResult chsh_from_counts(std::span<const CountRecord> records);

/// S evaluated directly from a state at the standard settings.
ChshResult chsh_from_state(const TwoPhotonPolState& state);

/// Simulated coincidence records for the 16 standard CHSH settings with
/// Poisson statistics: expected counts = pairs_per_setting * probability.
std::vector<CountRecord> simulate_chsh_counts(const TwoPhotonPolState& state,
                                              double pairs_per_setting,
                                              std::uint64_t seed);

}  // namespace ppwg
