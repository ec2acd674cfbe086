#include "ppwg/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <format>
#include <numbers>
#include <random>

#include "ppwg/errors.hpp"
#include "ppwg/rng.hpp"

namespace ppwg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

double deg2rad(double d) { return d * kPi / 180.0; }

// Basis index over {HH, HV, VH, VV}: first photon slot is the slow index.
Mat4c kron(const Mat2c& a, const Mat2c& b) {
    Mat4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

}  // namespace

void TwoPhotonPolState::validate() const {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("polarization state is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
        throw ValidationError(std::format("polarization state trace is {:.12g}",
                                          rho.trace().real()));
    Eigen::SelfAdjointEigenSolver<Mat4c> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw ValidationError(std::format(
            "polarization state is not positive semidefinite (min eigenvalue {:.3g})",
            es.eigenvalues().minCoeff()));
}

double NoiseParams::multi_pair_fraction() const {
    if (!(mu > 0.0)) return 0.0;
    const double p_ge1 = -std::expm1(-mu);
    const double p_ge2 = p_ge1 - mu * std::exp(-mu);
    return p_ge2 / p_ge1;
}

TwoPhotonPolState shih_alley_state(const NoiseParams& noise) {
    if (noise.werner_p < 0.0 || noise.werner_p > 1.0)
        throw ValidationError("werner mixing weight must lie in [0, 1]");
    if (noise.coherence < 0.0 || noise.coherence > 1.0)
        throw ValidationError("coherence must lie in [0, 1]");
    if (noise.epsilon < 0.0)
        throw ValidationError("same-polarization contamination must be >= 0");
    if (noise.mu < 0.0) throw ValidationError("mean pairs per pulse must be >= 0");

    // Coherent part over {HV, VH} with adjustable residual coherence.
    const std::complex<double> phase = std::exp(kI * noise.phi_rad);
    Mat4c coh = Mat4c::Zero();
    coh(1, 1) = 0.5;
    coh(2, 2) = 0.5;
    coh(1, 2) = 0.5 * noise.coherence * std::conj(phase);
    coh(2, 1) = 0.5 * noise.coherence * phase;

    Mat4c rho = noise.werner_p * coh +
                (1.0 - noise.werner_p) * 0.25 * Mat4c::Identity();
    rho(0, 0) += 0.5 * noise.epsilon;
    rho(3, 3) += 0.5 * noise.epsilon;
    rho /= (1.0 + noise.epsilon);

    // Multi-pair pulses randomize the postselected polarization pairing.
    const double r = noise.multi_pair_fraction();
    rho = (1.0 - r) * rho + r * 0.25 * Mat4c::Identity();

    TwoPhotonPolState state{rho};
    state.validate();
    return state;
}

Mat2c waveplate(double theta_deg, double retardance_rad) {
    const double t = deg2rad(theta_deg);
    Mat2c rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    Mat2c ret = Mat2c::Zero();
    ret(0, 0) = 1.0;
    ret(1, 1) = std::exp(kI * retardance_rad);
    return rot * ret * rot.transpose();
}

Mat2c analyzer_projector(const AnalyzerSetting& s) {
    const double p = deg2rad(s.pol_deg);
    Vec2c pass;
    pass << std::cos(p), std::sin(p);
    Vec2c v = waveplate(s.qwp_deg, kPi / 2.0) * pass;
    v = waveplate(s.hwp_deg, kPi) * v;
    v.normalize();
    return v * v.adjoint();
}

double coincidence_prob(const TwoPhotonPolState& state, const AnalyzerSetting& s1,
                        const AnalyzerSetting& s2) {
    const Mat4c proj = kron(analyzer_projector(s1), analyzer_projector(s2));
    const std::complex<double> tr = (state.rho * proj).trace();
    if (std::abs(tr.imag()) > 1e-12)
        throw NumericalError("coincidence probability has an imaginary part");
    return std::clamp(tr.real(), 0.0, 1.0);
}

AnalyzerSetting linear_setting(double theta_deg) {
    // QWP at 0 leaves |H> unchanged; the HWP rotates it to theta.
    return AnalyzerSetting{0.0, theta_deg / 2.0, 0.0};
}

AnalyzerSetting circular_setting(bool right) {
    return AnalyzerSetting{right ? 45.0 : -45.0, 0.0, 0.0};
}

VisibilityFit fit_visibility(std::span<const std::pair<double, double>> angle_counts) {
    const int m = static_cast<int>(angle_counts.size());
    if (m < 6) throw ValidationError("visibility fit needs at least 6 angles");
    double lo = angle_counts[0].first, hi = angle_counts[0].first;
    for (const auto& [a, c] : angle_counts) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi - lo < 90.0 - 1e-9)
        throw ValidationError("angle scan must span at least half a fringe period "
                              "(90 degrees)");

    Eigen::MatrixXd X(m, 3);
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) {
        const double th = deg2rad(angle_counts[k].first);
        X(k, 0) = 1.0;
        X(k, 1) = std::cos(2.0 * th);
        X(k, 2) = std::sin(2.0 * th);
        y(k) = angle_counts[k].second;
    }
    const Eigen::VectorXd a = X.colPivHouseholderQr().solve(y);
    if (!(a(0) > 0.0))
        throw NumericalError("visibility fit found a non-positive mean level");

    VisibilityFit fit;
    const double amp = std::hypot(a(1), a(2));
    fit.c0 = a(0);
    fit.visibility = amp / a(0);
    fit.theta0_deg = 0.5 * std::atan2(a(2), a(1)) * 180.0 / kPi;

    const Eigen::VectorXd resid = y - X * a;
    const double s2 = m > 3 ? resid.squaredNorm() / (m - 3) : 0.0;
    const Eigen::MatrixXd cov =
        s2 * (X.transpose() * X).completeOrthogonalDecomposition().pseudoInverse();
    if (amp > 0.0) {
        Eigen::Vector3d g;
        g << -amp / (a(0) * a(0)), a(1) / (amp * a(0)), a(2) / (amp * a(0));
        fit.sigma = std::sqrt(std::max(0.0, double(g.transpose() * cov * g)));
    } else {
        fit.sigma = std::sqrt(std::max(0.0, (cov(1, 1) + cov(2, 2)))) / a(0);
    }
    return fit;
}

double accidental_rate(double singles1_hz, double singles2_hz, double pulse_rate_hz) {
    if (!(pulse_rate_hz > 0.0)) throw ValidationError("pulse rate must be positive");
    return singles1_hz * singles2_hz / pulse_rate_hz;
}

std::vector<CountRecord> correct_counts(std::span<const CountRecord> records,
                                        const CorrectionOptions& options) {
    double ref = options.reference_power_mw.value_or(0.0);
    if (ref <= 0.0) {
        for (const auto& rec : records)
            if (rec.power_mw > 0.0) {
                ref = rec.power_mw;
                break;
            }
    }
    std::vector<CountRecord> out(records.begin(), records.end());
    for (CountRecord& rec : out) {
        double c = rec.coincidences;
        if (rec.power_mw > 0.0 && ref > 0.0)
            c *= std::pow(ref / rec.power_mw, options.drift_exponent);
        if (options.subtract_accidentals) {
            const double acc =
                accidental_rate(rec.singles1_hz, rec.singles2_hz,
                                options.pulse_rate_hz) *
                rec.duration_s;
            c -= acc;
        }
        rec.coincidences = std::max(0.0, c);
    }
    return out;
}

namespace {

struct BasisCounts {
    // outcome index: 0 = ++, 1 = +-, 2 = -+, 3 = --
    double n[4] = {0, 0, 0, 0};
    bool seen[4] = {false, false, false, false};
};

bool angle_close(double a, double b) { return std::abs(a - b) < 1e-6; }

// Match a record's arm setting against the +/- outcomes of a linear basis
// angle; returns 0 for theta, 1 for theta+90, -1 otherwise.
int outcome_of(const AnalyzerSetting& s, double basis_deg) {
    const AnalyzerSetting plus = linear_setting(basis_deg);
    const AnalyzerSetting minus = linear_setting(basis_deg + 90.0);
    if (angle_close(s.qwp_deg, plus.qwp_deg) && angle_close(s.hwp_deg, plus.hwp_deg) &&
        angle_close(s.pol_deg, plus.pol_deg))
        return 0;
    if (angle_close(s.qwp_deg, minus.qwp_deg) && angle_close(s.hwp_deg, minus.hwp_deg) &&
        angle_close(s.pol_deg, minus.pol_deg))
        return 1;
    return -1;
}

double correlation(const BasisCounts& bc, double& total_out) {
    const double total = bc.n[0] + bc.n[1] + bc.n[2] + bc.n[3];
    total_out = total;
    if (!(total > 0.0)) throw ValidationError("CHSH basis pair has zero total counts");
    return (bc.n[0] + bc.n[3] - bc.n[1] - bc.n[2]) / total;
}

double correlation_variance(const BasisCounts& bc) {
    // Poisson counts: Var(E) = sum_i (dE/dN_i)^2 N_i with
    // dE/dN_i = (+-1 - E)/T.
    const double total = bc.n[0] + bc.n[1] + bc.n[2] + bc.n[3];
    const double e = (bc.n[0] + bc.n[3] - bc.n[1] - bc.n[2]) / total;
    double var = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sign = (i == 0 || i == 3) ? 1.0 : -1.0;
        const double d = (sign - e) / total;
        var += d * d * bc.n[i];
    }
    return var;
}

}  // namespace

ChshResult chsh_from_counts(std::span<const CountRecord> records) {
    BasisCounts counts[2][2];
    for (const CountRecord& rec : records) {
        for (int ia = 0; ia < 2; ++ia) {
            const int oa = outcome_of(rec.arm1, kChshAliceDeg[ia]);
            if (oa < 0) continue;
            for (int ib = 0; ib < 2; ++ib) {
                const int ob = outcome_of(rec.arm2, kChshBobDeg[ib]);
                if (ob < 0) continue;
                const int idx = 2 * oa + ob;
                counts[ia][ib].n[idx] += rec.coincidences;
                counts[ia][ib].seen[idx] = true;
            }
        }
    }
    std::vector<std::string> missing;
    static const char* kOutcome[4] = {"++", "+-", "-+", "--"};
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
            for (int o = 0; o < 4; ++o)
                if (!counts[ia][ib].seen[o])
                    missing.push_back(std::format("a={} b={} outcome {}",
                                                  kChshAliceDeg[ia], kChshBobDeg[ib],
                                                  kOutcome[o]));
    if (!missing.empty()) {
        std::string msg = "missing CHSH settings:";
        for (const auto& m : missing) msg += " [" + m + "]";
        throw ValidationError(msg);
    }

    ChshResult res;
    double tot;
    res.e_ab = correlation(counts[0][0], tot);
    res.e_ab2 = correlation(counts[0][1], tot);
    res.e_a2b = correlation(counts[1][0], tot);
    res.e_a2b2 = correlation(counts[1][1], tot);
    res.s = std::abs(res.e_ab - res.e_ab2 + res.e_a2b + res.e_a2b2);
    res.sigma = std::sqrt(correlation_variance(counts[0][0]) +
                          correlation_variance(counts[0][1]) +
                          correlation_variance(counts[1][0]) +
                          correlation_variance(counts[1][1]));
    res.violation_sigmas = res.sigma > 0.0 ? (res.s - 2.0) / res.sigma : 0.0;
    return res;
}

ChshResult chsh_from_state(const TwoPhotonPolState& state) {
    auto e_value = [&](double a_deg, double b_deg) {
        const double pp = coincidence_prob(state, linear_setting(a_deg),
                                           linear_setting(b_deg));
        const double pm = coincidence_prob(state, linear_setting(a_deg),
                                           linear_setting(b_deg + 90.0));
        const double mp = coincidence_prob(state, linear_setting(a_deg + 90.0),
                                           linear_setting(b_deg));
        const double mm = coincidence_prob(state, linear_setting(a_deg + 90.0),
                                           linear_setting(b_deg + 90.0));
        return (pp + mm - pm - mp) / (pp + mm + pm + mp);
    };
    ChshResult res;
    res.e_ab = e_value(kChshAliceDeg[0], kChshBobDeg[0]);
    res.e_ab2 = e_value(kChshAliceDeg[0], kChshBobDeg[1]);
    res.e_a2b = e_value(kChshAliceDeg[1], kChshBobDeg[0]);
    res.e_a2b2 = e_value(kChshAliceDeg[1], kChshBobDeg[1]);
    res.s = std::abs(res.e_ab - res.e_ab2 + res.e_a2b + res.e_a2b2);
    return res;
}

std::vector<CountRecord> simulate_chsh_counts(const TwoPhotonPolState& state,
                                              double pairs_per_setting,
                                              std::uint64_t seed) {
    if (!(pairs_per_setting > 0.0))
        throw ValidationError("pairs per setting must be positive");
    std::mt19937_64 rng(seed);
    std::vector<CountRecord> records;
    for (double a : kChshAliceDeg)
        for (double b : kChshBobDeg)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob) {
                    const AnalyzerSetting s1 = linear_setting(a + 90.0 * oa);
                    const AnalyzerSetting s2 = linear_setting(b + 90.0 * ob);
                    const double prob = coincidence_prob(state, s1, s2);
                    CountRecord rec;
                    rec.arm1 = s1;
                    rec.arm2 = s2;
                    rec.coincidences = static_cast<double>(
                        poisson_sample(rng, pairs_per_setting * prob));
                    rec.duration_s = 1.0;
                    records.push_back(rec);
                }
    return records;
}

}  // namespace ppwg
