#include "ppwg/beamquality.hpp"

#include <algorithm>
#include <cmath>
#include <format>
#include <map>
#include <numbers>

#include "ppwg/errors.hpp"
#include "ppwg/levmar.hpp"
#include "ppwg/modes.hpp"
#include "ppwg/numeric.hpp"
#include "ppwg/rng.hpp"

namespace ppwg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrtPi = 0.5641895835477563;  // 1/sqrt(pi)
}  // namespace

const char* to_string(ScanDirection d) {
    return d == ScanDirection::horizontal ? "horizontal" : "vertical";
}

ScanDirection scan_direction_from_string(const std::string& s) {
    if (s == "horizontal" || s == "h") return ScanDirection::horizontal;
    if (s == "vertical" || s == "v") return ScanDirection::vertical;
    throw ParseError("unknown scan direction '" + s + "'");
}

double knife_transmission(double w_um, double x0_um, double x_um) {
    if (!(w_um > 0.0)) throw ValidationError("beam half-width must be positive");
    return 0.5 * std::erfc(kSqrt2 * (x_um - x0_um) / w_um);
}

EdgeFit fit_edge_scan(std::span<const ScanPoint> plane) {
    const int m = static_cast<int>(plane.size());
    if (m < 4) throw ValidationError("edge fit needs at least 4 points");

    std::vector<std::pair<double, double>> pts(m);  // (x, counts), sorted by x
    for (int k = 0; k < m; ++k) pts[k] = {plane[k].x_um, plane[k].counts};
    std::sort(pts.begin(), pts.end());

    double cmin = pts[0].second, cmax = pts[0].second;
    for (const auto& [x, c] : pts) {
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    if (!(cmax - cmin >= 0.5 * cmax) || cmax <= 0.0)
        throw ValidationError(
            "scan does not span both asymptotes (counts range below half of peak)");

    // Orientation from the overall trend.
    const int orientation = pts.front().second > pts.back().second ? -1 : +1;

    auto crossing = [&](double level) {
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double c0 = pts[k].second, c1 = pts[k + 1].second;
            if ((c0 - level) * (c1 - level) <= 0.0 && c0 != c1) {
                return pts[k].first +
                       (level - c0) / (c1 - c0) * (pts[k + 1].first - pts[k].first);
            }
        }
        return 0.5 * (pts.front().first + pts.back().first);
    };
    const double x50 = crossing(cmin + 0.50 * (cmax - cmin));
    const double x84 = crossing(cmin + 0.8413 * (cmax - cmin));
    const double x16 = crossing(cmin + 0.1587 * (cmax - cmin));
    double w0 = std::abs(x84 - x16);
    if (!(w0 > 0.0)) w0 = 0.25 * (pts.back().first - pts.front().first);

    // Model: counts = B + A * erfc(s*sqrt2*(x - x0)/w)/2, s = orientation sign.
    const double s = -orientation;
    Eigen::VectorXd p0(4);
    p0 << cmax - cmin, cmin, x50, w0;

    const auto eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                          Eigen::MatrixXd& J) {
        const double A = p(0), B = p(1), x0 = p(2), w = std::abs(p(3));
        for (int k = 0; k < m; ++k) {
            const double u = s * kSqrt2 * (pts[k].first - x0) / w;
            const double t = 0.5 * std::erfc(u);
            const double g = std::exp(-u * u) * kInvSqrtPi;  // -d(erfc/2)/du
            r(k) = B + A * t - pts[k].second;
            J(k, 0) = t;
            J(k, 1) = 1.0;
            J(k, 2) = A * g * s * kSqrt2 / w;       // du/dx0 = -s*sqrt2/w
            J(k, 3) = A * g * u / w * (p(3) < 0 ? -1.0 : 1.0);  // du/dw = -u/w
        }
    };

    const LevmarResult res = levmar_fit(eval, p0, m);

    EdgeFit fit;
    fit.amplitude = res.params(0);
    fit.background = res.params(1);
    fit.x0_um = res.params(2);
    fit.w_um = std::abs(res.params(3));
    fit.orientation = orientation;
    fit.iterations = res.iterations;
    fit.sigma_x0_um = std::sqrt(std::max(0.0, res.covariance(2, 2)));
    fit.sigma_w_um = std::sqrt(std::max(0.0, res.covariance(3, 3)));
    if (!(fit.w_um > 0.0)) throw NumericalError("edge fit collapsed to zero width");

    KahanSum ss_tot;
    double mean = 0.0;
    for (const auto& [x, c] : pts) mean += c;
    mean /= m;
    for (const auto& [x, c] : pts) ss_tot.add((c - mean) * (c - mean));
    fit.r_squared = ss_tot.value() > 0.0 ? 1.0 - res.ssr / ss_tot.value() : 0.0;
    return fit;
}

M2Fit fit_caustic(std::span<const CausticPoint> widths, double lambda_nm) {
    if (widths.size() < 5)
        throw ValidationError("caustic fit needs at least 5 planes");
    if (!(lambda_nm > 0.0)) throw ValidationError("wavelength must be positive");

    const int m = static_cast<int>(widths.size());
    bool have_sigmas = true;
    for (const auto& p : widths)
        if (!(p.sigma_w_um > 0.0)) have_sigmas = false;

    // Linear WLS on w^2 = a + b z + c z^2; sigma(w^2) = 2 w sigma_w.
    Eigen::MatrixXd X(m, 3);
    Eigen::VectorXd y(m), wgt(m);
    for (int k = 0; k < m; ++k) {
        const double z = widths[k].z_mm;
        X(k, 0) = 1.0;
        X(k, 1) = z;
        X(k, 2) = z * z;
        y(k) = widths[k].w_um * widths[k].w_um;
        wgt(k) = have_sigmas
                     ? 1.0 / (2.0 * widths[k].w_um * widths[k].sigma_w_um)
                     : 1.0;
    }
    const Eigen::MatrixXd Xw = wgt.asDiagonal() * X;
    const Eigen::VectorXd yw = wgt.asDiagonal() * y;
    const Eigen::VectorXd abc = Xw.colPivHouseholderQr().solve(yw);
    const double a = abc(0), b = abc(1), c = abc(2);

    if (!(c > 0.0))
        throw NumericalError(std::format(
            "caustic fit rejected: non-physical divergence coefficient c = {:.6g}", c));
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0)
        throw NumericalError(std::format(
            "caustic fit rejected: b^2 - 4ac = {:.6g} >= 0 (waist not resolved)", disc));

    M2Fit fit;
    fit.lambda_nm = lambda_nm;
    fit.z0_mm = -b / (2.0 * c);
    const double w02 = a - b * b / (4.0 * c);  // um^2
    fit.w0_um = std::sqrt(w02);
    // w^2(z) = w0^2 + (M^2 lambda / (pi w0))^2 (z - z0)^2, c in um^2/mm^2.
    const double lambda_um = lambda_nm * 1e-3;
    const double um_per_mm = 1e3;
    fit.m2 = kPi * fit.w0_um * std::sqrt(c) / (lambda_um * um_per_mm);
    fit.z_r_mm = kPi * w02 / (fit.m2 * lambda_um) / um_per_mm;

    // Covariance of (a, b, c), then first-order propagation through
    // M^2 = (pi / lambda) sqrt(a c - b^2/4).
    const Eigen::MatrixXd XtX_inv =
        (Xw.transpose() * Xw).completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::VectorXd resid = yw - Xw * abc;
    const int dof = m - 3;
    const double s2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
    const Eigen::MatrixXd cov = s2 * XtX_inv;
    const double q = a * c - 0.25 * b * b;  // um^2 * um^2/mm^2
    Eigen::Vector3d grad;
    const double pref = kPi / (lambda_um * um_per_mm);
    grad << pref * c / (2.0 * std::sqrt(q)), -pref * b / (4.0 * std::sqrt(q)),
        pref * a / (2.0 * std::sqrt(q));
    fit.sigma_m2 = std::sqrt(std::max(0.0, double(grad.transpose() * cov * grad)));
    return fit;
}

IsoSamplingCheck iso_sampling_check(std::span<const double> z_mm, const M2Fit& fit) {
    IsoSamplingCheck chk;
    for (double z : z_mm) {
        const double d = std::abs(z - fit.z0_mm);
        if (d <= fit.z_r_mm) ++chk.inner;
        if (d >= 2.0 * fit.z_r_mm) ++chk.outer;
    }
    chk.pass = chk.inner >= 5 && chk.outer >= 5;
    chk.diagnostic = std::format("inner={} outer={} (need >=5 each)", chk.inner,
                                 chk.outer);
    return chk;
}

double predict_m2(std::span<const double> order_weights) {
    KahanSum sum, m2;
    for (std::size_t n = 0; n < order_weights.size(); ++n) {
        const double p = order_weights[n];
        if (p < 0.0)
            throw ValidationError(std::format("negative mode weight p_{} = {:.6g}", n, p));
        sum.add(p);
        m2.add(p * (2.0 * n + 1.0));
    }
    if (std::abs(sum.value() - 1.0) > 1e-6)
        throw ValidationError(std::format("mode weights sum to {:.8g}, expected 1",
                                          sum.value()));
    return m2.value();
}

namespace {

// Transmitted fraction of an incoherent HG mixture past the knife: the tail
// integral of the mixed 1-D intensity, evaluated by fixed quadrature from the
// edge to beyond the highest-order mode's support.
double mixture_tail(const std::vector<double>& weights, double w_um, double x_um) {
    const double extent = (4.0 + std::sqrt(static_cast<double>(weights.size()))) * w_um;
    if (x_um >= extent) return 0.0;
    const int steps = 4096;
    const double lo = x_um;
    const double hi = extent;
    const double dt = (hi - lo) / steps;
    KahanSum s;
    for (int k = 0; k <= steps; ++k) {
        const double t = lo + k * dt;
        double intensity = 0.0;
        for (std::size_t n = 0; n < weights.size(); ++n) {
            if (weights[n] == 0.0) continue;
            const double u = hermite_gauss_1d(static_cast<int>(n), t, w_um, 0.0);
            intensity += weights[n] * u * u;
        }
        s.add(((k == 0 || k == steps) ? 0.5 : 1.0) * intensity);
    }
    return s.value() * dt;
}

}  // namespace

KnifeEdgeScan synth_scan(const BeamModel& beam, const ScanPlan& plan,
                         std::uint64_t seed, bool poisson_noise) {
    if (plan.z_mm.empty() || plan.x_um.empty())
        throw ValidationError("scan plan needs z planes and x positions");
    if (!(plan.duration_s > 0.0)) throw ValidationError("scan duration must be positive");
    (void)predict_m2(beam.order_weights);  // validates the weights

    const double z_r_mm =
        kPi * beam.waist_um * beam.waist_um / (beam.lambda_nm * 1e-3) / 1e3;
    std::mt19937_64 rng(seed);
    KnifeEdgeScan scan;
    scan.reserve(plan.z_mm.size() * plan.x_um.size());
    for (double z : plan.z_mm) {
        const double zr = (z - beam.z0_mm) / z_r_mm;
        const double w = beam.waist_um * std::sqrt(1.0 + zr * zr);
        for (double x : plan.x_um) {
            const double frac = mixture_tail(beam.order_weights, w, x);
            const double mean =
                (beam.peak_rate_hz * frac + beam.background_rate_hz) * plan.duration_s;
            ScanPoint pt;
            pt.z_mm = z;
            pt.x_um = x;
            pt.duration_s = plan.duration_s;
            pt.direction = plan.direction;
            pt.counts = poisson_noise
                            ? static_cast<double>(poisson_sample(rng, mean))
                            : mean;
            scan.push_back(pt);
        }
    }
    return scan;
}

std::vector<CausticPoint> fit_all_planes(const KnifeEdgeScan& scan,
                                         ScanDirection direction,
                                         std::vector<EdgeFit>* fits) {
    std::map<double, KnifeEdgeScan> planes;
    for (const ScanPoint& pt : scan)
        if (pt.direction == direction) planes[pt.z_mm].push_back(pt);
    if (planes.empty())
        throw ValidationError(std::string("scan holds no ") + to_string(direction) +
                              " planes");
    std::vector<CausticPoint> out;
    for (const auto& [z, pts] : planes) {
        const EdgeFit fit = fit_edge_scan(pts);
        if (fits) fits->push_back(fit);
        out.push_back({z, fit.w_um, fit.sigma_w_um});
    }
    return out;
}

}  // namespace ppwg
