#include "ppwg/phasematch.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <format>
#include <numbers>
#include <set>

#include "ppwg/errors.hpp"
#include "ppwg/numeric.hpp"

namespace ppwg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double qpm_k(const QpmGrating& g) {
    if (!(g.poling_period_um > 0.0))
        throw ValidationError("poling period must be positive");
    if (g.qpm_order < 1) throw ValidationError("QPM order must be >= 1");
    return kTwoPi * g.qpm_order / (g.poling_period_um * 1e-6);
}

double pump_lambda_nm(double lambda_h_nm, double lambda_v_nm) {
    return 1.0 / (1.0 / lambda_h_nm + 1.0 / lambda_v_nm);
}

}  // namespace

double mismatch(const DispersionModel& dm, const QpmGrating& g, const ModeTriplet& t,
                double lambda_h_nm, double lambda_v_nm) {
    const double lam_p = pump_lambda_nm(lambda_h_nm, lambda_v_nm);
    return guided_wavevector(dm, Field::P, t.pump, lam_p) -
           guided_wavevector(dm, Field::H, t.h, lambda_h_nm) -
           guided_wavevector(dm, Field::V, t.v, lambda_v_nm) - qpm_k(g) -
           dm.table.offset_rad_per_m;
}

double pm_amplitude(double dbeta_rad_per_m, double length_mm) {
    if (!(length_mm > 0.0)) throw ValidationError("medium length must be positive");
    return sinc(0.5 * dbeta_rad_per_m * length_mm * 1e-3);
}

double degenerate_pm_wavelength(const DispersionModel& dm, const QpmGrating& g,
                                const ModeTriplet& t, const RootSearch& search) {
    const auto f = [&](double lam) { return mismatch(dm, g, t, lam, lam); };
    double lo = search.window_min_nm;
    double flo = f(lo);
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    for (double lam = lo + search.prescan_step_nm; lam <= search.window_max_nm + 1e-12;
         lam += search.prescan_step_nm) {
        const double fv = f(lam);
        if (flo == 0.0) return lo;
        if ((flo > 0.0) != (fv > 0.0)) {
            bracket_lo = lo;
            bracket_hi = lam;
            found = true;
            break;
        }
        lo = lam;
        flo = fv;
    }
    if (!found) {
        throw NotPhaseMatchedError(std::format(
            "triplet {} has no degenerate phase-matching root in [{:.6g}, {:.6g}] nm",
            t.label(), search.window_min_nm, search.window_max_nm));
    }
    double fa = f(bracket_lo);
    while (bracket_hi - bracket_lo > search.bisect_tol_nm) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fa > 0.0) == (fm > 0.0)) {
            bracket_lo = mid;
            fa = fm;
        } else {
            bracket_hi = mid;
        }
    }
    return 0.5 * (bracket_lo + bracket_hi);
}

double band_separation(const DispersionModel& dm, const QpmGrating& g,
                       const ModeTriplet& t1, const ModeTriplet& t2,
                       const RootSearch& search) {
    return std::abs(degenerate_pm_wavelength(dm, g, t1, search) -
                    degenerate_pm_wavelength(dm, g, t2, search));
}

namespace {

std::string param_name(Field f, const ModeIndex& m) {
    return std::string(to_string(f)) + m.label();
}

}  // namespace

CalibrationResult calibrate(std::span<const SfgObservation> observations,
                            const DispersionModel& dm_initial, const QpmGrating& grating,
                            const CalibrationOptions& options) {
    if (observations.empty()) throw ValidationError("no SFG observations supplied");

    const ModeIndex fundamental{0, 0};
    std::vector<std::pair<Field, ModeIndex>> params;
    std::set<std::pair<Field, ModeIndex>> seen;
    for (const auto& obs : observations) {
        for (auto [field, mode] : {std::pair{Field::P, obs.triplet.pump},
                                   std::pair{Field::H, obs.triplet.h},
                                   std::pair{Field::V, obs.triplet.v}}) {
            if (mode != fundamental && seen.insert({field, mode}).second)
                params.emplace_back(field, mode);
        }
    }
    std::sort(params.begin(), params.end());
    const int n_unknowns = static_cast<int>(params.size()) + 1;  // + offset
    const int n_rows = static_cast<int>(observations.size());
    if (n_rows < n_unknowns && options.require_full_rank) {
        std::vector<std::string> names;
        for (const auto& [f, m] : params) names.push_back(param_name(f, m));
        names.push_back("offset");
        throw UnderdeterminedError(
            std::format("{} observations cannot determine {} parameters", n_rows,
                        n_unknowns),
            names);
    }

    auto column_of = [&](Field f, const ModeIndex& m) -> int {
        const auto it = std::lower_bound(params.begin(), params.end(), std::pair{f, m});
        return static_cast<int>(it - params.begin());
    };

    const double qpm = kTwoPi * grating.qpm_order / (grating.poling_period_um * 1e-6);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, n_unknowns);
    Eigen::VectorXd b(n_rows);
    for (int r = 0; r < n_rows; ++r) {
        const auto& obs = observations[r];
        const double lam = obs.lambda_deg_nm;
        const double bulk =
            kTwoPi * bulk_index(dm_initial.sellmeier, Field::P, lam / 2.0) /
                (lam / 2.0 * 1e-9) -
            kTwoPi * bulk_index(dm_initial.sellmeier, Field::H, lam) / (lam * 1e-9) -
            kTwoPi * bulk_index(dm_initial.sellmeier, Field::V, lam) / (lam * 1e-9) -
            qpm;
        // bulk + dkP - dkH - dkV - offset = 0
        if (obs.triplet.pump != fundamental)
            A(r, column_of(Field::P, obs.triplet.pump)) += 1.0;
        if (obs.triplet.h != fundamental) A(r, column_of(Field::H, obs.triplet.h)) -= 1.0;
        if (obs.triplet.v != fundamental) A(r, column_of(Field::V, obs.triplet.v)) -= 1.0;
        A(r, n_unknowns - 1) = -1.0;
        b(r) = -bulk;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    svd.setThreshold(options.rank_tolerance);
    const int rank = static_cast<int>(svd.rank());

    CalibrationResult result;
    result.rank = rank;
    result.unknowns = n_unknowns;
    if (rank < n_unknowns) {
        auto describe = [&](int col) {
            return col < static_cast<int>(params.size())
                       ? param_name(params[col].first, params[col].second)
                       : std::string("offset");
        };
        for (int k = rank; k < n_unknowns; ++k) {
            const Eigen::VectorXd dir = svd.matrixV().col(k);
            std::string combo;
            for (int c = 0; c < n_unknowns; ++c) {
                if (std::abs(dir(c)) < 1e-6) continue;
                if (!combo.empty()) combo += " ";
                combo += std::format("{:+.3f}*{}", dir(c), describe(c));
            }
            result.unresolved.push_back(combo);
        }
        if (options.require_full_rank) {
            throw UnderdeterminedError(
                std::format("observation set leaves {} parameter combination(s) "
                            "unconstrained",
                            n_unknowns - rank),
                result.unresolved);
        }
    }

    const Eigen::VectorXd x = svd.solve(b);  // minimum-norm least squares

    result.table = dm_initial.table;
    result.table.delta_k.clear();
    for (std::size_t c = 0; c < params.size(); ++c)
        result.table.delta_k[params[c]] = x(static_cast<int>(c));
    result.table.offset_rad_per_m = x(n_unknowns - 1);

    DispersionModel fitted{dm_initial.sellmeier, result.table};
    const Eigen::VectorXd r_vec = A * x - b;
    KahanSum ss_rad, ss_nm;
    for (int r = 0; r < n_rows; ++r) {
        CalibrationRow row;
        row.obs = observations[r];
        row.residual_rad_per_m = r_vec(r);
        const double lam = observations[r].lambda_deg_nm;
        const double h = 0.01;
        const double slope = (mismatch(fitted, grating, observations[r].triplet, lam + h,
                                       lam + h) -
                              mismatch(fitted, grating, observations[r].triplet, lam - h,
                                       lam - h)) /
                             (2.0 * h);
        row.residual_nm = row.residual_rad_per_m / slope;
        ss_rad.add(row.residual_rad_per_m * row.residual_rad_per_m);
        ss_nm.add(row.residual_nm * row.residual_nm);
        result.rows.push_back(row);
    }
    result.rms_rad_per_m = std::sqrt(ss_rad.value() / n_rows);
    result.rms_nm = std::sqrt(ss_nm.value() / n_rows);
    return result;
}

std::vector<double> GridSpec::wavelengths() const {
    if (points < 2) throw ValidationError("grid needs at least 2 points per axis");
    if (!(lambda_min_nm > 0.0 && lambda_max_nm > lambda_min_nm))
        throw ValidationError("grid wavelength bounds must satisfy 0 < min < max");
    // Uniform in frequency, reported as ascending vacuum wavelength.
    const double nu_max = 1.0 / lambda_min_nm;
    const double nu_min = 1.0 / lambda_max_nm;
    const double dnu = (nu_max - nu_min) / (points - 1);
    std::vector<double> lam(points);
    for (int k = 0; k < points; ++k) lam[k] = 1.0 / (nu_max - k * dnu);
    lam.front() = lambda_min_nm;
    lam.back() = lambda_max_nm;
    return lam;
}

BandMap band_map(const DispersionModel& dm, const QpmGrating& g,
                 std::span<const ModeTriplet> triplets, const GridSpec& spec) {
    if (triplets.empty()) throw ValidationError("band map needs at least one triplet");
    BandMap map;
    map.spec = spec;
    map.lambda_h_nm = spec.wavelengths();
    map.lambda_v_nm = map.lambda_h_nm;
    const int n = spec.points;

    // Pump wavevector depends only on the frequency sum; with both axes on
    // the same uniform frequency grid the sum takes 2n-1 distinct values.
    const double nu_max = 1.0 / spec.lambda_min_nm;
    const double nu_min = 1.0 / spec.lambda_max_nm;
    const double dnu = (nu_max - nu_min) / (n - 1);
    std::vector<double> k_pump_bulk(2 * n - 1);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const double nu_sum = 2.0 * nu_min + s * dnu;  // nm^-1
        const double lam_p = 1.0 / nu_sum;
        k_pump_bulk[s] =
            kTwoPi * bulk_index(dm.sellmeier, Field::P, lam_p) / (lam_p * 1e-9);
    }
    std::vector<double> k_h(n), k_v(n);
    for (int i = 0; i < n; ++i) {
        k_h[i] = kTwoPi * bulk_index(dm.sellmeier, Field::H, map.lambda_h_nm[i]) /
                 (map.lambda_h_nm[i] * 1e-9);
        k_v[i] = kTwoPi * bulk_index(dm.sellmeier, Field::V, map.lambda_v_nm[i]) /
                 (map.lambda_v_nm[i] * 1e-9);
    }
    const double qpm = kTwoPi * g.qpm_order / (g.poling_period_um * 1e-6);
    const double len_m = g.length_mm * 1e-3;

    for (const ModeTriplet& t : triplets) {
        BandLayer layer;
        layer.triplet = t;
        layer.value.resize(static_cast<std::size_t>(n) * n);
        const double dk_const = dm.table.correction(Field::P, t.pump) -
                                dm.table.correction(Field::H, t.h) -
                                dm.table.correction(Field::V, t.v) - qpm -
                                dm.table.offset_rad_per_m;
        for (int ih = 0; ih < n; ++ih) {
            // lambda index i corresponds to frequency nu_max - i*dnu; the sum
            // of grid frequencies at (ih, iv) lands on slot 2(n-1)-ih-iv.
            for (int iv = 0; iv < n; ++iv) {
                const double db =
                    k_pump_bulk[2 * (n - 1) - ih - iv] - k_h[ih] - k_v[iv] + dk_const;
                const double a = sinc(0.5 * db * len_m);
                layer.value[static_cast<std::size_t>(ih) * n + iv] = a * a;
            }
        }
        map.layers.push_back(std::move(layer));
    }
    return map;
}

}  // namespace ppwg
