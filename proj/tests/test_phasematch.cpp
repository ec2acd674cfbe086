#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ppwg/errors.hpp"
#include "ppwg/phasematch.hpp"
#include "ppwg/rng.hpp"
#include "test_helpers.hpp"

using namespace ppwg;
using namespace ppwg::testing;

namespace {

// Root of sinc^2(x) = 1/2, found by an independent 1-D bisection oracle.
double sinc_half_max_arg() {
    double lo = 1.0, hi = 2.0;
    auto f = [](double x) { return sqr(std::sin(x) / x) - 0.5; };
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("pm_amplitude: peak, first null, bounds, parity") {
    CHECK(pm_amplitude(0.0, 1.0) == 1.0);
    // First null at dbeta = 2 pi / L.
    const double L_mm = 1.0;
    const double dbeta_null = 2.0 * std::numbers::pi / (L_mm * 1e-3);
    CHECK(std::abs(pm_amplitude(dbeta_null, L_mm)) < 1e-12);
    for (double db : {1.0e3, -1.0e3, 5.5e3, 2.0e4, 1.0e5}) {
        const double a = pm_amplitude(db, L_mm);
        CHECK(a == pm_amplitude(-db, L_mm));
        CHECK(a <= 1.0);
        CHECK(a >= -0.2173);
    }
}

TEST_CASE("pm_amplitude FWHM matches the sinc^2 half-max oracle") {
    const double x_half = sinc_half_max_arg();
    CHECK(x_half == doctest::Approx(1.39155737825151).epsilon(1e-10));
    // |amplitude|^2 = 1/2 at L dbeta / 2 = x_half, so the FWHM in dbeta is
    // 2 * x_half * 2 / L.
    const double L_mm = 1.0;
    const double fwhm_expected = 4.0 * x_half / (L_mm * 1e-3);
    const double half = std::sqrt(0.5);
    double lo = 0.0, hi = 1e4;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (pm_amplitude(mid, L_mm) > half) lo = mid;
        else hi = mid;
    }
    CHECK(2.0 * lo == doctest::Approx(fwhm_expected).epsilon(1e-3));
}

TEST_CASE("mismatch is gauge invariant") {
    DispersionModel dm{ktp_sellmeier(), {}};
    dm.table.delta_k[{Field::P, {0, 1}}] = -61273.0;
    dm.table.delta_k[{Field::H, {0, 1}}] = -37643.0;
    dm.table.delta_k[{Field::V, {0, 1}}] = -38263.0;
    dm.table.offset_rad_per_m = -197610.0;
    const QpmGrating g = default_grating();
    const ModeTriplet t = triplet("01", "01", "01");

    const double before = mismatch(dm, g, t, 801.3, 798.2);

    // Per-field constant shifts (including the 00 entries) plus the matching
    // offset shift leave the observable mismatch unchanged.
    const double c_p = 1234.5, c_h = -987.6, c_v = 41.0;
    DispersionModel shifted = dm;
    for (Field f : {Field::P, Field::H, Field::V}) {
        const double c = f == Field::P ? c_p : (f == Field::H ? c_h : c_v);
        for (const ModeIndex m : {ModeIndex{0, 0}, ModeIndex{0, 1}})
            shifted.table.delta_k[{f, m}] += c;
    }
    shifted.table.offset_rad_per_m += c_p - c_h - c_v;
    const double after = mismatch(shifted, g, t, 801.3, 798.2);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("mismatch is symmetric under H<->V swap of tables, modes and axes") {
    DispersionModel dm{ktp_sellmeier(), {}};
    dm.table.delta_k[{Field::H, {0, 1}}] = -37000.0;
    dm.table.delta_k[{Field::V, {0, 1}}] = -38000.0;
    dm.table.delta_k[{Field::H, {0, 2}}] = -62000.0;
    dm.table.delta_k[{Field::V, {0, 2}}] = -52000.0;
    const QpmGrating g = default_grating();

    DispersionModel swapped = dm;
    swapped.sellmeier.field_axis[Field::H] = dm.sellmeier.field_axis.at(Field::V);
    swapped.sellmeier.field_axis[Field::V] = dm.sellmeier.field_axis.at(Field::H);
    swapped.table.delta_k.clear();
    for (const auto& [key, v] : dm.table.delta_k) {
        const Field f = key.first == Field::H ? Field::V
                        : key.first == Field::V ? Field::H
                                                : Field::P;
        swapped.table.delta_k[{f, key.second}] = v;
    }

    const ModeTriplet t1 = triplet("00", "01", "02");
    const ModeTriplet t2 = triplet("00", "02", "01");  // H and V roles exchanged
    CHECK(mismatch(dm, g, t1, 803.0, 797.5) ==
          doctest::Approx(mismatch(swapped, g, t2, 797.5, 803.0)).epsilon(1e-12));
}

TEST_CASE("calibration: single fundamental observation fixes the offset exactly") {
    DispersionModel dm{ktp_sellmeier(), {}};
    const QpmGrating g = default_grating();
    const SfgObservation obs{799.40, triplet("00", "00", "00"), 100.0};
    const CalibrationResult res = calibrate({&obs, 1}, dm, g);
    CHECK(res.unknowns == 1);
    CHECK(res.rank == 1);
    CHECK(std::abs(res.rows[0].residual_rad_per_m) < 1e-6);

    dm.table = res.table;
    CHECK(std::abs(mismatch(dm, g, obs.triplet, 799.40, 799.40)) < 1e-6);
}

TEST_CASE("calibration round-trips synthetic noiseless data exactly") {
    DispersionModel truth{ktp_sellmeier(), {}};
    truth.table.delta_k[{Field::P, {0, 1}}] = -61273.3;
    truth.table.delta_k[{Field::H, {0, 1}}] = -37643.0;
    truth.table.delta_k[{Field::V, {0, 1}}] = -38263.0;
    truth.table.delta_k[{Field::V, {1, 0}}] = 16243.8;
    truth.table.offset_rad_per_m = -197609.9;
    const QpmGrating g = default_grating();

    // A full-rank observation set: each parameter appears in a row where the
    // remaining modes are fundamental, plus the fundamental row for delta.
    std::vector<SfgObservation> obs;
    for (const ModeTriplet& t :
         {triplet("00", "00", "00"), triplet("01", "00", "00"), triplet("00", "01", "00"),
          triplet("00", "00", "01"), triplet("00", "00", "10")}) {
        obs.push_back({degenerate_pm_wavelength(truth, g, t), t, {}});
    }
    DispersionModel init{ktp_sellmeier(), {}};
    const CalibrationResult res = calibrate(obs, init, g);
    CHECK(res.rank == res.unknowns);
    CHECK(res.rms_nm < 1e-6);
    for (const auto& [key, dk] : truth.table.delta_k)
        CHECK(res.table.delta_k.at(key) == doctest::Approx(dk).epsilon(1e-9));
    CHECK(res.table.offset_rad_per_m ==
          doctest::Approx(truth.table.offset_rad_per_m).epsilon(1e-9));
}

TEST_CASE("calibration property: exact recovery for random full-rank tables") {
    std::mt19937_64 rng(42);
    const QpmGrating g = default_grating();
    for (int trial = 0; trial < 5; ++trial) {
        DispersionModel truth{ktp_sellmeier(), {}};
        auto draw = [&] { return (uniform_unit(rng) - 0.5) * 1.2e5; };
        truth.table.delta_k[{Field::P, {0, 1}}] = draw();
        truth.table.delta_k[{Field::H, {0, 1}}] = draw();
        truth.table.delta_k[{Field::V, {0, 1}}] = draw();
        truth.table.offset_rad_per_m = draw() - 1.5e5;

        std::vector<SfgObservation> obs;
        bool feasible = true;
        for (const ModeTriplet& t :
             {triplet("00", "00", "00"), triplet("01", "00", "00"),
              triplet("00", "01", "00"), triplet("00", "00", "01"),
              triplet("01", "01", "01")}) {
            try {
                obs.push_back({degenerate_pm_wavelength(truth, g, t), t, {}});
            } catch (const NotPhaseMatchedError&) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        const CalibrationResult res = calibrate(obs, {ktp_sellmeier(), {}}, g);
        CHECK(res.rms_rad_per_m < 1e-6);
        for (const auto& [key, dk] : truth.table.delta_k)
            CHECK(res.table.delta_k.at(key) == doctest::Approx(dk).epsilon(1e-7));
    }
}

TEST_CASE("calibration of the measured table: residuals and rank structure") {
    const auto obs = table1();
    const CalibrationResult res = calibrate(obs, {ktp_sellmeier(), {}}, default_grating());
    CHECK(res.unknowns == 11);
    CHECK(res.rank == 10);  // one width-mode combination is unobservable
    CHECK(res.unresolved.size() == 1);
    CHECK(res.rms_nm <= 1.0);
    CHECK(res.rms_nm == doctest::Approx(0.58408).epsilon(1e-3));

    // Pinned minimum-norm representative values (regression guard).
    CHECK(res.table.offset_rad_per_m == doctest::Approx(-197609.939157).epsilon(1e-6));
    CHECK(res.table.delta_k.at({Field::V, {0, 1}}) ==
          doctest::Approx(-38262.992051).epsilon(1e-6));
    CHECK(res.table.delta_k.at({Field::H, {0, 1}}) ==
          doctest::Approx(-37642.992196).epsilon(1e-6));

    SUBCASE("strict mode raises the underdetermined error") {
        CalibrationOptions strict;
        strict.require_full_rank = true;
        try {
            calibrate(obs, {ktp_sellmeier(), {}}, default_grating(), strict);
            FAIL("expected UnderdeterminedError");
        } catch (const UnderdeterminedError& e) {
            REQUIRE(e.unresolved_parameters.size() == 1);
            const std::string& combo = e.unresolved_parameters[0];
            CHECK(combo.find("P10") != std::string::npos);
            CHECK(combo.find("P20") != std::string::npos);
            CHECK(combo.find("H10") != std::string::npos);
            CHECK(combo.find("V10") != std::string::npos);
        }
    }
}

TEST_CASE("calibrated model reproduces the measured degenerate wavelengths") {
    const DispersionModel dm = calibrated_model();
    const QpmGrating g = default_grating();
    const auto obs = table1();
    const CalibrationResult res = calibrate(obs, {ktp_sellmeier(), {}}, g);

    for (std::size_t k = 0; k < obs.size(); ++k) {
        const double ld = degenerate_pm_wavelength(dm, g, obs[k].triplet);
        CHECK(std::abs(ld - obs[k].lambda_deg_nm) <=
              std::abs(res.rows[k].residual_nm) + 0.01);
    }

    // The fitted-model mismatch at the measured fundamental wavelength stays
    // inside the fit residual bound.
    const double db = mismatch(dm, g, triplet("00", "00", "00"), 799.40, 799.40);
    double max_resid = 0.0;
    for (const auto& row : res.rows)
        max_resid = std::max(max_resid, std::abs(row.residual_rad_per_m));
    CHECK(std::abs(db) <= max_resid + 1e-9);

    CHECK(degenerate_pm_wavelength(dm, g, triplet("00", "00", "01")) ==
          doctest::Approx(806.80).epsilon(1.1 / 806.80));
}

TEST_CASE("degenerate wavelength shifts monotonically with the global offset") {
    DispersionModel dm = calibrated_model();
    const QpmGrating g = default_grating();
    const ModeTriplet fund = triplet("00", "00", "00");
    const double base = degenerate_pm_wavelength(dm, g, fund);

    // d(mismatch)/d(lambda) along the diagonal is negative here (the pump
    // group index outweighs the H and V ones), so raising the offset must
    // lower the root.
    const double h = 0.01;
    const double slope = (mismatch(dm, g, fund, base + h, base + h) -
                          mismatch(dm, g, fund, base - h, base - h)) /
                         (2.0 * h);
    CHECK(slope < 0.0);

    double prev = base;
    for (double eps : {2000.0, 4000.0, 6000.0}) {
        DispersionModel shifted = dm;
        shifted.table.offset_rad_per_m += eps;
        const double ld = degenerate_pm_wavelength(shifted, g, fund);
        CHECK(ld < prev);
        prev = ld;
    }
}

TEST_CASE("degenerate search reports a missing root") {
    DispersionModel dm = calibrated_model();
    dm.table.offset_rad_per_m += 5.0e5;  // push the band out of the window
    CHECK_THROWS_AS(
        degenerate_pm_wavelength(dm, default_grating(), triplet("00", "00", "00")),
        NotPhaseMatchedError);
}

TEST_CASE("band separations: zero, coarse 00P spacing, close non-00P bands") {
    const DispersionModel dm = calibrated_model();
    const QpmGrating g = default_grating();
    const ModeTriplet fund = triplet("00", "00", "00");
    CHECK(band_separation(dm, g, fund, fund) == 0.0);

    // Nearest band sharing the fundamental pump mode stays > 6 nm away.
    double nearest_00p = 1e9;
    for (const ModeTriplet& t : {triplet("00", "00", "01"), triplet("00", "01", "00"),
                                 triplet("00", "00", "02"), triplet("00", "02", "00"),
                                 triplet("00", "01", "01")})
        nearest_00p = std::min(nearest_00p, band_separation(dm, g, fund, t));
    CHECK(nearest_00p > 6.0);

    // Bands of higher pump modes crowd the fundamental (< 3 nm for at least
    // one of the processes seen in the measured table).
    double nearest_hi = 1e9;
    for (const ModeTriplet& t : {triplet("10", "00", "10"), triplet("10", "10", "00"),
                                 triplet("01", "00", "02"), triplet("01", "02", "00")})
        nearest_hi = std::min(nearest_hi, band_separation(dm, g, fund, t));
    CHECK(nearest_hi < 3.0);
}

TEST_CASE("band map: layer peak on the matched curve, subset, determinism") {
    const DispersionModel dm = calibrated_model();
    const QpmGrating g = default_grating();
    const GridSpec spec{795.0, 805.0, 161};

    const ModeTriplet fund = triplet("00", "00", "00");
    const BandMap map = band_map(dm, g, {&fund, 1}, spec);
    REQUIRE(map.layers.size() == 1);

    // Exact phase matching crosses this grid, so the layer maximum must be
    // essentially 1 on the grid point nearest the curve.
    double peak = 0.0;
    for (double v : map.layers[0].value) peak = std::max(peak, v);
    CHECK(peak > 0.999);

    // Along the diagonal the peak sits at the degenerate wavelength.
    const double ld = degenerate_pm_wavelength(dm, g, fund);
    double best = 0.0, best_lam = 0.0;
    for (int i = 0; i < spec.points; ++i) {
        const double v = map.layers[0].value[static_cast<std::size_t>(i) * spec.points + i];
        if (v > best) {
            best = v;
            best_lam = map.lambda_h_nm[i];
        }
    }
    CHECK(std::abs(best_lam - ld) < 2.0 * (805.0 - 795.0) / (spec.points - 1));

    SUBCASE("grid values agree with pointwise mismatch evaluation") {
        const int ih = 40, iv = 97;
        const double db =
            mismatch(dm, g, fund, map.lambda_h_nm[ih], map.lambda_v_nm[iv]);
        CHECK(map.layers[0].value[static_cast<std::size_t>(ih) * spec.points + iv] ==
              doctest::Approx(sqr(pm_amplitude(db, g.length_mm))).epsilon(1e-9));
    }

    SUBCASE("restricting to pump 00 yields a subset of the full layer list") {
        std::vector<ModeTriplet> all, pump00;
        for (const char* p : {"00", "01", "10"})
            for (const char* h : {"00", "01"})
                all.push_back(triplet(p, h, "00"));
        for (const ModeTriplet& t : all)
            if (t.pump == ModeIndex{0, 0}) pump00.push_back(t);

        const BandMap full = band_map(dm, g, all, spec);
        const BandMap sub = band_map(dm, g, pump00, spec);
        for (const BandLayer& lsub : sub.layers) {
            bool found = false;
            for (const BandLayer& lfull : full.layers)
                if (lfull.triplet == lsub.triplet) {
                    CHECK(lfull.value == lsub.value);  // bit identical
                    found = true;
                }
            CHECK(found);
        }
    }

    SUBCASE("recomputation is bit-for-bit reproducible") {
        const BandMap again = band_map(dm, g, {&fund, 1}, spec);
        CHECK(again.layers[0].value == map.layers[0].value);
    }

    SUBCASE("empty triplet list is rejected") {
        CHECK_THROWS_AS(band_map(dm, g, {}, spec), ValidationError);
    }
}

TEST_CASE("band centers along the diagonal reproduce the measured 7.4 nm spacing") {
    const DispersionModel dm = calibrated_model();
    const QpmGrating g = default_grating();
    const double sep = band_separation(dm, g, triplet("00", "00", "00"),
                                       triplet("00", "00", "01"));
    // 806.80 - 799.40 from the measured table; the model reproduces it within
    // the combined fit residuals of the two rows.
    CHECK(sep == doctest::Approx(7.4).epsilon(1.3 / 7.4));
}

TEST_CASE("band FWHM in wavelength halves when the medium length doubles") {
    const DispersionModel dm = calibrated_model();
    const ModeTriplet fund = triplet("00", "00", "00");

    auto diagonal_fwhm = [&](double length_mm) {
        QpmGrating g = default_grating();
        g.length_mm = length_mm;
        const double ld = degenerate_pm_wavelength(dm, g, fund);
        auto val = [&](double lam) {
            return sqr(pm_amplitude(mismatch(dm, g, fund, lam, lam), g.length_mm));
        };
        double lo = ld, hi = ld + 2.0;
        for (int k = 0; k < 100; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (val(mid) > 0.5) lo = mid;
            else hi = mid;
        }
        const double upper = 0.5 * (lo + hi);
        lo = ld - 2.0;
        hi = ld;
        for (int k = 0; k < 100; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (val(mid) > 0.5) hi = mid;
            else lo = mid;
        }
        return upper - 0.5 * (lo + hi);
    };
    const double f1 = diagonal_fwhm(1.0);
    const double f2 = diagonal_fwhm(2.0);
    CHECK(f1 / f2 == doctest::Approx(2.0).epsilon(1e-3));
}
