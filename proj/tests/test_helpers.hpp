#pragma once

#include <vector>

#include "ppwg/csv.hpp"
#include "ppwg/modes.hpp"
#include "ppwg/phasematch.hpp"

namespace ppwg::testing {

// Fan et al. (1987) flux-grown KTP coefficients, matching data/ktp_sellmeier.conf.
inline SellmeierModel ktp_sellmeier() {
    SellmeierModel m;
    SellmeierCoeffs y;
    y.a = 3.0333;
    y.poles = {{0.04154, 0.04547}};
    y.d = -0.01408;
    y.valid_min_um = 0.35;
    y.valid_max_um = 3.5;
    y.source = "Fan et al. 1987, y axis";
    SellmeierCoeffs z;
    z.a = 3.3134;
    z.poles = {{0.05694, 0.05658}};
    z.d = -0.01682;
    z.valid_min_um = 0.35;
    z.valid_max_um = 3.5;
    z.source = "Fan et al. 1987, z axis";
    m.axes["y"] = y;
    m.axes["z"] = z;
    m.field_axis = {{Field::P, "y"}, {Field::H, "y"}, {Field::V, "z"}};
    return m;
}

inline HGModeBasis default_basis() {
    HGModeBasis b;
    b.p = {1.0, 0.8, -1.15};
    b.h = {2.14, 3.4, 0.0};
    b.v = {1.4, 2.55, 0.0};
    return b;
}

inline QpmGrating default_grating() { return QpmGrating{7.5, 1, 1.0}; }

inline std::vector<SfgObservation> table1() {
    return read_sfg_csv(PPWG_DATA_DIR "/sfg_degenerate.csv");
}

inline DispersionModel calibrated_model() {
    DispersionModel dm{ktp_sellmeier(), {}};
    const auto obs = table1();
    const CalibrationResult res = calibrate(obs, dm, default_grating());
    dm.table = res.table;
    return dm;
}

inline ModeTriplet triplet(const char* p, const char* h, const char* v) {
    return ModeTriplet{ModeIndex::from_label(p), ModeIndex::from_label(h),
                       ModeIndex::from_label(v)};
}

}  // namespace ppwg::testing
