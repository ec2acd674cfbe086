#include "ppwg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <format>
#include <fstream>
#include <numbers>

#include "ppwg/beamquality.hpp"
#include "ppwg/csv.hpp"
#include "ppwg/errors.hpp"
#include "ppwg/manifest.hpp"
#include "ppwg/polarization.hpp"
#include "ppwg/rng.hpp"

namespace ppwg {

namespace {

std::ofstream open_report(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
}

std::string layer_file_name(const std::string& prefix, const ModeTriplet& t) {
    return std::format("{}_{}P_{}H_{}V.csv", prefix, t.pump.label(), t.h.label(),
                       t.v.label());
}

DispersionModel calibrated_model(const ProjectConfig& cfg,
                                 const std::filesystem::path& table_path) {
    if (table_path.empty() || !std::filesystem::exists(table_path))
        throw ValidationError(
            "no dispersion table at '" + table_path.string() +
            "'; run `ppwg calibrate` first and pass its output via --table");
    DispersionModel dm = cfg.dispersion_base();
    dm.table = read_dispersion_table(table_path);
    return dm;
}

}  // namespace

void cmd_calibrate(const CommonOptions& opt, const std::filesystem::path& sfg_csv) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    const std::vector<SfgObservation> obs = read_sfg_csv(sfg_csv);

    const CalibrationResult result =
        calibrate(obs, cfg.dispersion_base(), cfg.grating);

    const auto table_path = opt.out_dir / "dispersion_table.conf";
    write_dispersion_table(table_path, result);

    const auto report_path = opt.out_dir / "calibration_report.txt";
    {
        auto out = open_report(report_path);
        out << "calibration of the geometric dispersion table\n";
        out << std::format("observations: {}   unknowns: {}   rank: {}\n",
                           result.rows.size(), result.unknowns, result.rank);
        out << std::format("rms residual: {} rad/m = {} nm\n",
                           format_number(result.rms_rad_per_m),
                           format_number(result.rms_nm));
        for (const std::string& u : result.unresolved)
            out << "unresolved combination (minimum-norm representative chosen): " << u
                << '\n';
        out << '\n';
        out << "lambda_nm  triplet           residual_rad_per_m  residual_nm\n";
        for (const CalibrationRow& row : result.rows)
            out << std::format("{:9.2f}  {:16s}  {:18.3f}  {:11.4f}\n",
                               row.obs.lambda_deg_nm, row.obs.triplet.label(),
                               row.residual_rad_per_m, row.residual_nm);
    }

    RunManifest manifest("calibrate", opt.config_path);
    manifest.add_input(sfg_csv);
    manifest.add_output(table_path);
    manifest.add_output(report_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

void cmd_bands(const CommonOptions& opt, const BandsOptions& bands) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    const DispersionModel dm = calibrated_model(cfg, bands.table_path);

    std::vector<ModeTriplet> triplets = cfg.triplet_universe();
    if (bands.pump_00_only) {
        std::erase_if(triplets,
                      [](const ModeTriplet& t) { return t.pump != ModeIndex{0, 0}; });
    }
    GridSpec spec = cfg.grid_bands;
    if (bands.points) spec.points = *bands.points;

    const BandMap map = band_map(dm, cfg.grating, triplets, spec);

    RunManifest manifest("bands", opt.config_path);
    manifest.add_input(bands.table_path);
    manifest.add_note("pump_00_only", bands.pump_00_only ? "true" : "false");
    manifest.add_note("grid_points", std::to_string(spec.points));

    const auto layers_path = opt.out_dir / "bands_layers.txt";
    {
        auto idx = open_report(layers_path);
        idx << "file,triplet\n";
        for (const BandLayer& layer : map.layers) {
            const std::string name = layer_file_name("band", layer.triplet);
            write_layer_csv(opt.out_dir / name, map.lambda_h_nm, map.lambda_v_nm,
                            layer.value);
            idx << name << ',' << layer.triplet.label() << '\n';
        }
    }
    for (const BandLayer& layer : map.layers)
        manifest.add_output(opt.out_dir / layer_file_name("band", layer.triplet));

    // Degenerate band positions for the same triplet set.
    const auto report_path = opt.out_dir / "bands_report.txt";
    {
        auto out = open_report(report_path);
        out << "degenerate phase-matching wavelengths\n";
        out << "triplet           lambda_deg_nm\n";
        for (const ModeTriplet& t : triplets) {
            try {
                const double ld = degenerate_pm_wavelength(dm, cfg.grating, t,
                                                           cfg.search);
                out << std::format("{:16s}  {}\n", t.label(), format_number(ld));
            } catch (const NotPhaseMatchedError&) {
                out << std::format("{:16s}  not phase matched in window\n", t.label());
            }
        }
    }
    manifest.add_output(layers_path);
    manifest.add_output(report_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

void cmd_jsa(const CommonOptions& opt, const JsaOptions& jsa) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    const DispersionModel dm = calibrated_model(cfg, jsa.table_path);

    GridSpec spec = cfg.grid_jsa;
    if (jsa.points) spec.points = *jsa.points;

    const std::vector<TripletWeight> weights = cfg.jsa_weights();
    const JointSpectrum js = joint_spectrum(dm, cfg.grating, cfg.pump, weights, spec);
    const auto islands = island_weights(js);

    RunManifest manifest("jsa", opt.config_path);
    manifest.add_input(jsa.table_path);
    manifest.add_note("grid_points", std::to_string(spec.points));

    const auto layers_path = opt.out_dir / "jsa_layers.txt";
    {
        auto idx = open_report(layers_path);
        idx << "file,triplet,layer_weight,island_weight\n";
        for (std::size_t l = 0; l < js.layers.size(); ++l) {
            const std::string name = layer_file_name("jsa", js.layers[l].triplet);
            std::vector<double> values(js.layers[l].raw.size());
            for (std::size_t ih = 0; ih < js.lambda_h_nm.size(); ++ih)
                for (std::size_t iv = 0; iv < js.lambda_v_nm.size(); ++iv)
                    values[ih * js.lambda_v_nm.size() + iv] = js.value(l, ih, iv);
            write_layer_csv(opt.out_dir / name, js.lambda_h_nm, js.lambda_v_nm, values);
            idx << name << ',' << js.layers[l].triplet.label() << ','
                << format_number(js.layers[l].weight) << ','
                << format_number(islands[l].second) << '\n';
            manifest.add_output(opt.out_dir / name);
        }
    }

    const auto summary_path = opt.out_dir / "jsa_summary.txt";
    {
        auto out = open_report(summary_path);
        out << "joint spectrum summary\n";
        out << std::format("grid: {} x {} over [{}, {}] nm\n", spec.points, spec.points,
                           format_number(spec.lambda_min_nm),
                           format_number(spec.lambda_max_nm));
        out << "\nisland weights (unfiltered):\n";
        auto sorted = islands;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [t, w] : sorted)
            out << std::format("  {:16s}  {}\n", t.label(), format_number(w));

        const ModeTriplet fundamental{{0, 0}, {0, 0}, {0, 0}};
        const JointSpectrum filtered = apply_filter(js, cfg.herald);
        const double purity = spatial_purity(filtered, fundamental);
        out << std::format(
            "\nherald filter: arm {} center {} nm fwhm {} nm ({})\n",
            to_string(cfg.herald.arm), format_number(cfg.herald.center_nm),
            format_number(cfg.herald.fwhm_nm),
            cfg.herald.shape == SpectralFilter::Shape::gaussian ? "gaussian"
                                                                : "rectangular");
        out << std::format("spatial purity of {}: {}\n", fundamental.label(),
                           format_number(purity));

        const HeraldedWeights her = heralded_mode_weights(js, cfg.herald);
        out << std::format("\nheralded mode weights (arm {}):\n",
                           to_string(her.conjugate_arm));
        for (const auto& [m, w] : her.modes)
            out << std::format("  {}  {}\n", m.label(), format_number(w));
        const auto her_x = her.axis_orders(0);
        const auto her_y = her.axis_orders(1);
        out << std::format("predicted M2: x {}  y {}\n",
                           format_number(predict_m2(her_x)),
                           format_number(predict_m2(her_y)));

        const Arm scan_arm = cfg.herald.arm == Arm::H ? Arm::V : Arm::H;
        const HeraldedWeights unher = unheralded_mode_weights(js, scan_arm);
        out << std::format("\nunheralded mode weights (arm {}):\n",
                           to_string(scan_arm));
        for (const auto& [m, w] : unher.modes)
            out << std::format("  {}  {}\n", m.label(), format_number(w));
        out << std::format("predicted M2: x {}  y {}\n",
                           format_number(predict_m2(unher.axis_orders(0))),
                           format_number(predict_m2(unher.axis_orders(1))));
    }

    manifest.add_output(layers_path);
    manifest.add_output(summary_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

void cmd_knife_synth(const CommonOptions& opt, const KnifeSynthOptions& synth) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    if (cfg.knife_z_planes_mm.empty())
        throw ValidationError("config [knife] z_planes_mm lists no planes");

    BeamModel beam;
    beam.order_weights = synth.order_weights.value_or(cfg.knife_order_weights);
    beam.waist_um = cfg.knife_waist_um;
    beam.lambda_nm = cfg.knife_lambda_nm;
    beam.z0_mm = cfg.knife_z0_mm;
    beam.peak_rate_hz = cfg.knife_peak_rate_hz;
    beam.background_rate_hz = cfg.knife_background_hz;
    const double m2 = predict_m2(beam.order_weights);

    const std::uint64_t seed = opt.seed.value_or(cfg.knife_seed);
    const double z_r_mm =
        std::numbers::pi * beam.waist_um * beam.waist_um / (beam.lambda_nm * 1e-3) / 1e3;

    KnifeEdgeScan scan;
    for (std::size_t k = 0; k < cfg.knife_z_planes_mm.size(); ++k) {
        const double z = cfg.knife_z_planes_mm[k];
        const double zr = (z - beam.z0_mm) / z_r_mm;
        const double w = beam.waist_um * std::sqrt(1.0 + zr * zr);
        const double span = cfg.knife_span_factor * w * std::sqrt(m2);
        ScanPlan plan;
        plan.z_mm = {z};
        plan.direction = synth.direction;
        plan.duration_s = cfg.knife_duration_s;
        plan.x_um.resize(cfg.knife_x_points);
        for (int ix = 0; ix < cfg.knife_x_points; ++ix)
            plan.x_um[ix] = -span + 2.0 * span * ix / (cfg.knife_x_points - 1);
        const KnifeEdgeScan part = synth_scan(beam, plan, seed + k, true);
        scan.insert(scan.end(), part.begin(), part.end());
    }

    const auto scan_path = opt.out_dir / "scan.csv";
    write_scan_csv(scan_path, scan);

    RunManifest manifest("knife synth", opt.config_path);
    manifest.add_note("seed", std::to_string(seed));
    manifest.add_note("order_weights_m2", format_number(m2));
    manifest.add_output(scan_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

namespace {

void write_edge_fits_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<ScanDirection, CausticPoint>>& zs,
                         const std::vector<EdgeFit>& fits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "z_mm,direction,w_um,sigma_w_um,x0_um,amplitude,background,r_squared\n";
    for (std::size_t k = 0; k < fits.size(); ++k)
        out << format_number(zs[k].second.z_mm) << ',' << to_string(zs[k].first) << ','
            << format_number(fits[k].w_um) << ',' << format_number(fits[k].sigma_w_um)
            << ',' << format_number(fits[k].x0_um) << ','
            << format_number(fits[k].amplitude) << ','
            << format_number(fits[k].background) << ','
            << format_number(fits[k].r_squared) << '\n';
}

std::vector<ScanDirection> directions_in(const KnifeEdgeScan& scan) {
    std::vector<ScanDirection> dirs;
    for (ScanDirection d : {ScanDirection::horizontal, ScanDirection::vertical}) {
        if (std::any_of(scan.begin(), scan.end(),
                        [d](const ScanPoint& p) { return p.direction == d; }))
            dirs.push_back(d);
    }
    return dirs;
}

}  // namespace

void cmd_knife_fit(const CommonOptions& opt, const std::filesystem::path& scan_csv) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    const KnifeEdgeScan scan = read_scan_csv(scan_csv);

    std::vector<std::pair<ScanDirection, CausticPoint>> planes;
    std::vector<EdgeFit> fits;
    for (ScanDirection d : directions_in(scan)) {
        std::vector<EdgeFit> dir_fits;
        const auto pts = fit_all_planes(scan, d, &dir_fits);
        for (std::size_t k = 0; k < pts.size(); ++k) planes.emplace_back(d, pts[k]);
        fits.insert(fits.end(), dir_fits.begin(), dir_fits.end());
    }
    const auto fits_path = opt.out_dir / "edge_fits.csv";
    write_edge_fits_csv(fits_path, planes, fits);

    RunManifest manifest("knife fit", opt.config_path);
    manifest.add_input(scan_csv);
    manifest.add_output(fits_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

void cmd_knife_m2(const CommonOptions& opt, const std::filesystem::path& scan_csv) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    const KnifeEdgeScan scan = read_scan_csv(scan_csv);

    std::vector<std::pair<ScanDirection, CausticPoint>> planes;
    std::vector<EdgeFit> fits;
    const auto report_path = opt.out_dir / "m2_report.txt";
    auto out = open_report(report_path);
    out << "beam quality analysis\n";
    for (ScanDirection d : directions_in(scan)) {
        std::vector<EdgeFit> dir_fits;
        const auto pts = fit_all_planes(scan, d, &dir_fits);
        for (std::size_t k = 0; k < pts.size(); ++k) planes.emplace_back(d, pts[k]);
        fits.insert(fits.end(), dir_fits.begin(), dir_fits.end());

        out << std::format("\n[{} scan, {} planes]\n", to_string(d), pts.size());
        double min_r2 = 1.0;
        for (const EdgeFit& f : dir_fits) min_r2 = std::min(min_r2, f.r_squared);
        out << std::format("lowest edge-fit R^2: {}\n", format_number(min_r2));

        const M2Fit fit = fit_caustic(pts, cfg.knife_lambda_nm);
        out << std::format("w0 = {} um, z0 = {} mm\n", format_number(fit.w0_um),
                           format_number(fit.z0_mm));
        out << std::format("M2 = {} +- {}\n", format_number(fit.m2),
                           format_number(fit.sigma_m2));
        out << std::format("z_R = {} mm\n", format_number(fit.z_r_mm));

        std::vector<double> zs;
        for (const auto& p : pts) zs.push_back(p.z_mm);
        const IsoSamplingCheck iso = iso_sampling_check(zs, fit);
        out << std::format("ISO sampling: {} ({})\n", iso.pass ? "pass" : "fail",
                           iso.diagnostic);
    }
    const auto fits_path = opt.out_dir / "edge_fits.csv";
    write_edge_fits_csv(fits_path, planes, fits);

    RunManifest manifest("knife m2", opt.config_path);
    manifest.add_input(scan_csv);
    manifest.add_output(fits_path);
    manifest.add_output(report_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

namespace {

double drifted_power(double base_mw, std::size_t index, std::size_t total) {
    // Slow deterministic pump drift over the run, a few percent peak to peak.
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(index) /
                         std::max<std::size_t>(1, total);
    return base_mw * (1.0 + 0.02 * std::sin(phase));
}

}  // namespace

void cmd_bell_simulate(const CommonOptions& opt) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    if (!cfg.pulse_rate_hz)
        throw ValidationError("config [bell] pulse_rate_hz is required to simulate "
                              "accidental coincidences");
    const double f_rep = *cfg.pulse_rate_hz;
    const TwoPhotonPolState state = shih_alley_state(cfg.bell_noise);
    const std::uint64_t seed = opt.seed.value_or(cfg.bell_seed);

    RunManifest manifest("bell simulate", opt.config_path);
    manifest.add_note("seed", std::to_string(seed));

    // CHSH block: 16 settings, fixed duration each, accidentals injected and
    // a slow power drift applied to the true pair rate.
    {
        std::mt19937_64 rng(seed);
        const double duration = 180.0;
        const double acc_counts =
            accidental_rate(cfg.bell_singles_hz, cfg.bell_singles_hz, f_rep) * duration;
        std::vector<CountRecord> records;
        std::size_t index = 0;
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
                        rec.duration_s = duration;
                        rec.power_mw = drifted_power(cfg.bell_power_mw, index, 16);
                        const double scale =
                            std::pow(rec.power_mw / cfg.bell_power_mw,
                                     cfg.drift_exponent);
                        const double mean =
                            cfg.bell_pairs_per_setting * prob * scale + acc_counts;
                        rec.coincidences =
                            static_cast<double>(poisson_sample(rng, mean));
                        rec.singles1_hz = cfg.bell_singles_hz;
                        rec.singles2_hz = cfg.bell_singles_hz;
                        records.push_back(rec);
                        ++index;
                    }
        const auto path = opt.out_dir / "chsh_counts.csv";
        write_count_csv(path, records);
        manifest.add_output(path);
    }

    // Visibility scans against six reference polarizations. Linear references
    // scan the half-wave plate; circular references scan the polarizer with
    // the quarter-wave plate at 45 degrees.
    struct Reference {
        const char* name;
        AnalyzerSetting arm1;
        bool polarizer_scan;
    };
    const Reference refs[] = {
        {"h", linear_setting(0.0), false},   {"v", linear_setting(90.0), false},
        {"d", linear_setting(45.0), false},  {"a", linear_setting(135.0), false},
        {"r", circular_setting(true), true}, {"l", circular_setting(false), true},
    };
    const int n_angles = 19;
    std::uint64_t scan_seed = seed;
    for (const Reference& ref : refs) {
        ++scan_seed;
        std::mt19937_64 rng(scan_seed);
        const double duration = 30.0;
        const double acc_counts =
            accidental_rate(cfg.bell_singles_hz, cfg.bell_singles_hz, f_rep) * duration;
        std::vector<CountRecord> records;
        for (int k = 0; k < n_angles; ++k) {
            const double theta = 180.0 * k / (n_angles - 1);
            CountRecord rec;
            rec.arm1 = ref.arm1;
            rec.arm2 = ref.polarizer_scan ? AnalyzerSetting{45.0, 0.0, theta}
                                          : linear_setting(theta);
            rec.duration_s = duration;
            rec.power_mw = drifted_power(cfg.bell_power_mw, k, n_angles);
            const double scale =
                std::pow(rec.power_mw / cfg.bell_power_mw, cfg.drift_exponent);
            const double prob = coincidence_prob(state, rec.arm1, rec.arm2);
            const double mean =
                2.0 * cfg.bell_scan_peak_counts * prob * scale + acc_counts;
            rec.coincidences = static_cast<double>(poisson_sample(rng, mean));
            rec.singles1_hz = cfg.bell_singles_hz;
            rec.singles2_hz = cfg.bell_singles_hz;
            records.push_back(rec);
        }
        const auto path = opt.out_dir / std::format("vis_{}.csv", ref.name);
        write_count_csv(path, records);
        manifest.add_output(path);
    }
    manifest.write(opt.out_dir / "manifest.txt");
}

namespace {

// Identify the varying analyzer angle of a scan and return (label, effective
// polarization angle per record). Half-wave plate angles count double.
std::pair<std::string, std::vector<double>> scan_angles(
    std::span<const CountRecord> records) {
    struct Column {
        const char* name;
        double factor;
        double (*get)(const CountRecord&);
    };
    static const Column columns[] = {
        {"pol2_deg", 1.0, [](const CountRecord& r) { return r.arm2.pol_deg; }},
        {"hwp2_deg", 2.0, [](const CountRecord& r) { return r.arm2.hwp_deg; }},
        {"pol1_deg", 1.0, [](const CountRecord& r) { return r.arm1.pol_deg; }},
        {"hwp1_deg", 2.0, [](const CountRecord& r) { return r.arm1.hwp_deg; }},
    };
    for (const Column& col : columns) {
        double lo = col.get(records[0]), hi = lo;
        for (const CountRecord& r : records) {
            lo = std::min(lo, col.get(r));
            hi = std::max(hi, col.get(r));
        }
        if (hi - lo > 1e-9) {
            std::vector<double> angles;
            for (const CountRecord& r : records) angles.push_back(col.factor * col.get(r));
            return {col.name, angles};
        }
    }
    throw ValidationError("no analyzer angle varies across the records");
}

VisibilityFit fit_records(std::span<const CountRecord> records,
                          const std::vector<double>& angles) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < records.size(); ++k)
        pts.emplace_back(angles[k], records[k].coincidences);
    return fit_visibility(pts);
}

}  // namespace

void cmd_bell_visibility(const CommonOptions& opt, const BellAnalysisOptions& bell) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    if (bell.record_files.empty())
        throw ValidationError("no record files given (use --records)");
    if (bell.apply_corrections && !cfg.pulse_rate_hz)
        throw ValidationError("corrections requested but [bell] pulse_rate_hz is not "
                              "configured");

    RunManifest manifest("bell visibility", opt.config_path);
    const auto report_path = opt.out_dir / "visibility_report.txt";
    auto out = open_report(report_path);
    out << "polarization interference visibilities\n";
    out << "scan              raw V           corrected V\n";
    for (const auto& file : bell.record_files) {
        const std::vector<CountRecord> raw = read_count_csv(file);
        manifest.add_input(file);
        const auto [column, angles] = scan_angles(raw);
        const VisibilityFit fit_raw = fit_records(raw, angles);
        std::string corrected = "-";
        if (bell.apply_corrections) {
            CorrectionOptions copt;
            copt.pulse_rate_hz = *cfg.pulse_rate_hz;
            copt.drift_exponent = cfg.drift_exponent;
            const auto corr = correct_counts(raw, copt);
            const VisibilityFit fit_corr = fit_records(corr, angles);
            corrected = std::format("{:.4f} +- {:.4f}", fit_corr.visibility,
                                    fit_corr.sigma);
        }
        out << std::format("{:14s}  {:.4f} +- {:.4f}  {}  (scan column {})\n",
                           file.stem().string(), fit_raw.visibility, fit_raw.sigma,
                           corrected, column);
    }
    out.close();
    manifest.add_output(report_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

void cmd_bell_chsh(const CommonOptions& opt, const BellAnalysisOptions& bell) {
    const ProjectConfig cfg = load_project_config(opt.config_path);
    ensure_out_dir(opt.out_dir);
    if (bell.record_files.size() != 1)
        throw ValidationError("chsh expects exactly one record file");
    if (bell.apply_corrections && !cfg.pulse_rate_hz)
        throw ValidationError("corrections requested but [bell] pulse_rate_hz is not "
                              "configured");

    std::vector<CountRecord> records = read_count_csv(bell.record_files[0]);
    if (bell.apply_corrections) {
        CorrectionOptions copt;
        copt.pulse_rate_hz = *cfg.pulse_rate_hz;
        copt.drift_exponent = cfg.drift_exponent;
        records = correct_counts(records, copt);
    }
    const ChshResult res = chsh_from_counts(records);

    const auto report_path = opt.out_dir / "chsh_report.txt";
    {
        auto out = open_report(report_path);
        out << "CHSH analysis at standard settings\n";
        out << std::format("E(a , b ) = {:+.6f}\n", res.e_ab);
        out << std::format("E(a , b') = {:+.6f}\n", res.e_ab2);
        out << std::format("E(a', b ) = {:+.6f}\n", res.e_a2b);
        out << std::format("E(a', b') = {:+.6f}\n", res.e_a2b2);
        out << std::format("S = {:.6f} +- {:.6f}\n", res.s, res.sigma);
        out << std::format("violation of S <= 2 by {:.1f} standard deviations\n",
                           res.violation_sigmas);
    }
    RunManifest manifest("bell chsh", opt.config_path);
    manifest.add_input(bell.record_files[0]);
    manifest.add_output(report_path);
    manifest.write(opt.out_dir / "manifest.txt");
}

}  // namespace ppwg
