#include "ppwg/config.hpp"

#include <algorithm>
#include <cmath>
#include <format>
#include <fstream>
#include <set>

#include "ppwg/csv.hpp"
#include "ppwg/errors.hpp"
#include "ppwg/ini.hpp"

namespace ppwg {

namespace {

void reject_unknown_keys(const IniFile& ini, const std::string& section,
                         const std::set<std::string>& known) {
    for (const std::string& k : ini.keys(section))
        if (!known.contains(k))
            throw ValidationError(std::format("{}: unknown key '{}' in section [{}]",
                                              ini.path().string(), k, section));
}

void reject_unknown_sections(const IniFile& ini, const std::set<std::string>& known) {
    for (const std::string& s : ini.sections())
        if (!known.contains(s))
            throw ValidationError(std::format("{}: unknown section [{}]",
                                              ini.path().string(), s));
}

SellmeierCoeffs load_axis(const IniFile& ini, const std::string& section) {
    reject_unknown_keys(ini, section,
                        {"source", "a", "b1", "c1", "b2", "c2", "d", "valid_min_um",
                         "valid_max_um"});
    SellmeierCoeffs c;
    c.source = ini.get_string_or(section, "source", "");
    c.a = ini.get_double(section, "a");
    c.poles.emplace_back(ini.get_double(section, "b1"), ini.get_double(section, "c1"));
    if (ini.has_key(section, "b2") || ini.has_key(section, "c2"))
        c.poles.emplace_back(ini.get_double(section, "b2"),
                             ini.get_double(section, "c2"));
    c.d = ini.get_double_or(section, "d", 0.0);
    c.valid_min_um = ini.get_double(section, "valid_min_um");
    c.valid_max_um = ini.get_double(section, "valid_max_um");
    if (!(c.valid_min_um > 0.0 && c.valid_max_um > c.valid_min_um))
        throw ValidationError(section + ": invalid validity range");
    return c;
}

SellmeierModel load_sellmeier_file(const std::filesystem::path& path) {
    const IniFile ini = IniFile::load(path);
    SellmeierModel m;
    for (const std::string& s : ini.sections()) {
        if (!s.starts_with("axis."))
            throw ValidationError(std::format("{}: unexpected section [{}]",
                                              path.string(), s));
        m.axes[s.substr(5)] = load_axis(ini, s);
    }
    if (m.axes.empty())
        throw ValidationError(path.string() + ": no [axis.*] sections found");
    return m;
}

std::vector<ModeIndex> parse_modes(const IniFile& ini, const std::string& section,
                                   const std::string& key) {
    std::vector<ModeIndex> out;
    for (const std::string& s : ini.get_list(section, key))
        out.push_back(ModeIndex::from_label(s));
    if (out.empty())
        throw ValidationError(std::format("{}: [{}] {} lists no modes",
                                          ini.path().string(), section, key));
    return out;
}

std::vector<double> parse_double_list(const IniFile& ini, const std::string& section,
                                      const std::string& key) {
    std::vector<double> out;
    for (const std::string& s : ini.get_list(section, key)) out.push_back(std::stod(s));
    return out;
}

}  // namespace

std::vector<ModeTriplet> ProjectConfig::triplet_universe() const {
    std::vector<ModeTriplet> out;
    for (const ModeIndex& p : pump_modes)
        for (const ModeIndex& h : h_modes)
            for (const ModeIndex& v : v_modes) out.push_back({p, h, v});
    return out;
}

std::vector<TripletWeight> ProjectConfig::jsa_weights() const {
    std::vector<TripletWeight> out;
    for (const ModeTriplet& t : triplet_universe()) {
        const auto occ = pump_occupancy.find(t.pump);
        if (occ == pump_occupancy.end() || occ->second <= 0.0) continue;
        out.push_back({t, occ->second * triplet_overlap_efficiency(basis, t, quadrature)});
    }
    if (out.empty())
        throw ValidationError("no triplet carries pump occupancy; check [pump.occupancy]");
    return out;
}

DispersionModel ProjectConfig::dispersion_base() const {
    return DispersionModel{sellmeier, GeometricDispersionTable{}};
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
    const IniFile ini = IniFile::load(path);
    reject_unknown_sections(
        ini, {"project", "fields", "grating", "basis", "modes", "pump",
              "pump.occupancy", "filter.herald", "grid.bands", "grid.jsa", "quadrature",
              "search", "bell", "knife"});

    ProjectConfig cfg;
    cfg.config_path = path;

    reject_unknown_keys(ini, "project", {"sellmeier_file"});
    cfg.sellmeier_path = path.parent_path() / ini.get_string("project", "sellmeier_file");
    if (!std::filesystem::exists(cfg.sellmeier_path))
        throw ValidationError("sellmeier_file does not exist: " +
                              cfg.sellmeier_path.string());
    cfg.sellmeier = load_sellmeier_file(cfg.sellmeier_path);

    reject_unknown_keys(ini, "fields", {"p_axis", "h_axis", "v_axis"});
    cfg.sellmeier.field_axis[Field::P] = ini.get_string("fields", "p_axis");
    cfg.sellmeier.field_axis[Field::H] = ini.get_string("fields", "h_axis");
    cfg.sellmeier.field_axis[Field::V] = ini.get_string("fields", "v_axis");
    for (Field f : {Field::P, Field::H, Field::V})
        cfg.sellmeier.axis_for(f);  // throws when the axis is missing

    reject_unknown_keys(ini, "grating", {"poling_period_um", "qpm_order", "length_mm"});
    cfg.grating.poling_period_um = ini.get_double("grating", "poling_period_um");
    cfg.grating.qpm_order = static_cast<int>(ini.get_int_or("grating", "qpm_order", 1));
    cfg.grating.length_mm = ini.get_double("grating", "length_mm");
    if (!(cfg.grating.poling_period_um > 0.0) || !(cfg.grating.length_mm > 0.0) ||
        cfg.grating.qpm_order < 1)
        throw ValidationError("grating parameters must be positive");

    reject_unknown_keys(ini, "basis",
                        {"p_waist_x_um", "p_waist_y_um", "p_center_y_um", "h_waist_x_um",
                         "h_waist_y_um", "h_center_y_um", "v_waist_x_um", "v_waist_y_um",
                         "v_center_y_um"});
    auto load_field = [&](const std::string& prefix) {
        HGFieldParams par;
        par.waist_x_um = ini.get_double("basis", prefix + "_waist_x_um");
        par.waist_y_um = ini.get_double("basis", prefix + "_waist_y_um");
        par.center_y_um = ini.get_double_or("basis", prefix + "_center_y_um", 0.0);
        if (!(par.waist_x_um > 0.0 && par.waist_y_um > 0.0))
            throw ValidationError("basis waists must be positive (no defaults are "
                                  "assumed for waveguide mode sizes)");
        return par;
    };
    cfg.basis.p = load_field("p");
    cfg.basis.h = load_field("h");
    cfg.basis.v = load_field("v");

    reject_unknown_keys(ini, "modes", {"pump", "h", "v"});
    cfg.pump_modes = parse_modes(ini, "modes", "pump");
    cfg.h_modes = parse_modes(ini, "modes", "h");
    cfg.v_modes = parse_modes(ini, "modes", "v");

    reject_unknown_keys(ini, "pump", {"center_nm", "fwhm_nm"});
    cfg.pump.center_nm = ini.get_double("pump", "center_nm");
    cfg.pump.fwhm_nm = ini.get_double("pump", "fwhm_nm");
    if (!(cfg.pump.center_nm > 0.0 && cfg.pump.fwhm_nm > 0.0))
        throw ValidationError("pump center and FWHM must be positive");

    double occ_sum = 0.0;
    for (const std::string& key : ini.keys("pump.occupancy")) {
        const ModeIndex m = ModeIndex::from_label(key);
        if (std::find(cfg.pump_modes.begin(), cfg.pump_modes.end(), m) ==
            cfg.pump_modes.end())
            throw ValidationError(std::format(
                "pump occupancy lists mode {} outside the pump mode universe", key));
        const double v = ini.get_double("pump.occupancy", key);
        if (v < 0.0) throw ValidationError("pump occupancy fractions must be >= 0");
        cfg.pump_occupancy[m] = v;
        occ_sum += v;
    }
    if (cfg.pump_occupancy.empty())
        cfg.pump_occupancy[ModeIndex{0, 0}] = occ_sum = 1.0;
    if (std::abs(occ_sum - 1.0) > 1e-3)
        throw ValidationError(std::format("pump occupancy fractions sum to {:.6g}, "
                                          "expected 1", occ_sum));
    for (auto& [m, v] : cfg.pump_occupancy) v /= occ_sum;

    reject_unknown_keys(ini, "filter.herald", {"arm", "center_nm", "fwhm_nm", "shape"});
    cfg.herald.arm = arm_from_string(ini.get_string_or("filter.herald", "arm", "V"));
    cfg.herald.center_nm = ini.get_double("filter.herald", "center_nm");
    cfg.herald.fwhm_nm = ini.get_double("filter.herald", "fwhm_nm");
    const std::string shape = ini.get_string_or("filter.herald", "shape", "gaussian");
    if (shape == "gaussian")
        cfg.herald.shape = SpectralFilter::Shape::gaussian;
    else if (shape == "rectangular")
        cfg.herald.shape = SpectralFilter::Shape::rectangular;
    else
        throw ValidationError("filter shape must be gaussian or rectangular");

    auto load_grid = [&](const std::string& section) {
        reject_unknown_keys(ini, section, {"lambda_min_nm", "lambda_max_nm", "points"});
        GridSpec g;
        g.lambda_min_nm = ini.get_double(section, "lambda_min_nm");
        g.lambda_max_nm = ini.get_double(section, "lambda_max_nm");
        g.points = static_cast<int>(ini.get_int(section, "points"));
        (void)g.wavelengths();  // validates
        return g;
    };
    cfg.grid_bands = load_grid("grid.bands");
    cfg.grid_jsa = load_grid("grid.jsa");

    reject_unknown_keys(ini, "quadrature", {"points", "extent_waists"});
    cfg.quadrature.points = static_cast<int>(ini.get_int_or("quadrature", "points", 256));
    cfg.quadrature.extent_waists =
        ini.get_double_or("quadrature", "extent_waists", 4.0);

    reject_unknown_keys(ini, "search",
                        {"window_min_nm", "window_max_nm", "prescan_step_nm",
                         "bisect_tol_nm"});
    cfg.search.window_min_nm = ini.get_double_or("search", "window_min_nm", 780.0);
    cfg.search.window_max_nm = ini.get_double_or("search", "window_max_nm", 830.0);
    cfg.search.prescan_step_nm = ini.get_double_or("search", "prescan_step_nm", 0.05);
    cfg.search.bisect_tol_nm = ini.get_double_or("search", "bisect_tol_nm", 1e-4);

    if (ini.has_section("bell")) {
        reject_unknown_keys(ini, "bell",
                            {"pulse_rate_hz", "werner_p", "coherence", "epsilon", "mu",
                             "phi_rad", "pairs_per_setting", "scan_peak_counts",
                             "singles_hz", "power_mw", "drift_exponent", "seed"});
        if (ini.has_key("bell", "pulse_rate_hz"))
            cfg.pulse_rate_hz = ini.get_double("bell", "pulse_rate_hz");
        cfg.bell_noise.werner_p = ini.get_double_or("bell", "werner_p", 1.0);
        cfg.bell_noise.coherence = ini.get_double_or("bell", "coherence", 1.0);
        cfg.bell_noise.epsilon = ini.get_double_or("bell", "epsilon", 0.0);
        cfg.bell_noise.mu = ini.get_double_or("bell", "mu", 0.0);
        cfg.bell_noise.phi_rad =
            ini.get_double_or("bell", "phi_rad", 3.14159265358979323846);
        cfg.bell_pairs_per_setting =
            ini.get_double_or("bell", "pairs_per_setting", 2.0e5);
        cfg.bell_scan_peak_counts = ini.get_double_or("bell", "scan_peak_counts", 2000.0);
        cfg.bell_singles_hz = ini.get_double_or("bell", "singles_hz", 1.0e4);
        cfg.bell_power_mw = ini.get_double_or("bell", "power_mw", 250.0);
        cfg.drift_exponent = ini.get_double_or("bell", "drift_exponent", 1.0);
        cfg.bell_seed = static_cast<std::uint64_t>(ini.get_int_or("bell", "seed", 1));
    }

    if (ini.has_section("knife")) {
        reject_unknown_keys(ini, "knife",
                            {"order_weights", "waist_um", "lambda_nm", "z0_mm",
                             "peak_rate_hz", "background_rate_hz", "duration_s",
                             "z_planes_mm", "x_points", "span_factor", "seed"});
        if (ini.has_key("knife", "order_weights"))
            cfg.knife_order_weights = parse_double_list(ini, "knife", "order_weights");
        cfg.knife_waist_um = ini.get_double_or("knife", "waist_um", 100.0);
        cfg.knife_lambda_nm = ini.get_double_or("knife", "lambda_nm", 800.0);
        cfg.knife_z0_mm = ini.get_double_or("knife", "z0_mm", 0.0);
        cfg.knife_peak_rate_hz = ini.get_double_or("knife", "peak_rate_hz", 1.0e4);
        cfg.knife_background_hz = ini.get_double_or("knife", "background_rate_hz", 0.0);
        cfg.knife_duration_s = ini.get_double_or("knife", "duration_s", 1.0);
        if (ini.has_key("knife", "z_planes_mm"))
            cfg.knife_z_planes_mm = parse_double_list(ini, "knife", "z_planes_mm");
        cfg.knife_x_points = static_cast<int>(ini.get_int_or("knife", "x_points", 25));
        cfg.knife_span_factor = ini.get_double_or("knife", "span_factor", 3.0);
        cfg.knife_seed = static_cast<std::uint64_t>(ini.get_int_or("knife", "seed", 1));
    }

    return cfg;
}

void write_dispersion_table(const std::filesystem::path& path,
                            const CalibrationResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "# fitted geometric dispersion corrections (rad/m)\n";
    out << "[dispersion_table]\n";
    out << "offset = " << format_number(result.table.offset_rad_per_m) << '\n';
    for (const auto& [key, dk] : result.table.delta_k) {
        std::string name = to_string(key.first);
        name[0] = static_cast<char>(std::tolower(name[0]));
        out << name << '_' << key.second.label() << " = " << format_number(dk) << '\n';
    }
    out << "\n[fit]\n";
    out << "rms_nm = " << format_number(result.rms_nm) << '\n';
    out << "rms_rad_per_m = " << format_number(result.rms_rad_per_m) << '\n';
    out << "rank = " << result.rank << '\n';
    out << "unknowns = " << result.unknowns << '\n';
    for (std::size_t k = 0; k < result.unresolved.size(); ++k)
        out << "unresolved_" << (k + 1) << " = \"" << result.unresolved[k] << "\"\n";
}

GeometricDispersionTable read_dispersion_table(const std::filesystem::path& path) {
    const IniFile ini = IniFile::load(path);
    if (!ini.has_section("dispersion_table"))
        throw ValidationError(path.string() + ": missing [dispersion_table] section");
    GeometricDispersionTable table;
    for (const std::string& key : ini.keys("dispersion_table")) {
        if (key == "offset") {
            table.offset_rad_per_m = ini.get_double("dispersion_table", key);
            continue;
        }
        if (key.size() != 4 || key[1] != '_')
            throw ValidationError(std::format("{}: unrecognized table key '{}'",
                                              path.string(), key));
        const Field f = field_from_string(key.substr(0, 1));
        const ModeIndex m = ModeIndex::from_label(key.substr(2));
        table.delta_k[{f, m}] = ini.get_double("dispersion_table", key);
    }
    return table;
}

}  // namespace ppwg
