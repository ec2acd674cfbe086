// ppwg: simulation and data-analysis toolkit for type-II down-conversion in
// multimode periodically poled waveguides.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "ppwg/commands.hpp"
#include "ppwg/errors.hpp"
#include "ppwg/manifest.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

struct GlobalArgs {
    std::string config;
    std::string out_dir = "out";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config, "project configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "export format")
        ->check(CLI::IsMember({"csv"}));
    cmd->add_option("--seed", args.seed, "override the configured RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

ppwg::CommonOptions common_options(const GlobalArgs& args) {
    ppwg::CommonOptions opt;
    opt.config_path = args.config;
    opt.out_dir = args.out_dir;
    if (args.seed_set) opt.seed = args.seed;
    return opt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ppwg - multimode waveguide down-conversion toolkit"};
    app.set_version_flag("--version", std::string(ppwg::kToolVersion));
    app.require_subcommand(1);

    GlobalArgs g_cal, g_bands, g_jsa, g_synth, g_fit, g_m2, g_sim, g_vis, g_chsh;

    // calibrate
    auto* cal = app.add_subcommand(
        "calibrate", "fit the geometric dispersion table to degenerate SFG data");
    std::string sfg_csv;
    add_common(cal, g_cal);
    cal->add_option("--sfg", sfg_csv, "degenerate SFG observations CSV")
        ->required()
        ->check(CLI::ExistingFile);

    // bands
    auto* bands = app.add_subcommand("bands", "export phase-matching band maps");
    ppwg::BandsOptions bands_opt;
    std::string bands_table;
    int bands_points = 0;
    add_common(bands, g_bands);
    bands->add_option("--table", bands_table, "fitted dispersion table")->required();
    bands->add_flag("--pump-00", bands_opt.pump_00_only,
                    "restrict layers to the fundamental pump mode");
    bands->add_option("--points", bands_points, "override the export grid resolution");

    // jsa
    auto* jsa = app.add_subcommand("jsa", "export the joint spectrum and purity summary");
    ppwg::JsaOptions jsa_opt;
    std::string jsa_table;
    int jsa_points = 0;
    add_common(jsa, g_jsa);
    jsa->add_option("--table", jsa_table, "fitted dispersion table")->required();
    jsa->add_option("--points", jsa_points, "override the export grid resolution");

    // knife
    auto* knife = app.add_subcommand("knife", "knife-edge scan workflows");
    knife->require_subcommand(1);
    auto* synth = knife->add_subcommand("synth", "synthesize seeded knife-edge scans");
    ppwg::KnifeSynthOptions synth_opt;
    std::vector<double> synth_weights;
    std::string synth_direction = "vertical";
    add_common(synth, g_synth);
    synth->add_option("--weights", synth_weights,
                      "mode-order weights for the scanned axis (overrides config)");
    synth->add_option("--direction", synth_direction, "scan direction")
        ->check(CLI::IsMember({"horizontal", "vertical"}));

    auto* kfit = knife->add_subcommand("fit", "fit per-plane edge scans");
    std::string fit_scans;
    add_common(kfit, g_fit);
    kfit->add_option("--scans", fit_scans, "scan CSV")->required()
        ->check(CLI::ExistingFile);

    auto* km2 = knife->add_subcommand("m2", "edge fits, caustic fit and ISO check");
    std::string m2_scans;
    add_common(km2, g_m2);
    km2->add_option("--scans", m2_scans, "scan CSV")->required()
        ->check(CLI::ExistingFile);

    // bell
    auto* bell = app.add_subcommand("bell", "polarization entanglement workflows");
    bell->require_subcommand(1);
    auto* sim = bell->add_subcommand("simulate",
                                     "simulate CHSH and visibility-scan records");
    add_common(sim, g_sim);

    auto* vis = bell->add_subcommand("visibility", "fit fringe visibilities");
    ppwg::BellAnalysisOptions vis_opt;
    std::vector<std::string> vis_files;
    add_common(vis, g_vis);
    vis->add_option("--records", vis_files, "count-record CSV (repeatable)")
        ->required();
    bool vis_no_corr = false;
    vis->add_flag("--no-corrections", vis_no_corr,
                  "skip drift and accidental corrections");

    auto* chsh = bell->add_subcommand("chsh", "evaluate the CHSH combination");
    std::vector<std::string> chsh_files;
    add_common(chsh, g_chsh);
    chsh->add_option("--records", chsh_files, "count-record CSV")->required();
    bool chsh_no_corr = false;
    chsh->add_flag("--no-corrections", chsh_no_corr,
                   "skip drift and accidental corrections");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cal->parsed()) {
            ppwg::cmd_calibrate(common_options(g_cal), sfg_csv);
        } else if (bands->parsed()) {
            bands_opt.table_path = bands_table;
            if (bands_points > 0) bands_opt.points = bands_points;
            ppwg::cmd_bands(common_options(g_bands), bands_opt);
        } else if (jsa->parsed()) {
            jsa_opt.table_path = jsa_table;
            if (jsa_points > 0) jsa_opt.points = jsa_points;
            ppwg::cmd_jsa(common_options(g_jsa), jsa_opt);
        } else if (synth->parsed()) {
            if (!synth_weights.empty()) synth_opt.order_weights = synth_weights;
            synth_opt.direction = ppwg::scan_direction_from_string(synth_direction);
            ppwg::cmd_knife_synth(common_options(g_synth), synth_opt);
        } else if (kfit->parsed()) {
            ppwg::cmd_knife_fit(common_options(g_fit), fit_scans);
        } else if (km2->parsed()) {
            ppwg::cmd_knife_m2(common_options(g_m2), m2_scans);
        } else if (sim->parsed()) {
            ppwg::cmd_bell_simulate(common_options(g_sim));
        } else if (vis->parsed()) {
            vis_opt.record_files.assign(vis_files.begin(), vis_files.end());
            vis_opt.apply_corrections = !vis_no_corr;
            ppwg::cmd_bell_visibility(common_options(g_vis), vis_opt);
        } else if (chsh->parsed()) {
            ppwg::BellAnalysisOptions opt;
            opt.record_files.assign(chsh_files.begin(), chsh_files.end());
            opt.apply_corrections = !chsh_no_corr;
            ppwg::cmd_bell_chsh(common_options(g_chsh), opt);
        }
    } catch (const ppwg::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const ppwg::UnderdeterminedError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        for (const auto& p : e.unresolved_parameters)
            std::fprintf(stderr, "  unresolved: %s\n", p.c_str());
        return kExitNumerical;
    } catch (const ppwg::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const ppwg::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
