#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ppwg/beamquality.hpp"
#include "ppwg/modes.hpp"
#include "ppwg/phasematch.hpp"
#include "ppwg/polarization.hpp"
#include "ppwg/spectra.hpp"

namespace ppwg {

// CSV schemas (header row required, '#' lines ignored):
//   SFG observations   lambda_nm,ij_v,ij_h,ij_p,rel_eff_pct   (last column optional)
//   knife-edge scans   z_mm,x_um,counts,duration_s,direction
//   count records      qwp1_deg,hwp1_deg,pol1_deg,qwp2_deg,hwp2_deg,pol2_deg,
//                      coinc,singles1_hz,singles2_hz,duration_s,power_mw
//   intensity grids    x_um,y_um,intensity
//   band/JSA layers    lambda_h_nm,lambda_v_nm,intensity

std::vector<SfgObservation> read_sfg_csv(const std::filesystem::path& path);
void write_sfg_csv(const std::filesystem::path& path,
                   std::span<const SfgObservation> observations);

KnifeEdgeScan read_scan_csv(const std::filesystem::path& path);
void write_scan_csv(const std::filesystem::path& path, const KnifeEdgeScan& scan);

std::vector<CountRecord> read_count_csv(const std::filesystem::path& path);
void write_count_csv(const std::filesystem::path& path,
                     std::span<const CountRecord> records);

Grid2D read_grid_csv(const std::filesystem::path& path);
void write_grid_csv(const std::filesystem::path& path, const Grid2D& grid);

/// One band-map layer as lambda_h_nm,lambda_v_nm,intensity rows.
void write_layer_csv(const std::filesystem::path& path,
                     std::span<const double> lambda_h, std::span<const double> lambda_v,
                     std::span<const double> values);

/// Format a double the way every writer in this project does (shortest
/// round-trip representation, so rewrites are byte-stable).
std::string format_number(double v);

}  // namespace ppwg
