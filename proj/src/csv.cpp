#include "ppwg/csv.hpp"

#include <charconv>
#include <format>
#include <fstream>
#include <sstream>

#include "ppwg/errors.hpp"

namespace ppwg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError(std::format("{}:{}: cannot parse number '{}'", path.string(),
                                     line, s));
    return v;
}

struct CsvReader {
    std::filesystem::path path;
    std::ifstream in;
    int line_no = 0;

    explicit CsvReader(const std::filesystem::path& p) : path(p), in(p) {
        if (!in) throw ParseError("cannot open " + p.string());
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            fields = split_csv_line(t);
            return true;
        }
        return false;
    }
};

void expect_header(CsvReader& r, const std::vector<std::string>& expected,
                   std::size_t optional_tail = 0) {
    std::vector<std::string> fields;
    if (!r.next(fields))
        throw ParseError(r.path.string() + ": empty file, expected a header row");
    const std::size_t required = expected.size() - optional_tail;
    if (fields.size() < required || fields.size() > expected.size())
        throw ParseError(std::format("{}:{}: unexpected column count {}",
                                     r.path.string(), r.line_no, fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k)
        if (fields[k] != expected[k])
            throw ParseError(std::format("{}:{}: expected column '{}', found '{}'",
                                         r.path.string(), r.line_no, expected[k],
                                         fields[k]));
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_number(double v) {
    return std::format("{}", v);
}

std::vector<SfgObservation> read_sfg_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    expect_header(r, {"lambda_nm", "ij_v", "ij_h", "ij_p", "rel_eff_pct"}, 1);
    std::vector<SfgObservation> out;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() < 4 || f.size() > 5)
            throw ParseError(std::format("{}:{}: expected 4 or 5 columns, found {}",
                                         path.string(), r.line_no, f.size()));
        SfgObservation obs;
        obs.lambda_deg_nm = parse_double(f[0], path, r.line_no);
        try {
            obs.triplet.v = ModeIndex::from_label(f[1]);
            obs.triplet.h = ModeIndex::from_label(f[2]);
            obs.triplet.pump = ModeIndex::from_label(f[3]);
        } catch (const ParseError& e) {
            throw ParseError(std::format("{}:{}: {}", path.string(), r.line_no,
                                         e.what()));
        }
        if (f.size() == 5 && !f[4].empty())
            obs.rel_eff_pct = parse_double(f[4], path, r.line_no);
        out.push_back(obs);
    }
    if (out.empty()) throw ParseError(path.string() + ": no observation rows");
    return out;
}

void write_sfg_csv(const std::filesystem::path& path,
                   std::span<const SfgObservation> observations) {
    auto out = open_out(path);
    out << "lambda_nm,ij_v,ij_h,ij_p,rel_eff_pct\n";
    for (const auto& obs : observations) {
        out << format_number(obs.lambda_deg_nm) << ',' << obs.triplet.v.label() << ','
            << obs.triplet.h.label() << ',' << obs.triplet.pump.label() << ',';
        if (obs.rel_eff_pct) out << format_number(*obs.rel_eff_pct);
        out << '\n';
    }
}

KnifeEdgeScan read_scan_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    expect_header(r, {"z_mm", "x_um", "counts", "duration_s", "direction"});
    KnifeEdgeScan scan;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 5)
            throw ParseError(std::format("{}:{}: expected 5 columns, found {}",
                                         path.string(), r.line_no, f.size()));
        ScanPoint pt;
        pt.z_mm = parse_double(f[0], path, r.line_no);
        pt.x_um = parse_double(f[1], path, r.line_no);
        pt.counts = parse_double(f[2], path, r.line_no);
        pt.duration_s = parse_double(f[3], path, r.line_no);
        try {
            pt.direction = scan_direction_from_string(f[4]);
        } catch (const ParseError& e) {
            throw ParseError(std::format("{}:{}: {}", path.string(), r.line_no,
                                         e.what()));
        }
        scan.push_back(pt);
    }
    if (scan.empty()) throw ParseError(path.string() + ": no scan rows");
    return scan;
}

void write_scan_csv(const std::filesystem::path& path, const KnifeEdgeScan& scan) {
    auto out = open_out(path);
    out << "z_mm,x_um,counts,duration_s,direction\n";
    for (const ScanPoint& pt : scan)
        out << format_number(pt.z_mm) << ',' << format_number(pt.x_um) << ','
            << format_number(pt.counts) << ',' << format_number(pt.duration_s) << ','
            << to_string(pt.direction) << '\n';
}

std::vector<CountRecord> read_count_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    expect_header(r, {"qwp1_deg", "hwp1_deg", "pol1_deg", "qwp2_deg", "hwp2_deg",
                      "pol2_deg", "coinc", "singles1_hz", "singles2_hz", "duration_s",
                      "power_mw"});
    std::vector<CountRecord> out;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 11)
            throw ParseError(std::format("{}:{}: expected 11 columns, found {}",
                                         path.string(), r.line_no, f.size()));
        CountRecord rec;
        rec.arm1.qwp_deg = parse_double(f[0], path, r.line_no);
        rec.arm1.hwp_deg = parse_double(f[1], path, r.line_no);
        rec.arm1.pol_deg = parse_double(f[2], path, r.line_no);
        rec.arm2.qwp_deg = parse_double(f[3], path, r.line_no);
        rec.arm2.hwp_deg = parse_double(f[4], path, r.line_no);
        rec.arm2.pol_deg = parse_double(f[5], path, r.line_no);
        rec.coincidences = parse_double(f[6], path, r.line_no);
        rec.singles1_hz = parse_double(f[7], path, r.line_no);
        rec.singles2_hz = parse_double(f[8], path, r.line_no);
        rec.duration_s = parse_double(f[9], path, r.line_no);
        rec.power_mw = parse_double(f[10], path, r.line_no);
        if (rec.coincidences < 0.0 || rec.duration_s <= 0.0)
            throw ParseError(std::format("{}:{}: counts must be >= 0 and duration > 0",
                                         path.string(), r.line_no));
        out.push_back(rec);
    }
    if (out.empty()) throw ParseError(path.string() + ": no count records");
    return out;
}

void write_count_csv(const std::filesystem::path& path,
                     std::span<const CountRecord> records) {
    auto out = open_out(path);
    out << "qwp1_deg,hwp1_deg,pol1_deg,qwp2_deg,hwp2_deg,pol2_deg,coinc,singles1_hz,"
           "singles2_hz,duration_s,power_mw\n";
    for (const CountRecord& r : records)
        out << format_number(r.arm1.qwp_deg) << ',' << format_number(r.arm1.hwp_deg)
            << ',' << format_number(r.arm1.pol_deg) << ','
            << format_number(r.arm2.qwp_deg) << ',' << format_number(r.arm2.hwp_deg)
            << ',' << format_number(r.arm2.pol_deg) << ','
            << format_number(r.coincidences) << ',' << format_number(r.singles1_hz)
            << ',' << format_number(r.singles2_hz) << ','
            << format_number(r.duration_s) << ',' << format_number(r.power_mw) << '\n';
}

Grid2D read_grid_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    expect_header(r, {"x_um", "y_um", "intensity"});
    std::vector<std::string> f;
    std::vector<double> xs, ys, vs;
    while (r.next(f)) {
        if (f.size() != 3)
            throw ParseError(std::format("{}:{}: expected 3 columns, found {}",
                                         path.string(), r.line_no, f.size()));
        xs.push_back(parse_double(f[0], path, r.line_no));
        ys.push_back(parse_double(f[1], path, r.line_no));
        vs.push_back(parse_double(f[2], path, r.line_no));
    }
    if (vs.empty()) throw ParseError(path.string() + ": no grid rows");

    // Rows are x-major: x constant within a block, y cycling.
    Grid2D g;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        if (k > 0 && ys[k] <= ys[k - 1]) break;
        g.y_um.push_back(ys[k]);
    }
    const std::size_t ny = g.y_um.size();
    if (ny == 0 || vs.size() % ny != 0)
        throw ParseError(path.string() + ": grid rows do not form a regular x-y block");
    for (std::size_t k = 0; k < vs.size(); k += ny) g.x_um.push_back(xs[k]);
    g.value = vs;
    return g;
}

void write_grid_csv(const std::filesystem::path& path, const Grid2D& grid) {
    auto out = open_out(path);
    out << "x_um,y_um,intensity\n";
    for (std::size_t ix = 0; ix < grid.x_um.size(); ++ix)
        for (std::size_t iy = 0; iy < grid.y_um.size(); ++iy)
            out << format_number(grid.x_um[ix]) << ',' << format_number(grid.y_um[iy])
                << ',' << format_number(grid.at(ix, iy)) << '\n';
}

void write_layer_csv(const std::filesystem::path& path,
                     std::span<const double> lambda_h, std::span<const double> lambda_v,
                     std::span<const double> values) {
    auto out = open_out(path);
    out << "lambda_h_nm,lambda_v_nm,intensity\n";
    for (std::size_t ih = 0; ih < lambda_h.size(); ++ih)
        for (std::size_t iv = 0; iv < lambda_v.size(); ++iv)
            out << format_number(lambda_h[ih]) << ',' << format_number(lambda_v[iv])
                << ',' << format_number(values[ih * lambda_v.size() + iv]) << '\n';
}

}  // namespace ppwg
