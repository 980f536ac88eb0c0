#include "mcf4/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcf4 {

static_assert(std::endian::native == std::endian::little,
              "snapshot payload is little-endian float64");

namespace {

constexpr const char* kSnapshotMagic = "MCF4SNAP";
constexpr int kSnapshotVersion = 1;

std::string hexdouble(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_hexdouble(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ValidationError("snapshot header: bad " + what + " '" + s + "'");
    return v;
}

std::string csv_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void write_snapshot(const std::string& path, const SurfaceGrid& surface) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    auto vec4_field = [](const Vec4& v) {
        return hexdouble(v(0)) + ' ' + hexdouble(v(1)) + ' ' + hexdouble(v(2)) +
               ' ' + hexdouble(v(3));
    };
    out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n'
        << "topology " << to_string(surface.topology) << '\n'
        << "nu " << surface.nu << '\n'
        << "nv " << surface.nv << '\n'
        << "hu " << hexdouble(surface.hu) << '\n'
        << "hv " << hexdouble(surface.hv) << '\n'
        << "time " << hexdouble(surface.time) << '\n'
        << "period_u " << vec4_field(surface.period_u) << '\n'
        << "period_v " << vec4_field(surface.period_v) << '\n'
        << "data\n";
    out.write(reinterpret_cast<const char*>(surface.positions.data()),
              static_cast<std::streamsize>(surface.positions.size() * sizeof(Vec4)));
    if (!out) throw IOError("short write to '" + path + "'");
}

SurfaceGrid read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open '" + path + "'");

    auto next_line = [&](const std::string& what) {
        std::string line;
        if (!std::getline(in, line))
            throw LengthMismatch("snapshot '" + path + "': missing " + what);
        return line;
    };

    {
        std::istringstream head(next_line("magic"));
        std::string magic;
        int version = -1;
        head >> magic >> version;
        if (magic != kSnapshotMagic)
            throw VersionMismatch("'" + path + "' is not a snapshot file");
        if (version != kSnapshotVersion)
            throw VersionMismatch("snapshot version " + std::to_string(version) +
                                  " unsupported (expected " +
                                  std::to_string(kSnapshotVersion) + ")");
    }

    SurfaceGrid s;
    auto field = [&](const std::string& name) {
        std::istringstream linestream(next_line(name));
        std::string key, value;
        linestream >> key >> value;
        if (key != name)
            throw ValidationError("snapshot header: expected '" + name +
                                  "', got '" + key + "'");
        return value;
    };
    auto vec4_field = [&](const std::string& name) {
        std::istringstream lineStream(next_line(name));
        std::string key;
        lineStream >> key;
        if (key != name)
            throw ValidationError("snapshot header: expected '" + name +
                                  "', got '" + key + "'");
        Vec4 v;
        for (int c = 0; c < 4; ++c) {
            std::string tok;
            lineStream >> tok;
            v(c) = parse_hexdouble(tok, name);
        }
        return v;
    };
    s.topology = topology_from_string(field("topology"));
    s.nu = static_cast<std::size_t>(std::stoull(field("nu")));
    s.nv = static_cast<std::size_t>(std::stoull(field("nv")));
    s.hu = parse_hexdouble(field("hu"), "hu");
    s.hv = parse_hexdouble(field("hv"), "hv");
    s.time = parse_hexdouble(field("time"), "time");
    s.period_u = vec4_field("period_u");
    s.period_v = vec4_field("period_v");
    if (next_line("data marker") != "data")
        throw ValidationError("snapshot header: missing data marker");
    s.check_valid();

    s.positions.resize(s.nu * s.nv);
    const std::streamsize want =
        static_cast<std::streamsize>(s.positions.size() * sizeof(Vec4));
    in.read(reinterpret_cast<char*>(s.positions.data()), want);
    if (in.gcount() != want)
        throw LengthMismatch("snapshot '" + path + "': expected " +
                             std::to_string(want) + " payload bytes, got " +
                             std::to_string(in.gcount()));
    char extra;
    if (in.read(&extra, 1))
        throw LengthMismatch("snapshot '" + path + "': trailing bytes");
    return s;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << "t,dt,area,maxA2,maxH,minCosAlpha\n";
    for (const auto& r : rows)
        out << csv_double(r.t) << ',' << csv_double(r.dt) << ','
            << csv_double(r.area) << ',' << csv_double(r.max_a2) << ','
            << csv_double(r.max_h) << ',' << csv_double(r.min_cos_alpha) << '\n';
    if (!out) throw IOError("short write to '" + path + "'");
}

std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,dt,area,maxA2,maxH,minCosAlpha")
        throw ValidationError("'" + path + "': bad diagnostics header");
    std::vector<DiagnosticsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        DiagnosticsRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.dt,
                        &r.area, &r.max_a2, &r.max_h, &r.min_cos_alpha) != 6)
            throw ValidationError("'" + path + "': bad diagnostics row '" + line + "'");
        rows.push_back(r);
    }
    return rows;
}

void write_trace(const std::string& directory, const FlowTrace& trace) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IOError("cannot create directory '" + directory + "'");

    write_diagnostics_csv(directory + "/diagnostics.csv", trace.rows);
    {
        std::ofstream meta(directory + "/trace.txt");
        if (!meta) throw IOError("cannot write trace metadata");
        meta << "MCF4TRACE 1\n"
             << "snapshots " << trace.snapshots.size() << '\n'
             << "initially_symplectic " << (trace.initially_symplectic ? 1 : 0)
             << '\n';
    }
    for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%06zu.bin", k);
        write_snapshot(directory + "/" + name, trace.snapshots[k]);
    }
}

FlowTrace read_trace(const std::string& directory) {
    FlowTrace trace;
    trace.structure = KahlerStructure::standard();
    trace.rows = read_diagnostics_csv(directory + "/diagnostics.csv");

    std::ifstream meta(directory + "/trace.txt");
    if (!meta) throw IOError("cannot open '" + directory + "/trace.txt'");
    std::string magic;
    int version = -1;
    meta >> magic >> version;
    if (magic != "MCF4TRACE" || version != 1)
        throw VersionMismatch("'" + directory + "' is not a trace directory");
    std::string key;
    std::size_t count = 0;
    int symplectic = 0;
    meta >> key >> count;
    if (key != "snapshots")
        throw ValidationError("trace metadata: missing snapshot count");
    meta >> key >> symplectic;
    if (key != "initially_symplectic")
        throw ValidationError("trace metadata: missing symplectic flag");
    trace.initially_symplectic = symplectic != 0;

    for (std::size_t k = 0; k < count; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%06zu.bin", k);
        trace.snapshots.push_back(read_snapshot(directory + "/" + name));
    }
    if (trace.snapshots.empty())
        throw ValidationError("trace '" + directory + "' has no snapshots");
    return trace;
}

void write_cloud_csv(const std::string& path, const RescaledCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << "# ball_radius " << csv_double(cloud.ball_radius) << " kind "
        << (cloud.kind == RescaleKind::Lambda ? "lambda" : "s") << '\n';
    out << "x1,x2,x3,x4,e1x1,e1x2,e1x3,e1x4,e2x1,e2x2,e2x3,e2x4,weight,"
           "cosAlpha,scale,time\n";
    for (const auto& p : cloud.points) {
        for (int c = 0; c < 4; ++c) out << csv_double(p.position(c)) << ',';
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) out << csv_double(p.tangent(r, c)) << ',';
        out << csv_double(p.weight) << ',' << csv_double(p.cos_alpha) << ','
            << csv_double(p.scale) << ',' << csv_double(p.time) << '\n';
    }
    if (!out) throw IOError("short write to '" + path + "'");
}

RescaledCloud read_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "'");
    RescaledCloud cloud;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ball_radius", 0) != 0)
        throw ValidationError("'" + path + "': missing cloud preamble");
    {
        std::istringstream pre(line.substr(1));
        std::string key, kind;
        double radius = 0.0;
        pre >> key >> radius >> kind >> kind;
        cloud.ball_radius = radius;
        cloud.kind = kind == "s" ? RescaleKind::TimeDependent : RescaleKind::Lambda;
    }
    if (!std::getline(in, line) || line.rfind("x1,", 0) != 0)
        throw ValidationError("'" + path + "': missing cloud header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double f[16];
        if (std::sscanf(line.c_str(),
                        "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,"
                        "%lf,%lf",
                        f, f + 1, f + 2, f + 3, f + 4, f + 5, f + 6, f + 7, f + 8,
                        f + 9, f + 10, f + 11, f + 12, f + 13, f + 14, f + 15) != 16)
            throw ValidationError("'" + path + "': bad cloud row");
        RescaledCloud::Point p;
        p.position = Vec4(f[0], f[1], f[2], f[3]);
        p.tangent << f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11];
        p.weight = f[12];
        p.cos_alpha = f[13];
        p.scale = f[14];
        p.time = f[15];
        if (!(p.weight > 0.0))
            throw ValidationError("'" + path + "': nonpositive weight");
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_density_csv(const std::string& path, const DensityProfile& profile) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << "radius,value\n";
    for (std::size_t k = 0; k < profile.radii.size(); ++k)
        out << csv_double(profile.radii[k]) << ',' << csv_double(profile.values[k])
            << '\n';
    out << "0," << csv_double(profile.extrapolated) << '\n';
    if (!out) throw IOError("short write to '" + path + "'");
}

void write_decay_csv(const std::string& path, const DecayReport& report) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << (report.kind == RescaleKind::Lambda ? "lambda" : "s")
        << ",I1,I2,I3,I4,massRatio\n";
    for (const auto& e : report.entries)
        out << csv_double(e.scale) << ',' << csv_double(e.i1) << ','
            << csv_double(e.i2) << ',' << csv_double(e.i3) << ','
            << csv_double(e.i4) << ',' << csv_double(e.mass_ratio) << '\n';
    if (!out) throw IOError("short write to '" + path + "'");
}

std::string singularity_estimate_json(const SingularityEstimate& estimate) {
    nlohmann::json j;
    j["T_est"] = estimate.t_singular;
    j["X0"] = {estimate.x0(0), estimate.x0(1), estimate.x0(2), estimate.x0(3)};
    j["type"] = to_string(estimate.type);
    j["fitResidual"] = estimate.fit_residual;
    j["tailValues"] = estimate.tail_values;
    return j.dump(2);
}

std::string cone_report_json(const ConeReport& report) {
    nlohmann::json j;
    j["planeCount"] = report.plane_count;
    j["multiplicities"] = report.multiplicities;
    j["densityAtOrigin"] = report.density_at_origin;
    j["calibration"] = {
        {"coeffs", {report.calibration.coeffs(0), report.calibration.coeffs(1),
                    report.calibration.coeffs(2)}},
        {"chirality", report.calibration.self_dual ? "selfDual" : "antiSelfDual"}};
    j["calibrationResidual"] = report.calibration_residual;
    j["thetaSpread"] = report.theta_spread;
    j["flatnessResidual"] = report.flatness_residual;
    j["verdict"] = {{"isComplexUnion", report.is_complex_union},
                    {"isFlat", report.is_flat},
                    {"multiplicityExceedsOne", report.multiplicity_exceeds_one}};
    nlohmann::json planes = nlohmann::json::array();
    for (const auto& plane : report.planes) {
        nlohmann::json p;
        p["basepoint"] = {plane.basepoint(0), plane.basepoint(1),
                          plane.basepoint(2), plane.basepoint(3)};
        // bases serialized row-major
        std::vector<double> basis, normal;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) {
                basis.push_back(plane.basis(r, c));
                normal.push_back(plane.normal_basis(r, c));
            }
        p["basis"] = basis;
        p["normalBasis"] = normal;
        p["assignedCount"] = plane.assigned.size();
        p["weight"] = plane.weight;
        p["residual"] = plane.residual;
        p["multiplicity"] = plane.multiplicity;
        planes.push_back(p);
    }
    j["planes"] = planes;
    return j.dump(2);
}

} // namespace mcf4
