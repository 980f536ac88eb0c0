#include "mcf4/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcf4/config.hpp"
#include "mcf4/io.hpp"

namespace mcf4 {
namespace cli {

namespace {

constexpr int kUsageExit = 64;

const char* kUsage = R"(usage: mcf4 <subcommand> [options]

subcommands:
  simulate  --config PATH --out DIR      run a flow, write snapshots + diagnostics CSV
  diagnose  --trace DIR [--out FILE]     estimate the singular time, emit JSON
  rescale   --trace DIR --config PATH --out DIR
                                         rescaled clouds per lambda + decay CSV
  cone      --cloud PATH [--config PATH] [--out FILE]
                                         tangent-cone report as JSON
  density   --trace DIR --point "x1,x2,x3,x4" --radii "r1,r2,..."
            [--t0 T] [--out FILE]        Gaussian density profile CSV
)";

struct Options {
    std::string config, out, trace, cloud, point, radii, t0;
};

int usage_error(const std::string& message) {
    if (!message.empty()) std::cerr << "error: " << message << "\n";
    std::cerr << kUsage;
    return kUsageExit;
}

bool parse_options(const std::vector<std::string>& args, std::size_t start,
                   Options& opt, std::string& err) {
    for (std::size_t k = start; k < args.size(); k += 2) {
        const std::string& flag = args[k];
        if (k + 1 >= args.size()) {
            err = "flag " + flag + " needs a value";
            return false;
        }
        const std::string& value = args[k + 1];
        if (flag == "--config") opt.config = value;
        else if (flag == "--out") opt.out = value;
        else if (flag == "--trace") opt.trace = value;
        else if (flag == "--cloud") opt.cloud = value;
        else if (flag == "--point") opt.point = value;
        else if (flag == "--radii") opt.radii = value;
        else if (flag == "--t0") opt.t0 = value;
        else {
            err = "unknown flag " + flag;
            return false;
        }
    }
    return true;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("bad " + what + " component '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError(what + " list is empty");
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw IOError("cannot open '" + out_path + "' for writing");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

int cmd_simulate(const Options& opt) {
    if (opt.config.empty() || opt.out.empty())
        return usage_error("simulate needs --config and --out");
    const ExperimentConfig config = load_config(opt.config);
    const FlowTrace trace = simulate(config);
    write_trace(opt.out, trace);
    std::cout << "simulate: " << to_string(config.family) << " finished at t = "
              << trace.rows.back().t << " after " << trace.rows.size()
              << " rows (" << trace.snapshots.size() << " snapshots) -> "
              << opt.out << "\n";
    return 0;
}

int cmd_diagnose(const Options& opt) {
    if (opt.trace.empty()) return usage_error("diagnose needs --trace");
    const FlowTrace trace = read_trace(opt.trace);
    const SingularityEstimate estimate = estimate_singular_time(trace);
    emit(singularity_estimate_json(estimate), opt.out);
    return 0;
}

int cmd_rescale(const Options& opt) {
    if (opt.trace.empty() || opt.config.empty() || opt.out.empty())
        return usage_error("rescale needs --trace, --config and --out");
    const ExperimentConfig config = load_config(opt.config);
    const FlowTrace trace = read_trace(opt.trace);

    LambdaRescaleSpec spec;
    spec.lambdas = config.rescale.lambdas;
    spec.s1 = config.rescale.s1;
    spec.s2 = config.rescale.s2;
    spec.ball_radius = config.rescale.ball_radius;
    if (config.rescale.x0 && config.rescale.t_singular) {
        spec.x0 = *config.rescale.x0;
        spec.t_singular = *config.rescale.t_singular;
    } else {
        const SingularityEstimate estimate = estimate_singular_time(trace);
        spec.x0 = config.rescale.x0.value_or(estimate.x0);
        spec.t_singular = config.rescale.t_singular.value_or(estimate.t_singular);
    }

    std::error_code ec;
    std::filesystem::create_directories(opt.out, ec);
    if (ec) throw IOError("cannot create directory '" + opt.out + "'");

    const DecayReport report = decay_integrals(trace, spec);
    write_decay_csv(opt.out + "/decay.csv", report);

    const double s_mid = 0.5 * (spec.s1 + spec.s2);
    for (double lambda : spec.lambdas) {
        if (spec.t_singular + spec.s1 / (lambda * lambda) < trace.first_time())
            continue;
        const SurfaceGrid surf = lambda_rescale(trace, spec, lambda, s_mid);
        const RescaledCloud cloud =
            cloud_from_surface(surf, trace.structure, spec.ball_radius,
                               RescaleKind::Lambda, lambda);
        char name[48];
        std::snprintf(name, sizeof name, "cloud_lambda_%g.csv", lambda);
        write_cloud_csv(opt.out + "/" + name, cloud);
    }
    std::cout << "rescale: " << report.entries.size() << " ladder entries ("
              << report.skipped.size() << " skipped) -> " << opt.out << "\n";
    return 0;
}

int cmd_cone(const Options& opt) {
    if (opt.cloud.empty()) return usage_error("cone needs --cloud");
    AnalysisParams params;
    if (!opt.config.empty()) params = load_config(opt.config).analysis;
    const RescaledCloud cloud = read_cloud_csv(opt.cloud);
    const ConeReport report = cone_report(cloud, params);
    emit(cone_report_json(report), opt.out);
    return 0;
}

int cmd_density(const Options& opt) {
    if (opt.trace.empty() || opt.point.empty() || opt.radii.empty())
        return usage_error("density needs --trace, --point and --radii");
    const FlowTrace trace = read_trace(opt.trace);
    const std::vector<double> coords = parse_number_list(opt.point, "point");
    if (coords.size() != 4)
        throw ValidationError("--point needs 4 comma-separated components");
    const Vec4 x0(coords[0], coords[1], coords[2], coords[3]);
    const std::vector<double> radii = parse_number_list(opt.radii, "radii");

    double t0 = 0.0;
    if (!opt.t0.empty()) {
        t0 = std::stod(opt.t0);
    } else {
        const SingularityEstimate estimate = estimate_singular_time(trace);
        t0 = estimate.t_singular;
    }

    const DensityProfile profile = gaussian_density_at(trace, x0, t0, radii);
    std::ostringstream csv;
    csv << "radius,value\n";
    for (std::size_t k = 0; k < profile.radii.size(); ++k)
        csv << profile.radii[k] << ',' << profile.values[k] << '\n';
    csv << "0," << profile.extrapolated << '\n';
    emit(csv.str(), opt.out);
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    if (args.empty()) return usage_error("");
    const std::string& sub = args[0];
    Options opt;
    std::string err;
    if (!parse_options(args, 1, opt, err)) return usage_error(err);

    try {
        if (sub == "simulate") return cmd_simulate(opt);
        if (sub == "diagnose") return cmd_diagnose(opt);
        if (sub == "rescale") return cmd_rescale(opt);
        if (sub == "cone") return cmd_cone(opt);
        if (sub == "density") return cmd_density(opt);
        return usage_error("unknown subcommand '" + sub + "'");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
}

} // namespace cli
} // namespace mcf4
