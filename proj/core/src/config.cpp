#include "mcf4/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mcf4 {

namespace {

struct Value {
    std::string text;
    int line = 0;
    std::vector<std::string> list; // set when the value was [a, b, ...]
    bool is_list = false;
};

using Section = std::map<std::string, Value>;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"') quoted = !quoted;
        if (s[k] == '#' && !quoted) return s.substr(0, k);
    }
    return s;
}

std::map<std::string, Section> tokenize(const std::string& text) {
    std::map<std::string, Section> doc;
    std::istringstream in(text);
    std::string raw;
    std::string section = "experiment"; // keys before any [section] header
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected key = value");
        Value v;
        v.line = line_no;
        if (value.front() == '[') {
            if (value.back() != ']')
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unterminated list");
            v.is_list = true;
            std::string body = value.substr(1, value.size() - 2);
            std::string item;
            std::istringstream items(body);
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (!item.empty()) v.list.push_back(item);
            }
        } else if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unterminated string");
            v.text = value.substr(1, value.size() - 2);
        } else {
            v.text = value;
        }
        if (doc[section].count(key))
            throw ParseError("line " + std::to_string(line_no) +
                             ": duplicate key '" + key + "'");
        doc[section][key] = std::move(v);
    }
    return doc;
}

double to_double(const std::string& field, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("field '" + field + "': expected a number, got '" +
                              text + "'");
    }
}

long to_long(const std::string& field, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("field '" + field + "': expected an integer, got '" +
                              text + "'");
    }
}

class SectionReader {
public:
    SectionReader(std::string name, Section section)
        : name_(std::move(name)), section_(std::move(section)) {}

    ~SectionReader() = default;

    bool has(const std::string& key) {
        return section_.count(key) != 0;
    }

    std::string take_string(const std::string& key, const std::string& fallback) {
        auto it = section_.find(key);
        if (it == section_.end()) return fallback;
        consumed_.insert(it->first);
        return it->second.text;
    }

    double take_double(const std::string& key, double fallback) {
        auto it = section_.find(key);
        if (it == section_.end()) return fallback;
        consumed_.insert(it->first);
        return to_double(qualified(key), it->second.text);
    }

    long take_long(const std::string& key, long fallback) {
        auto it = section_.find(key);
        if (it == section_.end()) return fallback;
        consumed_.insert(it->first);
        return to_long(qualified(key), it->second.text);
    }

    std::vector<double> take_doubles(const std::string& key,
                                     std::vector<double> fallback) {
        auto it = section_.find(key);
        if (it == section_.end()) return fallback;
        consumed_.insert(it->first);
        if (!it->second.is_list)
            throw ValidationError("field '" + qualified(key) + "': expected a list");
        std::vector<double> out;
        for (const auto& item : it->second.list)
            out.push_back(to_double(qualified(key), item));
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : section_)
            if (!consumed_.count(key))
                throw ValidationError("unknown key '" + qualified(key) +
                                      "' (line " + std::to_string(value.line) + ")");
    }

private:
    std::string qualified(const std::string& key) const {
        return name_ + "." + key;
    }
    std::string name_;
    Section section_;
    std::set<std::string> consumed_;
};

} // namespace

double ExperimentConfig::patch_extent() const {
    if (extent) return *extent;
    return family == Family::Plane ? 4.0 : 1.0;
}

void ExperimentConfig::validate() const {
    if (nu < 8 || nv < 8)
        throw ValidationError("field 'experiment.nu/nv': resolution must be >= 8");
    if (!(r0 > 0.0))
        throw ValidationError("field 'experiment.r0': must be positive");
    if ((family == Family::SymplecticGraph || family == Family::LagrangianGraph) &&
        !(epsilon >= 0.0 && epsilon < 0.5))
        throw ValidationError(
            "field 'experiment.epsilon': graph families require 0 <= eps < 0.5");
    if (p < 1 || q < 1)
        throw ValidationError("field 'experiment.p/q': wavenumbers must be >= 1");
    if (extent && !(*extent > 0.0))
        throw ValidationError("field 'experiment.extent': must be positive");
    flow.validate();
    if (!(rescale.s1 < rescale.s2) || !(rescale.s2 < 0.0))
        throw ValidationError("field 'rescale.window': requires s1 < s2 < 0");
    if (!(rescale.ball_radius > 0.0))
        throw ValidationError("field 'rescale.ball_radius': must be positive");
    analysis.validate();
}

ExperimentConfig parse_config(const std::string& text) {
    auto doc = tokenize(text);
    ExperimentConfig cfg;

    for (const auto& [name, section] : doc) {
        (void)section;
        if (name != "experiment" && name != "flow" && name != "rescale" &&
            name != "analysis" && name != "output")
            throw ValidationError("unknown section '[" + name + "]'");
    }

    {
        SectionReader r("experiment", doc.count("experiment") ? doc["experiment"]
                                                              : Section{});
        const std::string fam = r.take_string("family", to_string(cfg.family));
        cfg.family = family_from_string(fam);
        cfg.r0 = r.take_double("r0", cfg.r0);
        cfg.epsilon = r.take_double("epsilon", cfg.epsilon);
        cfg.p = static_cast<int>(r.take_long("p", cfg.p));
        cfg.q = static_cast<int>(r.take_long("q", cfg.q));
        cfg.expr = holomorphic_expr_from_string(r.take_string("expr", "z2"));
        if (r.has("extent")) cfg.extent = r.take_double("extent", 1.0);
        cfg.nu = static_cast<std::size_t>(r.take_long("nu", static_cast<long>(cfg.nu)));
        cfg.nv = static_cast<std::size_t>(r.take_long("nv", static_cast<long>(cfg.nv)));
        cfg.seed = static_cast<unsigned long>(r.take_long("seed", 0));
        r.reject_unknown();
    }
    {
        SectionReader r("flow", doc.count("flow") ? doc["flow"] : Section{});
        cfg.flow.dt_safety = r.take_double("dt_safety", cfg.flow.dt_safety);
        cfg.flow.max_steps = static_cast<std::size_t>(
            r.take_long("max_steps", static_cast<long>(cfg.flow.max_steps)));
        cfg.flow.blowup_threshold_a2 =
            r.take_double("blowup_threshold_a2", cfg.flow.blowup_threshold_a2);
        cfg.flow.snapshot_stride = static_cast<std::size_t>(r.take_long(
            "snapshot_stride", static_cast<long>(cfg.flow.snapshot_stride)));
        r.reject_unknown();
    }
    {
        SectionReader r("rescale", doc.count("rescale") ? doc["rescale"] : Section{});
        cfg.rescale.lambdas = r.take_doubles("lambdas", cfg.rescale.lambdas);
        const std::vector<double> window =
            r.take_doubles("window", {cfg.rescale.s1, cfg.rescale.s2});
        if (window.size() != 2)
            throw ValidationError("field 'rescale.window': expected [s1, s2]");
        cfg.rescale.s1 = window[0];
        cfg.rescale.s2 = window[1];
        cfg.rescale.ball_radius =
            r.take_double("ball_radius", cfg.rescale.ball_radius);
        if (r.has("x0")) {
            const std::vector<double> x0 = r.take_doubles("x0", {});
            if (x0.size() != 4)
                throw ValidationError("field 'rescale.x0': expected 4 components");
            cfg.rescale.x0 = Vec4(x0[0], x0[1], x0[2], x0[3]);
        }
        if (r.has("t_singular"))
            cfg.rescale.t_singular = r.take_double("t_singular", 0.0);
        r.reject_unknown();
    }
    {
        SectionReader r("analysis", doc.count("analysis") ? doc["analysis"] : Section{});
        cfg.analysis.knn = static_cast<int>(r.take_long("knn", cfg.analysis.knn));
        cfg.analysis.tau_plane = r.take_double("tau_plane", cfg.analysis.tau_plane);
        cfg.analysis.delta_origin_rel =
            r.take_double("delta_origin", cfg.analysis.delta_origin_rel);
        cfg.analysis.tau_cal = r.take_double("tau_cal", cfg.analysis.tau_cal);
        cfg.analysis.tau_flat_rel = r.take_double("tau_flat", cfg.analysis.tau_flat_rel);
        cfg.analysis.tangent_residual_max = r.take_double(
            "tangent_residual_max", cfg.analysis.tangent_residual_max);
        cfg.analysis.min_cluster_weight_rel = r.take_double(
            "min_cluster_weight", cfg.analysis.min_cluster_weight_rel);
        cfg.analysis.density_radii_rel =
            r.take_doubles("density_radii", cfg.analysis.density_radii_rel);
        r.reject_unknown();
    }
    {
        SectionReader r("output", doc.count("output") ? doc["output"] : Section{});
        cfg.output_dir = r.take_string("directory", cfg.output_dir);
        r.reject_unknown();
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SurfaceGrid make_initial_surface(const ExperimentConfig& config) {
    config.validate();
    SurfaceGrid surface;
    switch (config.family) {
    case Family::Plane:
        surface = make_plane(config.patch_extent(), config.nu, config.nv);
        break;
    case Family::CliffordTorus:
        surface = make_clifford_torus(config.r0, config.nu, config.nv);
        break;
    case Family::AnalyticSphere:
        surface = make_sphere_snapshot(config.r0, config.nu, config.nv);
        break;
    case Family::HolomorphicPatch:
        surface = make_holomorphic_patch(config.expr, config.nu, config.nv);
        break;
    case Family::SymplecticGraph:
        surface = make_symplectic_graph(config.epsilon, config.p, config.q,
                                        config.nu, config.nv);
        break;
    case Family::LagrangianGraph:
        surface = make_lagrangian_graph(config.epsilon, config.nu, config.nv);
        break;
    }

    // cos(alpha) contract of the family, checked at every grid point
    const std::vector<double> cos_alpha =
        kahler_angle(surface, KahlerStructure::standard());
    double min_cos = 1.0, max_abs = 0.0, max_dev_from_one = 0.0;
    for (double c : cos_alpha) {
        min_cos = std::min(min_cos, c);
        max_abs = std::max(max_abs, std::abs(c));
        max_dev_from_one = std::max(max_dev_from_one, std::abs(1.0 - c));
    }
    switch (config.family) {
    case Family::Plane:
    case Family::HolomorphicPatch:
        if (max_dev_from_one > 1e-10)
            throw ValidationError("holomorphic family violated cos(alpha) = 1 by " +
                                  std::to_string(max_dev_from_one));
        break;
    case Family::CliffordTorus:
    case Family::LagrangianGraph:
        if (max_abs > 1e-10)
            throw ValidationError("Lagrangian family violated cos(alpha) = 0 by " +
                                  std::to_string(max_abs));
        break;
    case Family::SymplecticGraph:
        if (!(min_cos > 0.0))
            throw ValidationError(
                "symplectic family is not symplectic: min cos(alpha) = " +
                std::to_string(min_cos));
        break;
    case Family::AnalyticSphere:
        break; // the sphere's Kaehler angle legitimately spans [-1, 1]
    }
    return surface;
}

FlowTrace simulate(const ExperimentConfig& config) {
    if (config.family == Family::AnalyticSphere)
        return make_analytic_sphere_trace(config.r0, config.nu, config.nv, 800,
                                          config.flow.snapshot_stride,
                                          config.flow.blowup_threshold_a2);
    const SurfaceGrid initial = make_initial_surface(config);
    return run_flow(config.flow, initial);
}

} // namespace mcf4
