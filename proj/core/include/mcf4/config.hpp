#ifndef MCF4_CONFIG_HPP
#define MCF4_CONFIG_HPP

#include <optional>
#include <string>

#include "mcf4/cone.hpp"
#include "mcf4/families.hpp"

namespace mcf4 {

struct RescaleSettings {
    std::vector<double> lambdas = {4.0, 8.0, 16.0, 32.0};
    double s1 = -2.0, s2 = -1.0;
    double ball_radius = 16.0;
    std::optional<Vec4> x0;          ///< default: blow-up point from diagnosis
    std::optional<double> t_singular; ///< default: T_est from diagnosis
};

/// One experiment: an initial family, flow parameters, rescaling window and
/// analysis thresholds. Parsed from a strict TOML-style document; unknown
/// keys are rejected.
struct ExperimentConfig {
    Family family = Family::CliffordTorus;
    double r0 = 1.0;            ///< cliffordTorus / analyticSphere radius
    double epsilon = 0.2;       ///< graph amplitude, must stay below 0.5
    int p = 1, q = 1;           ///< symplectic graph wavenumbers
    HolomorphicExpr expr = HolomorphicExpr::ZSquared;
    std::optional<double> extent; ///< patch half-width (default 1, plane 4)
    std::size_t nu = 64, nv = 64;
    unsigned long seed = 0;      ///< RNG seed for noise tests

    FlowConfig flow;
    RescaleSettings rescale;
    AnalysisParams analysis;
    std::string output_dir = "out";

    double patch_extent() const;
    void validate() const;
};

/// Parse a config document. ParseError carries the offending line;
/// ValidationError names the field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Family-exact initial surface; verifies the family's cos(alpha) contract
/// at every grid point.
SurfaceGrid make_initial_surface(const ExperimentConfig& config);

/// Run the experiment's flow: PDE-stepped for all families except the
/// analytic sphere, whose trace is generated in closed form.
FlowTrace simulate(const ExperimentConfig& config);

} // namespace mcf4

#endif
