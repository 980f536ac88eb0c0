#ifndef MCF4_RESCALE_HPP
#define MCF4_RESCALE_HPP

#include <string>
#include <vector>

#include "mcf4/monotonicity.hpp"

namespace mcf4 {

/// Parabolic rescaling F_lambda(x,t) = lambda (F(x, T + t/lambda^2) - X0)
/// around the spacetime point (X0, T), evaluated over the rescaled-time
/// window (s1, s2) with s1 < s2 < 0 and restricted to the ball B_R(0).
struct LambdaRescaleSpec {
    Vec4 x0 = Vec4::Zero();
    double t_singular = 0.0;
    std::vector<double> lambdas = {4.0, 8.0, 16.0, 32.0};
    double s1 = -2.0, s2 = -1.0;
    double ball_radius = 16.0;

    void validate() const;
};

enum class RescaleKind { Lambda, TimeDependent };

/// Point cloud extracted from a rescaled surface: positions with oriented
/// tangent planes, quadrature weights and Kaehler-angle values.
struct RescaledCloud {
    struct Point {
        Vec4 position;
        Eigen::Matrix<double, 2, 4> tangent; ///< orthonormal oriented rows
        double weight;
        double cos_alpha;
        double scale; ///< lambda or s of the source rescaling
        double time;  ///< rescaled time of the source surface
    };
    RescaleKind kind = RescaleKind::Lambda;
    std::vector<Point> points;
    double ball_radius = 0.0;

    double extent() const; ///< max point norm (falls back to ball_radius)
};

/// Rescaled surface at rescaled time t < 0; positions lambda (F - X0).
SurfaceGrid lambda_rescale(const FlowTrace& trace, const LambdaRescaleSpec& spec,
                           double lambda, double t);

/// Time-dependent rescaling F~(.,s) = (F(.,t) - X0) / sqrt(2(T-t)) with
/// t = T - exp(-2s).
SurfaceGrid time_rescale(const FlowTrace& trace, const Vec4& x0,
                         double t_singular, double s);

double s_from_t(double t, double t_singular);
double t_from_s(double s, double t_singular);

/// Max over interior grid points of the normal part of
/// (F~(s+ds) - F~(s))/ds - H~ - F~; the tangential part is reparametrization
/// and is discarded.
double rescaled_flow_residual(const FlowTrace& trace, const Vec4& x0,
                              double t_singular, double s, double ds);

/// One row of the decay report: the four window integrals restricted to
/// B_R(0) and the mass ratio mu(B_R)/R^2.
struct DecayEntry {
    double scale; ///< lambda, or s for the time-dependent variant
    double i1;    ///< |nabla-bar J|^2
    double i2;    ///< |nabla cos alpha|^2
    double i3;    ///< |H|^2
    double i4;    ///< |F_perp|^2
    double mass_ratio;
};

struct DecayReport {
    RescaleKind kind = RescaleKind::Lambda;
    std::vector<DecayEntry> entries;
    std::vector<double> skipped; ///< scales whose window left the trace
};

/// Spacetime integrals over (s1,s2) x (Sigma_t^lambda cap B_R(0)) per lambda,
/// trapezoid rule over at least eight sample times. Infeasible lambdas are
/// skipped and recorded.
DecayReport decay_integrals(const FlowTrace& trace, const LambdaRescaleSpec& spec,
                            std::size_t time_samples = 9);

/// Space integrals of the same quantities on the time-dependent rescaled
/// surfaces at the given s values, plus the mass ratio.
DecayReport time_decay_integrals(const FlowTrace& trace, const Vec4& x0,
                                 double t_singular,
                                 const std::vector<double>& s_values,
                                 double ball_radius);

/// Extract the weighted, oriented point cloud of a rescaled surface
/// restricted to B_R(0).
RescaledCloud cloud_from_surface(const SurfaceGrid& surface,
                                 const KahlerStructure& structure,
                                 double ball_radius, RescaleKind kind,
                                 double scale);

std::vector<WeightedPoint> cloud_support(const RescaledCloud& cloud);

} // namespace mcf4

#endif
