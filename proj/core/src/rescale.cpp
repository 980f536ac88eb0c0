#include "mcf4/rescale.hpp"

#include <algorithm>
#include <cmath>

namespace mcf4 {

void LambdaRescaleSpec::validate() const {
    if (!(s1 < s2) || !(s2 < 0.0))
        throw ValidationError("rescale window must satisfy s1 < s2 < 0");
    if (!(ball_radius > 0.0))
        throw ValidationError("ball radius must be positive");
    if (lambdas.empty())
        throw ValidationError("lambda ladder is empty");
    for (double l : lambdas)
        if (!(l > 0.0)) throw ValidationError("lambdas must be positive");
}

double RescaledCloud::extent() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.position.norm());
    return m > 0.0 ? m : ball_radius;
}

SurfaceGrid lambda_rescale(const FlowTrace& trace, const LambdaRescaleSpec& spec,
                           double lambda, double t) {
    const double tau = spec.t_singular + t / (lambda * lambda);
    SurfaceGrid snap = surface_at(trace, tau); // OutOfTraceRange on miss
    SurfaceGrid out = snap;
    out.time = t;
    for (auto& p : out.positions) p = lambda * (p - spec.x0);
    out.period_u = lambda * snap.period_u;
    out.period_v = lambda * snap.period_v;
    return out;
}

double s_from_t(double t, double t_singular) {
    if (!(t < t_singular)) throw TimeOrder("s(t) requires t < T");
    return -0.5 * std::log(t_singular - t);
}

double t_from_s(double s, double t_singular) {
    return t_singular - std::exp(-2.0 * s);
}

SurfaceGrid time_rescale(const FlowTrace& trace, const Vec4& x0,
                         double t_singular, double s) {
    const double tau = t_from_s(s, t_singular);
    SurfaceGrid snap = surface_at(trace, tau);
    SurfaceGrid out = snap;
    out.time = s;
    const double factor = 1.0 / std::sqrt(2.0 * (t_singular - tau));
    for (auto& p : out.positions) p = factor * (p - x0);
    out.period_u = factor * snap.period_u;
    out.period_v = factor * snap.period_v;
    return out;
}

double rescaled_flow_residual(const FlowTrace& trace, const Vec4& x0,
                              double t_singular, double s, double ds) {
    const SurfaceGrid a = time_rescale(trace, x0, t_singular, s);
    const SurfaceGrid b = time_rescale(trace, x0, t_singular, s + ds);
    const GeometryField geom = compute_geometry(a, trace.structure);

    double worst = 0.0;
    for (std::size_t i = 0; i < a.nu; ++i)
        for (std::size_t j = 0; j < a.nv; ++j) {
            if (!a.is_interior(i, j)) continue;
            const std::size_t idx = a.index(i, j);
            const Vec4 d = (b.positions[idx] - a.positions[idx]) / ds -
                           geom.mean_curvature[idx] - a.positions[idx];
            const AdaptedFrame& fr = geom.frame[idx];
            const Vec4 normal = d.dot(fr.v1) * fr.v1 + d.dot(fr.v2) * fr.v2;
            worst = std::max(worst, normal.norm());
        }
    return worst;
}

namespace {

struct SpaceIntegrals {
    double i1, i2, i3, i4, mass;
};

// The four space integrals of a (rescaled) surface restricted to B_R(0),
// midpoint quadrature on interior grid points.
SpaceIntegrals space_integrals(const SurfaceGrid& surface,
                               const KahlerStructure& structure, double radius) {
    const GeometryField geom = compute_geometry(surface, structure);
    SpaceIntegrals acc{0, 0, 0, 0, 0};
    const double cell = surface.hu * surface.hv;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            if (surface.positions[idx].norm() >= radius) continue;
            const double w = geom.area_element[idx] * cell;

            double du, dv;
            scalar_gradient(surface, geom.cos_alpha, i, j, du, dv);
            const Mat2& ig = geom.inv_g[idx];
            const double grad_sq =
                ig(0, 0) * du * du + 2.0 * ig(0, 1) * du * dv + ig(1, 1) * dv * dv;

            const AdaptedFrame& fr = geom.frame[idx];
            const Vec4& p = surface.positions[idx];
            const Vec4 perp = p.dot(fr.v1) * fr.v1 + p.dot(fr.v2) * fr.v2;

            acc.i1 += geom.norm_sq_nabla_j[idx] * w;
            acc.i2 += grad_sq * w;
            acc.i3 += geom.norm_sq_h[idx] * w;
            acc.i4 += perp.squaredNorm() * w;
            acc.mass += w;
        }
    return acc;
}

} // namespace

DecayReport decay_integrals(const FlowTrace& trace, const LambdaRescaleSpec& spec,
                            std::size_t time_samples) {
    spec.validate();
    time_samples = std::max<std::size_t>(time_samples, 8);

    DecayReport report;
    report.kind = RescaleKind::Lambda;
    const double t_first = trace.first_time();

    for (double lambda : spec.lambdas) {
        if (spec.t_singular + spec.s1 / (lambda * lambda) < t_first) {
            report.skipped.push_back(lambda);
            continue;
        }
        const double ds = (spec.s2 - spec.s1) / static_cast<double>(time_samples - 1);
        DecayEntry entry{lambda, 0, 0, 0, 0, 0};
        double mass_mid = 0.0;
        for (std::size_t k = 0; k < time_samples; ++k) {
            const double s = spec.s1 + ds * static_cast<double>(k);
            const SurfaceGrid surf = lambda_rescale(trace, spec, lambda, s);
            const SpaceIntegrals space =
                space_integrals(surf, trace.structure, spec.ball_radius);
            const double w = (k == 0 || k + 1 == time_samples) ? 0.5 * ds : ds;
            entry.i1 += w * space.i1;
            entry.i2 += w * space.i2;
            entry.i3 += w * space.i3;
            entry.i4 += w * space.i4;
            if (k == time_samples / 2) mass_mid = space.mass;
        }
        entry.mass_ratio = mass_mid / (spec.ball_radius * spec.ball_radius);
        report.entries.push_back(entry);
    }
    return report;
}

DecayReport time_decay_integrals(const FlowTrace& trace, const Vec4& x0,
                                 double t_singular,
                                 const std::vector<double>& s_values,
                                 double ball_radius) {
    DecayReport report;
    report.kind = RescaleKind::TimeDependent;
    for (double s : s_values) {
        const double tau = t_from_s(s, t_singular);
        if (tau < trace.first_time() || tau > trace.last_time()) {
            report.skipped.push_back(s);
            continue;
        }
        const SurfaceGrid surf = time_rescale(trace, x0, t_singular, s);
        const SpaceIntegrals space =
            space_integrals(surf, trace.structure, ball_radius);
        report.entries.push_back({s, space.i1, space.i2, space.i3, space.i4,
                                  space.mass / (ball_radius * ball_radius)});
    }
    return report;
}

RescaledCloud cloud_from_surface(const SurfaceGrid& surface,
                                 const KahlerStructure& structure,
                                 double ball_radius, RescaleKind kind,
                                 double scale) {
    const GeometryField geom = compute_geometry(surface, structure);
    RescaledCloud cloud;
    cloud.kind = kind;
    cloud.ball_radius = ball_radius;
    const double cell = surface.hu * surface.hv;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            if (ball_radius > 0.0 && surface.positions[idx].norm() >= ball_radius)
                continue;
            RescaledCloud::Point p;
            p.position = surface.positions[idx];
            p.tangent.row(0) = geom.frame[idx].e1;
            p.tangent.row(1) = geom.frame[idx].e2;
            p.weight = geom.area_element[idx] * cell;
            p.cos_alpha = geom.cos_alpha[idx];
            p.scale = scale;
            p.time = surface.time;
            cloud.points.push_back(p);
        }
    return cloud;
}

std::vector<WeightedPoint> cloud_support(const RescaledCloud& cloud) {
    std::vector<WeightedPoint> support;
    support.reserve(cloud.points.size());
    for (const auto& p : cloud.points)
        support.push_back({p.position, p.weight});
    return support;
}

} // namespace mcf4
