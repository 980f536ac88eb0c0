#include "mcf4/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcf4 {

void FlowConfig::validate() const {
    if (!(dt_safety > 0.0) || dt_safety > 0.5)
        throw ValidationError("dt_safety must lie in (0, 0.5]");
    if (!(blowup_threshold_a2 > 0.0))
        throw ValidationError("blowup_threshold_a2 must be positive");
    if (snapshot_stride == 0)
        throw ValidationError("snapshot_stride must be positive");
}

SurfaceGrid surface_at(const FlowTrace& trace, double t) {
    const auto& snaps = trace.snapshots;
    if (snaps.empty()) throw OutOfTraceRange("trace has no snapshots");
    const double t0 = snaps.front().time, t1 = snaps.back().time;
    const double slack = 1e-12 * std::max(1.0, std::abs(t1));
    if (t < t0 - slack || t > t1 + slack)
        throw OutOfTraceRange("time " + std::to_string(t) +
                              " outside trace range [" + std::to_string(t0) +
                              ", " + std::to_string(t1) + "]");
    t = std::clamp(t, t0, t1);

    auto upper = std::lower_bound(
        snaps.begin(), snaps.end(), t,
        [](const SurfaceGrid& s, double value) { return s.time < value; });
    if (upper == snaps.begin()) return snaps.front();
    if (upper == snaps.end()) return snaps.back();
    const SurfaceGrid& b = *upper;
    const SurfaceGrid& a = *(upper - 1);
    const double span = b.time - a.time;
    if (!(span > 0.0)) return a;
    const double w = (t - a.time) / span;

    SurfaceGrid out = a;
    out.time = t;
    for (std::size_t k = 0; k < out.positions.size(); ++k)
        out.positions[k] = (1.0 - w) * a.positions[k] + w * b.positions[k];
    return out;
}

double max_stable_dt(const SurfaceGrid& surface, const GeometryField& geom,
                     const FlowConfig& config) {
    const double h = min_physical_spacing(surface, geom);
    double bound = h * h;
    double max_a2 = 0.0;
    for (std::size_t idx = 0; idx < surface.size(); ++idx)
        if (geom.interior[idx]) max_a2 = std::max(max_a2, geom.norm_sq_a[idx]);
    if (max_a2 > 0.0) bound = std::min(bound, 1.0 / max_a2);
    return config.dt_safety * bound;
}

namespace {

SurfaceGrid advance(const SurfaceGrid& surface, const GeometryField& geom,
                    double dt) {
    SurfaceGrid out = surface;
    out.time = surface.time + dt;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            const std::size_t idx = surface.index(i, j);
            if (!geom.interior[idx]) continue; // patch boundary pinned
            out.positions[idx] += dt * geom.mean_curvature[idx];
        }
    return out;
}

struct StepDiagnostics {
    double area, max_a2, max_h, min_cos_alpha;
};

StepDiagnostics diagnostics_of(const SurfaceGrid& surface,
                               const GeometryField& geom) {
    StepDiagnostics d{0.0, 0.0, 0.0, std::numeric_limits<double>::max()};
    for (std::size_t idx = 0; idx < surface.size(); ++idx) {
        d.min_cos_alpha = std::min(d.min_cos_alpha, geom.cos_alpha[idx]);
        if (!geom.interior[idx]) continue;
        d.max_a2 = std::max(d.max_a2, geom.norm_sq_a[idx]);
        d.max_h = std::max(d.max_h, std::sqrt(geom.norm_sq_h[idx]));
    }
    d.area = surface_area(surface, geom);
    return d;
}

} // namespace

SurfaceGrid step_explicit(const SurfaceGrid& surface, double dt,
                          const FlowConfig& config,
                          const KahlerStructure& structure,
                          const GeometryOptions& opts) {
    config.validate();
    const GeometryField geom = compute_geometry(surface, structure, opts);
    const double bound = max_stable_dt(surface, geom, config);
    if (dt > bound * (1.0 + 1e-9))
        throw StepTooLarge("dt = " + std::to_string(dt) +
                           " exceeds the stability bound " + std::to_string(bound));

    const SurfaceGrid mid = advance(surface, geom, 0.5 * dt);
    const GeometryField mid_geom = compute_geometry(mid, structure, opts);
    SurfaceGrid out = advance(surface, mid_geom, dt);
    out.time = surface.time + dt;
    return out;
}

FlowTrace run_flow(const FlowConfig& config, const SurfaceGrid& initial,
                   const KahlerStructure& structure) {
    config.validate();
    initial.check_valid();

    FlowTrace trace;
    trace.structure = structure;

    // Freeze the mesh-collapse guard against the initial surface scale.
    GeometryOptions opts;
    {
        const MetricField m = first_fundamental_form(initial);
        double mean = 0.0;
        for (double a : m.area_element) mean += a;
        mean /= static_cast<double>(m.area_element.size());
        const double scale = 1e-12 * mean;
        opts.degenerate_tol = scale * scale;
    }

    SurfaceGrid current = initial;
    GeometryField geom = compute_geometry(current, structure, opts);
    {
        const StepDiagnostics d0 = diagnostics_of(current, geom);
        trace.initially_symplectic = d0.min_cos_alpha > 0.0;
    }

    trace.snapshots.push_back(current);
    bool snapshot_current = true;

    for (std::size_t step = 0; step < config.max_steps; ++step) {
        const StepDiagnostics d = diagnostics_of(current, geom);
        if (trace.initially_symplectic && d.min_cos_alpha <= 0.0)
            throw SymplecticityLost(
                "min cos(alpha) = " + std::to_string(d.min_cos_alpha) +
                " at t = " + std::to_string(current.time) +
                "; the discrete maximum principle failed");

        const double dt = max_stable_dt(current, geom, config);
        const bool blown_up = d.max_a2 > config.blowup_threshold_a2;
        const bool underflow = dt < 1e-15;
        trace.rows.push_back({current.time, blown_up || underflow ? 0.0 : dt,
                              d.area, d.max_a2, d.max_h, d.min_cos_alpha});
        if (blown_up || underflow) break;

        const SurfaceGrid mid = advance(current, geom, 0.5 * dt);
        const GeometryField mid_geom = compute_geometry(mid, structure, opts);
        current = advance(current, mid_geom, dt);
        geom = compute_geometry(current, structure, opts);

        snapshot_current = false;
        if ((step + 1) % config.snapshot_stride == 0) {
            trace.snapshots.push_back(current);
            snapshot_current = true;
        }

        if (step + 1 == config.max_steps) {
            const StepDiagnostics last = diagnostics_of(current, geom);
            trace.rows.push_back({current.time, 0.0, last.area, last.max_a2,
                                  last.max_h, last.min_cos_alpha});
        }
    }

    if (!snapshot_current) trace.snapshots.push_back(current);
    return trace;
}

std::string to_string(SingularityType t) {
    switch (t) {
    case SingularityType::None: return "None";
    case SingularityType::TypeI: return "TypeI";
    case SingularityType::TypeII: return "TypeII";
    default: return "Inconclusive";
    }
}

namespace {

std::size_t fit_window_start(const FlowTrace& trace) {
    const std::size_t n = trace.rows.size();
    const std::size_t quartile = n - n / 4;
    return n >= 14 ? std::min(quartile, n - 10) : 0;
}

} // namespace

SingularityEstimate estimate_singular_time(const FlowTrace& trace) {
    const auto& rows = trace.rows;
    if (rows.size() < 10)
        throw NoBlowup("trace has only " + std::to_string(rows.size()) +
                       " diagnostic rows");

    SingularityEstimate est;

    // Blow-up point: argmax |A| on the final snapshot, lowest index on ties.
    {
        const SurfaceGrid& last = trace.snapshots.back();
        const GeometryField geom = compute_geometry(last, trace.structure);
        double best = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t idx = 0; idx < last.size(); ++idx)
            if (geom.interior[idx] && geom.norm_sq_a[idx] > best) {
                best = geom.norm_sq_a[idx];
                best_idx = idx;
            }
        est.x0 = last.positions[best_idx];
    }

    const double initial_a2 = std::max(rows.front().max_a2, 1e-300);
    if (rows.back().max_a2 < 10.0 * initial_a2) {
        est.type = SingularityType::None;
        est.t_singular = rows.back().t;
        return est;
    }

    const std::size_t start = fit_window_start(trace);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size() - start);
    for (std::size_t k = start; k < rows.size(); ++k) {
        const double x = rows[k].t;
        const double y = 1.0 / rows[k].max_a2;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw NoBlowup("degenerate fit window");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    if (!(slope < 0.0))
        throw NoBlowup("1/max|A|^2 is not decreasing over the fit window");

    double ss = 0.0, mean_y = sy / n;
    for (std::size_t k = start; k < rows.size(); ++k) {
        const double y = 1.0 / rows[k].max_a2;
        const double r = y - (intercept + slope * rows[k].t);
        ss += r * r;
    }
    est.fit_residual = std::sqrt(ss / n) / std::max(mean_y, 1e-300);

    const double last_t = rows.back().t;
    double t_est = -intercept / slope;
    if (est.fit_residual > 0.1 || !(t_est > last_t)) {
        // no clean Type I model; place T just past the recorded rows
        double last_dt = 0.0;
        for (std::size_t k = rows.size(); k-- > 0;)
            if (rows[k].dt > 0.0) {
                last_dt = rows[k].dt;
                break;
            }
        t_est = last_t + last_dt;
    }
    est.t_singular = std::max(t_est, last_t + 1e-300);
    est.type = SingularityType::TypeI; // provisional; classify() refines
    classify_singularity(trace, est);
    return est;
}

SingularityType classify_singularity(const FlowTrace& trace,
                                     SingularityEstimate& estimate) {
    if (estimate.type == SingularityType::None)
        throw NoBlowup("no blow-up detected in the trace");

    const auto& rows = trace.rows;
    const std::size_t start = fit_window_start(trace);
    estimate.tail_values.clear();
    for (std::size_t k = start; k < rows.size(); ++k) {
        const double gap = estimate.t_singular - rows[k].t;
        if (gap <= 0.0) continue;
        estimate.tail_values.push_back(gap * rows[k].max_a2);
    }
    if (estimate.tail_values.size() < 3) {
        estimate.type = SingularityType::Inconclusive;
        return estimate.type;
    }

    const auto [mn_it, mx_it] = std::minmax_element(estimate.tail_values.begin(),
                                                    estimate.tail_values.end());
    const double mn = *mn_it, mx = *mx_it;
    double mean = 0.0;
    for (double q : estimate.tail_values) mean += q;
    mean /= static_cast<double>(estimate.tail_values.size());

    const bool bounded = (mx - mn) < 0.2 * mean;
    bool monotone_growth = true;
    for (std::size_t k = 1; k < estimate.tail_values.size(); ++k)
        if (estimate.tail_values[k] < estimate.tail_values[k - 1])
            monotone_growth = false;
    const bool doubled = estimate.tail_values.back() >
                         2.0 * estimate.tail_values.front();

    if (bounded)
        estimate.type = SingularityType::TypeI;
    else if (monotone_growth && doubled)
        estimate.type = SingularityType::TypeII;
    else
        estimate.type = SingularityType::Inconclusive;
    return estimate.type;
}

} // namespace mcf4
