#include <doctest.h>

#include "mcf4/families.hpp"
#include "mcf4/flow.hpp"
#include "support.hpp"

using namespace mcf4;
using namespace mcf4::testing;

namespace {

const KahlerStructure kStd = KahlerStructure::standard();

double clifford_radius(const SurfaceGrid& s) {
    return s.positions.front().norm() / std::sqrt(2.0);
}

FlowConfig clifford_config(double threshold = 1e6) {
    FlowConfig cfg;
    cfg.dt_safety = 0.1;
    cfg.max_steps = 20000;
    cfg.blowup_threshold_a2 = threshold;
    cfg.snapshot_stride = 16;
    return cfg;
}

const FlowTrace& clifford_flow_trace() {
    static const FlowTrace trace =
        run_flow(clifford_config(), make_clifford_torus(1.0, 48, 48));
    return trace;
}

const FlowTrace& graph_flow_trace() {
    static const FlowTrace trace = [] {
        FlowConfig cfg;
        cfg.max_steps = 150;
        cfg.snapshot_stride = 4;
        return run_flow(cfg, make_symplectic_graph(0.2, 1, 1, 48, 48));
    }();
    return trace;
}

} // namespace

TEST_CASE("step: stationary plane stays put") {
    const SurfaceGrid plane = make_plane(4.0, 16, 16);
    FlowConfig cfg;
    const SurfaceGrid next = step_explicit(plane, 1e-4, cfg);
    double moved = 0.0;
    for (std::size_t k = 0; k < plane.size(); ++k)
        moved = std::max(moved, (next.positions[k] - plane.positions[k]).norm());
    CHECK(moved < 1e-14);
    CHECK(next.time == doctest::Approx(1e-4));
}

TEST_CASE("step: Clifford radius ODE r dr = -dt") {
    const SurfaceGrid torus = make_clifford_torus(1.0, 32, 32);
    FlowConfig cfg;
    const GeometryField geom = compute_geometry(torus, kStd);
    const double dt = max_stable_dt(torus, geom, cfg);
    const SurfaceGrid next = step_explicit(torus, dt, cfg);
    const double r2_drop = 1.0 - clifford_radius(next) * clifford_radius(next);
    const double h2 = torus.hu * torus.hu;
    CHECK(std::abs(r2_drop - 2.0 * dt) < 2.0 * h2 * dt + 5.0 * dt * dt);
}

TEST_CASE("step: area drop rate equals -integral |H|^2") {
    const SurfaceGrid graph = make_symplectic_graph(0.2, 1, 1, 48, 48);
    FlowConfig cfg;
    const GeometryField geom = compute_geometry(graph, kStd);
    const double dt = max_stable_dt(graph, geom, cfg);
    const SurfaceGrid next = step_explicit(graph, dt, cfg);
    const GeometryField geom_next = compute_geometry(next, kStd);

    const double rate =
        (surface_area(next, geom_next) - surface_area(graph, geom)) / dt;
    const double dissipation = integrate_scalar(graph, geom, geom.norm_sq_h);
    CHECK(rate == doctest::Approx(-dissipation).epsilon(0.05));
}

TEST_CASE("step: forward then analytic backward map recovers r") {
    const SurfaceGrid torus = make_clifford_torus(1.0, 32, 32);
    FlowConfig cfg;
    const GeometryField geom = compute_geometry(torus, kStd);
    const double dt = max_stable_dt(torus, geom, cfg);
    const SurfaceGrid next = step_explicit(torus, dt, cfg);
    const double r_after = clifford_radius(next);
    const double r_back = std::sqrt(r_after * r_after + 2.0 * dt);
    const double h2 = torus.hu * torus.hu;
    CHECK(std::abs(r_back - 1.0) < 10.0 * (dt * dt + h2 * dt));
}

TEST_CASE("step: oversized dt raises StepTooLarge") {
    const SurfaceGrid torus = make_clifford_torus(1.0, 16, 16);
    FlowConfig cfg;
    CHECK_THROWS_AS(step_explicit(torus, 0.5, cfg), StepTooLarge);
}

TEST_CASE("run: Clifford torus blows up near t = 1/2") {
    const FlowTrace& trace = clifford_flow_trace();
    CHECK(trace.rows.back().max_a2 > 1e6);
    CHECK(trace.rows.back().t > 0.49);
    CHECK(trace.rows.back().t < 0.5);
    // area strictly nonincreasing along the run
    for (std::size_t k = 1; k < trace.rows.size(); ++k)
        CHECK(trace.rows[k].area <=
              trace.rows[k - 1].area + 1e-8 * trace.rows[k - 1].area);
}

TEST_CASE("run: holomorphic patch is stationary for 1000 steps") {
    FlowConfig cfg;
    cfg.max_steps = 1000;
    cfg.snapshot_stride = 250;
    const SurfaceGrid initial = make_holomorphic_patch(HolomorphicExpr::ZSquared, 32, 32);
    const FlowTrace trace = run_flow(cfg, initial);
    const SurfaceGrid& last = trace.snapshots.back();
    double moved = 0.0;
    for (std::size_t k = 0; k < initial.size(); ++k)
        moved = std::max(moved, (last.positions[k] - initial.positions[k]).norm());
    CHECK(moved < 1e-4);
    for (const auto& row : trace.rows) CHECK(row.min_cos_alpha >= 1.0 - 1e-10);
}

TEST_CASE("run: symplectic graph obeys the discrete maximum principle") {
    const FlowTrace& trace = graph_flow_trace();
    REQUIRE(trace.initially_symplectic);
    for (std::size_t k = 1; k < trace.rows.size(); ++k)
        CHECK(trace.rows[k].min_cos_alpha >=
              trace.rows[k - 1].min_cos_alpha - 1e-6);
    // and cos(alpha) actually improves toward 1 on this run
    CHECK(trace.rows.back().min_cos_alpha > trace.rows.front().min_cos_alpha);
}

TEST_CASE("run: vanishing symplectic margin trips SymplecticityLost") {
    // discretization noise exceeds a 1e-12 Kaehler-angle margin immediately
    SurfaceGrid s(Topology::Patch, 16, 16, 2.0 / 15.0, 2.0 / 15.0);
    const double delta = 1e-12;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            const double u = -1.0 + static_cast<double>(i) * s.hu;
            const double v = -1.0 + static_cast<double>(j) * s.hv;
            s.at(i, j) =
                Vec4(u, v, u, -(1.0 - delta) * v + 0.3 * std::sin(kPi * u));
        }
    FlowConfig cfg;
    cfg.max_steps = 2000;
    CHECK_THROWS_AS(run_flow(cfg, s), SymplecticityLost);
}

TEST_CASE("Kaehler-angle PDE residual is O(h^2 + dt)") {
    // (d/dt - Laplace) cos(alpha) = |nabla-bar J|^2 cos(alpha) at R = 0;
    // halving h (with dt tied to h^2 by the CFL rule) must cut the residual
    // by at least 3x.
    double residuals[2];
    std::size_t idx = 0;
    for (std::size_t n : {24, 48}) {
        SurfaceGrid surface = make_symplectic_graph(0.2, 1, 1, n, n);
        FlowConfig cfg;
        // advance to t ~ 0.05 so the field is past the initial layer
        GeometryField geom = compute_geometry(surface, kStd);
        while (surface.time < 0.05) {
            const double dt = max_stable_dt(surface, geom, cfg);
            surface = step_explicit(surface, dt, cfg);
            geom = compute_geometry(surface, kStd);
        }
        const double dt = max_stable_dt(surface, geom, cfg);
        const SurfaceGrid next = step_explicit(surface, dt, cfg);
        const GeometryField geom_next = compute_geometry(next, kStd);
        const std::vector<double> lap = laplace_beltrami(surface, geom.cos_alpha);

        double worst = 0.0;
        for (std::size_t i = 0; i < surface.nu; ++i)
            for (std::size_t j = 0; j < surface.nv; ++j) {
                const std::size_t k = surface.index(i, j);
                const double ddt = (geom_next.cos_alpha[k] - geom.cos_alpha[k]) / dt;
                const double res =
                    ddt - lap[k] - geom.norm_sq_nabla_j[k] * geom.cos_alpha[k];
                worst = std::max(worst, std::abs(res));
            }
        residuals[idx++] = worst;
    }
    CHECK(residuals[0] / residuals[1] >= 3.0);
}

TEST_CASE("estimate: Clifford extinction time within 1%") {
    const SingularityEstimate est = estimate_singular_time(clifford_flow_trace());
    CHECK(est.t_singular == doctest::Approx(0.5).epsilon(0.01));
    CHECK(est.type == SingularityType::TypeI);
    CHECK(est.fit_residual < 0.01);
    // blow-up point: every grid point ties, so the lowest index wins; the
    // surface has collapsed toward the origin by then
    CHECK(est.x0.norm() < 0.01);
}

TEST_CASE("estimate: analytic sphere trace gives T = 1/4") {
    const FlowTrace trace = make_analytic_sphere_trace(1.0, 48, 48, 400, 2);
    const SingularityEstimate est = estimate_singular_time(trace);
    CHECK(est.t_singular == doctest::Approx(0.25).epsilon(0.01));
    CHECK(est.type == SingularityType::TypeI);
}

TEST_CASE("estimate: stationary plane reports None") {
    const FlowTrace trace = make_static_trace(make_plane(4.0, 16, 16), 0.5, 12);
    const SingularityEstimate est = estimate_singular_time(trace);
    CHECK(est.type == SingularityType::None);
}

TEST_CASE("estimate: short trace raises NoBlowup") {
    const FlowTrace trace = make_static_trace(make_plane(4.0, 16, 16), 0.5, 5);
    CHECK_THROWS_AS(estimate_singular_time(trace), NoBlowup);
}

TEST_CASE("classify: Clifford is Type I with limit 1") {
    SingularityEstimate est = estimate_singular_time(clifford_flow_trace());
    CHECK(classify_singularity(clifford_flow_trace(), est) == SingularityType::TypeI);
    for (double q : est.tail_values) CHECK(q == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("classify: sphere is Type I with limit 1/2") {
    // |A|^2 = 2/r^2 and r^2 = 4(T-t), so (T-t) |A|^2 = 1/2
    const FlowTrace trace = make_analytic_sphere_trace(1.0, 48, 48, 400, 2);
    SingularityEstimate est = estimate_singular_time(trace);
    CHECK(classify_singularity(trace, est) == SingularityType::TypeI);
    for (double q : est.tail_values) CHECK(q == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("classify: converging graph run is not Type I") {
    SingularityEstimate est = estimate_singular_time(graph_flow_trace());
    CHECK(est.type == SingularityType::None);
    CHECK_THROWS_AS(classify_singularity(graph_flow_trace(), est), NoBlowup);
}

TEST_CASE("refinement: T_est moves by < 0.5% under grid doubling") {
    double t_est[2];
    std::size_t idx = 0;
    for (std::size_t n : {48, 96}) {
        const FlowTrace trace =
            run_flow(clifford_config(100.0), make_clifford_torus(1.0, n, n));
        t_est[idx++] = estimate_singular_time(trace).t_singular;
    }
    CHECK(std::abs(t_est[0] - t_est[1]) / t_est[1] < 0.005);
}

TEST_CASE("trace interpolation matches the closed-form shrinker") {
    const FlowTrace trace = make_analytic_clifford_trace(1.0, 24, 24, 400, 4);
    for (double tau : {0.11, 0.237, 0.35}) {
        const SurfaceGrid snap = surface_at(trace, tau);
        CHECK(clifford_radius(snap) ==
              doctest::Approx(std::sqrt(1.0 - 2.0 * tau)).epsilon(1e-5));
    }
    CHECK_THROWS_AS(surface_at(trace, -1.0), OutOfTraceRange);
}
