#include <doctest.h>

#include <random>

#include "mcf4/cone.hpp"
#include "mcf4/families.hpp"
#include "support.hpp"

using namespace mcf4;
using namespace mcf4::testing;

namespace {

const KahlerStructure kStd = KahlerStructure::standard();

// the (x1,x2) plane and the (x3,x4) plane, both complex-oriented
const Vec4 kZ1 = Vec4(1, 0, 0, 0), kZ2 = Vec4(0, 1, 0, 0);
const Vec4 kW1 = Vec4(0, 0, 1, 0), kW2 = Vec4(0, 0, 0, 1);

RescaledCloud two_complex_planes() {
    RescaledCloud cloud;
    append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 40);
    append_disc_cloud(cloud, Vec4::Zero(), kW1, kW2, 1.0, 40);
    for (auto& p : cloud.points) p.cos_alpha = 1.0;
    return cloud;
}

std::vector<Vec4> positions_of(const RescaledCloud& cloud) {
    std::vector<Vec4> out;
    out.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.push_back(p.position);
    return out;
}

double max_principal_angle(const Eigen::Matrix<double, 2, 4>& a,
                           const Eigen::Matrix<double, 2, 4>& b) {
    const Vec2 angles = principal_angles(a, b);
    return std::max(angles(0), angles(1));
}

Eigen::Matrix<double, 2, 4> rows(const Vec4& a, const Vec4& b) {
    Eigen::Matrix<double, 2, 4> m;
    m.row(0) = a;
    m.row(1) = b;
    return m;
}

} // namespace

TEST_CASE("local tangent planes") {
    SUBCASE("exact plane samples recover the plane") {
        RescaledCloud cloud;
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 30);
        const auto tangents = local_tangent_planes(positions_of(cloud), 12);
        const auto truth = rows(kZ1, kZ2);
        for (const auto& t : tangents) {
            CHECK(max_principal_angle(t.basis, truth) < 1e-10);
            CHECK(t.residual < 1e-10);
        }
    }
    SUBCASE("two-sheet union: pure neighborhoods away from the origin") {
        const RescaledCloud cloud = two_complex_planes();
        const std::vector<Vec4> pts = positions_of(cloud);
        const auto tangents = local_tangent_planes(pts, 12);
        const auto z_plane = rows(kZ1, kZ2), w_plane = rows(kW1, kW2);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (pts[k].norm() <= 0.2) continue;
            const bool on_z = std::abs(pts[k](2)) + std::abs(pts[k](3)) < 1e-12;
            CHECK(max_principal_angle(tangents[k].basis, on_z ? z_plane : w_plane) <
                  1e-6);
        }
    }
    SUBCASE("Gaussian noise sigma = 1e-3 keeps angles below 1e-2") {
        RescaledCloud cloud;
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 20);
        std::vector<Vec4> pts = positions_of(cloud);
        std::mt19937_64 rng(424242);
        std::normal_distribution<double> noise(0.0, 1e-3);
        for (auto& p : pts)
            p += Vec4(noise(rng), noise(rng), noise(rng), noise(rng));
        // neighborhoods large enough that the noise-to-spread ratio controls
        // the perturbation
        const auto tangents = local_tangent_planes(pts, 48);
        const auto truth = rows(kZ1, kZ2);
        for (const auto& t : tangents)
            CHECK(max_principal_angle(t.basis, truth) < 1e-2);
    }
    SUBCASE("too few points raises") {
        std::vector<Vec4> pts(7, Vec4::Zero());
        CHECK_THROWS_AS(local_tangent_planes(pts, 12), TooFewPoints);
        CHECK_THROWS_AS(local_tangent_planes(pts, 4), ValidationError);
    }
}

TEST_CASE("Grassmannian clustering") {
    AnalysisParams params;

    SUBCASE("chordal distance basics") {
        const auto z_plane = rows(kZ1, kZ2), w_plane = rows(kW1, kW2);
        CHECK(chordal_distance(z_plane, z_plane) < 1e-15);
        CHECK(chordal_distance(z_plane, w_plane) == doctest::Approx(2.0));
    }
    SUBCASE("single plane gives one cluster") {
        RescaledCloud cloud;
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 30);
        const std::vector<Vec4> pts = positions_of(cloud);
        const auto tangents = local_tangent_planes(pts, 12);
        std::vector<double> weights;
        std::vector<char> reliable;
        for (std::size_t k = 0; k < cloud.points.size(); ++k) {
            weights.push_back(cloud.points[k].weight);
            reliable.push_back(tangents[k].residual <= params.tangent_residual_max);
        }
        const auto planes =
            cluster_grassmannian(tangents, pts, weights, reliable, 1.0, params);
        REQUIRE(planes.size() == 1);
        CHECK(planes[0].residual < 1e-6);
        CHECK(planes[0].basepoint.norm() < 1e-10);
    }
    SUBCASE("transverse union gives two tight clusters") {
        const RescaledCloud cloud = two_complex_planes();
        const std::vector<Vec4> pts = positions_of(cloud);
        const auto tangents = local_tangent_planes(pts, 12);
        std::vector<double> weights;
        std::vector<char> reliable;
        for (std::size_t k = 0; k < cloud.points.size(); ++k) {
            weights.push_back(cloud.points[k].weight);
            reliable.push_back(tangents[k].residual <= params.tangent_residual_max);
        }
        const auto planes =
            cluster_grassmannian(tangents, pts, weights, reliable, 1.0, params);
        REQUIRE(planes.size() == 2);
        for (const auto& plane : planes) {
            CHECK(plane.residual < 1e-6);
            CHECK(plane.basepoint.norm() < 1e-10);
        }
    }
    SUBCASE("three mutually distant planes give three clusters") {
        RescaledCloud cloud;
        const Vec4 mixed1 = (kZ1 + kW1).normalized();
        const Vec4 mixed2 = (kZ2 - kW2).normalized();
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 25);
        append_disc_cloud(cloud, Vec4::Zero(), kW1, kW2, 1.0, 25);
        append_disc_cloud(cloud, Vec4::Zero(), mixed1, mixed2, 1.0, 25);
        const std::vector<Vec4> pts = positions_of(cloud);
        const auto tangents = local_tangent_planes(pts, 12);
        std::vector<double> weights;
        std::vector<char> reliable;
        for (std::size_t k = 0; k < cloud.points.size(); ++k) {
            weights.push_back(cloud.points[k].weight);
            reliable.push_back(tangents[k].residual <= params.tangent_residual_max);
        }
        const auto planes =
            cluster_grassmannian(tangents, pts, weights, reliable, 1.0, params);
        CHECK(planes.size() == 3);
    }
    SUBCASE("empty input gives no planes") {
        const auto planes = cluster_grassmannian({}, {}, {}, {}, 1.0, params);
        CHECK(planes.empty());
    }
}

TEST_CASE("cloud density profiles") {
    SUBCASE("single plane: 1") {
        RescaledCloud cloud;
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 50);
        const DensityProfile profile =
            density_profile(cloud, Vec4::Zero(), {0.75, 0.5, 0.35, 0.25});
        CHECK(profile.extrapolated == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("two transverse planes at the origin: 2") {
        const RescaledCloud cloud = two_complex_planes();
        const DensityProfile profile =
            density_profile(cloud, Vec4::Zero(), {0.75, 0.5, 0.35, 0.25});
        CHECK(profile.extrapolated == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("doubly-weighted plane: 2") {
        RescaledCloud cloud;
        append_disc_cloud(cloud, Vec4::Zero(), kZ1, kZ2, 1.0, 50, 2.0);
        const DensityProfile profile =
            density_profile(cloud, Vec4::Zero(), {0.75, 0.5, 0.35, 0.25});
        CHECK(profile.extrapolated == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("point on one sheet of the union: 1") {
        const RescaledCloud cloud = two_complex_planes();
        const Vec4 xi = 0.55 * kZ1;
        const DensityProfile profile =
            density_profile(cloud, xi, {0.3, 0.22, 0.16, 0.12});
        CHECK(profile.extrapolated == doctest::Approx(1.0).epsilon(0.05));
        // paper's lower-bound regime with the pi-normalization
        CHECK(profile.extrapolated >= 0.95);
    }
}

TEST_CASE("calibration fitting on the twistor spheres") {
    SUBCASE("standard complex pair: the standard Kaehler form") {
        std::vector<PlaneModel> planes(2);
        planes[0].basis = rows(kZ1, kZ2);
        planes[1].basis = rows(kW1, kW2);
        const CalibrationFit fit = fit_calibration_form(planes);
        CHECK(fit.point.self_dual);
        CHECK((fit.point.coeffs - Vec3(1, 0, 0)).norm() < 1e-7);
        CHECK(fit.min_value == doctest::Approx(1.0).epsilon(1e-9));
        for (double v : fit.plane_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("span(x1,x3): the second self-dual basis form") {
        std::vector<PlaneModel> planes(1);
        planes[0].basis = rows(kZ1, kW1);
        const CalibrationFit fit = fit_calibration_form(planes);
        CHECK(fit.point.self_dual);
        CHECK((fit.point.coeffs - Vec3(0, 1, 0)).norm() < 1e-7);
        CHECK(fit.min_value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("every oriented 2-plane is calibrated on both chirality spheres") {
        std::mt19937_64 rng(987654);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            Vec4 u(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
            Vec4 v(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
            u.normalize();
            v -= v.dot(u) * u;
            v.normalize();
            std::vector<PlaneModel> planes(1);
            planes[0].basis = rows(u, v);
            const CalibrationFit fit = fit_calibration_form(planes);
            CHECK(fit.best_self_dual >= 1.0 - 1e-8);
            CHECK(fit.best_anti_self_dual >= 1.0 - 1e-8);
        }
    }
    SUBCASE("no planes raises") {
        CHECK_THROWS_AS(fit_calibration_form({}), NoPlanes);
    }
}

TEST_CASE("cone report: synthetic two-complex-plane cloud") {
    const RescaledCloud cloud = two_complex_planes();
    const ConeReport report = cone_report(cloud);

    CHECK(report.plane_count == 2);
    CHECK(report.density_at_origin == doctest::Approx(2.0).epsilon(0.05));
    CHECK(report.calibration_residual < 1e-6);
    CHECK(report.theta_spread < 1e-6);
    CHECK(report.is_complex_union);
    CHECK(report.is_flat);
    CHECK(report.multiplicity_exceeds_one);
    for (double m : report.multiplicities)
        CHECK(std::abs(m - std::round(m)) < 0.1);
}

TEST_CASE("cone report: single Lagrangian plane") {
    // span(x1, x3) is Lagrangian for the standard form but complex for the
    // second twistor direction
    RescaledCloud cloud;
    append_disc_cloud(cloud, Vec4::Zero(), kZ1, kW1, 1.0, 40);
    for (auto& p : cloud.points) p.cos_alpha = 0.0;
    const ConeReport report = cone_report(cloud);

    CHECK(report.plane_count == 1);
    CHECK(report.density_at_origin == doctest::Approx(1.0).epsilon(0.05));
    CHECK_FALSE(report.multiplicity_exceeds_one);
    CHECK(report.calibration_residual < 1e-6);

    // the cloud's standard-structure Kaehler angle is 0
    for (const auto& p : cloud.points) CHECK(p.cos_alpha == 0.0);
    // and the fitted calibration achieves 1 on some sphere; the anti-self-dual
    // optimum must also reach 1 for a single plane
    const CalibrationFit fit = fit_calibration_form(report.planes);
    CHECK(fit.best_anti_self_dual >= 1.0 - 1e-8);
}

TEST_CASE("cone report: empty cloud raises") {
    RescaledCloud cloud;
    CHECK_THROWS_AS(cone_report(cloud), EmptyCloud);
}

TEST_CASE("cone report is invariant under rigid U(2) motions") {
    const RescaledCloud cloud = two_complex_planes();
    const ConeReport base = cone_report(cloud);

    std::mt19937_64 rng(13579);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    for (int trial = 0; trial < 3; ++trial) {
        const Mat4 q = unitary_motion(angle(rng), angle(rng), angle(rng));
        RescaledCloud moved = cloud;
        for (auto& p : moved.points) {
            p.position = q * p.position;
            p.tangent = (q * p.tangent.transpose()).transpose();
        }
        const ConeReport report = cone_report(moved);
        CHECK(report.plane_count == base.plane_count);
        CHECK(report.density_at_origin ==
              doctest::Approx(base.density_at_origin).epsilon(1e-8));
        CHECK(std::abs(report.calibration_residual - base.calibration_residual) <
              1e-8);
    }
}

TEST_CASE("lambda-cloud of a smooth flow point yields one plane through the origin") {
    FlowConfig cfg;
    cfg.max_steps = 150;
    cfg.snapshot_stride = 4;
    const FlowTrace trace = run_flow(cfg, make_symplectic_graph(0.2, 1, 1, 48, 48));

    LambdaRescaleSpec spec;
    spec.t_singular = trace.last_time();
    spec.x0 = surface_at(trace, spec.t_singular).at(24, 24);
    spec.ball_radius = 12.0;
    const SurfaceGrid surf = lambda_rescale(trace, spec, 32.0, -1.5);
    const RescaledCloud cloud = cloud_from_surface(surf, kStd, spec.ball_radius,
                                                   RescaleKind::Lambda, 32.0);
    AnalysisParams params;
    const ConeReport report = cone_report(cloud, params);
    REQUIRE(report.plane_count == 1);
    // F-perp decay: the fitted plane passes near the origin
    const double tol = std::max(params.delta_origin_rel * cloud.extent(),
                                3.0 * report.planes[0].residual);
    CHECK(report.planes[0].basepoint.norm() < tol);
    CHECK_FALSE(report.multiplicity_exceeds_one);
}
