#include "mcf4/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mcf4 {

namespace {
constexpr double kPi = std::numbers::pi;

Mat4 projection_of(const Eigen::Matrix<double, 2, 4>& basis) {
    return basis.row(0).transpose() * basis.row(0) +
           basis.row(1).transpose() * basis.row(1);
}

} // namespace

void AnalysisParams::validate() const {
    if (knn < 6) throw ValidationError("knn must be at least 6");
    if (!(tau_plane > 0.0) || !(tau_cal > 0.0) || !(tau_flat_rel > 0.0) ||
        !(delta_origin_rel > 0.0))
        throw ValidationError("analysis thresholds must be positive");
}

Vec2 principal_angles(const Eigen::Matrix<double, 2, 4>& a,
                      const Eigen::Matrix<double, 2, 4>& b) {
    // sine-based formulation: singular values of a (I - P_b) are the sines
    // of the principal angles, well conditioned near zero
    const Eigen::Matrix<double, 2, 4> rejected =
        a - (a * b.transpose()) * b;
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(rejected);
    const auto s = svd.singularValues();
    auto clamp = [](double x) { return std::clamp(x, -1.0, 1.0); };
    return Vec2(std::asin(clamp(s(0))), std::asin(clamp(s(1))));
}

double chordal_distance(const Eigen::Matrix<double, 2, 4>& a,
                        const Eigen::Matrix<double, 2, 4>& b) {
    return (projection_of(a) - projection_of(b)).norm();
}

std::vector<TangentEstimate> local_tangent_planes(const std::vector<Vec4>& points,
                                                  int k) {
    if (k < 6) throw ValidationError("local PCA needs k >= 6 neighbors");
    const std::size_t n = points.size();
    if (n < static_cast<std::size_t>(k) + 1)
        throw TooFewPoints("need at least k+1 = " + std::to_string(k + 1) +
                           " points, got " + std::to_string(n));

    std::vector<TangentEstimate> out(n);
    std::vector<std::pair<double, std::size_t>> scratch(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q)
            scratch[q] = {(points[q] - points[p]).squaredNorm(), q};
        scratch[p].first = std::numeric_limits<double>::max(); // exclude self
        std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());

        Vec4 mean = Vec4::Zero();
        for (int m = 0; m < k; ++m) mean += points[scratch[m].second];
        mean /= static_cast<double>(k);

        Mat4 cov = Mat4::Zero();
        for (int m = 0; m < k; ++m) {
            const Vec4 d = points[scratch[m].second] - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat4> eig(cov);
        const Vec4 vals = eig.eigenvalues(); // ascending
        out[p].basis.row(0) = eig.eigenvectors().col(3);
        out[p].basis.row(1) = eig.eigenvectors().col(2);
        const double second = std::max(vals(2), 0.0);
        const double third = std::max(vals(1), 0.0);
        out[p].residual = second > 0.0 ? std::sqrt(third / second) : 1.0;
    }
    return out;
}

namespace {

// Orient an unoriented 2x4 basis so that its projection overlap with the
// reference oriented basis has positive determinant.
void orient_like(Eigen::Matrix<double, 2, 4>& basis,
                 const Eigen::Matrix<double, 2, 4>& reference) {
    if ((basis * reference.transpose()).determinant() < 0.0)
        basis.row(1) = -basis.row(1);
}

Eigen::Matrix<double, 2, 4> normal_completion(
    const Eigen::Matrix<double, 2, 4>& basis) {
    // Gram-Schmidt of the ambient axes against the plane, then orientation
    // fixed so det(e1, e2, n1, n2) = +1.
    Eigen::Matrix<double, 2, 4> normal;
    int found = 0;
    Vec4 e1 = basis.row(0), e2 = basis.row(1);
    for (int axis = 0; axis < 4 && found < 2; ++axis) {
        Vec4 w = Vec4::Unit(axis);
        w -= w.dot(e1) * e1;
        w -= w.dot(e2) * e2;
        if (found == 1) {
            const Vec4 n1 = normal.row(0);
            w -= w.dot(n1) * n1;
        }
        const double nn = w.norm();
        if (nn < 1e-8) continue;
        normal.row(found) = w / nn;
        ++found;
    }
    Mat4 m;
    m.col(0) = e1;
    m.col(1) = e2;
    m.col(2) = normal.row(0);
    m.col(3) = normal.row(1);
    if (m.determinant() < 0.0) normal.row(1) = -normal.row(1);
    return normal;
}

double point_plane_distance(const Vec4& p, const Vec4& basepoint,
                            const Eigen::Matrix<double, 2, 4>& basis) {
    const Vec4 d = p - basepoint;
    const Eigen::Vector2d coords = basis * d;
    return (d - basis.transpose() * coords).norm();
}

} // namespace

std::vector<PlaneModel> cluster_grassmannian(
    const std::vector<TangentEstimate>& tangents,
    const std::vector<Vec4>& positions, const std::vector<double>& weights,
    const std::vector<char>& reliable, double cloud_extent,
    const AnalysisParams& params) {
    params.validate();
    if (positions.empty()) return {};

    const double assign_tol = params.delta_origin_rel * cloud_extent;

    struct Cluster {
        Eigen::Matrix<double, 2, 4> seed_basis;
        Vec4 seed_point;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> clusters;

    for (std::size_t p = 0; p < positions.size(); ++p) {
        if (!reliable[p]) continue;
        bool placed = false;
        for (auto& cl : clusters) {
            if (chordal_distance(tangents[p].basis, cl.seed_basis) >= params.tau_plane)
                continue;
            if (point_plane_distance(positions[p], cl.seed_point, cl.seed_basis) >=
                assign_tol)
                continue;
            cl.members.push_back(p);
            placed = true;
            break;
        }
        if (!placed)
            clusters.push_back({tangents[p].basis, positions[p], {p}});
    }

    // Total-least-squares refit of each cluster.
    std::vector<PlaneModel> planes;
    for (const auto& cl : clusters) {
        PlaneModel plane;
        double wsum = 0.0;
        Vec4 centroid = Vec4::Zero();
        for (std::size_t m : cl.members) {
            centroid += weights[m] * positions[m];
            wsum += weights[m];
        }
        centroid /= wsum;
        Mat4 cov = Mat4::Zero();
        for (std::size_t m : cl.members) {
            const Vec4 d = positions[m] - centroid;
            cov += weights[m] * d * d.transpose();
        }
        Eigen::Matrix<double, 2, 4> basis;
        if (cl.members.size() >= 3 && cov.norm() > 0.0) {
            Eigen::SelfAdjointEigenSolver<Mat4> eig(cov);
            basis.row(0) = eig.eigenvectors().col(3);
            basis.row(1) = eig.eigenvectors().col(2);
        } else {
            basis = cl.seed_basis;
        }
        orient_like(basis, tangents[cl.members.front()].basis);
        plane.basis = basis;
        plane.normal_basis = normal_completion(basis);
        plane.basepoint = centroid - basis.transpose() * (basis * centroid);
        plane.assigned = cl.members;
        planes.push_back(std::move(plane));
    }

    // Post-hoc assignment of the remaining points by point-to-plane distance.
    for (std::size_t p = 0; p < positions.size(); ++p) {
        if (reliable[p]) continue;
        double best = assign_tol;
        std::size_t best_plane = planes.size();
        for (std::size_t c = 0; c < planes.size(); ++c) {
            const double d =
                point_plane_distance(positions[p], planes[c].basepoint, planes[c].basis);
            if (d < best) {
                best = d;
                best_plane = c;
            }
        }
        if (best_plane < planes.size()) planes[best_plane].assigned.push_back(p);
    }

    double total_weight = 0.0;
    for (double w : weights) total_weight += w;
    std::vector<PlaneModel> kept;
    for (auto& plane : planes) {
        plane.weight = 0.0;
        plane.residual = 0.0;
        for (std::size_t m : plane.assigned) {
            plane.weight += weights[m];
            plane.residual = std::max(
                plane.residual,
                point_plane_distance(positions[m], plane.basepoint, plane.basis));
        }
        if (plane.weight >= params.min_cluster_weight_rel * total_weight)
            kept.push_back(std::move(plane));
    }
    return kept;
}

Mat4 TwistorPoint::form() const {
    Mat4 f = Mat4::Zero();
    for (int k = 0; k < 3; ++k)
        f += coeffs(k) * twistor_basis_form(k, self_dual);
    return f;
}

namespace {

// Deterministic quasi-uniform sphere samples (Fibonacci lattice).
std::vector<Vec3> fibonacci_sphere(std::size_t n) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(k);
        pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return pts;
}

double min_alignment(const Vec3& n, const std::vector<Vec3>& xs) {
    double m = std::numeric_limits<double>::max();
    for (const auto& x : xs) m = std::min(m, n.dot(x));
    return m;
}

// Maximize min_j <n, x_j> over the unit sphere: closed-form candidates
// (the x_j and their pairwise bisectors) plus a Fibonacci sweep, then a
// shrinking local search around the best node.
std::pair<Vec3, double> maximize_min_alignment(const std::vector<Vec3>& xs) {
    std::vector<Vec3> candidates;
    for (const auto& x : xs)
        if (x.norm() > 0.0) candidates.push_back(x.normalized());
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            const Vec3 s = xs[a] + xs[b];
            if (s.norm() > 1e-12) candidates.push_back(s.normalized());
        }
    const auto lattice = fibonacci_sphere(1536);
    candidates.insert(candidates.end(), lattice.begin(), lattice.end());

    Vec3 best = candidates.front();
    double best_val = min_alignment(best, xs);
    for (const auto& c : candidates) {
        const double v = min_alignment(c, xs);
        if (v > best_val) {
            best_val = v;
            best = c;
        }
    }

    double step = 0.1;
    for (int iter = 0; iter < 80; ++iter) {
        // local tangent frame at the current point
        Vec3 t1 = best.cross(std::abs(best.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0));
        t1.normalize();
        const Vec3 t2 = best.cross(t1);
        bool improved = false;
        const Vec3 dirs[8] = {t1,
                              Vec3(-t1),
                              t2,
                              Vec3(-t2),
                              Vec3((t1 + t2).normalized()),
                              Vec3((t1 - t2).normalized()),
                              Vec3((-t1 + t2).normalized()),
                              Vec3((-t1 - t2).normalized())};
        for (const Vec3& dir : dirs) {
            const Vec3 cand = (best + step * dir).normalized();
            const double v = min_alignment(cand, xs);
            if (v > best_val) {
                best_val = v;
                best = cand;
                improved = true;
            }
        }
        if (!improved) step *= 0.6;
        if (step < 1e-10) break;
    }
    return {best, best_val};
}

} // namespace

CalibrationFit fit_calibration_form(const std::vector<PlaneModel>& planes) {
    if (planes.empty()) throw NoPlanes("calibration fit needs at least one plane");

    CalibrationFit fit;
    for (int chirality = 0; chirality < 2; ++chirality) {
        const bool self_dual = chirality == 0;
        std::vector<Vec3> xs;
        xs.reserve(planes.size());
        for (const auto& plane : planes)
            xs.push_back(twistor_coordinates(plane.basis.row(0), plane.basis.row(1),
                                             self_dual));
        const auto [n, value] = maximize_min_alignment(xs);
        (self_dual ? fit.best_self_dual : fit.best_anti_self_dual) = value;
        if (chirality == 0 || value > fit.min_value + 1e-12) {
            fit.min_value = value;
            fit.point.coeffs = n;
            fit.point.self_dual = self_dual;
            fit.plane_values.clear();
            for (const auto& x : xs) fit.plane_values.push_back(n.dot(x));
        }
    }
    return fit;
}

DensityProfile density_profile(const RescaledCloud& cloud, const Vec4& xi,
                               const std::vector<double>& radii) {
    return area_ratio_density(cloud_support(cloud), xi, radii);
}

ConeReport cone_report(const RescaledCloud& cloud, const AnalysisParams& params) {
    params.validate();
    if (cloud.points.empty()) throw EmptyCloud("cone analysis of an empty cloud");

    const std::size_t n = cloud.points.size();
    std::vector<Vec4> positions(n);
    std::vector<double> weights(n);
    for (std::size_t k = 0; k < n; ++k) {
        positions[k] = cloud.points[k].position;
        weights[k] = cloud.points[k].weight;
    }
    const double extent = cloud.extent();

    std::vector<TangentEstimate> tangents = local_tangent_planes(positions, params.knn);
    std::vector<char> reliable(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        reliable[k] = tangents[k].residual <= params.tangent_residual_max;
        // inherit the orientation carried by the cloud
        orient_like(tangents[k].basis, cloud.points[k].tangent);
    }

    ConeReport report;
    report.planes = cluster_grassmannian(tangents, positions, weights, reliable,
                                         extent, params);
    report.plane_count = static_cast<int>(report.planes.size());

    std::vector<double> radii;
    for (double rel : params.density_radii_rel) radii.push_back(rel * extent);
    report.density_profile = area_ratio_density(cloud_support(cloud),
                                                Vec4::Zero(), radii);
    report.density_at_origin = report.density_profile.extrapolated;

    for (auto& plane : report.planes) {
        plane.multiplicity = plane.weight / (kPi * extent * extent);
        report.multiplicities.push_back(plane.multiplicity);
    }

    if (!report.planes.empty()) {
        const CalibrationFit fit = fit_calibration_form(report.planes);
        report.calibration = fit.point;
        double max_dev = 0.0;
        for (double v : fit.plane_values)
            max_dev = std::max(max_dev, std::abs(v - 1.0));
        report.calibration_residual = max_dev;

        // theta-constancy: weighted spread of the fitted form on reliable
        // per-point tangents
        const Mat4 omega1 = report.calibration.form();
        double wsum = 0.0, mean = 0.0;
        std::vector<double> vals(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (!reliable[k]) continue;
            const Vec4 u = tangents[k].basis.row(0), v = tangents[k].basis.row(1);
            vals[k] = u.dot(omega1 * v);
            mean += weights[k] * vals[k];
            wsum += weights[k];
        }
        mean /= wsum;
        double var = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!reliable[k]) continue;
            var += weights[k] * (vals[k] - mean) * (vals[k] - mean);
        }
        report.theta_spread = std::sqrt(var / wsum);

        for (const auto& plane : report.planes)
            report.flatness_residual =
                std::max(report.flatness_residual, plane.residual);
    }

    report.is_complex_union =
        report.plane_count >= 1 && report.calibration_residual <= params.tau_cal;
    report.is_flat = report.plane_count >= 1 &&
                     report.flatness_residual <= params.tau_flat_rel * extent;
    report.multiplicity_exceeds_one = report.density_at_origin >= 1.5;
    return report;
}

} // namespace mcf4
