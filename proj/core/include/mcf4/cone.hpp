#ifndef MCF4_CONE_HPP
#define MCF4_CONE_HPP

#include <vector>

#include "mcf4/rescale.hpp"

namespace mcf4 {

struct AnalysisParams {
    int knn = 12;                      ///< neighbors for local PCA (>= 6)
    double tau_plane = 0.1;            ///< Grassmannian chordal threshold
    double delta_origin_rel = 0.05;    ///< basepoint / assignment tolerance, x cloud extent
    double tau_cal = 1e-3;             ///< calibration certification slack
    double tau_flat_rel = 1e-3;        ///< flatness threshold, x cloud extent
    double tangent_residual_max = 0.15;    ///< PCA reliability cut
    double min_cluster_weight_rel = 0.02;  ///< drop clusters below this fraction
    std::vector<double> density_radii_rel = {0.75, 0.5, 0.35, 0.25};

    void validate() const;
};

/// Local PCA tangent-plane estimate at one cloud point.
struct TangentEstimate {
    Eigen::Matrix<double, 2, 4> basis; ///< orthonormal rows, unoriented
    double residual = 0.0;             ///< third-to-second singular value ratio
};

/// Principal 2-subspace of the covariance of the k nearest neighbors of each
/// point. Throws TooFewPoints unless points.size() >= k+1, ValidationError
/// for k < 6.
std::vector<TangentEstimate> local_tangent_planes(const std::vector<Vec4>& points,
                                                  int k);

/// A 2-plane fit: affine plane basepoint + span(basis), with the oriented
/// orthonormal normal pair completing det(e1,e2,n1,n2) = +1.
struct PlaneModel {
    Vec4 basepoint = Vec4::Zero(); ///< closest point of the plane to the origin
    Eigen::Matrix<double, 2, 4> basis;        ///< orthonormal oriented rows
    Eigen::Matrix<double, 2, 4> normal_basis; ///< orthonormal rows
    std::vector<std::size_t> assigned;
    double weight = 0.0;   ///< total assigned quadrature weight
    double residual = 0.0; ///< max orthogonal distance of assigned points
    double multiplicity = 0.0; ///< weight / (pi R^2), filled by cone_report
};

/// Greedy clustering of oriented tangent estimates by chordal distance
/// between projection matrices, with affine (basepoint) consistency; each
/// cluster refit by total least squares. Unreliable tangents are assigned
/// post hoc by point-to-plane distance; clusters below the weight floor are
/// dropped.
std::vector<PlaneModel> cluster_grassmannian(
    const std::vector<TangentEstimate>& tangents,
    const std::vector<Vec4>& positions, const std::vector<double>& weights,
    const std::vector<char>& reliable, double cloud_extent,
    const AnalysisParams& params = {});

/// Unit point on one of the two twistor spheres: coefficients on the
/// (anti-)self-dual basis forms.
struct TwistorPoint {
    Vec3 coeffs = Vec3(1, 0, 0);
    bool self_dual = true;

    Mat4 form() const; ///< the corresponding 2-form
};

struct CalibrationFit {
    TwistorPoint point;               ///< maximizer of min-plane value
    std::vector<double> plane_values; ///< omega_1 on each oriented plane
    double min_value = 0.0;
    double best_self_dual = 0.0;      ///< per-chirality optima
    double best_anti_self_dual = 0.0;
};

/// Maximize, over both chirality spheres, the minimum over planes of the
/// form evaluated on each plane's oriented basis. Every single oriented
/// 2-plane achieves exactly 1 on both spheres.
CalibrationFit fit_calibration_form(const std::vector<PlaneModel>& planes);

struct ConeReport {
    int plane_count = 0;
    std::vector<double> multiplicities;
    double density_at_origin = 0.0;
    TwistorPoint calibration;
    double calibration_residual = 0.0; ///< max over planes |omega_1(plane) - 1|
    double theta_spread = 0.0;         ///< weighted stddev of per-point omega_1
    double flatness_residual = 0.0;    ///< max plane-fit residual
    bool is_complex_union = false;
    bool is_flat = false;
    bool multiplicity_exceeds_one = false;
    std::vector<PlaneModel> planes;
    DensityProfile density_profile;
};

/// Full pipeline: tangents -> clusters -> densities -> calibration fit.
/// Throws EmptyCloud on empty input.
ConeReport cone_report(const RescaledCloud& cloud,
                       const AnalysisParams& params = {});

/// Area-ratio density of the weighted cloud at xi (delegates to the density
/// machinery).
DensityProfile density_profile(const RescaledCloud& cloud, const Vec4& xi,
                               const std::vector<double>& radii);

/// Principal angles between two 2-planes given by orthonormal-row bases.
Vec2 principal_angles(const Eigen::Matrix<double, 2, 4>& a,
                      const Eigen::Matrix<double, 2, 4>& b);

/// Chordal distance between planes: Frobenius distance of projections.
double chordal_distance(const Eigen::Matrix<double, 2, 4>& a,
                        const Eigen::Matrix<double, 2, 4>& b);

} // namespace mcf4

#endif
