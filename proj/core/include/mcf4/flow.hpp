#ifndef MCF4_FLOW_HPP
#define MCF4_FLOW_HPP

#include <vector>

#include "mcf4/geometry.hpp"

namespace mcf4 {

struct FlowConfig {
    double dt_safety = 0.1;          ///< parabolic safety factor, in (0, 0.5]
    std::size_t max_steps = 10000;
    double blowup_threshold_a2 = 1e6;
    std::size_t snapshot_stride = 16;

    void validate() const;
};

struct DiagnosticsRow {
    double t = 0;
    double dt = 0;
    double area = 0;
    double max_a2 = 0;
    double max_h = 0;
    double min_cos_alpha = 0;
};

/// Time-ordered snapshots plus per-step scalar diagnostics. Snapshots always
/// include the first and last state; intermediate states are kept every
/// snapshot_stride steps.
struct FlowTrace {
    std::vector<SurfaceGrid> snapshots;
    std::vector<DiagnosticsRow> rows;
    KahlerStructure structure = KahlerStructure::standard();
    bool initially_symplectic = false;

    double first_time() const { return snapshots.front().time; }
    double last_time() const { return snapshots.back().time; }
};

/// Linear interpolation of positions between the two bracketing snapshots.
/// Throws OutOfTraceRange when t is outside the recorded interval.
SurfaceGrid surface_at(const FlowTrace& trace, double t);

/// Step-size bound dt_safety * min(h_min^2, 1/max|A|^2), with h_min the
/// minimum physical mesh spacing of the current state.
double max_stable_dt(const SurfaceGrid& surface, const GeometryField& geom,
                     const FlowConfig& config);

/// One RK2 (midpoint) step of dF/dt = H. The patch boundary ring is pinned.
/// Throws StepTooLarge when dt exceeds the stability bound.
SurfaceGrid step_explicit(const SurfaceGrid& surface, double dt,
                          const FlowConfig& config,
                          const KahlerStructure& structure = KahlerStructure::standard(),
                          const GeometryOptions& opts = {});

/// Run the flow until max_steps, the |A|^2 blow-up threshold, or dt
/// underflow. Initially symplectic surfaces are watched: if min cos(alpha)
/// drops to zero the discretization has violated the maximum principle and
/// SymplecticityLost is thrown.
FlowTrace run_flow(const FlowConfig& config, const SurfaceGrid& initial,
                   const KahlerStructure& structure = KahlerStructure::standard());

enum class SingularityType { None, TypeI, TypeII, Inconclusive };

std::string to_string(SingularityType t);

struct SingularityEstimate {
    double t_singular = 0;              ///< T_est
    Vec4 x0 = Vec4::Zero();             ///< blow-up point (argmax |A| at last snapshot)
    SingularityType type = SingularityType::None;
    double fit_residual = 0;            ///< relative rms of the 1/max|A|^2 linear fit
    std::vector<double> tail_values;    ///< (T_est - t) max|A|^2 over the fit window
};

/// T_est from a least-squares linear fit of 1/max|A|^2 over the final
/// quartile of rows. type = None when max|A|^2 stayed below 10x its initial
/// value. Falls back to T_est = last time + last dt when the fit residual
/// exceeds 10%.
SingularityEstimate estimate_singular_time(const FlowTrace& trace);

/// Type I when (T_est - t) max|A|^2 has relative spread below 20% over the
/// fit window; Type II when it grows monotonically by more than 2x;
/// Inconclusive otherwise.
SingularityType classify_singularity(const FlowTrace& trace,
                                     SingularityEstimate& estimate);

} // namespace mcf4

#endif
