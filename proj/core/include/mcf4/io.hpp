#ifndef MCF4_IO_HPP
#define MCF4_IO_HPP

#include <string>

#include "mcf4/cone.hpp"
#include "mcf4/flow.hpp"
#include "mcf4/rescale.hpp"

namespace mcf4 {

/// Snapshot file: a small text header followed by the raw little-endian
/// float64 position payload. Round trips are bit-exact.
void write_snapshot(const std::string& path, const SurfaceGrid& surface);
SurfaceGrid read_snapshot(const std::string& path);

/// Diagnostics CSV with the exact header
/// t,dt,area,maxA2,maxH,minCosAlpha and one row per step.
void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows);
std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path);

/// Trace directory: diagnostics.csv, trace.txt metadata and snap_NNNNNN.bin
/// snapshot files.
void write_trace(const std::string& directory, const FlowTrace& trace);
FlowTrace read_trace(const std::string& directory);

/// Rescaled cloud CSV (positions, oriented tangent rows, weight, cos alpha,
/// source scale and time).
void write_cloud_csv(const std::string& path, const RescaledCloud& cloud);
RescaledCloud read_cloud_csv(const std::string& path);

/// Density profile CSV: radius,value rows, then a final row at radius 0 with
/// the extrapolated limit.
void write_density_csv(const std::string& path, const DensityProfile& profile);

/// Decay report CSV: lambda(or s),I1,I2,I3,I4,massRatio.
void write_decay_csv(const std::string& path, const DecayReport& report);

std::string singularity_estimate_json(const SingularityEstimate& estimate);
std::string cone_report_json(const ConeReport& report);

} // namespace mcf4

#endif
