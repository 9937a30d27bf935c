#pragma once

#include "psolim/core/types.hpp"
#include "psolim/ode/ode.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace psolim {

/// Shortest text that round-trips the double exactly ("%.17g").
std::string format_double(double value);

/// Writes `n,t,component_0,...,component_{k-1},kind` rows. t = epsilon * n
/// for discrete traces; t = step * n for trajectories (kind "ode").
void emit_trace_csv(const RunTrace& trace, std::ostream& out);
void emit_trace_csv(const RunTrace& trace, const std::string& path);
void emit_trace_csv(const OdeTrajectory& trajectory, std::ostream& out);
void emit_trace_csv(const OdeTrajectory& trajectory, const std::string& path);

/// Reads back a trace CSV into (n, t, components, kind) rows.
struct TraceCsvRow {
    long n = 0;
    double t = 0.0;
    Vector components;
    std::string kind;
};
std::vector<TraceCsvRow> read_trace_csv(const std::string& path);

/// Generic sample matrix: header `sample,component_0,...`.
void emit_samples_csv(const std::vector<Vector>& samples, const std::string& path);

}  // namespace psolim
