#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sadmm/solver.hpp"

namespace sadmm::app {

/// Frozen column order. The diagnostics columns follow only when enabled.
inline constexpr const char* kTraceColumns = "iter,epoch,objective,primal_residual,wall_ms";
inline constexpr const char* kDiagnosticColumns = "aug_lagrangian,psi,upsilon,grad_err_sq_prev";

std::string trace_header(bool diagnostics);

/// %.17g; enough digits to round-trip a double.
std::string format_double(double v);

/// One CSV line (no newline). Missing values are empty fields.
std::string trace_row(const IterationRecord& rec, bool diagnostics);

void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace, bool diagnostics);

}  // namespace sadmm::app
