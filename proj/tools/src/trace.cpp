#include "sadmm/app/trace.hpp"

#include <cstdio>
#include <ostream>

namespace sadmm::app {

std::string trace_header(bool diagnostics) {
  std::string h = kTraceColumns;
  if (diagnostics) h += std::string(",") + kDiagnosticColumns;
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_row(const IterationRecord& rec, bool diagnostics) {
  std::string s = std::to_string(rec.iter);
  s += ',' + format_double(rec.epoch);
  s += ',' + (rec.objective ? format_double(*rec.objective) : std::string());
  s += ',' + format_double(rec.primal_residual);
  s += ',' + format_double(rec.wall_ms);
  if (diagnostics) {
    if (rec.diagnostics) {
      const DiagnosticsRecord& d = *rec.diagnostics;
      s += ',' + format_double(d.aug_lagrangian);
      s += ',' + (d.psi ? format_double(*d.psi) : std::string());
      s += ',' + format_double(d.upsilon);
      s += ',' + format_double(d.grad_err_sq_prev);
    } else {
      s += ",,,,";
    }
  }
  return s;
}

void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace, bool diagnostics) {
  out << trace_header(diagnostics) << '\n';
  for (const auto& rec : trace) out << trace_row(rec, diagnostics) << '\n';
}

}  // namespace sadmm::app
