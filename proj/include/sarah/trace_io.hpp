#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sarah/optimizer.hpp"

namespace sarah {

// Trace CSV, one row per checkpoint:
//   grad_evals,epoch,outer_s,inner_t,f_val[,subopt],grad_norm_sq,v_norm_sq,eta_used
// The subopt column is written only when every record carries a suboptimality.
// Reals use %.17g; absent optional values are empty fields. Runs with stopping
// times end with "# Ts=<T_1>,<T_2>,..." and "# S=<count>" comment lines.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
std::string trace_csv_string(const RunTrace& trace);
void save_trace_csv(const std::string& path, const RunTrace& trace);

// The columns of a trace CSV needed for plotting.
struct TraceSeries {
  std::string label;
  std::vector<double> epoch;
  std::vector<double> subopt;
};

// Throws DataError naming `source` when the subopt column is missing or a row
// is malformed.
TraceSeries read_trace_csv(std::istream& in, const std::string& source);
TraceSeries load_trace_csv(const std::string& path);

}  // namespace sarah
