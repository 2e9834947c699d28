#pragma once

#include <string>

#include "sgdlab/core.hpp"

namespace sgdlab {

/// Shortest round-trip decimal form of a double (printf %.17g trimmed).
std::string format_double(double v);

/// CSV schema: header `t,risk,grad_norm_sq,eta`, one row per checkpoint.
/// Doubles are written in round-trip form, so identical traces produce
/// byte-identical files.
void write_trace_csv(const std::string& path, const Trace& trace);

/// JSON schema: {t[], mean_risk[], mean_grad_norm_sq[], min_prefix[],
/// eta_sum[], n_seeds, diverged_seeds[]}.
void write_aggregate_json(const std::string& path, const AggregateTrace& agg);
AggregateTrace read_aggregate_json(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sgdlab
