#pragma once

#include <string>
#include <vector>

#include "nlsepdf/config.hpp"

namespace nlsepdf {

/// Validates and executes one experiment. The document holds log_p, std_err,
/// diagnostics, warnings, the config echo and the seed; numbers are written
/// with shortest round-trip precision.
json run(const RunConfig& cfg);

/// Numeric fields accepted as sweep axes.
const std::vector<std::string>& sweep_axes();

/// Returns cfg with the named field set to value (N and M keep L and the
/// symmetric window fixed).
RunConfig with_axis(const RunConfig& cfg, const std::string& axis, double value);

/// One run per value; comma-separated table with a header row.
std::string sweep(const RunConfig& cfg, const std::string& axis, const std::vector<double>& values);

}  // namespace nlsepdf
