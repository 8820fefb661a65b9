#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlsepdf/channel.hpp"
#include "nlsepdf/grid.hpp"

namespace nlsepdf {

enum class Method {
  PathIntegralMC,
  BruteForce,
  Series0,
  Series1,
  SmallNoise,
  SmallNoiseClosedForm,
  QpskProduct,
  QpskProductFirstOrder,
};

std::string to_string(Method m);

/// Log-density of P[Y|X] on a declared grid. Densities depend on (delta, M)
/// through the measure normalization, so the grid always travels with the value.
struct LogPdf {
  double log_p = 0.0;
  double std_err = 0.0;
  Method method = Method::Series0;
  GridSpec grid;
  ChannelParams params;
  bool reliable = true;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

}  // namespace nlsepdf
