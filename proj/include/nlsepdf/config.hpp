#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsepdf/channel.hpp"
#include "nlsepdf/qpsk.hpp"

namespace nlsepdf {

using json = nlohmann::json;

enum class RunMethod { PathInt, Series0, Series1, SmallQ, Demo, ForwardMc };

std::string to_string(RunMethod m);
RunMethod parse_method(const std::string& s);

/// Constellation input: the symbol phases and, for P[Y|X] evaluation, the
/// received-symbol perturbation that builds Y.
struct ConstellationInput {
  ConstellationSpec spec;
  std::vector<double> phases;
  SymbolPerturbation perturbation;
  bool operator==(const ConstellationInput& o) const;
};

/// One experiment. Exactly one input source is set: inline X/Y samples,
/// field files, or a constellation.
struct RunConfig {
  GridSpec grid;
  ChannelParams channel;
  RunMethod method = RunMethod::Series0;

  std::optional<cvec> X, Y;
  std::string x_file, y_file;
  std::optional<ConstellationInput> constellation;

  long samples = 10000;
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const;
};

RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& cfg);

/// Checks every module precondition reachable from this config; throws
/// GuardViolation naming the first failure.
void validate(const RunConfig& cfg);

/// Resolves the configured input into (X, Y) on cfg.grid. Files are read only.
std::pair<SpectralField, SpectralField> load_fields(const RunConfig& cfg);

/// Field file: {"grid": {M, delta, omega_min, N, dz}, "values": [re0, im0, ...]}.
json field_to_json(const SpectralField& f);
SpectralField field_from_json(const json& j);
void write_field_file(const std::string& path, const SpectralField& f);
SpectralField read_field_file(const std::string& path);

/// Interleaved (re, im) pairs.
json complex_to_json(const cvec& v);
cvec complex_from_json(const json& j);

}  // namespace nlsepdf
