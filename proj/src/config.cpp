#include "nlsepdf/config.hpp"

#include "nlsepdf/trajectory.hpp"

#include <cmath>
#include <fstream>

namespace nlsepdf {

namespace {

const std::pair<RunMethod, const char*> kMethodNames[] = {
    {RunMethod::PathInt, "pathint"}, {RunMethod::Series0, "series0"},
    {RunMethod::Series1, "series1"}, {RunMethod::SmallQ, "smallq"},
    {RunMethod::Demo, "demo"},       {RunMethod::ForwardMc, "forward-mc"},
};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json grid_to_json(const GridSpec& g) {
  return {{"M", g.M}, {"delta", g.delta}, {"omega_min", g.omega_min}, {"N", g.N}, {"dz", g.dz}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  g.M = j.at("M").get<int>();
  g.N = j.at("N").get<int>();
  g.delta = j.at("delta").get<double>();
  if (j.contains("dz"))
    g.dz = j.at("dz").get<double>();
  else if (j.contains("L"))
    g.dz = j.at("L").get<double>() / g.N;
  else
    throw GuardViolation("config.grid", "grid needs dz or L");
  g.omega_min = get_or(j, "omega_min", -kPi * g.delta * (g.M - 1));
  return g;
}

}  // namespace

std::string to_string(RunMethod m) {
  for (const auto& [k, name] : kMethodNames)
    if (k == m) return name;
  return "unknown";
}

RunMethod parse_method(const std::string& s) {
  for (const auto& [k, name] : kMethodNames)
    if (s == name) return k;
  throw GuardViolation("config.method", "unknown method '" + s + "'");
}

bool ConstellationInput::operator==(const ConstellationInput& o) const {
  return spec.n_side == o.spec.n_side && spec.T == o.spec.T && spec.tau == o.spec.tau &&
         spec.alpha == o.spec.alpha && phases == o.phases &&
         perturbation.rho == o.perturbation.rho && perturbation.phase == o.perturbation.phase;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return grid == o.grid && channel == o.channel && method == o.method && X == o.X &&
         Y == o.Y && x_file == o.x_file && y_file == o.y_file &&
         constellation == o.constellation && samples == o.samples && tol == o.tol &&
         max_iter == o.max_iter && seed == o.seed;
}

json complex_to_json(const cvec& v) {
  json a = json::array();
  for (const cplx& c : v) {
    a.push_back(c.real());
    a.push_back(c.imag());
  }
  return a;
}

cvec complex_from_json(const json& j) {
  if (!j.is_array() || j.size() % 2 != 0)
    throw GuardViolation("config.values", "complex samples must be interleaved re/im pairs");
  cvec v(j.size() / 2);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = {j[2 * i].get<double>(), j[2 * i + 1].get<double>()};
  return v;
}

json field_to_json(const SpectralField& f) {
  return {{"grid", grid_to_json(f.grid)}, {"values", complex_to_json(f.values)}};
}

SpectralField field_from_json(const json& j) {
  const GridSpec g = grid_from_json(j.at("grid"));
  g.validate();
  cvec v = complex_from_json(j.at("values"));
  if (static_cast<int>(v.size()) != g.M)
    throw GuardViolation("config.values", "field has " + std::to_string(v.size()) +
                                              " samples, grid declares M = " + std::to_string(g.M));
  return SpectralField(g, std::move(v));
}

void write_field_file(const std::string& path, const SpectralField& f) {
  std::ofstream out(path);
  if (!out) throw GuardViolation("config.file", "cannot write " + path);
  out << field_to_json(f).dump() << '\n';
}

SpectralField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GuardViolation("config.file", "cannot read " + path);
  return field_from_json(json::parse(in));
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    c.grid = grid_from_json(j.at("grid"));
    const json& ch = j.at("channel");
    c.channel.beta2 = get_or(ch, "beta2", 0.0);
    c.channel.gamma = get_or(ch, "gamma", 0.0);
    c.channel.Q = ch.at("Q").get<double>();
    c.channel.L = c.grid.L();
    c.method = parse_method(j.at("method").get<std::string>());

    const json& in = j.at("input");
    if (in.contains("X")) c.X = complex_from_json(in.at("X"));
    if (in.contains("Y")) c.Y = complex_from_json(in.at("Y"));
    c.x_file = get_or<std::string>(in, "X_file", "");
    c.y_file = get_or<std::string>(in, "Y_file", "");
    if (in.contains("constellation")) {
      const json& cj = in.at("constellation");
      ConstellationInput ci;
      ci.spec.n_side = get_or(cj, "n_side", 2);
      ci.spec.T = get_or(cj, "T", 1.0);
      ci.spec.tau = get_or(cj, "tau", ci.spec.T / 8.0);
      ci.spec.alpha = get_or(cj, "alpha", 1.0);
      ci.phases = cj.at("phases").get<std::vector<double>>();
      ci.perturbation.rho =
          get_or(cj, "rho", std::vector<double>(ci.spec.count(), 0.0));
      ci.perturbation.phase =
          get_or(cj, "phase", std::vector<double>(ci.spec.count(), 0.0));
      c.constellation = ci;
    }

    c.samples = get_or(j, "samples", c.samples);
    c.tol = get_or(j, "tol", c.tol);
    c.max_iter = get_or(j, "max_iter", c.max_iter);
    c.seed = get_or(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw GuardViolation("config.parse", e.what());
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json in = json::object();
  if (c.X) in["X"] = complex_to_json(*c.X);
  if (c.Y) in["Y"] = complex_to_json(*c.Y);
  if (!c.x_file.empty()) in["X_file"] = c.x_file;
  if (!c.y_file.empty()) in["Y_file"] = c.y_file;
  if (c.constellation) {
    const auto& ci = *c.constellation;
    in["constellation"] = {{"n_side", ci.spec.n_side}, {"T", ci.spec.T},
                           {"tau", ci.spec.tau},       {"alpha", ci.spec.alpha},
                           {"phases", ci.phases},      {"rho", ci.perturbation.rho},
                           {"phase", ci.perturbation.phase}};
  }
  return {{"grid", grid_to_json(c.grid)},
          {"channel", {{"beta2", c.channel.beta2}, {"gamma", c.channel.gamma}, {"Q", c.channel.Q}}},
          {"method", to_string(c.method)},
          {"input", in},
          {"samples", c.samples},
          {"tol", c.tol},
          {"max_iter", c.max_iter},
          {"seed", c.seed}};
}

void validate(const RunConfig& c) {
  c.grid.validate();
  c.channel.validate();
  require_compatible(c.grid, c.channel);

  const bool inline_in = c.X.has_value() || c.Y.has_value();
  const bool file_in = !c.x_file.empty() || !c.y_file.empty();
  const int sources = int(inline_in) + int(file_in) + int(c.constellation.has_value());
  if (sources != 1)
    throw GuardViolation("config.input", "exactly one of inline X/Y, X_file/Y_file, constellation");
  if (inline_in) {
    if (!c.X || !c.Y) throw GuardViolation("config.input", "inline input needs both X and Y");
    if (static_cast<int>(c.X->size()) != c.grid.M || static_cast<int>(c.Y->size()) != c.grid.M)
      throw GuardViolation("config.input", "inline X/Y length must equal M");
  }
  if (file_in && (c.x_file.empty() || c.y_file.empty()))
    throw GuardViolation("config.input", "file input needs both X_file and Y_file");

  if (c.constellation) {
    const auto& ci = *c.constellation;
    ci.spec.validate();
    validate_qpsk_phases(ci.spec, ci.phases);
    if (static_cast<int>(ci.perturbation.rho.size()) != ci.spec.count() ||
        static_cast<int>(ci.perturbation.phase.size()) != ci.spec.count())
      throw GuardViolation("qpsk.perturbation", "perturbation must have one entry per symbol");
    const double want = 1.0 / (ci.spec.count() * ci.spec.T);
    if (std::abs(c.grid.delta - want) > 1e-12 * want)
      throw GuardViolation("config.grid", "constellation needs delta = 1/((2 n_side + 1) T)");
  }

  switch (c.method) {
    case RunMethod::PathInt:
      if (c.samples < 1) throw GuardViolation("config.samples", "samples must be >= 1");
      if (!(c.channel.Q > 0.0)) throw GuardViolation("config.Q", "pathint needs Q > 0");
      break;
    case RunMethod::Series0:
    case RunMethod::Series1:
      if (!(c.channel.Q > 0.0)) throw GuardViolation("config.Q", "series needs Q > 0");
      break;
    case RunMethod::SmallQ:
      if (!(c.channel.Q > 0.0)) throw GuardViolation("config.Q", "smallq needs Q > 0");
      if (!(c.tol > 0.0)) throw GuardViolation("config.tol", "tol must be > 0");
      if (c.tol < tolerance_floor(c.grid.N))
        throw GuardViolation("trajectory.tol", "tol is below the round-off floor " +
                                                   std::to_string(tolerance_floor(c.grid.N)));
      if (c.max_iter < 1) throw GuardViolation("config.max_iter", "max_iter must be >= 1");
      if (c.grid.N < 4) throw GuardViolation("config.grid", "smallq needs N >= 4");
      break;
    case RunMethod::Demo:
      if (!c.constellation) throw GuardViolation("config.input", "demo needs a constellation");
      if (c.samples < 1000) throw GuardViolation("config.samples", "demo needs samples >= 1000");
      break;
    case RunMethod::ForwardMc:
      if (c.samples < 1) throw GuardViolation("config.samples", "samples must be >= 1");
      break;
  }
}

std::pair<SpectralField, SpectralField> load_fields(const RunConfig& c) {
  if (c.X && c.Y) return {SpectralField(c.grid, *c.X), SpectralField(c.grid, *c.Y)};
  if (c.constellation) {
    const auto& ci = *c.constellation;
    SpectralField X = build_input(ci.spec, c.grid, ci.phases);
    SpectralField Y = build_received(ci.spec, c.grid, ci.phases, ci.perturbation, c.channel);
    return {std::move(X), std::move(Y)};
  }
  SpectralField X = read_field_file(c.x_file);
  SpectralField Y = read_field_file(c.y_file);
  const auto same = [&](const GridSpec& g) {
    return g.M == c.grid.M && g.delta == c.grid.delta && g.omega_min == c.grid.omega_min;
  };
  if (!same(X.grid) || !same(Y.grid))
    throw GuardViolation("config.grid", "field file grid differs from the configured grid");
  X.grid = c.grid;
  Y.grid = c.grid;
  return {std::move(X), std::move(Y)};
}

}  // namespace nlsepdf
