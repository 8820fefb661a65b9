#include "nlsepdf/runner.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "nlsepdf/pathint.hpp"
#include "nlsepdf/perturbative.hpp"
#include "nlsepdf/trajectory.hpp"

namespace nlsepdf {

std::string to_string(Method m) {
  switch (m) {
    case Method::PathIntegralMC: return "pathint";
    case Method::BruteForce: return "brute_force";
    case Method::Series0: return "series0";
    case Method::Series1: return "series1";
    case Method::SmallNoise: return "smallq";
    case Method::SmallNoiseClosedForm: return "smallq_closed_form";
    case Method::QpskProduct: return "qpsk_product";
    case Method::QpskProductFirstOrder: return "qpsk_product_first_order";
  }
  return "unknown";
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

json run_demo(const RunConfig& cfg, json doc) {
  const auto& ci = *cfg.constellation;
  const EmpiricalStats st = empirical_symbol_stats(ci.spec, cfg.grid, ci.phases, cfg.channel,
                                                   static_cast<int>(cfg.samples), cfg.seed);
  const double sigma2 = symbol_noise_variance(ci.spec, cfg.channel);
  const double sigma = std::sqrt(sigma2);
  const double predicted = skew_prediction(ci.spec, cfg.grid, cfg.channel);
  const double kappa = sigma2 > 0.0 ? 2.0 * predicted / sigma2 : 0.0;
  const int bins = 40;
  const double rho_hi = 4.0 * sigma;

  json symbols = json::array();
  for (int k = 0; k < ci.spec.count(); ++k) {
    const SymbolSamples& s = st.symbols[k];
    const Histogram hr = make_histogram(s.rho, 0.0, rho_hi, bins);
    const Histogram hp = make_histogram(s.dphi, -kPi, kPi, bins);
    // Predicted densities of the deformed Gaussian: the skew averages out of
    // the radial marginal and tilts the phase marginal.
    json rho_pred = json::array(), phi_pred = json::array();
    for (int b = 0; b < bins; ++b) {
      const double r = hr.center(b);
      rho_pred.push_back(2.0 * r / sigma2 * std::exp(-r * r / sigma2));
      const double p = hp.center(b);
      phi_pred.push_back((1.0 + kappa * std::sin(p) * sigma * std::sqrt(kPi) / 2.0) / (2.0 * kPi));
    }
    symbols.push_back({{"k", k - ci.spec.n_side},
                       {"mean_rho2", s.mean_rho2()},
                       {"predicted_rho2", sigma2},
                       {"mean_skew", s.mean_skew()},
                       {"std_err_skew", s.std_err_skew()},
                       {"predicted_skew", predicted},
                       {"hist_rho", histogram_json(hr)},
                       {"density_rho_predicted", rho_pred},
                       {"hist_dphi", histogram_json(hp)},
                       {"density_dphi_predicted", phi_pred}});
  }
  doc["log_p"] = nullptr;
  doc["std_err"] = nullptr;
  doc["symbols"] = symbols;
  doc["diagnostics"]["n_runs"] = st.n_runs;
  doc["diagnostics"]["sigma2"] = sigma2;
  doc["warnings"] = ci.spec.warnings();
  return doc;
}

json run_forward(const RunConfig& cfg, const SpectralField& X, json doc) {
  const auto runs = forward_ensemble(X, cfg.channel, static_cast<int>(cfg.samples), cfg.seed);
  const SpectralField Yd = split_step_deterministic(X, cfg.channel);
  double s1 = 0.0, s2 = 0.0, n1 = 0.0;
  for (const auto& Y : runs) {
    const double p = freq_norm2(Y.grid, Y.values) / Y.grid.t_total();
    s1 += p;
    s2 += p * p;
    cvec d(Y.values);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= Yd[j];
    n1 += freq_norm2(Y.grid, d);
  }
  const double n = static_cast<double>(runs.size());
  const double mean = s1 / n;
  doc["log_p"] = nullptr;
  doc["std_err"] = nullptr;
  doc["diagnostics"]["mean_output_power"] = mean;
  doc["diagnostics"]["std_err_output_power"] =
      n > 1 ? std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1)) : 0.0;
  doc["diagnostics"]["deterministic_output_power"] = freq_norm2(Yd.grid, Yd.values) / Yd.grid.t_total();
  doc["diagnostics"]["mean_noise_energy"] = n1 / n;
  doc["diagnostics"]["n_runs"] = n;
  return doc;
}

}  // namespace

json run(const RunConfig& cfg) {
  validate(cfg);
  json doc;
  doc["method"] = to_string(cfg.method);
  doc["seed"] = cfg.seed;
  doc["config"] = config_to_json(cfg);
  doc["diagnostics"] = json::object();
  doc["warnings"] = json::array();

  if (cfg.method == RunMethod::Demo) {
    const SpectralField X = build_input(cfg.constellation->spec, cfg.grid, cfg.constellation->phases);
    const auto dd = diagnostics(X, cfg.channel);
    doc["diagnostics"]["gamma_tilde"] = dd.gamma_tilde;
    doc["diagnostics"]["epsilon"] = finite_or_null(dd.epsilon);
    return run_demo(cfg, std::move(doc));
  }

  const auto [X, Y] = load_fields(cfg);
  const auto dd = diagnostics(X, cfg.channel);
  doc["diagnostics"]["gamma_tilde"] = dd.gamma_tilde;
  doc["diagnostics"]["epsilon"] = finite_or_null(dd.epsilon);
  if (cfg.method == RunMethod::ForwardMc) return run_forward(cfg, X, std::move(doc));

  LogPdf r;
  switch (cfg.method) {
    case RunMethod::PathInt: {
      McOptions o;
      o.n_samples = cfg.samples;
      o.seed = cfg.seed;
      r = estimate_log_pdf(X, Y, cfg.channel, o);
      break;
    }
    case RunMethod::Series0: r = series_log_pdf(X, Y, cfg.channel, 0); break;
    case RunMethod::Series1: r = series_log_pdf(X, Y, cfg.channel, 1); break;
    case RunMethod::SmallQ: {
      SmallNoiseOptions o;
      o.solve.tol = cfg.tol;
      o.solve.max_iter = cfg.max_iter;
      r = small_noise_log_pdf(X, Y, cfg.channel, o);
      break;
    }
    default: break;
  }
  doc["log_p"] = finite_or_null(r.log_p);
  doc["std_err"] = r.std_err;
  doc["reliable"] = r.reliable;
  for (const auto& [k, v] : r.diagnostics) doc["diagnostics"][k] = finite_or_null(v);
  for (const auto& w : r.warnings) doc["warnings"].push_back(w);
  return doc;
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {"gamma", "Q",    "beta2",   "L",   "N",
                                                "M",     "delta", "samples", "seed", "tol"};
  return axes;
}

RunConfig with_axis(const RunConfig& cfg, const std::string& axis, double v) {
  RunConfig c = cfg;
  if (axis == "gamma") {
    c.channel.gamma = v;
  } else if (axis == "Q") {
    c.channel.Q = v;
  } else if (axis == "beta2") {
    c.channel.beta2 = v;
  } else if (axis == "L") {
    c.grid.dz = v / c.grid.N;
    c.channel.L = v;
  } else if (axis == "N") {
    const double L = c.grid.L();
    c.grid.N = static_cast<int>(std::lround(v));
    c.grid.dz = L / c.grid.N;
    c.channel.L = L;
  } else if (axis == "M") {
    c.grid.M = static_cast<int>(std::lround(v));
    c.grid.omega_min = -kPi * c.grid.delta * (c.grid.M - 1);
  } else if (axis == "delta") {
    c.grid.delta = v;
    c.grid.omega_min = -kPi * v * (c.grid.M - 1);
  } else if (axis == "samples") {
    c.samples = std::lround(v);
  } else if (axis == "seed") {
    c.seed = static_cast<std::uint64_t>(std::llround(v));
  } else if (axis == "tol") {
    c.tol = v;
  } else {
    throw GuardViolation("sweep.axis", "'" + axis + "' is not a numeric config field");
  }
  return c;
}

std::string sweep(const RunConfig& cfg, const std::string& axis, const std::vector<double>& values) {
  if (cfg.method == RunMethod::Demo)
    throw GuardViolation("sweep.method", "demo runs are not tabular; use demo-qpsk");
  std::vector<json> docs;
  std::set<std::string> keys;
  for (double v : values) {
    docs.push_back(run(with_axis(cfg, axis, v)));
    for (const auto& [k, _] : docs.back()["diagnostics"].items()) keys.insert(k);
  }
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << axis << ",log_p,std_err";
  for (const auto& k : keys) out << ',' << k;
  out << '\n';
  const auto cell = [&](const json& j) {
    if (j.is_null()) return std::string("nan");
    if (j.is_boolean()) return std::string(j.get<bool>() ? "1" : "0");
    std::ostringstream s;
    s.precision(std::numeric_limits<double>::max_digits10);
    s << j.get<double>();
    return s.str();
  };
  for (std::size_t i = 0; i < values.size(); ++i) {
    const json& d = docs[i];
    out << values[i] << ',' << cell(d["log_p"]) << ',' << cell(d["std_err"]);
    for (const auto& k : keys)
      out << ',' << (d["diagnostics"].contains(k) ? cell(d["diagnostics"][k]) : "nan");
    out << '\n';
  }
  return out.str();
}

}  // namespace nlsepdf
