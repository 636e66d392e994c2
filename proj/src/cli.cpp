#include "steklov/cli.hpp"

#include "steklov/errors.hpp"
#include "steklov/gelfand_levitan.hpp"
#include "steklov/muntz.hpp"
#include "steklov/numerics.hpp"
#include "steklov/stability_harness.hpp"
#include "steklov/weyl_titchmarsh.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace steklov {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::forward: return "forward";
    case Command::perturb: return "perturb";
    case Command::reconstruct: return "reconstruct";
    case Command::muntz: return "muntz";
    case Command::sweep: return "sweep";
    case Command::ks_check: return "ks-check";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::forward, Command::perturb, Command::reconstruct, Command::muntz, Command::sweep,
                    Command::ks_check}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("cli", "unknown command '" + name + "'");
}

namespace {

ClosedForm base_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "zero") return ClosedForm::zero();
    throw ValidationError("cli", "base '" + s + "' needs parameters");
  }
  if (!j.is_object()) throw ValidationError("cli", "base must be an object");
  const auto kind = j.value("kind", std::string("zero"));
  if (kind == "zero") return ClosedForm::zero();
  if (kind == "bargmann1") return ClosedForm::bargmann1(j.at("beta").get<double>(), j.at("gamma").get<double>());
  if (kind == "bargmann2") return ClosedForm::bargmann2(j.at("c1").get<double>(), j.at("kappa1").get<double>());
  throw ValidationError("cli", "unknown base kind '" + kind + "'");
}

json base_to_json(const ClosedForm& f) {
  switch (f.kind) {
    case ClosedFormKind::bargmann1: return {{"kind", "bargmann1"}, {"beta", f.first}, {"gamma", f.second}};
    case ClosedFormKind::bargmann2: return {{"kind", "bargmann2"}, {"c1", f.first}, {"kappa1", f.second}};
    default: return {{"kind", "zero"}};
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void echo_config(const RunConfig& cfg, std::ostream& out) {
  std::istringstream lines(config_to_json(cfg).dump(2));
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << '\n';
}

Amplitude make_amplitude(const RunConfig& cfg, const SpectralParams& params) {
  return build_perturbed_amplitude(cfg.base, cfg.coeffs, cfg.tail, params);
}

std::string effective_route(const RunConfig& cfg) {
  if (!cfg.route.empty()) return cfg.route;
  return (cfg.coeffs.empty() && !cfg.tail) ? "ode" : "laplace";
}

void cmd_forward(const RunConfig& cfg, std::ostream& out) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, cfg.K);
  const auto A = make_amplitude(cfg, params);
  const std::string route = effective_route(cfg);
  std::vector<WTEvaluation> evals;
  auto record = [&](WTEvaluation e) {
    evals.push_back(e);
    return e;
  };
  SteklovSpectrum spec;
  if (route == "ode") {
    const RadialPotential Q = RadialPotential::sampled(cfg.base, cfg.x_max, 64);
    OdeOptions opts;
    opts.x_max = cfg.x_max;
    opts.tolerance = cfg.tolerance;
    spec = steklov_spectrum([&](double k) { return record(wt_from_ode(Q, k, opts)); }, params, cfg.K);
  } else if (route == "laplace") {
    spec = steklov_spectrum([&](double k) { return record(wt_from_amplitude(A, k)); }, params, cfg.K);
  } else {
    spec = steklov_spectrum([&](double k) { return record(wt_closed_form(cfg.base, k)); }, params, cfg.K);
  }
  out << "k,kappa,sigma,M,est_error\n";
  for (int k = 0; k <= cfg.K; ++k) {
    out << k << ',' << fmt17(params.kappa_at(k)) << ',' << fmt17(spec.sigma[k]) << ',' << fmt17(evals[k].value) << ','
        << fmt17(evals[k].est_error) << '\n';
  }
}

void cmd_perturb(const RunConfig& cfg, std::ostream& out) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, cfg.K);
  const auto A = make_amplitude(cfg, params);
  const auto A0 = Amplitude::base_only(cfg.base, params);
  const auto s0 = steklov_spectrum([&](double k) { return wt_from_amplitude(A0, k); }, params, cfg.K);
  const auto s1 = steklov_spectrum([&](double k) { return wt_from_amplitude(A, k); }, params, cfg.K);
  const auto gap = dn_gap(s0, s1, spectral_tail_bound(A, cfg.K));
  out << "k,kappa,sigma,sigma_tilde,diff\n";
  for (int k = 0; k <= cfg.K; ++k) {
    out << k << ',' << fmt17(params.kappa_at(k)) << ',' << fmt17(s0.sigma[k]) << ',' << fmt17(s1.sigma[k]) << ','
        << fmt17(s1.sigma[k] - s0.sigma[k]) << '\n';
  }
  out << "# eps=" << fmt17(gap.eps) << " argmax=" << gap.argmax << " tail_bound=" << fmt17(gap.tail_bound)
      << " certified=" << (gap.certified ? "true" : "false") << '\n';
  out << "# R=" << fmt17(A.radius()) << " theta=" << fmt17(A.has_perturbation() ? holder_exponent(A.radius(), params) : 0.5)
      << '\n';

  const auto diff = spectral_measure_diff(A);
  out << "\nresonance_k,mu,location\n";
  for (const auto& r : diff.resonances) {
    out << r.k << ',' << fmt17(params.mu_at(r.k)) << ',' << fmt17(r.location) << '\n';
  }
  out << "\neigenvalue_k,location,weight\n";
  for (const auto& p : diff.point_masses) {
    out << p.k << ',' << fmt17(p.location) << ',' << fmt17(p.weight) << '\n';
  }
  out << "\nbase_jost_root\n";
  for (double r : jost_roots(cfg.base, -20.0, 20.0)) out << fmt17(r) << '\n';
}

void cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, cfg.K);
  const auto A = make_amplitude(cfg, params);
  GLWorkspace ws = solve_gl(A, cfg.T, cfg.M, cfg.workers);
  const RadialPotential Q = recover_potential(ws);
  const bool exact = !A.has_perturbation();
  out << (exact ? "x,Q,Q_closed_form\n" : "x,Q\n");
  for (Eigen::Index i = 0; i < Q.grid().size(); ++i) {
    out << fmt17(Q.grid()[i]) << ',' << fmt17(Q.values()[i]);
    if (exact) out << ',' << fmt17(closed_form_potential(cfg.base, Q.grid()[i]));
    out << '\n';
  }
  out << "# gl_residual=" << fmt17(gl_residual(ws)) << '\n';
  out << "# min_rcond=" << fmt17(ws.min_rcond) << '\n';
}

void cmd_muntz(const RunConfig& cfg, std::ostream& out) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, std::max(cfg.K, 1));
  ScopedPrecision prec(cfg.precision);
  const MuntzSystem<mp_real> sys(exponent_sequence<mp_real>(params, cfg.n));
  const int digits = 30;
  out << "m,j,lambda_j,C_mj\n";
  for (int m = 0; m <= cfg.n; ++m) {
    for (int j = 0; j <= m; ++j) {
      out << m << ',' << j << ',' << sys.exponents()[j].str(digits) << ',' << sys.coefficients()(m, j).str(digits)
          << '\n';
    }
  }
  out << "# gram_residual=" << sys.gram_residual(cfg.n).str(6) << '\n';
  out << "# certified_degree=" << sys.certified_degree() << '\n';
  out << "# condition_proxy=" << sys.condition_proxy(cfg.n).str(6) << '\n';
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  SweepConfig sc;
  sc.base = cfg.base;
  sc.coeffs = cfg.coeffs;
  sc.tail = cfg.tail;
  sc.scales = cfg.scales;
  sc.d = cfg.d;
  sc.delta = cfg.delta;
  sc.T = cfg.T;
  sc.M = cfg.M;
  sc.K = cfg.K;
  sc.K_max = cfg.K_max;
  sc.B = cfg.B;
  sc.workers = cfg.workers;
  const auto res = run_sweep(sc);
  emit_records(res.records, res.fit, out);
  out << "# R=" << fmt17(res.R) << '\n';
  out << "# B_fit=" << fmt17(res.B_fit) << " amplitude_bound=" << (res.amplitude_bound_ok ? "PASS" : "FAIL") << '\n';
  out << "# C_p=" << fmt17(res.C_p) << " p_chain=" << (res.p_chain_ok ? "PASS" : "FAIL") << '\n';
  for (const auto& r : res.records) {
    out << "# s=" << fmt17(r.s) << " K_used=" << r.K_used << " ball_gap=" << fmt17(r.ball_gap)
        << " halfline_gap=" << fmt17(r.halfline_gap) << " p_gap=" << fmt17(r.p_gap) << '\n';
  }
  for (const auto& f : res.failures) out << "# aborted " << f << '\n';
}

void cmd_ks_check(const RunConfig& cfg, std::ostream& out) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, cfg.K);
  const auto A = make_amplitude(cfg, params);
  const auto pos = ks_check_positivity(A, log_grid(1e-6, 1e6, 1000));
  const auto qs = ks_check_quasi_szego(A, log_grid(1e-2, 1e6, 1000));
  const auto nm = ks_check_normalization(A, log_grid(10.0, 1e4, 40), default_L_grid());
  out << "check,quantity,value\n";
  out << "positivity,min_density," << fmt17(pos.min_density) << '\n';
  out << "positivity,argmin_E," << fmt17(pos.argmin_E) << '\n';
  out << "positivity,min_point_mass_weight," << fmt17(pos.min_point_mass_weight) << '\n';
  out << "positivity,ok," << (pos.ok ? 1 : 0) << '\n';
  out << "quasi_szego,identically_zero," << (qs.identically_zero ? 1 : 0) << '\n';
  out << "quasi_szego,log_term_exponent," << fmt17(qs.log_term_exponent) << '\n';
  out << "quasi_szego,integrand_exponent," << fmt17(qs.integrand_exponent) << '\n';
  out << "quasi_szego,fit_residual," << fmt17(qs.fit_residual) << '\n';
  out << "normalization,identically_zero," << (nm.identically_zero ? 1 : 0) << '\n';
  out << "normalization,drift_exponent," << fmt17(nm.drift_exponent) << '\n';
  out << "normalization,drift_fit_residual," << fmt17(nm.drift_fit_residual) << '\n';
  out << "normalization,cauchy_ok," << (nm.cauchy_ok ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < nm.k_max.size(); ++i) {
    out << "normalization,partial_integral_k" << fmt17(nm.k_max[i]) << ',' << fmt17(nm.partial_integrals[i]) << '\n';
  }
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig cfg) {
  if (!j.is_object()) throw ValidationError("cli", "configuration must be a JSON object");
  static const std::set<std::string> known{"command", "d", "delta", "T", "K", "M", "base", "coeffs", "tail",
                                           "route", "x_max", "tolerance", "scales", "K_max", "B", "n",
                                           "output", "precision", "workers", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("cli", "unknown configuration key '" + key + "'");
  }
  try {
    if (j.contains("command")) cfg.command = parse_command(j["command"].get<std::string>());
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("T")) cfg.T = j["T"].get<double>();
    if (j.contains("K")) cfg.K = j["K"].get<int>();
    if (j.contains("M")) cfg.M = j["M"].get<int>();
    if (j.contains("base")) cfg.base = base_from_json(j["base"]);
    if (j.contains("coeffs")) cfg.coeffs = j["coeffs"].get<std::vector<double>>();
    if (j.contains("tail")) {
      if (j["tail"].is_null()) {
        cfg.tail.reset();
      } else {
        cfg.tail = GeometricTail{j["tail"].at("a").get<double>(), j["tail"].at("rho").get<double>()};
      }
    }
    if (j.contains("route")) cfg.route = j["route"].get<std::string>();
    if (j.contains("x_max")) cfg.x_max = j["x_max"].get<double>();
    if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
    if (j.contains("scales")) cfg.scales = j["scales"].get<std::vector<double>>();
    if (j.contains("K_max")) cfg.K_max = j["K_max"].get<int>();
    if (j.contains("B")) cfg.B = j["B"].get<double>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    if (j.contains("precision")) cfg.precision = j["precision"].get<unsigned>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<long long>();
  } catch (const json::exception& e) {
    throw ValidationError("cli", std::string("malformed configuration: ") + e.what());
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["command"] = to_string(cfg.command);
  j["d"] = cfg.d;
  j["delta"] = cfg.delta;
  j["T"] = cfg.T;
  j["K"] = cfg.K;
  j["M"] = cfg.M;
  j["base"] = base_to_json(cfg.base);
  j["coeffs"] = cfg.coeffs;
  j["tail"] = cfg.tail ? json{{"a", cfg.tail->a}, {"rho", cfg.tail->rho}} : json(nullptr);
  j["route"] = effective_route(cfg);
  j["x_max"] = cfg.x_max;
  j["tolerance"] = cfg.tolerance;
  j["scales"] = cfg.scales;
  j["K_max"] = cfg.K_max;
  j["B"] = cfg.B;
  j["n"] = cfg.n;
  j["output"] = cfg.output;
  j["precision"] = cfg.precision;
  j["workers"] = cfg.workers;
  j["seed"] = cfg.seed;
  return j;
}

void validate_config(const RunConfig& cfg) {
  const auto params = make_spectral_params(cfg.d, cfg.delta, std::max(cfg.K, 1));
  if (cfg.K < 1) throw ValidationError("cli", "K must be >= 1");
  validate(cfg.base);
  if (cfg.base.kind == ClosedFormKind::external) throw ValidationError("cli", "base must be zero, bargmann1 or bargmann2");
  if (cfg.workers < 1) throw ValidationError("cli", "workers must be >= 1");
  if (cfg.precision < 53) throw ValidationError("cli", "precision must be >= 53 bits");
  switch (cfg.command) {
    case Command::forward: {
      const auto route = effective_route(cfg);
      if (route != "ode" && route != "laplace" && route != "closed_form") {
        throw ValidationError("cli", "route must be ode, laplace or closed_form");
      }
      if (route != "laplace" && (!cfg.coeffs.empty() || cfg.tail)) {
        throw ValidationError("cli", "route '" + route + "' applies to the base potential only; use laplace");
      }
      if (!(cfg.x_max > 0.0) || !(cfg.tolerance > 0.0)) throw ValidationError("cli", "x_max and tolerance must be positive");
      make_amplitude(cfg, params);
      break;
    }
    case Command::perturb:
    case Command::ks_check:
      make_amplitude(cfg, params);
      break;
    case Command::reconstruct:
      if (!(cfg.T > 0.0)) throw ValidationError("cli", "T must be positive");
      if (cfg.M < 32 || cfg.M % 2) throw ValidationError("cli", "M must be even and >= 32");
      make_amplitude(cfg, params);
      break;
    case Command::muntz:
      if (cfg.n < 0) throw ValidationError("cli", "n must be >= 0");
      break;
    case Command::sweep: {
      if (!(cfg.T > 0.0)) throw ValidationError("cli", "T must be positive");
      if (cfg.M < 32 || cfg.M % 2) throw ValidationError("cli", "M must be even and >= 32");
      if (cfg.scales.empty()) throw ValidationError("cli", "scales must not be empty");
      for (double s : cfg.scales) {
        if (!(s >= 0.0)) throw ValidationError("cli", "scales must be >= 0");
      }
      if (!(cfg.B > 0.0)) throw ValidationError("cli", "B must be positive");
      if (cfg.K_max < cfg.K) throw ValidationError("cli", "K_max must be >= K");
      make_amplitude(cfg, params);
      break;
    }
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    std::ostringstream buffer;
    echo_config(cfg, buffer);
    switch (cfg.command) {
      case Command::forward: cmd_forward(cfg, buffer); break;
      case Command::perturb: cmd_perturb(cfg, buffer); break;
      case Command::reconstruct: cmd_reconstruct(cfg, buffer); break;
      case Command::muntz: cmd_muntz(cfg, buffer); break;
      case Command::sweep: cmd_sweep(cfg, buffer); break;
      case Command::ks_check: cmd_ks_check(cfg, buffer); break;
    }
    if (cfg.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw ValidationError("cli", "cannot write output file " + cfg.output);
      f << buffer.str();
      if (!f) throw ValidationError("cli", "write failed for " + cfg.output);
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace steklov
