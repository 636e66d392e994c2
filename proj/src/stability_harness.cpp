#include "steklov/stability_harness.hpp"

#include "steklov/errors.hpp"
#include "steklov/gelfand_levitan.hpp"
#include "steklov/muntz.hpp"
#include "steklov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace steklov {
namespace {

struct BaseState {
  Amplitude A0;
  GLWorkspace ws;
  RadialPotential Q;
  std::map<int, SteklovSpectrum> spectra;
  std::mutex mu;

  const SteklovSpectrum& spectrum(int K) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = spectra.find(K);
    if (it == spectra.end()) {
      auto eval = [&](double kappa) { return wt_from_amplitude(A0, kappa); };
      it = spectra.emplace(K, steklov_spectrum(eval, A0.params(), K)).first;
    }
    return it->second;
  }
};

Amplitude family_member(const SweepConfig& cfg, const SpectralParams& params, double s) {
  std::vector<double> c = cfg.coeffs;
  for (auto& v : c) v *= s;
  std::optional<GeometricTail> tail = cfg.tail;
  if (tail) tail->a *= s;
  return build_perturbed_amplitude(cfg.base, std::move(c), tail, params);
}

double weighted_amplitude_gap(const Amplitude& As) {
  if (!As.has_perturbation()) return 0.0;
  const auto& params = As.params();
  int first = 0;
  while (first < As.term_count() && As.coefficient(first) == 0.0) ++first;
  const double rate = 2.0 * params.lambda_at(first) + 1.0;
  const double alpha_max = std::log(1e17 * std::max(1.0, As.abs_coefficient_sum())) / rate;
  const double w = 2.0 * params.delta - 1.0;
  auto f = [&](double a) {
    const double d = As.perturbation_value(a);
    return std::exp(w * a) * d * d;
  };
  // split so the fast initial transient and the slow tail are both resolved
  const double mid = std::min(1.0, alpha_max);
  return adaptive_integrate(f, 0.0, mid, 1e-13) + adaptive_integrate(f, mid, alpha_max, 1e-13);
}

double series_amplitude_gap(const Amplitude& As) {
  const auto& params = As.params();
  double s = 0.0;
  for (int i = 0; i < As.term_count(); ++i) {
    const double ci = As.coefficient(i);
    if (ci == 0.0) continue;
    for (int j = 0; j < As.term_count(); ++j) {
      s += ci * As.coefficient(j) / (params.lambda_at(i) + params.lambda_at(j) + 1.0);
    }
  }
  return s;
}

SweepRecord run_scale(const SweepConfig& cfg, const SpectralParams& params, BaseState& base, double s, double R) {
  SweepRecord rec;
  rec.s = s;
  const Amplitude As = family_member(cfg, params, s);

  GLWorkspace ws = solve_gl(As, cfg.T, cfg.M);
  const RadialPotential Qs = recover_potential(ws);
  const Eigen::VectorXd dq = Qs.values() - base.Q.values();
  rec.q_gap = std::sqrt(integrate_uniform(dq.array().square().matrix(), ws.h));
  rec.p_gap = (ws.p_values - base.ws.p_values).cwiseAbs().maxCoeff();

  int K = cfg.K;
  for (;;) {
    const SteklovSpectrum& s0 = base.spectrum(K);
    auto eval = [&](double kappa) { return wt_from_amplitude(As, kappa); };
    const SteklovSpectrum s1 = steklov_spectrum(eval, params, K);
    const DNGap g = dn_gap(s0, s1, spectral_tail_bound(As, K));
    if (g.certified) {
      rec.eps = g.eps;
      rec.tail_bound = g.tail_bound;
      rec.K_used = K;
      break;
    }
    if (2 * K > cfg.K_max) {
      throw NumericalError("stability_harness", "spectral gap not certified up to K=" + std::to_string(K));
    }
    K *= 2;
  }

  rec.a_gap = weighted_amplitude_gap(As);
  rec.a_gap_series = series_amplitude_gap(As);
  rec.a_l1_half = 0.5 * adaptive_integrate([&](double a) { return std::abs(As.perturbation_value(a)); }, 0.0, cfg.T,
                                           1e-14);
  rec.bound = still_bound(rec.eps, R, params, cfg.B);

  const auto [line, ball] = weighted_norm_equivalence(halfline_to_ball(base.Q), halfline_to_ball(Qs), cfg.T);
  rec.halfline_gap = line;
  rec.ball_gap = ball;
  return rec;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  const SpectralParams params = make_spectral_params(cfg.d, cfg.delta, std::max(cfg.K, 1));
  if (cfg.scales.empty()) throw ValidationError("stability_harness", "sweep needs at least one scale");
  for (double s : cfg.scales) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("stability_harness", "scales must be finite and >= 0");
  }
  if (!(cfg.B > 0.0)) throw ValidationError("stability_harness", "B must be positive");
  if (cfg.K < 1 || cfg.K_max < cfg.K) throw ValidationError("stability_harness", "need 1 <= K <= K_max");

  std::vector<double> scales = cfg.scales;
  std::sort(scales.begin(), scales.end(), std::greater<>());

  const Amplitude unit = family_member(cfg, params, 1.0);  // admissibility of the family
  SweepResult result;
  result.R = unit.has_perturbation() ? unit.radius() : std::numeric_limits<double>::infinity();
  result.theta = holder_exponent(result.R, params);

  BaseState base;
  base.A0 = Amplitude::base_only(cfg.base, params);
  base.ws = solve_gl(base.A0, cfg.T, cfg.M, cfg.workers);
  base.Q = recover_potential(base.ws);

  const int n = static_cast<int>(scales.size());
  std::vector<std::optional<SweepRecord>> slots(n);
  std::vector<std::string> reasons(n);
  auto work = [&](int i) {
    try {
      slots[i] = run_scale(cfg, params, base, scales[i], result.R);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os.precision(17);
      os << "s=" << scales[i] << ": " << e.what();
      reasons[i] = os.str();
    }
  };
  const int workers = std::max(1, std::min(cfg.workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < n; ++i) {
    if (slots[i]) {
      result.records.push_back(*slots[i]);
    } else {
      result.failures.push_back(reasons[i]);
    }
  }
  if (result.records.size() < 3 && result.records.size() < scales.size()) {
    std::string msg = "fewer than 3 valid records";
    for (const auto& r : result.failures) msg += "; " + r;
    throw NumericalError("stability_harness", msg);
  }

  // running C_T, verdicts and the fitted constants
  for (auto& r : result.records) r.theta = result.theta;
  double running = 0.0;
  for (auto& r : result.records) {
    if (r.eps > 0.0) running = std::max(running, r.q_gap / std::pow(r.eps, r.theta));
    r.C_T_running = running;
  }
  int with_eps = 0;
  for (const auto& r : result.records) with_eps += r.eps > 0.0;
  double C_T = 0.0;
  if (with_eps >= 3) {
    result.fit = fit_holder(result.records, result.theta);
    C_T = result.fit->C_T;
  } else if (!result.records.empty() && result.records.front().eps > 0.0) {
    C_T = result.records.front().q_gap / std::pow(result.records.front().eps, result.theta);
  }
  for (auto& r : result.records) {
    const double allowed = r.eps > 0.0 ? C_T * std::pow(r.eps, r.theta) * (1.0 + 1e-6) : 0.0;
    r.verdict = r.q_gap <= allowed || r.q_gap == 0.0 ? "PASS" : "FAIL";
  }

  // amplitude-side bound and the p-chain
  result.B_fit = 0.0;
  double C_p = 0.0;
  const SweepRecord* largest = nullptr;
  for (const auto& r : result.records) {
    if (r.eps > 0.0 && (!largest || r.eps > largest->eps)) largest = &r;
  }
  for (const auto& r : result.records) {
    if (r.a_gap > r.bound * (1.0 + 1e-6) + 1e-300) result.amplitude_bound_ok = false;
    if (r.eps > 0.0) {
      const double rest = r.a_gap - (r.bound - cfg.B * cfg.B * r.eps);
      result.B_fit = std::max(result.B_fit, std::sqrt(std::max(rest, 0.0) / r.eps));
    }
    if (r.p_gap > r.a_l1_half * (1.0 + 1e-6) + 1e-15) result.p_chain_ok = false;
  }
  if (largest) {
    C_p = largest->p_gap / std::sqrt(largest->bound);
    for (const auto& r : result.records) {
      if (r.eps > 0.0 && r.p_gap > C_p * std::sqrt(r.bound) * (1.0 + 1e-6)) result.p_chain_ok = false;
    }
  }
  result.C_p = C_p;
  return result;
}

HolderFit fit_holder(const std::vector<SweepRecord>& records, double theta) {
  std::vector<const SweepRecord*> use;
  for (const auto& r : records) {
    if (r.eps > 0.0 && r.q_gap > 0.0) use.push_back(&r);
  }
  if (use.size() < 3) throw ValidationError("stability_harness", "Hoelder fit needs >= 3 records with eps > 0");
  const auto [mn, mx] = std::minmax_element(use.begin(), use.end(),
                                            [](const auto* a, const auto* b) { return a->eps < b->eps; });
  if ((*mn)->eps == (*mx)->eps) throw ValidationError("stability_harness", "all records share the same eps");

  HolderFit fit;
  fit.theta = theta;
  Eigen::VectorXd lx(use.size()), ly(use.size());
  for (std::size_t i = 0; i < use.size(); ++i) {
    lx[i] = std::log(use[i]->eps);
    ly[i] = std::log(use[i]->q_gap);
    fit.C_T_max = std::max(fit.C_T_max, use[i]->q_gap / std::pow(use[i]->eps, theta));
  }
  fit.slope = fit_line(lx, ly).slope;
  fit.C_T = (*mx)->q_gap / std::pow((*mx)->eps, theta);
  fit.bound_ok = true;
  for (const auto* r : use) {
    if (r->q_gap > fit.C_T * std::pow(r->eps, theta) * (1.0 + 1e-6)) fit.bound_ok = false;
  }
  fit.slope_ok = fit.slope >= theta - 0.05;
  return fit;
}

CorollaryReport corollary_gap(const SteklovSpectrum& sigma, const SteklovSpectrum& sigma_tilde) {
  if (sigma.d != sigma_tilde.d || sigma.sigma.size() != sigma_tilde.sigma.size()) {
    throw ValidationError("stability_harness", "spectra are on different index ranges");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sigma.sigma.size());
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(sigma.sigma.data(), n);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(sigma_tilde.sigma.data(), n);
  CorollaryReport rep;
  const Eigen::DiagonalMatrix<double, Eigen::Dynamic> D((a - b).asDiagonal());
  rep.dn_gap = n ? D.diagonal().cwiseAbs().maxCoeff() : 0.0;
  rep.linf_gap = dn_gap(sigma, sigma_tilde, 0.0).eps;
  rep.identity_exact = rep.dn_gap == rep.linf_gap;
  return rep;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void emit_records(const std::vector<SweepRecord>& records, const std::optional<HolderFit>& fit, std::ostream& out) {
  out << "s,eps,q_gap,a_gap,bound,theta,C_T_running,verdict\n";
  for (const auto& r : records) {
    out << fmt17(r.s) << ',' << fmt17(r.eps) << ',' << fmt17(r.q_gap) << ',' << fmt17(r.a_gap) << ','
        << fmt17(r.bound) << ',' << fmt17(r.theta) << ',' << fmt17(r.C_T_running) << ',' << r.verdict << '\n';
  }
  if (records.empty()) return;
  out << "# theta=" << fmt17(records.front().theta) << '\n';
  if (fit) {
    out << "# C_T=" << fmt17(fit->C_T) << '\n';
    out << "# slope=" << fmt17(fit->slope) << '\n';
    out << "# verdict=" << (fit->pass() ? "PASS" : "FAIL") << '\n';
  } else {
    out << "# verdict=NO_FIT\n";
  }
}

void emit_records(const std::vector<SweepRecord>& records, const std::optional<HolderFit>& fit,
                  const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("stability_harness", "cannot write " + path);
  emit_records(records, fit, f);
  if (!f) throw ValidationError("stability_harness", "write failed for " + path);
}

std::vector<SweepRecord> parse_records(std::istream& in) {
  std::vector<SweepRecord> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "s,eps,q_gap,a_gap,bound,theta,C_T_running,verdict") {
        throw ValidationError("stability_harness", "unexpected CSV header: " + line);
      }
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw ValidationError("stability_harness", "expected 8 columns: " + line);
    SweepRecord r;
    r.s = std::stod(f[0]);
    r.eps = std::stod(f[1]);
    r.q_gap = std::stod(f[2]);
    r.a_gap = std::stod(f[3]);
    r.bound = std::stod(f[4]);
    r.theta = std::stod(f[5]);
    r.C_T_running = std::stod(f[6]);
    r.verdict = f[7];
    out.push_back(r);
  }
  return out;
}

}  // namespace steklov
