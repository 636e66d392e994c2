#pragma once

#include "steklov/perturbation.hpp"
#include "steklov/radial_model.hpp"
#include "steklov/weyl_titchmarsh.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace steklov {

struct SweepRecord {
  double s = 0.0;
  double eps = 0.0;          // certified Steklov gap
  double q_gap = 0.0;        // ||Q - Q~||_{L2(0,T)}
  double a_gap = 0.0;        // int_0^inf e^{(2 delta - 1) alpha} (A - A~)^2 d alpha
  double bound = 0.0;        // still_bound(eps) with the configured B
  double theta = 0.0;
  double C_T_running = 0.0;  // running max of q_gap / eps^theta in scale order
  std::string verdict;       // PASS / FAIL against C_T fitted at the largest eps
  // diagnostics that are not part of the CSV
  double p_gap = 0.0;        // max |p - p~| on [0, 2T]
  double a_l1_half = 0.0;    // 1/2 int_0^T |A - A~| d alpha
  double a_gap_series = 0.0; // closed-form sum_ij c_i c_j / (lambda_i + lambda_j + 1)
  double ball_gap = 0.0;     // ||q - q~||_{L2((e^{-T}, 1), r^3 dr)}
  double halfline_gap = 0.0; // same norm computed on the shared r-nodes in x
  int K_used = 0;
  double tail_bound = 0.0;
};

/// Perturbation family: s -> base + s * (coeffs, generator).
struct SweepConfig {
  ClosedForm base;
  std::vector<double> coeffs;
  std::optional<GeometricTail> tail;
  std::vector<double> scales;
  int d = 3;
  double delta = 0.5;
  double T = 2.0;
  int M = 256;
  int K = 64;
  int K_max = 8192;  // K doubles up to here until the tail certificate holds
  double B = 1.0;
  int workers = 1;
};

struct HolderFit {
  double C_T = 0.0;       // q_gap / eps^theta at the largest eps
  double C_T_max = 0.0;   // max over records of q_gap / eps^theta
  double slope = 0.0;     // least-squares slope of log q_gap against log eps
  double theta = 0.0;
  bool bound_ok = false;
  bool slope_ok = false;
  bool pass() const { return bound_ok && slope_ok; }
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<std::string> failures;  // scales whose pipeline aborted, with reason
  double R = 0.0;
  double theta = 0.0;
  std::optional<HolderFit> fit;       // absent when fewer than 3 records have eps > 0
  double B_fit = 0.0;                 // smallest B with a_gap <= still_bound(eps) on every record
  bool amplitude_bound_ok = true;     // a_gap <= bound * (1 + 1e-6) with the configured B
  double C_p = 0.0;                   // p_gap / f(eps) at the largest eps, f = sqrt(still_bound)
  bool p_chain_ok = true;             // p_gap <= C_p f(eps) and p_gap <= a_l1_half on every record
};

/// Runs the pipeline for every scale. Base and perturbed potentials go through
/// the same Gel'fand-Levitan discretization; eps is certified by the spectral
/// tail bound (K doubles until certified). Throws when fewer than three scales
/// survive or when the perturbation family is inadmissible.
SweepResult run_sweep(const SweepConfig& config);

/// Hoelder fit over records with eps > 0. Throws with fewer than three such
/// records or when every eps is equal.
HolderFit fit_holder(const std::vector<SweepRecord>& records, double theta);

struct CorollaryReport {
  double dn_gap = 0.0;    // operator norm of the diagonal DN difference
  double linf_gap = 0.0;  // sup_k |sigma_k - sigma~_k|
  bool identity_exact = false;
};

/// The DN difference is diagonal in spherical harmonics, so its operator norm is
/// the largest diagonal entry in modulus.
CorollaryReport corollary_gap(const SteklovSpectrum& sigma, const SteklovSpectrum& sigma_tilde);

/// CSV with header s,eps,q_gap,a_gap,bound,theta,C_T_running,verdict and, for a
/// non-empty list, a trailing '#' summary block.
void emit_records(const std::vector<SweepRecord>& records, const std::optional<HolderFit>& fit, std::ostream& out);
void emit_records(const std::vector<SweepRecord>& records, const std::optional<HolderFit>& fit,
                  const std::string& path);

/// Reads the CSV columns back; '#' lines are skipped.
std::vector<SweepRecord> parse_records(std::istream& in);

}  // namespace steklov
