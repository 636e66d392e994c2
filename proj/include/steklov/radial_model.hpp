#pragma once

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace steklov {

/// Index sequences shared by the forward model, the perturbation class and the
/// Müntz system. For k >= 0:
///   kappa_k  = k + (d - 2) / 2
///   lambda_k = 2k + d - 3 + delta
///   mu_k     = lambda_k + delta
struct SpectralParams {
  int d = 3;
  double delta = 0.0;
  int K = 0;
  std::vector<double> kappa;
  std::vector<double> lambda;
  std::vector<double> mu;
  int n_neg = 0;  // #{k : mu_k < 0}
  double M0 = 2.0;

  double kappa_at(int k) const { return k + 0.5 * (d - 2); }
  double lambda_at(int k) const { return 2.0 * k + d - 3 + delta; }
  double mu_at(int k) const { return lambda_at(k) + delta; }
  /// Base of the Müntz growth rate, 9 M0 / 2.
  double growth_base() const { return 4.5 * M0; }
};

SpectralParams make_spectral_params(int d, double delta, int K);

enum class ClosedFormKind { zero, bargmann1, bargmann2, external };

/// Analytic potential tag. bargmann1 stores (beta, gamma) with 0 <= gamma < beta;
/// bargmann2 stores (c1, kappa1) with c1, kappa1 > 0.
struct ClosedForm {
  ClosedFormKind kind = ClosedFormKind::zero;
  double first = 0.0;
  double second = 0.0;

  static ClosedForm zero() { return {}; }
  static ClosedForm bargmann1(double beta, double gamma) {
    return {ClosedFormKind::bargmann1, beta, gamma};
  }
  static ClosedForm bargmann2(double c1, double kappa1) {
    return {ClosedFormKind::bargmann2, c1, kappa1};
  }
  static ClosedForm external() { return {ClosedFormKind::external, 0.0, 0.0}; }

  std::string describe() const;
};

/// Throws ValidationError when the parameters fall outside the admissible range.
void validate(const ClosedForm& form);

/// Q(x) for an analytic tag. Throws for `external`.
double closed_form_potential(const ClosedForm& form, double x);

/// Jost function psi(0, kappa) of the two Bargmann families (zero potential: 1).
/// Templated so that E > 0 can be probed at complex kappa = -i sqrt(E).
template <class Scalar>
Scalar jost_value(const ClosedForm& form, const Scalar& kappa) {
  switch (form.kind) {
    case ClosedFormKind::bargmann1:
      return (kappa + form.second) / (kappa + form.first);
    case ClosedFormKind::bargmann2:
      return (kappa - form.second) / (kappa + form.second);
    default:
      return Scalar(1);
  }
}

/// Potential Q on a half-line grid [0, X_max].
///
/// Evaluation: an attached closed form is used directly (no interpolation);
/// otherwise the samples are interpolated with a local cubic, and beyond the
/// last node the optional tail formula applies (zero when absent).
class RadialPotential {
 public:
  RadialPotential() = default;
  RadialPotential(Eigen::VectorXd grid, Eigen::VectorXd values,
                  std::optional<ClosedForm> closed_form = std::nullopt);

  /// Samples `form` on a uniform grid with n_intervals intervals.
  static RadialPotential sampled(const ClosedForm& form, double x_max, int n_intervals);

  double operator()(double x) const;

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double x_max() const { return grid_[grid_.size() - 1]; }
  const std::optional<ClosedForm>& closed_form() const { return closed_form_; }
  const std::optional<ClosedForm>& tail() const { return tail_; }

  /// Copy that continues with `form` beyond the last grid node.
  RadialPotential with_tail(const ClosedForm& form) const;

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd values_;
  std::optional<ClosedForm> closed_form_;
  std::optional<ClosedForm> tail_;
};

/// Radial potential q(r) on the ball, sampled on r-nodes in (0, 1]. Norms use
/// the weight r^3 dr.
struct BallPotential {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

/// Q(x) = e^{-2x} q(e^{-x}) on the nodes x_i = -log r_i (reordered ascending).
/// The ball grid must end at r = 1.
RadialPotential ball_to_halfline(const BallPotential& q);

/// Inverse map q(r) = Q(-log r) / r^2 on the nodes r_i = e^{-x_i}.
BallPotential halfline_to_ball(const RadialPotential& Q);

/// Samples q(r) = Q(-log r) / r^2 on the given r-grid by evaluating Q.
BallPotential halfline_to_ball(const RadialPotential& Q, const Eigen::VectorXd& r_grid);

/// (||Q - Q~||_{L2(0,T)}, ||q - q~||_{L2((e^{-T},1), r^3 dr)}), both computed on
/// the shared r-nodes inside [e^{-T}, 1] (in x and in r respectively).
std::pair<double, double> weighted_norm_equivalence(const BallPotential& q,
                                                    const BallPotential& q_tilde, double T);

}  // namespace steklov
