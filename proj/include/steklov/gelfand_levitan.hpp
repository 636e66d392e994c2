#pragma once

#include "steklov/perturbation.hpp"
#include "steklov/radial_model.hpp"

#include <Eigen/Core>

#include <vector>

namespace steklov {

/// p(t) = -1/2 int_0^{t/2} A(alpha) d alpha, in closed form.
double p_from_amplitude(const Amplitude& A, double t);

/// p'(t) = -1/4 A(t/2).
double dp_from_amplitude(const Amplitude& A, double t);

/// Discretized local Gel'fand-Levitan equation
///   V(x, t) + int_x^T K(t, s) V(x, s) ds = -K(x, t),  K(t, s) = p(2T - t - s) - p(|t - s|)
/// on the uniform grid t_j = j h, h = T / M. Every argument of p is a multiple of h,
/// so p and p' are tabulated once on 2M + 1 nodes.
struct GLWorkspace {
  double T = 0.0;
  int M = 0;
  double h = 0.0;
  Eigen::VectorXd grid;       // t_0 .. t_M
  Eigen::VectorXd p_values;   // p(j h), j = 0..2M
  Eigen::VectorXd dp_values;  // p'(j h), j = 0..2M
  Eigen::MatrixXd kernel;     // K(t_a, t_b)
  // V[i](r) = V(t_i, t_{i+r}) and Vx[i](r) = dV/dx(t_i, t_{i+r}), r = 0..M-i
  std::vector<Eigen::VectorXd> V;
  std::vector<Eigen::VectorXd> Vx;
  Eigen::VectorXd Q_rec;      // Q(t_j) once recovered
  double min_rcond = 1.0;     // smallest reciprocal condition estimate over the x-nodes
};

/// Nystroem solve for every x-node. Row weights split at the diagonal kink of
/// p(|t - s|): Newton-Cotes on [x, t] plus Newton-Cotes on [t, T].
/// M must be even and >= 32. `workers` > 1 distributes x-nodes over threads.
GLWorkspace solve_gl(const Amplitude& A, double T, int M, int workers = 1);

/// Same solve from tabulated p and p' (length 2M + 1).
GLWorkspace solve_gl_tables(Eigen::VectorXd p_values, Eigen::VectorXd dp_values, double T, int M,
                            int workers = 1);

/// Q(T - x) = -2 d/dx V(x, x), with the derivative taken from the differentiated
/// equation (no finite differences). Fills ws.Q_rec and returns Q on [0, T].
RadialPotential recover_potential(GLWorkspace& ws);

/// Max over x-nodes of the sup-norm residual of the discrete equation for V.
double gl_residual(const GLWorkspace& ws);

}  // namespace steklov
