#include "steklov/gelfand_levitan.hpp"

#include "steklov/errors.hpp"
#include "steklov/numerics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace steklov {

double p_from_amplitude(const Amplitude& A, double t) {
  const double half = 0.5 * t;
  return -0.5 * (A.base_integral(half) + A.perturbation_integral(half));
}

double dp_from_amplitude(const Amplitude& A, double t) { return -0.25 * A(0.5 * t); }

namespace {

// Newton-Cotes weights for every interval count 0..M.
std::vector<Eigen::VectorXd> weight_table(int M, double h) {
  std::vector<Eigen::VectorXd> w(M + 1);
  for (int n = 0; n <= M; ++n) w[n] = newton_cotes_weights(n, h);
  return w;
}

// Solves the V and dV/dx systems at x = t_i. Returns the reciprocal condition estimate.
double solve_node(GLWorkspace& ws, const std::vector<Eigen::VectorXd>& wt, int i) {
  const int M = ws.M;
  const int n = M - i;  // intervals in [x, T]
  const auto& dp = ws.dp_values;
  ws.V[i] = Eigen::VectorXd::Zero(n + 1);
  ws.Vx[i] = Eigen::VectorXd::Zero(n + 1);
  if (n == 0) return 1.0;

  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  for (int r = 0; r <= n; ++r) {
    const int a = i + r;
    const auto& wl = wt[r];
    const auto& wr = wt[n - r];
    for (int c = 0; c <= r; ++c) A(r, c) += wl[c] * ws.kernel(a, i + c);
    for (int c = 0; c <= n - r; ++c) A(r, r + c) += wr[c] * ws.kernel(a, a + c);
    rhs[r] = -ws.kernel(i, a);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  // the L1 estimator misses exactly zero pivots, so the pivot ratio bounds it as well
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), piv.minCoeff() / piv.maxCoeff());
  if (!(rcond >= 1e-8)) {
    throw NumericalError("gelfand_levitan", "Nystroem matrix near-singular at x=" + std::to_string(ws.grid[i]) +
                                                " (rcond " + std::to_string(rcond) + ")");
  }
  ws.V[i] = lu.solve(rhs);
  const double vxx = ws.V[i][0];
  Eigen::VectorXd rhs_x(n + 1);
  for (int r = 0; r <= n; ++r) {
    rhs_x[r] = dp[2 * M - 2 * i - r] - dp[r] + ws.kernel(i + r, i) * vxx;
  }
  ws.Vx[i] = lu.solve(rhs_x);
  return rcond;
}

}  // namespace

GLWorkspace solve_gl_tables(Eigen::VectorXd p_values, Eigen::VectorXd dp_values, double T, int M, int workers) {
  if (!(T > 0.0)) throw ValidationError("gelfand_levitan", "horizon T must be positive");
  if (M < 32 || M % 2 != 0) throw ValidationError("gelfand_levitan", "M must be even and >= 32");
  if (p_values.size() != 2 * M + 1 || dp_values.size() != 2 * M + 1) {
    throw ValidationError("gelfand_levitan", "p tables need 2M + 1 entries");
  }
  GLWorkspace ws;
  ws.T = T;
  ws.M = M;
  ws.h = T / M;
  ws.grid = uniform_grid(0.0, T, M);
  ws.p_values = std::move(p_values);
  ws.dp_values = std::move(dp_values);
  ws.kernel.resize(M + 1, M + 1);
  for (int a = 0; a <= M; ++a) {
    for (int b = 0; b <= M; ++b) ws.kernel(a, b) = ws.p_values[2 * M - a - b] - ws.p_values[std::abs(a - b)];
  }
  ws.V.resize(M + 1);
  ws.Vx.resize(M + 1);

  const auto wt = weight_table(M, ws.h);
  std::vector<double> rconds(M + 1, 1.0);
  workers = std::max(1, std::min(workers, M + 1));
  if (workers == 1) {
    for (int i = 0; i <= M; ++i) rconds[i] = solve_node(ws, wt, i);
  } else {
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i <= M; i += workers) {
          try {
            rconds[i] = solve_node(ws, wt, i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  ws.min_rcond = *std::min_element(rconds.begin(), rconds.end());
  return ws;
}

GLWorkspace solve_gl(const Amplitude& A, double T, int M, int workers) {
  if (!(T > 0.0)) throw ValidationError("gelfand_levitan", "horizon T must be positive");
  if (M < 32 || M % 2 != 0) throw ValidationError("gelfand_levitan", "M must be even and >= 32");
  const double h = T / M;
  Eigen::VectorXd p(2 * M + 1), dp(2 * M + 1);
  for (int j = 0; j <= 2 * M; ++j) {
    p[j] = p_from_amplitude(A, j * h);
    dp[j] = dp_from_amplitude(A, j * h);
  }
  return solve_gl_tables(std::move(p), std::move(dp), T, M, workers);
}

RadialPotential recover_potential(GLWorkspace& ws) {
  const int M = ws.M;
  if (static_cast<int>(ws.V.size()) != M + 1 || static_cast<int>(ws.Vx.size()) != M + 1) {
    throw ValidationError("gelfand_levitan", "workspace has not been solved");
  }
  const auto& p = ws.p_values;
  const auto& dp = ws.dp_values;
  const auto wt = weight_table(M, ws.h);
  ws.Q_rec.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    const int n = M - i;
    const auto& V = ws.V[i];
    const auto& Vx = ws.Vx[i];
    const int m = 2 * M - 2 * i;
    // d/dx V(x, x) = p(2T - 2x) V(x, x) + 2 p'(2T - 2x)
    //              - int_x^T [p(2T - x - s) - p(s - x)] dV/dx(x, s) ds
    //              + int_x^T [p'(2T - x - s) - p'(s - x)] V(x, s) ds
    double d = p[m] * V[0] + 2.0 * dp[m];
    if (n > 0) {
      const auto& w = wt[n];
      for (int c = 0; c <= n; ++c) {
        d -= w[c] * (p[m - c] - p[c]) * Vx[c];
        d += w[c] * (dp[m - c] - dp[c]) * V[c];
      }
    }
    ws.Q_rec[M - i] = -2.0 * d;
  }
  return RadialPotential(ws.grid, ws.Q_rec);
}

double gl_residual(const GLWorkspace& ws) {
  const int M = ws.M;
  const auto wt = weight_table(M, ws.h);
  double worst = 0.0;
  for (int i = 0; i < M; ++i) {
    const int n = M - i;
    const auto& V = ws.V[i];
    for (int r = 0; r <= n; ++r) {
      const int a = i + r;
      const auto& wl = wt[r];
      const auto& wr = wt[n - r];
      double s = V[r] + ws.kernel(i, a);
      for (int c = 0; c <= r; ++c) s += wl[c] * ws.kernel(a, i + c) * V[c];
      for (int c = 0; c <= n - r; ++c) s += wr[c] * ws.kernel(a, a + c) * V[r + c];
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

}  // namespace steklov
