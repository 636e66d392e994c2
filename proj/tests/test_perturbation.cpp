#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steklov/errors.hpp"
#include "steklov/numerics.hpp"
#include "steklov/perturbation.hpp"
#include "steklov/weyl_titchmarsh.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace steklov;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

// Closed-form M(z) of base plus exponential series, continued to kappa = -i sqrt(E).
// Only valid for mu_k >= 0; the imaginary part over pi is the spectral density.
cd weyl_m_upper(const ClosedForm& base, const std::vector<double>& c, const std::vector<double>& mu, double E) {
  const cd kappa(0.0, -std::sqrt(E));
  cd m = -kappa;
  if (base.kind == ClosedFormKind::bargmann1) {
    const double b = base.first, g = base.second;
    m -= (g * g - b * b) / (kappa + g);
  }
  for (std::size_t k = 0; k < c.size(); ++k) m -= c[k] / (2.0 * kappa + mu[k]);
  return m;
}

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace

TEST_CASE("admissible amplitudes are accepted") {
  const auto p = make_spectral_params(3, 0.5, 8);
  CHECK(p.mu[0] == 1.0);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-1.5}, std::nullopt, p);
  CHECK(A.coefficient(0) == -1.5);
  CHECK(std::isinf(A.radius()));
  CHECK(A.radius_estimate().exact);
  CHECK(A.has_perturbation());

  const auto p0 = make_spectral_params(3, 0.0, 8);
  const auto G = build_perturbed_amplitude(ClosedForm::zero(), {}, GeometricTail{0.01, 0.5}, p0);
  CHECK(G.radius() == 2.0);
  CHECK(G.radius_estimate().exact);
  CHECK(G.coefficient(3) == doctest::Approx(-0.01 * std::pow(0.5, p0.lambda_at(3))).epsilon(1e-15));
}

TEST_CASE("inadmissible amplitudes are rejected") {
  const auto p = make_spectral_params(3, 0.0, 8);
  CHECK_THROWS_AS(build_perturbed_amplitude(ClosedForm::zero(), {-1.0, 0.1}, std::nullopt, p), ValidationError);
  CHECK_THROWS_AS(build_perturbed_amplitude(ClosedForm::zero(), {}, GeometricTail{0.1, 1.0}, p), ValidationError);
  CHECK_THROWS_AS(build_perturbed_amplitude(ClosedForm::zero(), {}, GeometricTail{-0.1, 0.5}, p), ValidationError);
  // a slowly decaying explicit list has R close to 1
  std::vector<double> slow;
  for (int k = 0; k < 40; ++k) slow.push_back(-std::pow(1.02, p.lambda_at(k)));
  CHECK_THROWS_AS(build_perturbed_amplitude(ClosedForm::zero(), slow, std::nullopt, p), ValidationError);
}

TEST_CASE("radius of convergence estimates") {
  const auto p = make_spectral_params(3, 0.0, 8);
  std::vector<double> geo;
  for (int k = 0; k < 30; ++k) geo.push_back(-std::pow(1.0 / 3.0, p.lambda_at(k)));
  const auto r = estimate_radius(geo, std::nullopt, p);
  CHECK(r.R == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_FALSE(r.exact);
  CHECK(r.uncertainty < 1e-3);

  CHECK(std::isinf(estimate_radius(std::vector<double>{-1.0}, std::nullopt, p).R));
  CHECK(std::isinf(estimate_radius(std::vector<double>{}, std::nullopt, p).R));

  std::vector<double> fact;
  double f = 1.0;
  for (int k = 0; k < 30; ++k) {
    if (k > 0) f *= k;
    fact.push_back(-1.0 / f);
  }
  CHECK(std::isinf(estimate_radius(fact, std::nullopt, p).R));
  CHECK(estimate_radius({}, GeometricTail{1.0, 0.25}, p).R == 4.0);
}

TEST_CASE("Holder exponent") {
  const auto p = make_spectral_params(3, 0.0, 4);
  CHECK(p.M0 == 2.0);
  CHECK(holder_exponent(9.0, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(holder_exponent(3.0, p) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(holder_exponent(100.0, p) == 0.5);
  CHECK(holder_exponent(INFINITY, p) == 0.5);
  CHECK_THROWS_AS(holder_exponent(1.0, p), ValidationError);
  const auto q = make_spectral_params(3, 0.5, 4);  // M0 = 3, threshold 13.5
  CHECK(holder_exponent(9.0, q) == doctest::Approx(0.5 * std::log(9.0) / std::log(13.5)).epsilon(1e-15));
}

TEST_CASE("split sinh form equals the plain exponential series") {
  const auto p = make_spectral_params(5, -2.0, 8);  // mu_0 = -2, mu_1 = 2
  REQUIRE(p.n_neg == 1);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-0.5, -0.25, -0.125}, std::nullopt, p);
  for (double alpha : {0.0, 0.3, 1.0, 4.0}) {
    double plain = 0.0;
    for (int k = 0; k < 3; ++k) plain += A.coefficient(k) * std::exp(-p.mu_at(k) * alpha);
    CHECK(A.perturbation_value(alpha) == doctest::Approx(plain).epsilon(1e-13));
  }
}

TEST_CASE("closed-form amplitude integrals match quadrature") {
  const auto p = make_spectral_params(3, 0.5, 8);
  for (const auto& base : {ClosedForm::bargmann1(1.0, 0.5), ClosedForm::bargmann2(1.0, 0.5)}) {
    const auto A = build_perturbed_amplitude(base, {-0.2, -0.1}, GeometricTail{0.05, 1.0 / 9.0}, p);
    for (double t : {0.25, 1.0, 2.0}) {
      CHECK(A.base_integral(t) == doctest::Approx(quad([&](double a) { return A.base_value(a); }, 0.0, t)).epsilon(1e-12));
      CHECK(A.perturbation_integral(t) ==
            doctest::Approx(quad([&](double a) { return A.perturbation_value(a); }, 0.0, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("series truncation and scaling") {
  const auto p = make_spectral_params(3, 0.5, 8);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {}, GeometricTail{1.0, 1.0 / 9.0}, p);
  const int n = A.term_count();
  CHECK(n > 4);
  double rest = 0.0;
  for (int k = n; k < n + 200; ++k) rest += std::abs(A.coefficient(k));
  CHECK(rest <= 1e-16 * A.abs_coefficient_sum());
  const auto half = A.scaled(0.5);
  CHECK(half.perturbation_value(0.7) == doctest::Approx(0.5 * A.perturbation_value(0.7)).epsilon(1e-15));
  CHECK(half.base_value(0.7) == A.base_value(0.7));
  CHECK_FALSE(A.scaled(0.0).has_perturbation());
}

TEST_CASE("spectral measure change: density, point masses, resonances") {
  const auto p = make_spectral_params(3, 1.0, 4);  // mu_0 = 2
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-1.0}, std::nullopt, p);
  const auto diff = spectral_measure_diff(A);
  CHECK(diff.density_diff(1.0) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-15));
  CHECK(diff.point_masses.empty());
  REQUIRE(diff.resonances.size() == 1);
  CHECK(diff.resonances[0].location == -1.0);

  // d = 5, delta = -2: mu_0 = -2 gives one eigenvalue at E = -1 with weight 1
  const auto q = make_spectral_params(5, -2.0, 4);
  const auto B = build_perturbed_amplitude(ClosedForm::zero(), {-1.0}, std::nullopt, q);
  const auto db = spectral_measure_diff(B);
  REQUIRE(db.point_masses.size() == 1);
  CHECK(db.point_masses[0].location == -1.0);
  CHECK(db.point_masses[0].weight == 1.0);
  CHECK(db.resonances[0].location == -1.0);

  const auto Z = build_perturbed_amplitude(ClosedForm::zero(), {0.0, 0.0}, std::nullopt, p);
  const auto dz = spectral_measure_diff(Z);
  CHECK(dz.density_diff(2.0) == 0.0);
  CHECK(dz.point_masses.empty());
  CHECK(dz.resonances.empty());
}

TEST_CASE("density change equals Im M / pi on the real axis") {
  const auto p = make_spectral_params(3, 0.5, 8);
  const auto A = build_perturbed_amplitude(ClosedForm::bargmann1(1.0, 0.5), {-0.3, -0.2, -0.1}, std::nullopt, p);
  const auto diff = spectral_measure_diff(A);
  for (double E : {0.01, 0.5, 3.0, 70.0}) {
    const double full = weyl_m_upper(A.base(), diff.c, diff.mu, E).imag() / pi;
    const double base = weyl_m_upper(A.base(), {}, {}, E).imag() / pi;
    CHECK(base_density(A.base(), E) == doctest::Approx(base).epsilon(1e-13));
    CHECK(diff.density_diff(E) == doctest::Approx(full - base).epsilon(1e-12));
    CHECK(base_nu_density(A.base(), std::sqrt(E)) == doctest::Approx(base * pi - std::sqrt(E)).epsilon(1e-12));
  }
  CHECK(base_density(ClosedForm::zero(), 4.0) == doctest::Approx(2.0 / pi));
}

TEST_CASE("point-mass weight equals the residue of M") {
  const auto q = make_spectral_params(5, -2.0, 4);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-0.7}, std::nullopt, q);
  const auto pm = spectral_measure_diff(A).point_masses.at(0);
  // M(z) ~ w / (E0 - z) near the eigenvalue
  for (double eta : {1e-4, 1e-5}) {
    const double kappa = 1.0 + eta;
    const double z = -kappa * kappa;
    const double dm = wt_from_amplitude(A, kappa).value + kappa;
    CHECK(dm * (pm.location - z) == doctest::Approx(pm.weight).epsilon(1e-3));
  }
}

TEST_CASE("resonance of the first family coincides with its Jost root") {
  const auto p = make_spectral_params(3, 0.5, 4);  // mu_0 = 2 gamma = 1
  const auto base = ClosedForm::bargmann1(1.0, 0.5);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {2.0 * (0.25 - 1.0)}, std::nullopt, p);
  const auto res = spectral_measure_diff(A).resonances;
  const auto roots = jost_roots(base, -5.0, 5.0);
  REQUIRE(res.size() == 1);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(res[0].location - roots[0]) <= 1e-12);
  // the zero base plus this single term is the first family itself
  for (double a : {0.0, 0.5, 2.0}) {
    CHECK(A(a) == doctest::Approx(Amplitude::base_only(base, p)(a)).epsilon(1e-15));
  }
}

TEST_CASE("positivity diagnostics") {
  const Eigen::VectorXd E = log_grid(1e-4, 1e6, 1000);
  const auto p = make_spectral_params(3, 0.5, 8);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {}, GeometricTail{1.0, 1.0 / 9.0}, p);
  const auto r = ks_check_positivity(A, E);
  CHECK(r.ok);
  CHECK(r.min_density >= 0.0);

  const auto B = build_perturbed_amplitude(ClosedForm::bargmann1(1.0, 0.5), {-1e-2, -1e-3}, std::nullopt, p);
  CHECK(ks_check_positivity(B, E).ok);

  // near E = 0 the ratio to the free density is 1 - 2 c_0 / mu_0^2, negative for c_0 = 3
  const auto bad = Amplitude::unchecked(ClosedForm::zero(), {3.0}, std::nullopt, make_spectral_params(3, 1.0, 4));
  const auto rb = ks_check_positivity(bad, E);
  CHECK_FALSE(rb.ok);
  CHECK(rb.min_density < 0.0);
  CHECK(rb.argmin_E < 1.0);

  const auto q = make_spectral_params(5, -2.0, 4);
  const auto neg = Amplitude::unchecked(ClosedForm::zero(), {0.5}, std::nullopt, q);
  CHECK(ks_check_positivity(neg, E).min_point_mass_weight < 0.0);
}

TEST_CASE("quasi-Szego decay") {
  const Eigen::VectorXd E = log_grid(1e-2, 1e6, 1000);
  const auto p0 = make_spectral_params(3, 0.0, 4);
  CHECK(ks_check_quasi_szego(Amplitude::base_only(ClosedForm::zero(), p0), E).identically_zero);

  const auto p = make_spectral_params(3, 1.0, 4);
  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-1.0}, std::nullopt, p);
  const auto r = ks_check_quasi_szego(A, E);
  CHECK_FALSE(r.identically_zero);
  CHECK(r.log_term_exponent == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(r.integrand_exponent == doctest::Approx(-1.5).epsilon(0.05));

  const auto B = build_perturbed_amplitude(ClosedForm::bargmann1(1.0, 0.5), {-0.1}, std::nullopt, p);
  CHECK(ks_check_quasi_szego(B, E).log_term_exponent == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("maximal function and normalization drift") {
  const auto p = make_spectral_params(3, 1.0, 4);
  const auto L = default_L_grid();
  REQUIRE(L.size() == 7);
  CHECK(L[0] == 1.0 / 64.0);
  CHECK(L[6] == 1.0);

  const auto Z = Amplitude::base_only(ClosedForm::zero(), p);
  CHECK(maximal_function(Z, 3.0, L, true) == 0.0);
  const Eigen::VectorXd k = log_grid(10.0, 1e4, 40);
  CHECK(ks_check_normalization(Z, k, L).identically_zero);

  const auto A = build_perturbed_amplitude(ClosedForm::zero(), {-1.0}, std::nullopt, p);
  // nu~ density is s / (2 s^2 + 2) here; at large k the average over [k - L, k + L] is ~ 1/(2k)
  CHECK(maximal_function(A, 1000.0, L, true) == doctest::Approx(1.0 / 2000.0).epsilon(1e-4));
  const auto r = ks_check_normalization(A, k, L);
  CHECK_FALSE(r.identically_zero);
  CHECK(r.drift_exponent == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(r.cauchy_ok);
  REQUIRE(r.partial_integrals.size() == r.k_max.size());
  CHECK(r.k_max.back() == 8192.0);
}
