#pragma once

#include <cstdint>

namespace irsperf {

// Tolerances shared by the scalar special functions.
struct Tolerances {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_terms = 500;
};

inline constexpr Tolerances kDefaultTol{};

// Gamma function, x > 0.  Throws domain_error at nonpositive integers.
double gamma_fn(double x, const Tolerances& tol = kDefaultTol);

// log Gamma(x), x > 0.
double log_gamma(double x);

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt, a > 0, x >= 0.
// Series for x < a+1, continued fraction otherwise.
double upper_incomplete_gamma(double a, double x, const Tolerances& tol = kDefaultTol);

// Lower incomplete gamma gamma(a, x) = Gamma(a) - Gamma(a, x).
double lower_incomplete_gamma(double a, double x, const Tolerances& tol = kDefaultTol);

// Regularized versions: Q(a,x) = Gamma(a,x)/Gamma(a), P(a,x) = 1 - Q(a,x).
// Stable for large x where the non-regularized value underflows.
double reg_gamma_q(double a, double x, const Tolerances& tol = kDefaultTol);
double reg_gamma_p(double a, double x, const Tolerances& tol = kDefaultTol);

// Gaussian Q-function Q(x) = P(N(0,1) > x), via erfc.
double gaussian_q(double x);

// Scaled complementary error function exp(x^2) erfc(x), x >= -26.
double erfcx_fn(double x);

// Exponential-type approximation of the Gaussian Q-function,
// Q(x) ~ exp(-c x^2 - d x)/2 with c = 0.374, d = 0.777.  Valid for x >= 0.
double q_exp_approx(double x);

// Modified Bessel function of the second kind, real order, x > 0.
// Series (Temme) for x <= 2, continued fraction for x > 2, with upward
// recurrence in the order.  K_nu = K_{-nu}.
double bessel_k(double nu, double x, const Tolerances& tol = kDefaultTol);

// Same function evaluated from the integral representation
// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.  Slow; used to
// cross-check bessel_k.
double bessel_k_integral(double nu, double x, const Tolerances& tol = kDefaultTol);

// Gauss hypergeometric function F(a,b;c;z) for z in [0,1).
// Throws domain_error when c is a nonpositive integer or when the series
// diverges at z -> 1 (c-a-b <= 0 with z too close to 1).
double gauss_2f1(double a, double b, double c, double z, const Tolerances& tol = kDefaultTol);

} // namespace irsperf
