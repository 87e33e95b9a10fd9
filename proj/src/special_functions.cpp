#include "irsperf/special_functions.hpp"

#include <cmath>
#include <limits>

#include "irsperf/errors.hpp"
#include "irsperf/quadrature.hpp"

namespace irsperf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Raw series sum S with gamma(a,x) = x^a e^-x S, good for x < a+1.
double lower_gamma_series_sum(double a, double x, const Tolerances& tol) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < tol.max_terms; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * tol.rel_tol) return sum;
    }
    throw accuracy_error("lower incomplete gamma series did not converge", sum, std::abs(term));
}

double lower_gamma_series(double a, double x, const Tolerances& tol) {
    return lower_gamma_series_sum(a, x, tol) * std::exp(-x + a * std::log(x));
}

// Modified Lentz continued fraction for Gamma(a,x)/(x^a e^-x), good for x >= a+1.
double upper_gamma_cf(double a, double x, const Tolerances& tol) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= tol.max_terms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < tol.rel_tol) {
            return h * std::exp(-x + a * std::log(x));
        }
    }
    throw accuracy_error("upper incomplete gamma continued fraction did not converge",
                         h * std::exp(-x + a * std::log(x)), std::abs(h));
}

} // namespace

double gamma_fn(double x, const Tolerances&) {
    if (x <= 0.0 && x == std::floor(x))
        throw domain_error("gamma_fn: pole at nonpositive integer argument");
    if (x <= 0.0)
        throw domain_error("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (x <= 0.0)
        throw domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

double upper_incomplete_gamma(double a, double x, const Tolerances& tol) {
    if (a <= 0.0) throw domain_error("upper_incomplete_gamma: a must be positive");
    if (x < 0.0) throw domain_error("upper_incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return gamma_fn(a);
    if (x < a + 1.0) return gamma_fn(a) - lower_gamma_series(a, x, tol);
    return upper_gamma_cf(a, x, tol);
}

double lower_incomplete_gamma(double a, double x, const Tolerances& tol) {
    if (a <= 0.0) throw domain_error("lower_incomplete_gamma: a must be positive");
    if (x < 0.0) throw domain_error("lower_incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_gamma_series(a, x, tol);
    return gamma_fn(a) - upper_gamma_cf(a, x, tol);
}

double reg_gamma_q(double a, double x, const Tolerances& tol) {
    if (a <= 0.0) throw domain_error("reg_gamma_q: a must be positive");
    if (x < 0.0) throw domain_error("reg_gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0)
        return 1.0 - lower_gamma_series_sum(a, x, tol) * std::exp(a * std::log(x) - x - lg);
    // scaled continued fraction: Q = cf * exp(a ln x - x - lnGamma(a))
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= tol.max_terms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < tol.rel_tol)
            return h * std::exp(-x + a * std::log(x) - lg);
    }
    throw accuracy_error("reg_gamma_q continued fraction did not converge", h, 0.0);
}

double reg_gamma_p(double a, double x, const Tolerances& tol) {
    return 1.0 - reg_gamma_q(a, x, tol);
}

double gaussian_q(double x) {
    return 0.5 * std::erfc(x * 0.7071067811865475244);
}

double erfcx_fn(double x) {
    if (x < -26.0)
        throw domain_error("erfcx_fn: argument too negative, result overflows");
    if (x <= 25.0)
        return std::exp(x * x) * std::erfc(x);
    // asymptotic series, |error| < last term; converges fast for x > 25
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 12; ++n) {
        term *= -(2.0 * n - 1.0) * inv2x2;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / (x * std::sqrt(kPi));
}

double q_exp_approx(double x) {
    if (x < 0.0)
        throw domain_error("q_exp_approx: valid for x >= 0 only");
    return 0.5 * std::exp(-0.374 * x * x - 0.777 * x);
}

namespace {

// Temme's series for K_nu, K_{nu+1} with |nu| <= 1/2, 0 < x <= 2.
// NR-style: uses Chebyshev fits for 1/Gamma(1 +- nu) combinations.
void bessel_k_temme(double nu, double x, double& k0, double& k1, const Tolerances& tol) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * nu;
    const double fact = (std::abs(pimu) < 1e-9) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = nu * d;
    const double fact2 = (std::abs(e) < 1e-9) ? 1.0 : std::sinh(e) / e;
    // gam1 = (1/Gamma(1-nu) - 1/Gamma(1+nu)) / (2 nu)  ->  -EulerGamma as nu -> 0
    // gam2 = (1/Gamma(1-nu) + 1/Gamma(1+nu)) / 2
    const double g_plus = std::tgamma(1.0 + nu);
    const double g_minus = std::tgamma(1.0 - nu);
    const double gam1 = (std::abs(nu) < 1e-7)
                            ? -0.5772156649015328606
                            : (1.0 / g_minus - 1.0 / g_plus) / (2.0 * nu);
    const double gam2 = 0.5 * (1.0 / g_minus + 1.0 / g_plus);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e * g_plus;
    double q = 0.5 / e * g_minus;
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i;
    for (i = 1; i <= tol.max_terms; ++i) {
        ff = (i * ff + p + q) / (i * i - nu * nu);
        c *= d / i;
        p /= (i - nu);
        q /= (i + nu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * tol.rel_tol) break;
    }
    if (i > tol.max_terms)
        throw accuracy_error("bessel_k: Temme series did not converge", sum, 0.0);
    k0 = sum;
    k1 = sum1 * (2.0 / x);
}

// Steed/Thompson-Barnett CF2 for K_nu, K_{nu+1} with |nu| <= 1/2, x > 2.
void bessel_k_cf2(double nu, double x, double& k0, double& k1, const Tolerances& tol) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - nu * nu;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i;
    for (i = 2; i <= tol.max_terms; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < tol.rel_tol) break;
    }
    if (i > tol.max_terms)
        throw accuracy_error("bessel_k: CF2 did not converge", s, 0.0);
    h = a1 * h;
    k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    k1 = k0 * (nu + x + 0.5 - h) / x;
}

} // namespace

double bessel_k(double nu, double x, const Tolerances& tol) {
    if (x <= 0.0) throw domain_error("bessel_k: x must be positive");
    nu = std::abs(nu);  // K_nu = K_{-nu}
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;  // |mu| <= 1/2
    double k0, k1;
    if (x <= 2.0)
        bessel_k_temme(mu, x, k0, k1, tol);
    else
        bessel_k_cf2(mu, x, k0, k1, tol);
    // upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m
    double kmu = k0, kmup1 = k1;
    double m = mu;
    for (int i = 0; i < nl; ++i) {
        const double knext = kmu + (m + 1.0) * 2.0 / x * kmup1;
        kmu = kmup1;
        kmup1 = knext;
        m += 1.0;
    }
    return kmu;
}

double bessel_k_integral(double nu, double x, const Tolerances& tol) {
    if (x <= 0.0) throw domain_error("bessel_k_integral: x must be positive");
    nu = std::abs(nu);
    // K_nu(x) = int_0^T exp(-x cosh t) cosh(nu t) dt with T chosen so the
    // integrand underflows: x cosh T - nu T > 745.
    double t_max = 2.0;
    while (x * std::cosh(t_max) - nu * t_max < 745.0 && t_max < 60.0) t_max += 0.5;
    auto f = [nu, x](double t) {
        const double expo = -x * std::cosh(t);
        if (expo < -745.0) return 0.0;
        return std::exp(expo) * std::cosh(nu * t);
    };
    const QuadResult r = integrate(f, 0.0, t_max, tol.abs_tol, tol.rel_tol, 4000);
    if (!r.converged)
        throw accuracy_error("bessel_k_integral: quadrature did not converge", r.value, r.error);
    return r.value;
}

double gauss_2f1(double a, double b, double c, double z, const Tolerances& tol) {
    if (c <= 0.0 && c == std::floor(c))
        throw domain_error("gauss_2f1: c must not be a nonpositive integer");
    if (z < 0.0 || z >= 1.0)
        throw domain_error("gauss_2f1: z must lie in [0,1)");
    // polynomial cases terminate regardless of z
    const bool poly = (a <= 0.0 && a == std::floor(a)) || (b <= 0.0 && b == std::floor(b));
    if (!poly && c - a - b <= 0.0 && z > 0.95)
        throw domain_error("gauss_2f1: series diverges at z -> 1 for c-a-b <= 0");
    // plain series; converges for z < 1, slowly near 1 (raise max_terms there)
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < tol.max_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) < std::abs(sum) * tol.rel_tol) return sum;
        if (term == 0.0) return sum;  // terminated polynomial
    }
    throw accuracy_error("gauss_2f1: series did not converge", sum, std::abs(term));
}

} // namespace irsperf
