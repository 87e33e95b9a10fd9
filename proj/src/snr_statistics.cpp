#include "irsperf/snr_statistics.hpp"

#include <cmath>
#include <vector>

#include "irsperf/errors.hpp"
#include "irsperf/quadrature.hpp"

namespace irsperf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2Pi = 2.506628274631000502415765284811045;

double binom(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

// G_k(c) = 2 * int_{-c}^inf t^k e^{-t^2} dt.
// Equals Gamma((k+1)/2, c^2) except for even k with c > 0, where the
// even-power part below zero contributes 2 Gamma((k+1)/2) - Gamma((k+1)/2, c^2).
double g_fun(int k, double c) {
    const double half = 0.5 * (k + 1);
    const double g_upper = upper_incomplete_gamma(half, c * c);
    if (k % 2 == 1 || c <= 0.0) return g_upper;
    return 2.0 * gamma_fn(half) - g_upper;
}

} // namespace

ProductChannelParams ProductChannelParams::make(double m_h, double m_g, double xi_h,
                                                double xi_g) {
    NakagamiParams{m_h, xi_h}.validate();
    NakagamiParams{m_g, xi_g}.validate();
    ProductChannelParams p{};
    if (m_h <= m_g) {
        p.m_s = m_h; p.xi_s = xi_h;
        p.m_l = m_g; p.xi_l = xi_g;
    } else {
        p.m_s = m_g; p.xi_s = xi_g;
        p.m_l = m_h; p.xi_l = xi_h;
    }
    p.alpha_prime = 4.0 / (gamma_fn(p.m_s) * gamma_fn(p.m_l)) *
                    std::pow(p.m_s * p.m_l / (p.xi_s * p.xi_l), 0.5 * (p.m_s + p.m_l));
    p.b_n = 2.0 * std::sqrt(p.m_s * p.m_l / (p.xi_s * p.xi_l));
    return p;
}

YGaussianApprox moment_match_y(const SystemConfig& cfg) {
    cfg.validate();
    YGaussianApprox g;
    if (cfg.reflected_paths() == 0) return g;  // degenerate, direct-only path
    const double l = cfg.elements_per_irs;
    for (int n = 0; n < cfg.n_irs; ++n) {
        const auto& h = cfg.nak_h[n];
        const auto& gg = cfg.nak_g[n];
        const double mean_z = envelope_moment(h, 1) * envelope_moment(gg, 1);
        const double mean_z2 = h.xi * gg.xi;  // E[a_h^2] E[a_g^2]
        g.mu_y += l * cfg.eta * mean_z;
        g.sigma_y2 += l * cfg.eta * cfg.eta * (mean_z2 - mean_z * mean_z);
    }
    g.psi = 1.0 / gaussian_q(-g.mu_y / std::sqrt(g.sigma_y2));
    return g;
}

double pdf_y(double y, const YGaussianApprox& g) {
    if (g.degenerate()) throw domain_error("pdf_y: degenerate approximation (N*L = 0)");
    if (y < 0.0) return 0.0;
    const double d = y - g.mu_y;
    return g.psi / std::sqrt(2.0 * kPi * g.sigma_y2) * std::exp(-d * d / (2.0 * g.sigma_y2));
}

RApproxParams r_params(const SystemConfig& cfg, const YGaussianApprox& g) {
    if (g.degenerate()) throw domain_error("r_params: degenerate approximation (N*L = 0)");
    if (!cfg.include_direct)
        throw domain_error("r_params: no direct link; R~ reduces to Y~");
    const double m = cfg.nak_u.m;
    const double xi = cfg.nak_u.xi;
    const double s2 = g.sigma_y2;
    RApproxParams rp;
    rp.a = m / xi + 1.0 / (2.0 * s2);
    rp.lambda = std::exp(m * std::log(m) + std::log(g.psi) - log_gamma(m) - m * std::log(xi) -
                         m * std::log(rp.a)) /
                std::sqrt(2.0 * kPi * s2);
    rp.delta = (1.0 / (2.0 * s2) - 1.0 / (4.0 * rp.a * s2 * s2)) * 4.0 * s2 * s2 * rp.a;
    return rp;
}

// ---------------------------------------------------------------------------
// SnrApprox
// ---------------------------------------------------------------------------

SnrApprox::SnrApprox(const SystemConfig& cfg, bool allow_quadrature_fallback) {
    cfg.validate();
    nak_u_ = cfg.nak_u;
    gamma_bar_ = cfg.gamma_bar;
    y_ = moment_match_y(cfg);

    if (cfg.reflected_paths() == 0) {
        mode_ = Mode::direct_only;
        return;
    }
    if (!cfg.include_direct) {
        mode_ = Mode::reflected_only;
        return;
    }
    rp_ = r_params(cfg, y_);
    if (is_integer(2.0 * nak_u_.m)) {
        mode_ = Mode::combined_closed;
        two_mu_ = static_cast<int>(std::round(2.0 * nak_u_.m));
    } else if (allow_quadrature_fallback) {
        mode_ = Mode::combined_quadrature;
        closed_form_ = false;
    } else {
        throw unsupported_parameter(
            "SnrApprox: closed form needs 2*m_u integer and the quadrature fallback is disabled");
    }
    // measured normalization of the closed form (the paper's psi enters lambda
    // but the convolution is never renormalized; the defect is O(Q(mu/sigma)))
    norm_ = tail_r_unnormalized(0.0);
    if (!(norm_ > 0.0) || !std::isfinite(norm_))
        throw consistency_error("SnrApprox: normalization of f_R is not finite and positive");
}

double SnrApprox::pdf_r_unnormalized(double x) const {
    const double q = 2.0 * y_.sigma_y2 * std::sqrt(rp_.a);
    const double c = (x - y_.mu_y) / q;
    if (mode_ == Mode::combined_quadrature) {
        // direct numerical convolution of the Nakagami density with the
        // untruncated psi-scaled Gaussian, the same object the closed form
        // represents
        const double sd = std::sqrt(y_.sigma_y2);
        const double lo = 0.0;
        const double hi = std::min(x + 10.0 * sd, x);  // envelope support is [0, x+...]
        (void)lo; (void)hi;
        const double m = nak_u_.m, xi = nak_u_.xi;
        const double norm_u = 2.0 * std::pow(m, m) / (gamma_fn(m) * std::pow(xi, m));
        auto f = [&](double u) {
            const double du = x - u - y_.mu_y;
            const double gauss =
                y_.psi / std::sqrt(2.0 * kPi * y_.sigma_y2) * std::exp(-du * du / (2.0 * y_.sigma_y2));
            return norm_u * std::pow(u, 2.0 * m - 1.0) * std::exp(-m * u * u / xi) * gauss;
        };
        const double up = envelope_moment(nak_u_, 1) + 10.0 * std::sqrt(nak_u_.xi);
        return integrate(f, 0.0, up, 1e-12, 1e-10).value;
    }
    double sum = 0.0;
    for (int k = 0; k < two_mu_; ++k)
        sum += binom(two_mu_ - 1, k) * std::pow(c, two_mu_ - 1 - k) * g_fun(k, c);
    return rp_.lambda * std::exp(-rp_.delta * c * c) * sum;
}

namespace {

// J_p(l) = int_l^inf e^{-Delta t^2} t^{2 ge - 1} Gamma(kappa, t^2) dt for
// l >= 0, even k, integer gamma_e = m_u - k/2 (by-parts expansion).
double jp_even(double l, int k, int gamma_e, double delta) {
    const double kap = 0.5 * (k + 1);
    const double l2 = l * l;
    const double g_kap_l2 = upper_incomplete_gamma(kap, l2);
    double tot = 0.0;
    for (int j = 0; j < gamma_e; ++j) {
        const double t1 = std::pow(l2, j) * std::exp(-delta * l2) * g_kap_l2;
        const double t2 = upper_incomplete_gamma(j + kap, (delta + 1.0) * l2) /
                          std::pow(delta + 1.0, j + kap);
        tot += std::pow(delta, j - gamma_e) / std::exp(std::lgamma(j + 1.0)) * (t1 - t2);
    }
    return 0.5 * std::exp(std::lgamma(gamma_e)) * tot;
}

// I_k for odd k: Gamma(kappa, t^2) expands exactly; gamma_o = (k+1)/2.
double ik_odd(double l, int k, double m_u, double delta) {
    const int gamma_o = (k + 1) / 2;
    const bool power_even = (static_cast<int>(std::llround(2.0 * m_u)) - 1 - k) % 2 == 0;
    double tot = 0.0;
    for (int i = 0; i < gamma_o; ++i) {
        const double arg = m_u + i - 0.5 * k;
        const double g_upper = upper_incomplete_gamma(arg, (delta + 1.0) * l * l);
        // below mu_Y the even-power integrand folds back with both incomplete
        // gamma pieces; an odd power cancels over (l, -l)
        const double term = (l >= 0.0 || !power_even) ? g_upper : 2.0 * gamma_fn(arg) - g_upper;
        tot += std::pow(delta + 1.0, 0.5 * k - m_u - i) / std::exp(std::lgamma(i + 1.0)) * term;
    }
    return 0.5 * std::exp(std::lgamma(gamma_o)) * tot;
}

// I_k for even k.  The exact integrand carries
//   G_k(t) = Gamma(kappa,t^2) + [t>0] * 2 gamma(kappa, t^2),
// handled as a closed form for l >= 0 plus a finite-interval quadrature
// below mu_Y (the part-by-part expansion is ambiguous for negative limits).
double ik_even(double l, int k, double m_u, double delta) {
    const double kap = 0.5 * (k + 1);
    const double ge_real = m_u - 0.5 * k;
    const int two_mu = static_cast<int>(std::llround(2.0 * m_u));
    const int e_pow = two_mu - 1 - k;  // power of t in the integrand

    if (is_integer(ge_real)) {
        const int ge = static_cast<int>(std::round(ge_real));
        if (l >= 0.0) {
            return gamma_fn(kap) * upper_incomplete_gamma(ge, delta * l * l) /
                       std::pow(delta, ge) -
                   jp_even(l, k, ge, delta);
        }
        const double at_zero =
            gamma_fn(kap) * gamma_fn(ge) / std::pow(delta, ge) - jp_even(0.0, k, ge, delta);
        auto f = [&](double t) {
            return std::exp(-delta * t * t) * std::pow(t, e_pow) *
                   upper_incomplete_gamma(kap, t * t);
        };
        return integrate(f, l, 0.0, 1e-13, 1e-11).value + at_zero;
    }

    // half-integer m_u: no finite by-parts expansion; quadrature with the
    // non-decaying part of G_k split off analytically.  The regularized
    // integrand jumps at t = 0, so integrate the two sides separately.
    const double two_gamma_kap = 2.0 * gamma_fn(kap);
    auto f = [&](double t) {
        const double g = g_fun(k, t) - (t > 0.0 ? two_gamma_kap : 0.0);
        return std::exp(-delta * t * t) * std::pow(t, e_pow) * g;
    };
    const double upper = std::max(l, 0.0) + 12.0 / std::sqrt(delta + 1.0);
    double v = 0.0;
    if (l < 0.0) {
        v += integrate(f, l, 0.0, 1e-13, 1e-11).value;
        v += integrate(f, 0.0, upper, 1e-13, 1e-11).value;
    } else {
        v += integrate(f, l, upper, 1e-13, 1e-11).value;
    }
    const double l0 = std::max(l, 0.0);
    const double gexp = 0.5 * (e_pow + 1);
    v += two_gamma_kap * 0.5 * upper_incomplete_gamma(gexp, delta * l0 * l0) /
         std::pow(delta, gexp);
    return v;
}

} // namespace

double SnrApprox::tail_r_unnormalized(double x) const {
    if (mode_ == Mode::combined_quadrature) {
        auto f = [this](double u) { return pdf_r_unnormalized(u); };
        const double sd = std::sqrt(y_.sigma_y2 + nak_u_.xi);
        const double upper = y_.mu_y + envelope_moment(nak_u_, 1) + 14.0 * sd;
        if (x >= upper) return 0.0;
        return integrate(f, x, upper, 1e-12, 1e-10).value;
    }
    const double q = 2.0 * y_.sigma_y2 * std::sqrt(rp_.a);
    const double l = (x - y_.mu_y) / q;
    double tot = 0.0;
    for (int k = 0; k < two_mu_; ++k) {
        const double ik = (k % 2 == 1) ? ik_odd(l, k, nak_u_.m, rp_.delta)
                                       : ik_even(l, k, nak_u_.m, rp_.delta);
        tot += binom(two_mu_ - 1, k) * ik;
    }
    return rp_.lambda * q * tot;
}

double SnrApprox::pdf_r(double x) const {
    if (x < 0.0) return 0.0;
    switch (mode_) {
        case Mode::direct_only: {
            const double m = nak_u_.m, xi = nak_u_.xi;
            return std::exp(m * std::log(m) + std::log(2.0) + (2.0 * m - 1.0) * std::log(x) -
                            log_gamma(m) - m * std::log(xi) - m * x * x / xi);
        }
        case Mode::reflected_only:
            return pdf_y(x, y_);
        default:
            return pdf_r_unnormalized(x) / norm_;
    }
}

double SnrApprox::cdf_r(double x) const {
    if (x <= 0.0) return 0.0;
    switch (mode_) {
        case Mode::direct_only:
            return reg_gamma_p(nak_u_.m, nak_u_.m * x * x / nak_u_.xi);
        case Mode::reflected_only: {
            const double sd = std::sqrt(y_.sigma_y2);
            return y_.psi * (gaussian_q(-y_.mu_y / sd) - gaussian_q((x - y_.mu_y) / sd));
        }
        default: {
            const double t = tail_r_unnormalized(x) / norm_;
            return std::min(1.0, std::max(0.0, 1.0 - t));
        }
    }
}

double SnrApprox::pdf_snr(double y_snr) const {
    if (y_snr <= 0.0) return 0.0;
    const double root = std::sqrt(y_snr / gamma_bar_);
    return pdf_r(root) / (2.0 * std::sqrt(gamma_bar_ * y_snr));
}

double SnrApprox::cdf_snr(double y_snr) const {
    if (y_snr <= 0.0) return 0.0;
    return cdf_r(std::sqrt(y_snr / gamma_bar_));
}

// ---------------------------------------------------------------------------
// Free-function forms
// ---------------------------------------------------------------------------

namespace {
SnrApprox make_approx(const SystemConfig& cfg, const YGaussianApprox&, const RApproxParams&) {
    return SnrApprox(cfg);
}
} // namespace

double pdf_r(double x, const SystemConfig& cfg, const YGaussianApprox& g, const RApproxParams& rp) {
    return make_approx(cfg, g, rp).pdf_r(x);
}
double cdf_r(double x, const SystemConfig& cfg, const YGaussianApprox& g, const RApproxParams& rp) {
    return make_approx(cfg, g, rp).cdf_r(x);
}
double pdf_snr(double y_snr, const SystemConfig& cfg, const YGaussianApprox& g,
               const RApproxParams& rp) {
    return make_approx(cfg, g, rp).pdf_snr(y_snr);
}
double cdf_snr(double y_snr, const SystemConfig& cfg, const YGaussianApprox& g,
               const RApproxParams& rp) {
    return make_approx(cfg, g, rp).cdf_snr(y_snr);
}

// ---------------------------------------------------------------------------
// Product channel
// ---------------------------------------------------------------------------

double product_pdf_exact(double x, const ProductChannelParams& p) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        // x^(ms+ml-1) K_{ms-ml}(b x) ~ x^(2 ms - 1) near 0: finite only for ms > 1/2
        return p.m_s > 0.5 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return p.alpha_prime * std::pow(x, p.m_s + p.m_l - 1.0) *
           bessel_k(p.m_s - p.m_l, p.b_n * x);
}

double kl_divergence_product(const ProductChannelParams& p) {
    const double mean_z = envelope_moment({p.m_s, p.xi_s}, 1) * envelope_moment({p.m_l, p.xi_l}, 1);
    const double mean_z2 = p.xi_s * p.xi_l;
    const double var_z = mean_z2 - mean_z * mean_z;
    const double sd = std::sqrt(var_z);
    const double psi = 1.0 / gaussian_q(-mean_z / sd);
    auto integrand = [&](double x) {
        const double fe = product_pdf_exact(x, p);
        if (fe <= 0.0) return 0.0;
        const double d = x - mean_z;
        const double fa = psi / (kSqrt2Pi * sd) * std::exp(-d * d / (2.0 * var_z));
        return fe * std::log(fe / fa);
    };
    const double upper = mean_z + 24.0 * sd;
    QuadResult r = integrate(integrand, 0.0, upper, 1e-11, 1e-9, 6000);
    if (!r.converged)
        throw accuracy_error("kl_divergence_product: quadrature did not converge", r.value,
                             r.error);
    return r.value;
}

} // namespace irsperf
