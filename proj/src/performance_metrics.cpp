#include "irsperf/performance_metrics.hpp"

#include <cmath>
#include <limits>

#include "irsperf/errors.hpp"
#include "irsperf/quadrature.hpp"

namespace irsperf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrtPi = 1.772453850905516027298167483341145;
constexpr double kQc = 0.374;  // Q(x) ~ exp(-c x^2 - d x)/2
constexpr double kQd = 0.777;

double binom(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

} // namespace

void SerModulation::validate() const {
    if (!(omega > 0.0) || !(vartheta > 0.0))
        throw domain_error("SerModulation: omega and vartheta must be positive");
}

void ImperfectCsi::validate(const SystemConfig& cfg) const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw domain_error("ImperfectCsi: rho must be in [0,1]");
    if (beta_u2 < 0.0) throw domain_error("ImperfectCsi: beta_u2 must be >= 0");
    if (static_cast<int>(beta_h2.size()) != cfg.n_irs ||
        static_cast<int>(beta_g2.size()) != cfg.n_irs)
        throw domain_error("ImperfectCsi: need one beta^2 row per IRS");
    for (const auto& row : beta_h2) {
        if (static_cast<int>(row.size()) != cfg.elements_per_irs)
            throw domain_error("ImperfectCsi: need one beta_h^2 per element");
        for (double b : row)
            if (b < 0.0) throw domain_error("ImperfectCsi: beta^2 entries must be >= 0");
    }
    for (const auto& row : beta_g2) {
        if (static_cast<int>(row.size()) != cfg.elements_per_irs)
            throw domain_error("ImperfectCsi: need one beta_g^2 per element");
        for (double b : row)
            if (b < 0.0) throw domain_error("ImperfectCsi: beta^2 entries must be >= 0");
    }
}

ImperfectCsi ImperfectCsi::uniform(const SystemConfig& cfg, double rho, double beta2) {
    ImperfectCsi csi;
    csi.rho = rho;
    csi.beta_u2 = cfg.include_direct ? beta2 : 0.0;
    csi.beta_h2.assign(cfg.n_irs, std::vector<double>(cfg.elements_per_irs, beta2));
    csi.beta_g2.assign(cfg.n_irs, std::vector<double>(cfg.elements_per_irs, beta2));
    csi.validate(cfg);
    return csi;
}

double outage_probability(double gamma_th, const SnrApprox& stats) {
    if (gamma_th < 0.0) throw domain_error("outage_probability: gamma_th must be >= 0");
    return stats.cdf_snr(gamma_th);
}

namespace {

// I(m, t) = 2 int_t^inf s^m e^{-s^2} ds
double i_helper(int m, double t) {
    const double half = 0.5 * (m + 1);
    if (t <= 0.0) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        return sign * lower_incomplete_gamma(half, t * t) + gamma_fn(half);
    }
    return upper_incomplete_gamma(half, t * t);
}

} // namespace

double moments_y_truncated(const YGaussianApprox& g, int n) {
    if (n < 0 || n > 4) throw domain_error("moments_y_truncated: n must be in 0..4");
    if (g.degenerate()) return n == 0 ? 1.0 : 0.0;
    const double t0 = -g.mu_y / std::sqrt(2.0 * g.sigma_y2);
    double tot = 0.0;
    for (int i = 0; i <= n; ++i) {
        tot += binom(n, i) * std::pow(2.0 * g.sigma_y2, 0.5 * (n - i)) * std::pow(g.mu_y, i) *
               i_helper(n - i, t0);
    }
    return g.psi / (2.0 * kSqrtPi) * tot;
}

double expected_snr(const SystemConfig& cfg, const YGaussianApprox& g) {
    cfg.validate();
    double mu_u = 0.0, su2 = 0.0;
    if (cfg.include_direct) {
        const MeanVar mv = direct_mean_var(cfg.nak_u);
        mu_u = mv.mean;
        su2 = mv.var;
    }
    return cfg.gamma_bar *
           (su2 + g.sigma_y2 + 2.0 * mu_u * g.mu_y + mu_u * mu_u + g.mu_y * g.mu_y);
}

double rate_upper(const SystemConfig& cfg, const YGaussianApprox& g) {
    return std::log2(1.0 + expected_snr(cfg, g));
}

double rate_lower(const SystemConfig& cfg, const YGaussianApprox& g) {
    const double mean_snr = expected_snr(cfg, g);
    // E[R~^4] by the binomial expansion over direct and reflected moments
    double er4 = 0.0;
    for (int n = 0; n <= 4; ++n) {
        const double mom_u =
            cfg.include_direct ? envelope_moment(cfg.nak_u, 4 - n) : (n == 4 ? 1.0 : 0.0);
        er4 += binom(4, n) * mom_u * moments_y_truncated(g, n);
    }
    const double var_snr = cfg.gamma_bar * cfg.gamma_bar * er4 - mean_snr * mean_snr;
    const double inv_mean = 1.0 / mean_snr + var_snr / (mean_snr * mean_snr * mean_snr);
    if (!(inv_mean > 0.0))
        throw numerical_validity_error("rate_lower: surrogate E[1/gamma] is nonpositive");
    return std::log2(1.0 + 1.0 / inv_mean);
}

double rate_asymptotic_large_l(const SystemConfig& cfg, double gamma_bar_e) {
    cfg.validate();
    if (!(gamma_bar_e > 0.0))
        throw domain_error("rate_asymptotic_large_l: gamma_bar_e must be positive");
    double mu_bar = 0.0;
    for (int n = 0; n < cfg.n_irs; ++n)
        mu_bar += cfg.eta * envelope_moment(cfg.nak_h[n], 1) * envelope_moment(cfg.nak_g[n], 1);
    return std::log2(1.0 + gamma_bar_e * mu_bar * mu_bar);
}

// ---------------------------------------------------------------------------
// Average SER, closed form
// ---------------------------------------------------------------------------

namespace {

// int_{p2}^inf t^j e^{-v2 t^2} dt
double ib_term(int j, double p2, double v2) {
    const double half = 0.5 * (j + 1);
    const double z = v2 * p2 * p2;
    double val;
    if (p2 > 0.0) {
        val = upper_incomplete_gamma(half, z);
    } else {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        val = sign * lower_incomplete_gamma(half, z) + gamma_fn(half);
    }
    return val / (2.0 * std::pow(v2, half));
}

struct SerWorkspace {
    double a1, big_d, s, r, v1, u1, v2, u2, p, p2, qb, log_c, e2;
};

SerWorkspace ser_workspace(double vartheta, double gamma_bar, double m, double xi,
                           const YGaussianApprox& g) {
    SerWorkspace w{};
    const double tb2 = vartheta * gamma_bar;       // vartheta_b^2
    const double tb = std::sqrt(tb2);
    const double s2 = g.sigma_y2;
    w.a1 = kQc * tb2 + 1.0 / (2.0 * s2);
    w.big_d = kQd * tb - g.mu_y / s2;
    w.s = kQc * tb2 / std::sqrt(w.a1);
    w.r = w.big_d / (2.0 * std::sqrt(w.a1));
    w.v1 = kQc * tb2 - kQc * kQc * tb2 * tb2 / w.a1 + m / xi;
    w.u1 = kQd * tb - kQc * tb2 / w.a1 * w.big_d;
    w.v2 = w.v1 + w.s * w.s;  // equals c tb^2 + m/xi
    w.u2 = w.u1 + 2.0 * w.s * w.r;  // equals d tb
    w.p = w.u1 / (2.0 * w.v1);
    w.p2 = w.u2 / (2.0 * w.v2);
    w.qb = w.p - w.p2;
    w.log_c = std::log(g.psi) + m * std::log(m) - std::lgamma(m) - m * std::log(xi) -
              0.5 * std::log(2.0 * s2 * w.a1) - std::log(2.0) -
              g.mu_y * g.mu_y / (2.0 * s2) + w.big_d * w.big_d / (4.0 * w.a1) +
              w.u1 * w.u1 / (4.0 * w.v1);
    w.e2 = w.u2 * w.u2 / (4.0 * w.v2) - w.u1 * w.u1 / (4.0 * w.v1) - w.r * w.r;
    return w;
}

// W_0 = int_0^inf e^{-v1 (a+p)^2} erfc(s a + r) da, adaptive quadrature.
double w0_base(const SerWorkspace& w) {
    auto f = [&w](double al) {
        const double z = al + w.p;
        const double e = -w.v1 * z * z;
        if (e < -745.0) return 0.0;
        return std::exp(e) * std::erfc(w.s * al + w.r);
    };
    const double upper = std::max(0.0, -w.p) + 14.0 / std::sqrt(w.v1);
    return integrate(f, 0.0, upper, 1e-16, 1e-12).value;
}

} // namespace

SerEstimate average_ser_detailed(const SystemConfig& cfg, const YGaussianApprox& g,
                                 const SerModulation& mod) {
    cfg.validate();
    mod.validate();
    if (g.degenerate() || !cfg.include_direct || !std::isfinite(g.psi)) {
        // closed form covers the combined direct+reflected case only
        return {average_ser_quadrature(cfg, g, mod), true};
    }
    const double m = cfg.nak_u.m;
    if (std::abs(2.0 * m - std::llround(2.0 * m)) > 1e-9)
        return {average_ser_quadrature(cfg, g, mod), true};
    const int big_k = static_cast<int>(std::llround(2.0 * m));

    const SerWorkspace w = ser_workspace(mod.vartheta, cfg.gamma_bar, m, cfg.nak_u.xi, g);
    if (!(w.v1 > 0.0) || !(w.v2 > 0.0) || !(w.a1 > 0.0) || !std::isfinite(w.log_c))
        return {average_ser_quadrature(cfg, g, mod), true};

    const double erfc_r = std::erfc(w.r);
    const double exp_v1p2 = std::exp(-w.v1 * w.p * w.p);
    const double exp_e2 = std::exp(w.e2);

    std::vector<double> big_w(big_k, 0.0);
    for (int k = 0; k < big_k; ++k) {
        if (k == 0) {
            big_w[0] = w0_base(w);
            continue;
        }
        double v_sum = 0.0;  // int_0^inf (a+p)^{k-1} e^{-v1(a+p)^2 - (s a + r)^2} da
        for (int t = 0; t <= k - 1; ++t)
            v_sum += binom(k - 1, t) * std::pow(w.qb, k - 1 - t) * ib_term(t, w.p2, w.v2);
        const double prev = (k >= 2) ? big_w[k - 2] : 0.0;
        big_w[k] = std::pow(w.p, k - 1) * exp_v1p2 * erfc_r / (2.0 * w.v1) +
                   (k - 1) / (2.0 * w.v1) * prev -
                   w.s / (w.v1 * kSqrtPi) * exp_e2 * v_sum;
    }
    double total = 0.0;
    for (int k = 0; k < big_k; ++k)
        total += binom(big_k - 1, k) * std::pow(-w.p, big_k - 1 - k) * big_w[k];
    double ser = mod.omega * std::exp(w.log_c) * total;
    if (!std::isfinite(ser))
        return {average_ser_quadrature(cfg, g, mod), true};
    // clamp to the valid range of an error probability under this model
    ser = std::min(std::max(ser, 0.0), 0.5 * mod.omega);
    return {ser, false};
}

double average_ser(const SystemConfig& cfg, const YGaussianApprox& g, const SerModulation& mod) {
    return average_ser_detailed(cfg, g, mod).value;
}

double average_ser_quadrature(const SystemConfig& cfg, const YGaussianApprox& g,
                              const SerModulation& mod, bool exact_q) {
    cfg.validate();
    mod.validate();
    const double tb = std::sqrt(mod.vartheta * cfg.gamma_bar);
    auto q_of = [&](double x) { return exact_q ? gaussian_q(x) : q_exp_approx(x); };

    if (g.degenerate()) {
        // direct only: single expectation over the Nakagami envelope
        const double m = cfg.nak_u.m, xi = cfg.nak_u.xi;
        auto f = [&](double a) {
            const double pdf = std::exp(m * std::log(m) + std::log(2.0) +
                                        (2.0 * m - 1.0) * std::log(a) - std::lgamma(m) -
                                        m * std::log(xi) - m * a * a / xi);
            return q_of(tb * a) * pdf;
        };
        const double upper = envelope_moment(cfg.nak_u, 1) + 12.0 * std::sqrt(xi);
        return mod.omega * integrate(f, 1e-300, upper, 1e-320, 1e-11).value;
    }

    // pure relative tolerance control: the integrals span many orders of
    // magnitude across configurations and absolute exits would destroy the
    // relative accuracy of tiny error rates
    const double sd = std::sqrt(g.sigma_y2);
    auto inner = [&](double a) {
        auto f = [&](double y) { return q_of(tb * (a + y)) * pdf_y(y, g); };
        const double upper = g.mu_y + 12.0 * sd;
        return integrate(f, 0.0, upper, 1e-320, 1e-11).value;
    };
    if (!cfg.include_direct) return mod.omega * inner(0.0);

    const double m = cfg.nak_u.m, xi = cfg.nak_u.xi;
    auto f2 = [&](double a) {
        const double pdf = std::exp(m * std::log(m) + std::log(2.0) +
                                    (2.0 * m - 1.0) * std::log(a) - std::lgamma(m) -
                                    m * std::log(xi) - m * a * a / xi);
        return pdf <= 0.0 ? 0.0 : inner(a) * pdf;
    };
    const double upper = envelope_moment(cfg.nak_u, 1) + 12.0 * std::sqrt(xi);
    return mod.omega * integrate(f2, 1e-320, upper, 1e-320, 1e-10, 2000).value;
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

double diversity_order(const SystemConfig& cfg) {
    cfg.validate();
    double gd = cfg.include_direct ? cfg.nak_u.m : 0.0;
    for (int n = 0; n < cfg.n_irs; ++n)
        gd += cfg.elements_per_irs * std::min(cfg.nak_h[n].m, cfg.nak_g[n].m);
    return gd;
}

double log_theta_n(const ProductChannelParams& p) {
    if (p.m_s >= p.m_l)
        throw unsupported_parameter(
            "theta_n: equal shapes hit the logarithmic singularity of the z->1 limit");
    // alpha' sqrt(pi) (2 b_n)^(m_s - m_l) G(2 m_s) G(2 m_l - 2 m_s) / G(m_l - m_s + 1/2)
    return std::log(p.alpha_prime) + 0.5 * std::log(kPi) +
           (p.m_s - p.m_l) * std::log(2.0 * p.b_n) + std::lgamma(2.0 * p.m_s) +
           std::lgamma(2.0 * p.m_l - 2.0 * p.m_s) - std::lgamma(p.m_l - p.m_s + 0.5);
}

double theta_n(const ProductChannelParams& p) {
    return std::exp(log_theta_n(p));
}

namespace {

struct LogAsym {
    double g_d, log_omega, log_phi;
};

LogAsym log_asymptotics(const SystemConfig& cfg) {
    cfg.validate();
    if (!cfg.include_direct)
        throw unsupported_parameter(
            "asymptotic outage/SER expansion requires the direct link (R = alpha_u + Y)");
    LogAsym a{};
    a.g_d = diversity_order(cfg);
    const double m = cfg.nak_u.m, xi = cfg.nak_u.xi;
    a.log_omega = std::log(2.0) + m * std::log(m) + std::lgamma(2.0 * m) -
                  std::log(2.0 * a.g_d) - std::lgamma(m) - m * std::log(xi) -
                  std::lgamma(2.0 * a.g_d);
    a.log_phi = 0.0;
    for (int n = 0; n < cfg.n_irs; ++n) {
        const auto p = ProductChannelParams::make(cfg.nak_h[n].m, cfg.nak_g[n].m,
                                                  cfg.nak_h[n].xi, cfg.nak_g[n].xi);
        // per-element constant of M_{eta z}(s) = M_z(eta s): theta_n eta^(-2 m_s)
        a.log_phi += cfg.elements_per_irs * (log_theta_n(p) - 2.0 * p.m_s * std::log(cfg.eta));
    }
    return a;
}

} // namespace

std::pair<double, AsymptoticOutage> asymptotic_outage(double gamma_th, double gamma_bar,
                                                      const SystemConfig& cfg) {
    if (!(gamma_th > 0.0) || !(gamma_bar > 0.0))
        throw domain_error("asymptotic_outage: gamma_th and gamma_bar must be positive");
    const LogAsym a = log_asymptotics(cfg);
    AsymptoticOutage out;
    out.g_d = a.g_d;
    out.log_omega = a.log_omega;
    out.log_phi = a.log_phi;
    out.log_o_c = a.log_omega + a.log_phi;
    out.omega_const = std::exp(a.log_omega);
    out.phi = std::exp(a.log_phi);
    out.o_c = std::exp(out.log_o_c);
    const double log_p = out.log_o_c + a.g_d * (std::log(gamma_th) - std::log(gamma_bar));
    return {std::exp(log_p), out};
}

std::pair<double, double> asymptotic_ser(double gamma_bar, const SystemConfig& cfg,
                                         const SerModulation& mod) {
    if (!(gamma_bar > 0.0)) throw domain_error("asymptotic_ser: gamma_bar must be positive");
    mod.validate();
    const LogAsym a = log_asymptotics(cfg);
    const double m = cfg.nak_u.m, xi = cfg.nak_u.xi;
    const double log_lambda = std::log(mod.omega) + (a.g_d - 1.0) * std::log(2.0) +
                              m * std::log(m) + std::lgamma(a.g_d + 0.5) +
                              std::lgamma(2.0 * m) - 0.5 * std::log(kPi) -
                              a.g_d * std::log(mod.vartheta) - std::log(a.g_d) -
                              m * std::log(xi) - std::lgamma(2.0 * a.g_d) - std::lgamma(m);
    const double log_ga = -(log_lambda + a.log_phi) / a.g_d;
    const double log_p = -a.g_d * (log_ga + std::log(gamma_bar));
    return {std::exp(log_p), std::exp(log_ga)};
}

// ---------------------------------------------------------------------------
// Imperfect CSI
// ---------------------------------------------------------------------------

double csi_error_power(const SystemConfig& cfg, const ImperfectCsi& csi) {
    cfg.validate();
    csi.validate(cfg);
    double e2 = cfg.include_direct ? csi.beta_u2 : 0.0;
    for (int n = 0; n < cfg.n_irs; ++n) {
        for (int l = 0; l < cfg.elements_per_irs; ++l) {
            const double bh2 = csi.beta_h2[n][l];
            const double bg2 = csi.beta_g2[n][l];
            e2 += cfg.eta * cfg.eta *
                  (csi.rho * csi.rho * bg2 * bh2 + cfg.nak_h[n].xi * bg2 + cfg.nak_g[n].xi * bh2);
        }
    }
    return e2;
}

double rate_ub_imperfect_csi(const SystemConfig& cfg, const YGaussianApprox& g,
                             const ImperfectCsi& csi) {
    const double r2 = expected_snr(cfg, g) / cfg.gamma_bar;  // E[R_hat^2]
    const double e2 = csi_error_power(cfg, csi);
    return std::log2(1.0 + cfg.gamma_bar * (r2 + csi.rho * csi.rho * e2));
}

} // namespace irsperf
