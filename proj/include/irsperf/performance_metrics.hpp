#pragma once

#include <utility>
#include <vector>

#include "irsperf/snr_statistics.hpp"

namespace irsperf {

// Conditional-error-probability constants: P(e | snr) = omega Q(sqrt(vartheta snr)).
// BPSK: (1, 2).  QPSK: (2, 1).
struct SerModulation {
    double omega = 1.0;
    double vartheta = 2.0;

    static SerModulation bpsk() { return {1.0, 2.0}; }
    static SerModulation qpsk() { return {2.0, 1.0}; }
    void validate() const;
};

// High-SNR outage law P ~ Oc (gth/gbar)^Gd.
struct AsymptoticOutage {
    double g_d = 0.0;          // diversity order
    double o_c = 0.0;          // coding-gain measure Omega * Phi (may over/underflow)
    double omega_const = 0.0;  // Omega
    double phi = 0.0;          // Phi(N, L)
    // log-domain copies; the linear fields overflow for large N*L
    double log_o_c = 0.0;
    double log_omega = 0.0;
    double log_phi = 0.0;
};

// Channel-estimation error model: v = v_hat + rho * eps_v.
struct ImperfectCsi {
    double rho = 0.0;                            // estimation quality, [0,1]
    double beta_u2 = 0.0;                        // error variance, direct link
    std::vector<std::vector<double>> beta_h2;    // [n][l]
    std::vector<std::vector<double>> beta_g2;    // [n][l]

    void validate(const SystemConfig& cfg) const;
    static ImperfectCsi uniform(const SystemConfig& cfg, double rho, double beta2);
};

// F_{gamma*}(gamma_th) through the fitted SNR distribution.
double outage_probability(double gamma_th, const SnrApprox& stats);

// nth moment of the one-sided Gaussian Y~, n in 0..4.
double moments_y_truncated(const YGaussianApprox& g, int n);

// E[gamma~*] = gbar (su2 + sy2 + 2 mu_u mu_y + mu_u^2 + mu_y^2).
double expected_snr(const SystemConfig& cfg, const YGaussianApprox& g);

// Jensen bounds on E[log2(1+gamma*)].
double rate_upper(const SystemConfig& cfg, const YGaussianApprox& g);
double rate_lower(const SystemConfig& cfg, const YGaussianApprox& g);

// Large-L rate limit under the power scaling P = P_E / L^2.
double rate_asymptotic_large_l(const SystemConfig& cfg, double gamma_bar_e);

// Average SER.
struct SerEstimate {
    double value = 0.0;
    bool fallback_used = false;  // nested quadrature instead of the closed form
};
SerEstimate average_ser_detailed(const SystemConfig& cfg, const YGaussianApprox& g,
                                 const SerModulation& mod);
double average_ser(const SystemConfig& cfg, const YGaussianApprox& g, const SerModulation& mod);

// Independent oracle: nested quadrature (outer alpha_u, inner Y~) of the same
// exponential-approximation object the closed form represents.
double average_ser_quadrature(const SystemConfig& cfg, const YGaussianApprox& g,
                              const SerModulation& mod, bool exact_q = false);

// N L min(m_h, m_g) + m_u (per-IRS shapes summed individually).
double diversity_order(const SystemConfig& cfg);

// Asymptotic MGF coefficient of one product channel, M(s) -> theta_n s^(-2 m_s).
// Unsupported for m_s == m_l (logarithmic singularity of the z -> 1 limit).
double theta_n(const ProductChannelParams& p);
double log_theta_n(const ProductChannelParams& p);

std::pair<double, AsymptoticOutage> asymptotic_outage(double gamma_th, double gamma_bar,
                                                      const SystemConfig& cfg);

// Returns (P_e^inf, array gain G_a).
std::pair<double, double> asymptotic_ser(double gamma_bar, const SystemConfig& cfg,
                                         const SerModulation& mod);

// log2(1 + gbar (E[R_hat^2] + rho^2 E[E^2])).
double rate_ub_imperfect_csi(const SystemConfig& cfg, const YGaussianApprox& g,
                             const ImperfectCsi& csi);

// E[E^2] of the aggregate estimation error (Eq. components of the CSI bound).
double csi_error_power(const SystemConfig& cfg, const ImperfectCsi& csi);

} // namespace irsperf
