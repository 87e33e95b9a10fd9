#pragma once

#include <optional>

#include "irsperf/channel_model.hpp"

namespace irsperf {

// Moment-matched one-sided Gaussian parameters of the aggregate reflected
// envelope Y = sum_n sum_l eta a_h a_g.
struct YGaussianApprox {
    double mu_y = 0.0;
    double sigma_y2 = 0.0;
    double psi = 1.0;  // 1 / Q(-mu_y / sigma_y)

    bool degenerate() const { return sigma_y2 <= 0.0; }
};

// Constants of the closed-form PDF/CDF of R~ = alpha_u + Y~.
struct RApproxParams {
    double a = 0.0;       // m_u/xi_u + 1/(2 sigma_y^2)
    double lambda = 0.0;  // m^m psi / (Gamma(m) xi^m a^m sqrt(2 pi sigma^2))
    double delta = 0.0;   // (1/(2s2) - 1/(4 a s2^2)) * 4 s2^2 a  ==  2 s2 a - 1
};

// Double-Nakagami product channel z = a_h * a_g.
struct ProductChannelParams {
    double m_s, m_l;    // ordered shapes, m_s = min
    double xi_s, xi_l;  // matching scales
    double alpha_prime; // 4/(G(ms)G(ml)) (ms ml/(xis xil))^((ms+ml)/2)
    double b_n;         // 2 sqrt(ms ml / (xis xil))

    static ProductChannelParams make(double m_h, double m_g, double xi_h, double xi_g);
};

YGaussianApprox moment_match_y(const SystemConfig& cfg);

// One-sided Gaussian density of Y~; zero for y < 0.
double pdf_y(double y, const YGaussianApprox& g);

RApproxParams r_params(const SystemConfig& cfg, const YGaussianApprox& g);

// Precomputed distribution of R~ (and of the SNR through gamma* = gbar R~^2).
// Carries the numerically measured normalization of the closed form, so every
// returned density integrates to one and the CDF reaches exactly one.
class SnrApprox {
public:
    explicit SnrApprox(const SystemConfig& cfg, bool allow_quadrature_fallback = true);

    const YGaussianApprox& y_approx() const { return y_; }
    const RApproxParams& r_approx() const { return rp_; }
    double normalization() const { return norm_; }
    double gamma_bar() const { return gamma_bar_; }
    bool closed_form() const { return closed_form_; }

    double pdf_r(double x) const;
    double cdf_r(double x) const;
    double pdf_snr(double y_snr) const;
    double cdf_snr(double y_snr) const;

private:
    enum class Mode { direct_only, reflected_only, combined_closed, combined_quadrature };
    double pdf_r_unnormalized(double x) const;
    double tail_r_unnormalized(double x) const;  // int_x^inf of the unnormalized pdf

    Mode mode_;
    NakagamiParams nak_u_;
    YGaussianApprox y_;
    RApproxParams rp_;
    double gamma_bar_;
    double norm_ = 1.0;
    bool closed_form_ = true;
    int two_mu_ = 0;  // round(2 m_u) when the closed form applies
};

// Free-function forms mirroring the operation contracts.
double pdf_r(double x, const SystemConfig& cfg, const YGaussianApprox& g, const RApproxParams& rp);
double cdf_r(double x, const SystemConfig& cfg, const YGaussianApprox& g, const RApproxParams& rp);
double pdf_snr(double y_snr, const SystemConfig& cfg, const YGaussianApprox& g,
               const RApproxParams& rp);
double cdf_snr(double y_snr, const SystemConfig& cfg, const YGaussianApprox& g,
               const RApproxParams& rp);

// Exact density of the product z = a_h a_g.
double product_pdf_exact(double x, const ProductChannelParams& p);

// KL divergence between the exact product density and its one-sided Gaussian
// moment match, by adaptive quadrature.  Nonnegative up to quadrature error.
double kl_divergence_product(const ProductChannelParams& p);

} // namespace irsperf
