#include "irsperf/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "irsperf/errors.hpp"
#include "irsperf/special_functions.hpp"

namespace irsperf {

double sample_optimal_snr(const SystemConfig& cfg, Rng& rng) {
    double r = 0.0;
    if (cfg.include_direct) r = sample_envelope(cfg.nak_u, rng);
    for (int n = 0; n < cfg.n_irs; ++n) {
        double acc = 0.0;
        for (int l = 0; l < cfg.elements_per_irs; ++l) {
            const double ah = sample_envelope(cfg.nak_h[n], rng);
            const double ag = sample_envelope(cfg.nak_g[n], rng);
            acc += ah * ag;
        }
        r += cfg.eta * acc;
    }
    return cfg.gamma_bar * r * r;
}

double sample_imperfect_csi_snr(const SystemConfig& cfg, const ImperfectCsi& csi, Rng& rng) {
    // estimated envelopes build R_hat; complex errors build E
    double r_hat = 0.0;
    double e_re = 0.0, e_im = 0.0;
    auto draw_error = [&rng](double beta2, double& re, double& im) {
        const double sd = std::sqrt(0.5 * beta2);
        re = sd * rng.normal();
        im = sd * rng.normal();
    };
    if (cfg.include_direct) {
        r_hat = sample_envelope(cfg.nak_u, rng);
        double re, im;
        draw_error(csi.beta_u2, re, im);
        e_re += re;
        e_im += im;
    }
    for (int n = 0; n < cfg.n_irs; ++n) {
        for (int l = 0; l < cfg.elements_per_irs; ++l) {
            const double ah = sample_envelope(cfg.nak_h[n], rng);
            const double ag = sample_envelope(cfg.nak_g[n], rng);
            r_hat += cfg.eta * ah * ag;
            double gh_re, gh_im, gg_re, gg_im;
            draw_error(csi.beta_h2[n][l], gh_re, gh_im);
            draw_error(csi.beta_g2[n][l], gg_re, gg_im);
            // eta (a_h eps_g + a_g eps_h + rho eps_g eps_h)
            e_re += cfg.eta * (ah * gg_re + ag * gh_re +
                               csi.rho * (gg_re * gh_re - gg_im * gh_im));
            e_im += cfg.eta * (ah * gg_im + ag * gh_im +
                               csi.rho * (gg_re * gh_im + gg_im * gh_re));
        }
    }
    const double re = r_hat + csi.rho * e_re;
    const double im = csi.rho * e_im;
    return cfg.gamma_bar * (re * re + im * im);
}

namespace {

template <class PerTrial>
std::vector<double> run_trials(const RngStream& stream, long n_trials, int n_threads,
                               const PerTrial& per_trial) {
    if (n_trials < 1) throw domain_error("run_batch: need at least one trial");
    std::vector<double> samples(static_cast<std::size_t>(n_trials));
    if (n_threads <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        n_threads = hc == 0 ? 1 : static_cast<int>(hc);
    }
    const long chunk = 4096;
    const long n_chunks = (n_trials + chunk - 1) / chunk;
    if (n_threads == 1 || n_chunks == 1) {
        for (long i = 0; i < n_trials; ++i) {
            Rng rng(stream, static_cast<std::uint64_t>(i));
            samples[static_cast<std::size_t>(i)] = per_trial(rng);
        }
        return samples;
    }
    std::atomic<long> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            const long c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            const long lo = c * chunk;
            const long hi = std::min(n_trials, lo + chunk);
            for (long i = lo; i < hi; ++i) {
                Rng rng(stream, static_cast<std::uint64_t>(i));
                samples[static_cast<std::size_t>(i)] = per_trial(rng);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return samples;
}

EstimateWithCi mean_with_ci(const std::vector<double>& values) {
    // fixed summation order keeps estimates bit-identical across worker counts
    long double sum = 0.0L, sum2 = 0.0L;
    for (double v : values) {
        sum += v;
        sum2 += static_cast<long double>(v) * v;
    }
    const long n = static_cast<long>(values.size());
    EstimateWithCi e;
    e.n_trials = n;
    e.value = static_cast<double>(sum / n);
    const double var =
        n > 1 ? std::max(0.0, static_cast<double>((sum2 - sum * sum / n) / (n - 1))) : 0.0;
    e.half_width_95 = 1.959963984540054 * std::sqrt(var / n);
    return e;
}

} // namespace

TrialBatch run_batch(const SystemConfig& cfg, const RngStream& stream, long n_trials,
                     int n_threads) {
    cfg.validate();
    TrialBatch batch;
    batch.stream = stream;
    batch.snr_samples = run_trials(stream, n_trials, n_threads,
                                   [&cfg](Rng& rng) { return sample_optimal_snr(cfg, rng); });
    return batch;
}

TrialBatch run_batch_imperfect(const SystemConfig& cfg, const ImperfectCsi& csi,
                               const RngStream& stream, long n_trials, int n_threads) {
    cfg.validate();
    csi.validate(cfg);
    TrialBatch batch;
    batch.stream = stream;
    batch.snr_samples =
        run_trials(stream, n_trials, n_threads,
                   [&cfg, &csi](Rng& rng) { return sample_imperfect_csi_snr(cfg, csi, rng); });
    return batch;
}

EstimateWithCi empirical_outage(const TrialBatch& batch, double gamma_th) {
    if (gamma_th < 0.0) throw domain_error("empirical_outage: gamma_th must be >= 0");
    long k = 0;
    for (double v : batch.snr_samples)
        if (v <= gamma_th) ++k;
    const double n = static_cast<double>(batch.n_trials());
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double phat = k / n;
    // Wilson score interval
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    EstimateWithCi e;
    e.value = phat;
    e.half_width_95 = half + std::abs(center - phat);  // cover the asymmetric shift
    e.n_trials = batch.n_trials();
    return e;
}

EstimateWithCi empirical_rate(const TrialBatch& batch) {
    std::vector<double> rates(batch.snr_samples.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        rates[i] = std::log2(1.0 + batch.snr_samples[i]);
    return mean_with_ci(rates);
}

EstimateWithCi empirical_ser(const TrialBatch& batch, const SerModulation& mod) {
    mod.validate();
    std::vector<double> errs(batch.snr_samples.size());
    for (std::size_t i = 0; i < errs.size(); ++i)
        errs[i] = mod.omega * gaussian_q(std::sqrt(mod.vartheta * batch.snr_samples[i]));
    return mean_with_ci(errs);
}

EmpiricalCdf::EmpiricalCdf(const TrialBatch& batch) : sorted_(batch.snr_samples) {
    if (sorted_.empty()) throw domain_error("EmpiricalCdf: empty batch");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::ks_distance(const std::function<double(double)>& cdf) const {
    const double n = static_cast<double>(sorted_.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        const double f = cdf(sorted_[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

} // namespace irsperf
