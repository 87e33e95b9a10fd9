#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "irsperf/channel_model.hpp"
#include "irsperf/performance_metrics.hpp"
#include "irsperf/rng.hpp"

namespace irsperf {

// One batch of i.i.d. optimal-SNR samples (linear units).
struct TrialBatch {
    RngStream stream;
    std::vector<double> snr_samples;

    long n_trials() const { return static_cast<long>(snr_samples.size()); }
};

struct EstimateWithCi {
    double value = 0.0;
    double half_width_95 = 0.0;
    long n_trials = 0;
};

// One draw of gamma* = gbar (alpha_u + sum sum eta a_g a_h)^2.
double sample_optimal_snr(const SystemConfig& cfg, Rng& rng);

// One draw of gamma_hat* = gbar |R_hat + rho E|^2 with complex Gaussian
// estimation errors of the stated variances.
double sample_imperfect_csi_snr(const SystemConfig& cfg, const ImperfectCsi& csi, Rng& rng);

// Batch generation.  Each trial uses the substream (stream, trial_index), so
// results are bit-identical for any worker count.  n_threads = 0 picks the
// hardware concurrency.
TrialBatch run_batch(const SystemConfig& cfg, const RngStream& stream, long n_trials,
                     int n_threads = 0);
TrialBatch run_batch_imperfect(const SystemConfig& cfg, const ImperfectCsi& csi,
                               const RngStream& stream, long n_trials, int n_threads = 0);

// Fraction of samples <= gamma_th with a Wilson 95% interval.
EstimateWithCi empirical_outage(const TrialBatch& batch, double gamma_th);

// Sample mean of log2(1 + snr) with a normal-approximation interval.
EstimateWithCi empirical_rate(const TrialBatch& batch);

// Sample mean of omega Q(sqrt(vartheta snr)) (expectation form of the SER).
EstimateWithCi empirical_ser(const TrialBatch& batch, const SerModulation& mod);

// Sorted-sample empirical CDF, queryable at arbitrary points.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(const TrialBatch& batch);
    double operator()(double x) const;
    long n() const { return static_cast<long>(sorted_.size()); }
    const std::vector<double>& sorted_samples() const { return sorted_; }

    // sup_x |F_n(x) - F(x)| evaluated at the sample points
    double ks_distance(const std::function<double(double)>& cdf) const;

private:
    std::vector<double> sorted_;
};

} // namespace irsperf
