#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "irsperf/rng.hpp"
#include "irsperf/special_functions.hpp"

namespace irsperf {

// Nakagami-m envelope parameters.  xi = m * zeta is the scale in linear
// power units (E[alpha^2] = xi); zeta is the large-scale gain.
struct NakagamiParams {
    double m = 1.0;
    double xi = 1.0;

    double zeta() const { return xi / m; }
    void validate() const;
};

// Distance path loss with log-normal shadowing: (d0/d)^nu * 10^(phi/10).
struct PathLossModel {
    double d0 = 1.0;               // reference distance, meters
    double nu = 2.8;               // path-loss exponent
    double shadow_sigma_db = 8.0;  // shadowing std dev, dB

    void validate() const;
};

struct Topology {
    std::array<double, 2> s_pos{};
    std::array<double, 2> d_pos{};
    std::vector<std::array<double, 2>> irs_pos;
    double zeta_su = 1.0;        // direct-link large-scale gain, linear
    std::vector<double> zeta_h;  // S -> IRS n
    std::vector<double> zeta_g;  // IRS n -> D

    void validate() const;
};

// Full parameterization of one link.
struct SystemConfig {
    int n_irs = 0;             // N
    int elements_per_irs = 0;  // L
    double eta = 0.9;          // per-element reflection amplitude, (0,1]
    NakagamiParams nak_u;
    std::vector<NakagamiParams> nak_h;  // size N
    std::vector<NakagamiParams> nak_g;  // size N
    double gamma_bar = 1.0;             // transmit SNR, linear
    bool include_direct = true;

    int reflected_paths() const { return n_irs * elements_per_irs; }
    void validate() const;

    // Uniform-parameter constructor used all over the tests and presets.
    static SystemConfig uniform(int n, int l, double eta, double m, double zeta_u,
                                const std::vector<double>& zeta_h,
                                const std::vector<double>& zeta_g,
                                double gamma_bar, bool include_direct = true);
};

// (d0/d)^nu * 10^(shadow_db/10); requires d >= d0.
double large_scale_gain(double d, const PathLossModel& model, double shadow_db);

// S and D at fixed positions sd_distance apart, centered on the long axis of
// an area_x-by-area_y rectangle; IRS positions i.i.d. uniform; one shadowing
// draw per link.  Pure function of (rng, parameters).
Topology generate_topology(const RngStream& rng, const PathLossModel& model, int n_irs,
                           double area_x, double area_y, double sd_distance);

// One Nakagami envelope draw: sqrt of gamma(m, xi/m).
double sample_envelope(const NakagamiParams& p, Rng& rng);

// E[alpha^n] = Gamma(m + n/2)/Gamma(m) * (xi/m)^(n/2).
double envelope_moment(const NakagamiParams& p, int n);

// Mean and variance of the direct envelope.
struct MeanVar {
    double mean;
    double var;
};
MeanVar direct_mean_var(const NakagamiParams& p);

} // namespace irsperf
