#include "irsperf/channel_model.hpp"

#include <cmath>
#include <string>

#include "irsperf/errors.hpp"

namespace irsperf {

void NakagamiParams::validate() const {
    if (!(m >= 0.5)) throw domain_error("NakagamiParams: shape m must be >= 0.5");
    if (!(xi > 0.0)) throw domain_error("NakagamiParams: scale xi must be positive");
}

void PathLossModel::validate() const {
    if (!(d0 > 0.0)) throw domain_error("PathLossModel: d0 must be positive");
    if (!(nu > 0.0)) throw domain_error("PathLossModel: nu must be positive");
    if (!(shadow_sigma_db >= 0.0)) throw domain_error("PathLossModel: shadow sigma must be >= 0");
}

void Topology::validate() const {
    if (!(zeta_su > 0.0)) throw domain_error("Topology: zeta_su must be positive");
    if (zeta_h.size() != irs_pos.size() || zeta_g.size() != irs_pos.size())
        throw domain_error("Topology: per-IRS gain arrays must match irs_pos size");
    for (double z : zeta_h)
        if (!(z > 0.0)) throw domain_error("Topology: zeta_h entries must be positive");
    for (double z : zeta_g)
        if (!(z > 0.0)) throw domain_error("Topology: zeta_g entries must be positive");
}

void SystemConfig::validate() const {
    if (n_irs < 0) throw domain_error("SystemConfig: N must be >= 0");
    if (n_irs >= 1 && elements_per_irs < 1)
        throw domain_error("SystemConfig: L must be >= 1 when N >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw domain_error("SystemConfig: eta must be in (0,1]");
    if (!(gamma_bar > 0.0)) throw domain_error("SystemConfig: gamma_bar must be positive");
    if (include_direct) nak_u.validate();
    if (static_cast<int>(nak_h.size()) != n_irs || static_cast<int>(nak_g.size()) != n_irs)
        throw domain_error("SystemConfig: nak_h/nak_g must have one entry per IRS");
    for (const auto& p : nak_h) p.validate();
    for (const auto& p : nak_g) p.validate();
    if (!include_direct && reflected_paths() == 0)
        throw domain_error("SystemConfig: no direct link and no reflected paths");
}

SystemConfig SystemConfig::uniform(int n, int l, double eta, double m, double zeta_u,
                                   const std::vector<double>& zeta_h,
                                   const std::vector<double>& zeta_g,
                                   double gamma_bar, bool include_direct) {
    SystemConfig cfg;
    cfg.n_irs = n;
    cfg.elements_per_irs = l;
    cfg.eta = eta;
    cfg.nak_u = {m, m * zeta_u};
    cfg.nak_h.reserve(n);
    cfg.nak_g.reserve(n);
    for (int i = 0; i < n; ++i) {
        cfg.nak_h.push_back({m, m * zeta_h.at(i)});
        cfg.nak_g.push_back({m, m * zeta_g.at(i)});
    }
    cfg.gamma_bar = gamma_bar;
    cfg.include_direct = include_direct;
    cfg.validate();
    return cfg;
}

double large_scale_gain(double d, const PathLossModel& model, double shadow_db) {
    model.validate();
    if (d < model.d0)
        throw domain_error("large_scale_gain: d < d0 (model valid beyond reference distance)");
    return std::pow(model.d0 / d, model.nu) * std::pow(10.0, shadow_db / 10.0);
}

Topology generate_topology(const RngStream& stream, const PathLossModel& model, int n_irs,
                           double area_x, double area_y, double sd_distance) {
    model.validate();
    if (n_irs < 0) throw domain_error("generate_topology: n_irs must be >= 0");
    if (!(sd_distance > 0.0 && sd_distance <= area_x))
        throw domain_error("generate_topology: need 0 < sd_distance <= area_x");

    Rng rng(stream);
    Topology topo;
    topo.s_pos = {(area_x - sd_distance) / 2.0, area_y / 2.0};
    topo.d_pos = {(area_x + sd_distance) / 2.0, area_y / 2.0};

    topo.irs_pos.resize(n_irs);
    for (int n = 0; n < n_irs; ++n) {
        topo.irs_pos[n] = {area_x * rng.uniform(), area_y * rng.uniform()};
    }

    auto dist = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        const double dx = a[0] - b[0], dy = a[1] - b[1];
        return std::sqrt(dx * dx + dy * dy);
    };
    auto gain = [&](double d) {
        const double shadow = model.shadow_sigma_db * rng.normal();
        return large_scale_gain(std::max(d, model.d0), model, shadow);
    };

    topo.zeta_su = gain(dist(topo.s_pos, topo.d_pos));
    topo.zeta_h.resize(n_irs);
    topo.zeta_g.resize(n_irs);
    for (int n = 0; n < n_irs; ++n) {
        topo.zeta_h[n] = gain(dist(topo.s_pos, topo.irs_pos[n]));
        topo.zeta_g[n] = gain(dist(topo.irs_pos[n], topo.d_pos));
    }
    topo.validate();
    return topo;
}

double sample_envelope(const NakagamiParams& p, Rng& rng) {
    // hot path: parameters are validated at config construction
    return std::sqrt(rng.gamma(p.m, p.xi / p.m));
}

double envelope_moment(const NakagamiParams& p, int n) {
    p.validate();
    if (n < 0) throw domain_error("envelope_moment: n must be >= 0");
    if (n == 0) return 1.0;
    if (n == 2) return p.xi;  // Gamma(m+1)/Gamma(m) * xi/m cancels exactly
    return std::exp(log_gamma(p.m + n / 2.0) - log_gamma(p.m) + (n / 2.0) * std::log(p.xi / p.m));
}

MeanVar direct_mean_var(const NakagamiParams& p) {
    const double mean = envelope_moment(p, 1);
    return {mean, p.xi - mean * mean};
}

} // namespace irsperf
