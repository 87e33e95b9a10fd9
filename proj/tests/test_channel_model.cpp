#include <cmath>

#include "doctest.h"
#include "irsperf/channel_model.hpp"
#include "irsperf/errors.hpp"
#include "irsperf/special_functions.hpp"

using namespace irsperf;

namespace {
constexpr double kSqrtPiOver2 = 0.88622692545275801365;
}

TEST_CASE("large_scale_gain") {
    PathLossModel m{1.0, 2.8, 8.0};
    CHECK(large_scale_gain(1.0, m, 0.0) == doctest::Approx(1.0));
    CHECK(large_scale_gain(10.0, m, 0.0) == doctest::Approx(std::pow(10.0, -2.8)).epsilon(1e-12));
    PathLossModel m2{1.0, 2.0, 8.0};
    CHECK(large_scale_gain(2.0, m2, 10.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(large_scale_gain(0.5, m, 0.0), domain_error);
}

TEST_CASE("generate_topology determinism and degenerate case") {
    PathLossModel model{1.0, 2.8, 8.0};
    const Topology t0 = generate_topology({11, 0}, model, 0, 2000.0, 1000.0, 1200.0);
    CHECK(t0.irs_pos.empty());
    CHECK(t0.zeta_su > 0.0);

    const Topology a = generate_topology({7, 3}, model, 8, 2000.0, 1000.0, 1200.0);
    const Topology b = generate_topology({7, 3}, model, 8, 2000.0, 1000.0, 1200.0);
    REQUIRE(a.irs_pos.size() == 8);
    for (int n = 0; n < 8; ++n) {
        CHECK(a.irs_pos[n] == b.irs_pos[n]);
        CHECK(a.zeta_h[n] == b.zeta_h[n]);
        CHECK(a.zeta_g[n] == b.zeta_g[n]);
        CHECK(a.zeta_h[n] > 0.0);
        CHECK(a.zeta_h[n] < 1.0);
        CHECK(a.zeta_g[n] < 1.0);
    }
    const double dx = a.d_pos[0] - a.s_pos[0];
    const double dy = a.d_pos[1] - a.s_pos[1];
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(1200.0));
}

TEST_CASE("topology shadowing statistics") {
    // mean of 10 log10(zeta) over seeds ~ -nu 10 log10(d/d0) within 0.5 dB
    PathLossModel model{1.0, 2.8, 8.0};
    double acc_db = 0.0, acc_pl = 0.0;
    const int reps = 2000;
    for (int s = 0; s < reps; ++s) {
        const Topology t =
            generate_topology({static_cast<std::uint64_t>(s), 99}, model, 1, 2000.0, 1000.0, 1200.0);
        acc_db += 10.0 * std::log10(t.zeta_h[0]);
        const double dxs = t.irs_pos[0][0] - t.s_pos[0], dys = t.irs_pos[0][1] - t.s_pos[1];
        const double d = std::sqrt(dxs * dxs + dys * dys);
        acc_pl += -model.nu * 10.0 * std::log10(d / model.d0);
    }
    CHECK(std::abs(acc_db / reps - acc_pl / reps) < 0.5);
}

TEST_CASE("envelope moments") {
    CHECK(envelope_moment({2.3, 1.4}, 0) == doctest::Approx(1.0));
    for (double m : {0.5, 1.0, 2.5, 3.0})
        for (double xi : {0.3, 1.0, 4.2})
            CHECK(envelope_moment({m, xi}, 2) == doctest::Approx(xi).epsilon(1e-14));
    CHECK(envelope_moment({1.0, 1.0}, 1) == doctest::Approx(kSqrtPiOver2).epsilon(1e-12));
}

TEST_CASE("direct_mean_var") {
    const MeanVar mv = direct_mean_var({1.0, 1.0});
    CHECK(mv.mean == doctest::Approx(kSqrtPiOver2).epsilon(1e-12));
    CHECK(mv.var == doctest::Approx(1.0 - 3.141592653589793 / 4.0).epsilon(1e-12));
    // second-moment identity for arbitrary parameters
    for (double m : {0.5, 1.5, 3.0, 7.0}) {
        for (double xi : {0.2, 1.0, 5.0}) {
            const MeanVar v = direct_mean_var({m, xi});
            CHECK(v.var + v.mean * v.mean == doctest::Approx(xi).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample_envelope moments match envelope_moment") {
    const NakagamiParams p{3.0, 0.5};
    Rng rng({2024, 1});
    const int n = 1000000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double a = sample_envelope(p, rng);
        s1 += a;
        s2 += a * a;
        s3 += a * a * a;
        s4 += a * a * a * a;
    }
    // three standard errors at 1e6 draws
    auto se = [&](int k) {
        const double m2k = envelope_moment(p, 2 * k);
        const double mk = envelope_moment(p, k);
        return 3.0 * std::sqrt((m2k - mk * mk) / n);
    };
    CHECK(std::abs(s1 / n - envelope_moment(p, 1)) < se(1));
    CHECK(std::abs(s2 / n - envelope_moment(p, 2)) < se(2));
    CHECK(std::abs(s3 / n - envelope_moment(p, 3)) < se(3));
    CHECK(std::abs(s4 / n - envelope_moment(p, 4)) < se(4));
}

TEST_CASE("sample_envelope empirical CDF vs analytic Nakagami CDF") {
    const NakagamiParams p{1.0, 1.0};  // Rayleigh
    Rng rng({88, 2});
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_envelope(p, rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = reg_gamma_p(p.m, p.m * xs[i] * xs[i] / p.xi);
        ks = std::max(ks, std::abs(f - (i + 1.0) / n));
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("config validation") {
    SystemConfig cfg = SystemConfig::uniform(1, 4, 0.9, 3.0, 0.5, {0.6}, {0.7}, 1.0);
    CHECK_NOTHROW(cfg.validate());
    cfg.eta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), domain_error);
    cfg.eta = 0.9;
    cfg.gamma_bar = 0.0;
    CHECK_THROWS_AS(cfg.validate(), domain_error);
}
