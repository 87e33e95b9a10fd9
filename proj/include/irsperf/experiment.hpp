#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsperf/monte_carlo.hpp"

namespace irsperf {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// One curve of a sweep: a complete system parameterization plus an optional
// estimation-error model.
struct ExperimentCase {
    std::string label;
    SystemConfig cfg;
    std::optional<ImperfectCsi> csi;
};

struct ExperimentSpec {
    std::string name = "custom";
    // gamma_bar_db | rho | L | N | zeta_c | snr_db (distribution presets)
    std::string sweep_var = "gamma_bar_db";
    std::vector<double> grid;
    std::vector<ExperimentCase> cases;
    std::vector<std::string> metrics;  // from the registry below
    double gamma_th = 1.0;             // linear threshold for outage metrics
    SerModulation mod = SerModulation::bpsk();
    long n_trials = 1000000;
    std::uint64_t seed = 1;
    std::vector<std::string> notes;  // provenance comments for the CSV header

    void validate_spec() const;
};

// Metric registry: outage, outage_asymptotic, rate, rate_csi, ser,
// ser_asymptotic, pdf, cdf, kl.  Analytic columns always present; _mc and
// _mc_halfwidth columns added for metrics with a Monte-Carlo counterpart.
const std::vector<std::string>& metric_registry();

struct MetricSweepResult {
    std::vector<std::string> notes;
    std::string sweep_name;
    std::vector<std::string> columns;        // excluding the sweep column
    std::vector<double> sweep_values;
    std::vector<std::vector<double>> rows;   // [grid][column]
    bool validation_failed = false;
};

// Evaluates all requested metrics over the grid and, optionally, writes the
// CSV.  Deterministic for fixed (spec, seed).
MetricSweepResult run(const ExperimentSpec& spec, int n_threads = 0);

void write_csv(const MetricSweepResult& result, std::ostream& os);
void write_csv_file(const MetricSweepResult& result, const std::string& path);

// Named presets reproducing the paper-figure experiments.
std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
ExperimentSpec make_preset(const std::string& name);

// Config-file loader (flat sections: [system], [topology], [sweep], [output]).
ExperimentSpec load_spec_file(const std::string& path);

// Machine-readable oracle/invariant report: one line per check.
struct ValidationCheck {
    std::string name;
    bool pass;
    double measured;
    double threshold;
};
std::vector<ValidationCheck> validate_suite(int n_threads = 0);

} // namespace irsperf
