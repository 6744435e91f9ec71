#pragma once

// Run configuration: a line-oriented document with [section] headers and
// key = value pairs. Unknown sections or keys are rejected; every parse or
// validation error names the offending key, the constraint, and the line.

#include <stdexcept>
#include <string>
#include <vector>

namespace fracdyn::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& constraint, int line = 0)
        : std::runtime_error(line > 0 ? key + ": " + constraint + " (line " +
                                            std::to_string(line) + ")"
                                      : key + ": " + constraint),
          key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ProblemSection {
    std::string kind = "fhn";  // fhn | relaxation | linear | linear_delay
    double alpha = 0.8;
    int dimension = 1;
    double T = 10.0;
    std::vector<double> x0{1.0};
    double rate = 1.0;          // relaxation: F = -rate x
    std::vector<double> A{};    // row-major, linear kinds
    std::vector<double> B{};    // row-major, linear_delay
    double tau = 1.0;           // linear_delay
    double lipschitz = 0.0;     // 0 = unset
    double forcing_delta = 0.0; // adds delta sin(t) to every component of F

    bool operator==(const ProblemSection&) const = default;
};

struct FhnSection {
    double alpha = 0.8;
    double epsilon = 0.08;
    double a = 0.7;
    double b = 0.8;
    double lambda = 0.0;
    double tau = 1.0;
    double i_ext = 0.5;

    bool operator==(const FhnSection&) const = default;
};

struct HistorySection {
    std::string kind = "constant";  // constant | polynomial
    std::vector<double> values{};   // constant; empty = model equilibrium
    std::vector<std::vector<double>> coeffs{};  // coeffs_1, coeffs_2, ...

    bool operator==(const HistorySection&) const = default;
};

struct SolverSection {
    double h = 0.01;
    double implicit_tol = 1e-10;
    int implicit_max_iter = 100;
    double damping = 1.0;

    bool operator==(const SolverSection&) const = default;
};

struct GronwallSection {
    double alpha = 0.5;
    double beta = 0.5;
    double norm_a = 1.0;
    double norm_b = 0.0;
    double T = 1.0;
    double phi_norm = 1.0;
    double f_sup = 1.0;
    double tau = 0.0;   // delay of the emitted extremal curve
    double h = 0.01;    // grid of the emitted curve
    bool emit_csv = true;

    bool operator==(const GronwallSection&) const = default;
};

struct UhSection {
    std::string candidate{};  // trajectory CSV path
    std::string reference{};  // optional exact-solution CSV

    bool operator==(const UhSection&) const = default;
};

struct CycleSection {
    double t_skip = 200.0;
    double t_measure = 120.0;
    double cycle_tol = 1e-4;
    double amplitude_floor = 0.1;
    int max_map_iter = 50;

    bool operator==(const CycleSection&) const = default;
};

struct ScanSection {
    double tau_min = 0.1;
    double tau_max = 1.0;
    int tau_count = 5;
    double spike_margin = 1.0;
    double t_obs = 50.0;
    double i_max = 5.0;
    int bisect_steps = 40;

    bool operator==(const ScanSection&) const = default;
};

struct RunConfig {
    std::string command = "simulate";
    std::string output_dir = "out";
    long seed = 0;
    ProblemSection problem{};
    FhnSection fhn{};
    HistorySection history{};
    SolverSection solver{};
    GronwallSection gronwall{};
    UhSection uh{};
    CycleSection cycle{};
    ScanSection scan{};

    bool operator==(const RunConfig&) const = default;
};

/// Parse and validate. Throws ConfigError.
RunConfig parse_config(const std::string& text);

/// Canonical document; parse_config(print_config(rc)) == rc.
std::string print_config(const RunConfig& rc);

}  // namespace fracdyn::config
