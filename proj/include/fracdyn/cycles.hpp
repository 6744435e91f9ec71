#pragma once

// Limit-cycle machinery on discretized history segments, plus the
// excitability-threshold scan and its power-law fit.

#include <functional>
#include <optional>
#include <vector>

#include "fracdyn/fhn.hpp"
#include "fracdyn/solver.hpp"

namespace fracdyn::cycles {

/// (v, w) samples on the m+1 uniform nodes of [-tau, 0].
struct HistorySegment {
    double h = 0.0;
    std::vector<std::vector<double>> samples;  // [component][node]

    int nodes() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }
    HistoryFunction as_history() const { return HistoryFunction::sampled(samples, h); }

    /// sup-norm distance between two segments on the same node set.
    double distance(const HistorySegment& other) const;
};

/// Final segment [T - tau, T] of a trajectory, as the next history.
HistorySegment tail_segment(const Trajectory& traj);

/// Time-T map: solve from history phi and return the segment at time T_map.
/// T_map must exceed tau and is rounded to the step grid.
HistorySegment poincare_map(const HistorySegment& phi, const fhn::FhnParams& params,
                            double T_map, const SolverConfig& cfg,
                            Trajectory* full_trajectory = nullptr);

struct CycleConfig {
    SolverConfig solver{0.01, 1e-10, 100, 1.0};
    double t_skip = 200.0;      // transient discarded before measuring
    double t_measure = 120.0;   // window for amplitude / crossing analysis
    double cycle_tol = 1e-4;    // sup-norm fixed-point tolerance
    double amplitude_floor = 0.1;
    int max_map_iter = 50;
};

struct LimitCycleReport {
    bool found = false;
    double period = 0.0;
    double poincare_residual = 0.0;
    double amplitude = 0.0;
    bool in_annulus = false;
    double transient_discarded = 0.0;
    int map_iterations = 0;
    std::string diagnostic;
};

/// Discard the transient, estimate the period from upward mean-crossings of
/// v, then iterate the time-T* map (T* = period rounded to the grid) until
/// the segment is a fixed point within cycle_tol.
LimitCycleReport find_cycle(const fhn::FhnParams& params, const HistoryFunction& initial,
                            const CycleConfig& cfg);

struct HolderEstimate {
    double empirical = 0.0;    // max ||x(t1)-x(t2)|| / |t1-t2|^alpha over window pairs
    double theoretical = 0.0;  // 2 sup||D^alpha x|| / Gamma(alpha+1)
};

/// Pairwise Holder-quotient maximization over a sliding index window.
HolderEstimate holder_constant(const Trajectory& traj, double alpha, int window = 64);

struct ScanPoint {
    double tau = 0.0;
    double i_th = 0.0;
    double bracket_width = 0.0;
    bool defined = false;  // false: no spike up to i_max
};

struct ScanConfig {
    SolverConfig solver{0.01, 1e-10, 100, 1.0};
    double spike_margin = 1.0;
    double t_obs = 50.0;
    double i_max = 5.0;
    int bisect_steps = 40;
    int threads = 0;  // 0: FRACDYN_THREADS or hardware concurrency
};

struct PowerLawFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double stderr_exponent = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares fit of log y against log x.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScanResult {
    std::vector<ScanPoint> points;  // ordered as tau_list
    PowerLawFit fit;
    bool monotone = false;  // i_th monotone along increasing tau
    int direction = 0;      // +1 nondecreasing, -1 nonincreasing, 0 none
};

/// Spike predicate used by the scan; the default simulates the model and
/// tests max v against the probe equilibrium plus spike_margin. Tests can
/// substitute a synthetic oracle to exercise the bisection/fit pipeline.
using SpikeTest = std::function<bool(double tau, double i_ext)>;

/// For each tau (log-spaced, decreasing toward 0): bracket the threshold
/// current geometrically, bisect, then fit i_th against tau.
ScanResult threshold_scan(const fhn::FhnParams& base, std::span<const double> tau_list,
                          const ScanConfig& cfg, SpikeTest spike_test = nullptr);

/// Helper: log-spaced decreasing tau list.
std::vector<double> log_spaced_taus(double tau_min, double tau_max, int count);

}  // namespace fracdyn::cycles
