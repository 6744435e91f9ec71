#pragma once

// Ulam-Hyers verification: measure the defect of a candidate trajectory
// against the governing equation, compute an explicit stability constant
// from the Gronwall certificate, solve the exact problem from the same
// initial data, and compare.

#include <optional>

#include "fracdyn/solver.hpp"

namespace fracdyn::stability {

struct StabilityReport {
    double epsilon = 0.0;        // measured sup-norm residual
    double C = 0.0;              // Ulam-Hyers constant
    double max_deviation = 0.0;  // sup_t ||y - x||
    double bound = 0.0;          // C * epsilon
    bool pass = false;
    double margin = 0.0;  // bound - max_deviation
};

/// Sup over interior nodes of || D^alpha_L1 y(t_k) - F(t_k, y_k, d_k, m_k) ||_inf,
/// with d_k the L1 derivative estimate and m_k the memory value of y.
double measure_residual(const Trajectory& y, const ProblemSpec& problem);

/// C = (T^alpha / Gamma(alpha+1)) * M with M the Gronwall constant for
/// norm_a = L / Gamma(alpha) (and the delayed channel on norm_b when the
/// problem carries a delay). L defaults to problem.lipschitz.
double uh_constant(const ProblemSpec& problem, std::optional<double> L = std::nullopt);

/// Full check: epsilon from y, x = solve(problem restarted from y(0)),
/// verdict PASS iff max_t ||y - x|| <= C epsilon.
StabilityReport verify_uh(const Trajectory& y, const ProblemSpec& problem,
                          const SolverConfig& cfg);

}  // namespace fracdyn::stability
