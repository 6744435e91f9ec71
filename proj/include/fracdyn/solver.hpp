#pragma once

// Implicit FDDE time-stepper. The problem class is
//
//   D^alpha x(t) = F(t, x(t), D^alpha x(t), (I x)(t)),   x(0) = x0,
//
// with D^alpha the Caputo derivative and I a memory operator. The stepper
// is a fractional Adams-Bashforth-Moulton scheme whose implicit unknown at
// each node is the derivative value d_k = D^alpha x(t_k): the corrector
// writes x_k affinely in d_k, so one damped fixed-point loop resolves both
// the implicit F and the corrector simultaneously.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdyn/fraccore.hpp"

namespace fracdyn {

/// Right-hand side F(t, x, d, m) -> out. d is the current Caputo-derivative
/// iterate, m the memory-operator output.
using RhsFn = std::function<void(double t, std::span<const double> x, std::span<const double> d,
                                 std::span<const double> m, std::span<double> out)>;

struct ProblemSpec {
    int dimension = 1;
    double alpha = 1.0;  // in (0, 1]
    RhsFn rhs;
    MemoryOperatorSpec memory;
    HistoryFunction history;  // required when memory.tau > 0
    std::vector<double> x0;
    double T = 1.0;
    std::optional<double> lipschitz;  // user-declared Lipschitz constant of F

    void validate() const;
};

struct SolverConfig {
    double h = 1e-2;
    double implicit_tol = 1e-10;
    int implicit_max_iter = 100;
    double damping = 1.0;  // relaxation factor in (0, 1]
};

class SolveError : public std::runtime_error {
public:
    enum class Kind { NonConvergence, Divergence, BlowUp };

    SolveError(Kind kind, int step, double residual, const std::string& what)
        : std::runtime_error(what), kind_(kind), step_(step), residual_(residual) {}

    Kind kind() const { return kind_; }
    int step() const { return step_; }
    double residual() const { return residual_; }

private:
    Kind kind_;
    int step_;
    double residual_;
};

/// Integrate the problem over [0, T]. When a delay is present the step is
/// adjusted downward so tau/h is an integer; the trajectory's grid carries
/// the adjusted value.
Trajectory solve(const ProblemSpec& problem, const SolverConfig& cfg);

/// Step actually used by solve() for this problem (delay alignment).
double aligned_step(const ProblemSpec& problem, double requested_h);

/// sup_k e^{-rho t_k} max_c |a - b| over the grid nodes t_k >= 0.
/// Throws std::invalid_argument on grid or dimension mismatch.
double weighted_norm_distance(const Trajectory& a, const Trajectory& b, double rho);

}  // namespace fracdyn
