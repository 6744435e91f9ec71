#include "fracdyn/solver.hpp"

#include <cmath>

#include "fracdyn/kernels.hpp"
#include "fracdyn/special.hpp"

namespace fracdyn {

void ProblemSpec::validate() const {
    if (dimension < 1) throw std::invalid_argument("ProblemSpec: dimension must be >= 1");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("ProblemSpec: alpha must lie in (0, 1]");
    if (!(T > 0.0)) throw std::invalid_argument("ProblemSpec: horizon T must be positive");
    if (!rhs) throw std::invalid_argument("ProblemSpec: missing right-hand side");
    if (static_cast<int>(x0.size()) != dimension)
        throw std::invalid_argument("ProblemSpec: x0 dimension mismatch");
    memory.validate();
    if (memory.tau > 0.0) {
        if (history.dimension() != dimension)
            throw std::invalid_argument("ProblemSpec: history dimension mismatch");
        for (int c = 0; c < dimension; ++c) {
            if (std::fabs(history.eval_component(0.0, c) - x0[c]) > 1e-12)
                throw std::invalid_argument("ProblemSpec: history(0) must equal x0");
        }
        if (!(memory.tau <= T))
            throw std::invalid_argument("ProblemSpec: delay tau must not exceed the horizon");
    }
}

double aligned_step(const ProblemSpec& problem, double requested_h) {
    if (!(requested_h > 0.0)) throw std::invalid_argument("SolverConfig: h must be positive");
    if (problem.memory.tau > 0.0) {
        int m = static_cast<int>(std::ceil(problem.memory.tau / requested_h - 1e-12));
        if (m < 1) m = 1;
        return problem.memory.tau / m;
    }
    return requested_h;
}

namespace {

/// Per-step memory evaluation, split into a lagged part (fixed during the
/// inner iteration) and the quadrature endpoint that moves with x_k.
class MemoryEvaluator {
public:
    MemoryEvaluator(const ProblemSpec& p, const Trajectory& traj)
        : spec_(p.memory), traj_(traj), dim_(p.dimension) {
        if (spec_.kind == MemoryKind::DistributedKernel ||
            spec_.kind == MemoryKind::FractionalIntegral) {
            weights_ = trap_weights(spec_.beta, traj.grid.n_steps, traj.grid.h);
            kernel_gamma_ = spec_.kind == MemoryKind::FractionalIntegral
                                ? 1.0
                                : special::gamma_fn(spec_.beta);
            mem_delay_steps_ =
                spec_.tau > 0.0 ? static_cast<int>(std::lround(spec_.tau / traj.grid.h)) : 0;
            psi_.assign(static_cast<std::size_t>(traj.grid.n_steps) + 1, 0.0);
        }
        lag_.assign(static_cast<std::size_t>(dim_), 0.0);
        value_.assign(static_cast<std::size_t>(dim_), 0.0);
    }

    /// Fix the lagged contribution at node k (states < k must be final).
    void prepare(int k) {
        k_ = k;
        switch (spec_.kind) {
            case MemoryKind::None:
                break;
            case MemoryKind::DiscreteDelay: {
                for (int c = 0; c < dim_; ++c)
                    value_[c] = traj_.state(c, k - traj_.grid.delay_steps);
                break;
            }
            default: {
                const double t = traj_.grid.time(k);
                for (int c = 0; c < dim_; ++c) {
                    for (int j = 0; j < k; ++j) psi_[j] = psi_value(c, j, t);
                    double lag = k >= 1 ? weights_.first[k] * psi_[0] : 0.0;
                    if (k >= 2)
                        lag += kernels::dot_rev(
                            std::span(psi_.data() + 1, static_cast<std::size_t>(k - 1)),
                            std::span(weights_.interior.data() + 1,
                                      static_cast<std::size_t>(k - 1)));
                    lag_[c] = weights_.scale * lag * kernel_gamma_;
                }
                break;
            }
        }
    }

    /// Memory value at node k_ for candidate state x.
    std::span<const double> value(std::span<const double> x) {
        if (spec_.kind == MemoryKind::None || spec_.kind == MemoryKind::DiscreteDelay)
            return value_;
        if (k_ == 0) {  // empty integration range
            for (int c = 0; c < dim_; ++c) value_[c] = 0.0;
            return value_;
        }
        const double t = traj_.grid.time(k_);
        for (int c = 0; c < dim_; ++c) {
            double u = x[c];
            double psi;
            if (spec_.phi) {
                double ud = u;
                if (mem_delay_steps_ > 0) ud = traj_.state(c, k_ - mem_delay_steps_);
                psi = spec_.phi(t, u, ud);
            } else {
                psi = u;
            }
            if (spec_.g) psi *= spec_.g(t, t);
            value_[c] = lag_[c] + weights_.scale * psi * kernel_gamma_;
        }
        return value_;
    }

private:
    double psi_value(int c, int j, double t) const {
        double s = traj_.grid.time(j);
        double u = traj_.state(c, j);
        double psi;
        if (spec_.phi) {
            double ud = mem_delay_steps_ > 0 ? traj_.state(c, j - mem_delay_steps_) : u;
            psi = spec_.phi(s, u, ud);
        } else {
            psi = u;
        }
        if (spec_.g) psi *= spec_.g(t, s);
        return psi;
    }

    const MemoryOperatorSpec& spec_;
    const Trajectory& traj_;
    int dim_;
    int k_ = 0;
    TrapWeights weights_;
    double kernel_gamma_ = 1.0;
    int mem_delay_steps_ = 0;
    std::vector<double> psi_;
    std::vector<double> lag_;
    std::vector<double> value_;
};

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

Trajectory solve(const ProblemSpec& problem, const SolverConfig& cfg) {
    problem.validate();
    if (!(cfg.implicit_tol > 0.0))
        throw std::invalid_argument("SolverConfig: implicit_tol must be positive");
    if (cfg.implicit_max_iter < 1)
        throw std::invalid_argument("SolverConfig: implicit_max_iter must be >= 1");
    if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
        throw std::invalid_argument("SolverConfig: damping must lie in (0, 1]");

    const int n = problem.dimension;
    const double h = aligned_step(problem, cfg.h);
    UniformGrid grid;
    grid.h = h;
    grid.n_steps = static_cast<int>(std::ceil(problem.T / h - 1e-9));
    grid.delay_steps =
        problem.memory.tau > 0.0 ? static_cast<int>(std::lround(problem.memory.tau / h)) : 0;

    Trajectory traj;
    traj.resize(n, grid);
    for (int k = -grid.delay_steps; k < 0; ++k)
        for (int c = 0; c < n; ++c) traj.state(c, k) = problem.history.eval_component(k * h, c);
    for (int c = 0; c < n; ++c) traj.state(c, 0) = problem.x0[c];

    const std::vector<double> rw = rect_weights(problem.alpha, grid.n_steps, h);
    const TrapWeights tw = trap_weights(problem.alpha, grid.n_steps, h);

    MemoryEvaluator memory(problem, traj);

    std::vector<double> x_cur(n), d_guess(n), d_new(n), lag(n), x_pred(n);
    const double omega = cfg.damping;

    for (int k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.time(k);
        memory.prepare(k);

        if (k == 0) {
            for (int c = 0; c < n; ++c) x_cur[c] = problem.x0[c];
        } else {
            // Corrector: x_k = lag + scale * d_k, lagged part fixed now.
            for (int c = 0; c < n; ++c) {
                const auto& d = traj.derivs[c];
                double s = tw.first[k] * d[0];
                if (k >= 2)
                    s += kernels::dot_rev(std::span(d.data() + 1, static_cast<std::size_t>(k - 1)),
                                          std::span(tw.interior.data() + 1,
                                                    static_cast<std::size_t>(k - 1)));
                lag[c] = problem.x0[c] + tw.scale * s;
            }
            // Predictor (product rectangle over the accepted derivatives).
            for (int c = 0; c < n; ++c) {
                x_pred[c] = problem.x0[c] +
                            kernels::dot_rev(
                                std::span(traj.derivs[c].data(), static_cast<std::size_t>(k)),
                                std::span(rw.data() + 1, static_cast<std::size_t>(k)));
            }
        }

        // Predict-evaluate: starting derivative iterate.
        {
            std::span<const double> x_start = k == 0 ? std::span<const double>(x_cur)
                                                     : std::span<const double>(x_pred);
            std::vector<double>& d_prev =
                d_guess;  // reuse storage; seeded from the previous node below
            for (int c = 0; c < n; ++c) d_prev[c] = k == 0 ? 0.0 : traj.derivs[c][k - 1];
            problem.rhs(t, x_start, d_prev, memory.value(x_start), d_new);
            if (!all_finite(d_new))
                throw SolveError(SolveError::Kind::BlowUp, k, 0.0,
                                 "solve: non-finite right-hand side at step " + std::to_string(k));
            d_guess = d_new;
        }

        int iterations = 0;
        double prev_residual = std::numeric_limits<double>::infinity();
        int growth_streak = 0;
        bool converged = false;
        for (int it = 1; it <= cfg.implicit_max_iter; ++it) {
            iterations = it;
            if (k > 0)
                for (int c = 0; c < n; ++c) x_cur[c] = lag[c] + tw.scale * d_guess[c];
            problem.rhs(t, x_cur, d_guess, memory.value(x_cur), d_new);
            if (!all_finite(d_new))
                throw SolveError(SolveError::Kind::BlowUp, k, prev_residual,
                                 "solve: non-finite right-hand side at step " + std::to_string(k));
            double residual = 0.0;
            for (int c = 0; c < n; ++c) residual = std::max(residual, std::fabs(d_new[c] - d_guess[c]));
            if (residual <= cfg.implicit_tol) {
                converged = true;
                break;
            }
            if (residual >= prev_residual) {
                if (++growth_streak >= 5)
                    throw SolveError(SolveError::Kind::Divergence, k, residual,
                                     "solve: inner iteration diverges at step " +
                                         std::to_string(k));
            } else {
                growth_streak = 0;
            }
            prev_residual = residual;
            for (int c = 0; c < n; ++c) d_guess[c] = (1.0 - omega) * d_guess[c] + omega * d_new[c];
        }
        if (!converged)
            throw SolveError(SolveError::Kind::NonConvergence, k, prev_residual,
                             "solve: inner iteration did not converge at step " +
                                 std::to_string(k));

        if (k > 0)
            for (int c = 0; c < n; ++c) x_cur[c] = lag[c] + tw.scale * d_guess[c];
        if (!all_finite(x_cur))
            throw SolveError(SolveError::Kind::BlowUp, k, prev_residual,
                             "solve: non-finite state at step " + std::to_string(k));
        for (int c = 0; c < n; ++c) {
            traj.state(c, k) = x_cur[c];
            traj.derivs[c][k] = d_guess[c];
        }
        traj.inner_iters[k] = iterations;
    }
    return traj;
}

double weighted_norm_distance(const Trajectory& a, const Trajectory& b, double rho) {
    if (!a.grid.same_as(b.grid) || a.dimension != b.dimension)
        throw std::invalid_argument("weighted_norm_distance: trajectories on different grids");
    if (!(rho >= 0.0)) throw std::invalid_argument("weighted_norm_distance: rho must be >= 0");
    double sup = 0.0;
    for (int k = 0; k <= a.grid.n_steps; ++k) {
        double m = 0.0;
        for (int c = 0; c < a.dimension; ++c)
            m = std::max(m, std::fabs(a.state(c, k) - b.state(c, k)));
        sup = std::max(sup, std::exp(-rho * a.grid.time(k)) * m);
    }
    return sup;
}

}  // namespace fracdyn
