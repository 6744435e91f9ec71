#pragma once

// Discretized fractional operators on a uniform grid: product-quadrature
// weights for the Riemann-Liouville integral, the L1 form of the Caputo
// derivative, and the memory-operator family (discrete delay, weakly
// singular distributed kernel, fractional integral).

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracdyn {

struct UniformGrid {
    double h = 0.0;       // step size, > 0
    int n_steps = 0;      // nodes t_k = k h for k = 0..n_steps
    int delay_steps = 0;  // m such that tau = m h; 0 when no delay

    double time(int k) const { return k * h; }
    double horizon() const { return n_steps * h; }
    bool same_as(const UniformGrid& o) const {
        return h == o.h && n_steps == o.n_steps && delay_steps == o.delay_steps;
    }
};

/// Initial data on [-tau, 0].
class HistoryFunction {
public:
    enum class Kind { Constant, Polynomial, Sampled };

    static HistoryFunction constant(std::vector<double> values);
    /// One coefficient list (c0 + c1 t + ...) per component, t in [-tau, 0].
    static HistoryFunction polynomial(std::vector<std::vector<double>> coeffs);
    /// Samples on the m+1 uniform nodes -tau, -tau+h, ..., 0.
    static HistoryFunction sampled(std::vector<std::vector<double>> samples, double h);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }

    /// Value at t <= 0. Sampled histories are exact at their own nodes and
    /// linearly interpolated between them.
    void eval(double t, std::span<double> out) const;
    double eval_component(double t, int c) const;

    const std::vector<std::vector<double>>& data() const { return data_; }
    double sample_step() const { return sample_h_; }

private:
    Kind kind_ = Kind::Constant;
    int dimension_ = 0;
    std::vector<std::vector<double>> data_;
    double sample_h_ = 0.0;
};

enum class MemoryKind { None, DiscreteDelay, DistributedKernel, FractionalIntegral };

/// Pointwise nonlinearity phi(s, u, u_delayed) applied inside a distributed
/// kernel, one component at a time.
using InnerMap = std::function<double(double s, double u, double u_delayed)>;
/// Bounded coefficient g(t, s) of a weakly singular kernel.
using KernelCoefficient = std::function<double(double t, double s)>;

struct MemoryOperatorSpec {
    MemoryKind kind = MemoryKind::None;
    double tau = 0.0;   // DiscreteDelay (and optional delayed argument of phi)
    double beta = 1.0;  // kernel exponent in (0, 1]
    KernelCoefficient g;  // default: identically 1
    InnerMap phi;         // default: identity in u

    static MemoryOperatorSpec none() { return {}; }
    static MemoryOperatorSpec discrete_delay(double tau);
    static MemoryOperatorSpec fractional_integral(double beta);
    static MemoryOperatorSpec distributed(double beta, KernelCoefficient g = nullptr,
                                          InnerMap phi = nullptr, double tau = 0.0);

    void validate() const;
};

/// Sampled solution together with the implicit Caputo-derivative values.
/// State samples cover the history nodes as well: node k runs over
/// [-delay_steps, n_steps] and is stored at index k + delay_steps.
struct Trajectory {
    UniformGrid grid;
    int dimension = 0;
    std::vector<std::vector<double>> states;  // [component][delay_steps + n_steps + 1]
    std::vector<std::vector<double>> derivs;  // [component][n_steps + 1], nodes t >= 0
    std::vector<int> inner_iters;             // [n_steps + 1]

    double state(int c, int k) const { return states[c][k + grid.delay_steps]; }
    double& state(int c, int k) { return states[c][k + grid.delay_steps]; }
    double deriv(int c, int k) const { return derivs[c][k]; }

    void resize(int dimension, const UniformGrid& grid);
};

/// Convolution weights of the product-rectangle rule for I^alpha:
/// I^alpha f(t_k) ~= sum_{m=1..k} w[m] f_{k-m}. All entries nonnegative.
std::vector<double> rect_weights(double alpha, int n_steps, double h);

/// Product-trapezoidal weights for I^alpha:
/// I^alpha f(t_k) ~= scale * (first[k] f_0 + sum_{j=1..k-1} interior[k-j] f_j + f_k).
struct TrapWeights {
    double scale = 0.0;            // h^alpha / Gamma(alpha + 2)
    std::vector<double> interior;  // interior[m], m = 1..n_steps
    std::vector<double> first;     // first[k], k = 0..n_steps
};
TrapWeights trap_weights(double alpha, int n_steps, double h);

/// I^alpha applied to samples f_0..f_k with the trapezoidal weights.
double trap_integral(const TrapWeights& w, std::span<const double> f, int k);
/// Same with the rectangle rule (uses f_0..f_{k-1}).
double rect_integral(std::span<const double> w, std::span<const double> f, int k);

/// L1 discretization of the Caputo derivative of one sampled component.
/// out[0] = 0 by convention; out[k] for k >= 1. Throws std::invalid_argument
/// for fewer than 2 samples.
std::vector<double> caputo_derivative_grid(std::span<const double> x, double alpha, double h);

/// Memory-operator evaluation at node t_index of a populated trajectory.
/// DiscreteDelay returns the grid-aligned delayed state; the kernel kinds
/// return the product-trapezoidal value of the singular integral.
std::vector<double> apply_memory_operator(const MemoryOperatorSpec& spec,
                                          const Trajectory& traj, int t_index);

}  // namespace fracdyn
