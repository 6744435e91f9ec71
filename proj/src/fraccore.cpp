#include "fracdyn/fraccore.hpp"

#include <cmath>

#include "fracdyn/kernels.hpp"
#include "fracdyn/special.hpp"

namespace fracdyn {

HistoryFunction HistoryFunction::constant(std::vector<double> values) {
    HistoryFunction f;
    f.kind_ = Kind::Constant;
    f.dimension_ = static_cast<int>(values.size());
    f.data_.reserve(values.size());
    for (double v : values) f.data_.push_back({v});
    return f;
}

HistoryFunction HistoryFunction::polynomial(std::vector<std::vector<double>> coeffs) {
    HistoryFunction f;
    f.kind_ = Kind::Polynomial;
    f.dimension_ = static_cast<int>(coeffs.size());
    f.data_ = std::move(coeffs);
    return f;
}

HistoryFunction HistoryFunction::sampled(std::vector<std::vector<double>> samples, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("HistoryFunction: sample step must be positive");
    HistoryFunction f;
    f.kind_ = Kind::Sampled;
    f.dimension_ = static_cast<int>(samples.size());
    f.data_ = std::move(samples);
    f.sample_h_ = h;
    for (const auto& comp : f.data_)
        if (comp.empty()) throw std::invalid_argument("HistoryFunction: empty sample set");
    return f;
}

double HistoryFunction::eval_component(double t, int c) const {
    switch (kind_) {
        case Kind::Constant:
            return data_[c][0];
        case Kind::Polynomial: {
            double v = 0.0;
            for (std::size_t i = data_[c].size(); i-- > 0;) v = v * t + data_[c][i];
            return v;
        }
        case Kind::Sampled: {
            const auto& s = data_[c];
            const int m = static_cast<int>(s.size()) - 1;  // nodes -m h .. 0
            double pos = t / sample_h_ + m;                // node index
            if (pos <= 0.0) return s.front();
            if (pos >= m) return s.back();
            int i = static_cast<int>(pos);
            double frac = pos - i;
            if (frac < 1e-9) return s[i];
            if (frac > 1.0 - 1e-9) return s[i + 1];
            return s[i] * (1.0 - frac) + s[i + 1] * frac;
        }
    }
    return 0.0;
}

void HistoryFunction::eval(double t, std::span<double> out) const {
    for (int c = 0; c < dimension_; ++c) out[c] = eval_component(t, c);
}

MemoryOperatorSpec MemoryOperatorSpec::discrete_delay(double tau) {
    MemoryOperatorSpec s;
    s.kind = MemoryKind::DiscreteDelay;
    s.tau = tau;
    s.validate();
    return s;
}

MemoryOperatorSpec MemoryOperatorSpec::fractional_integral(double beta) {
    MemoryOperatorSpec s;
    s.kind = MemoryKind::FractionalIntegral;
    s.beta = beta;
    s.validate();
    return s;
}

MemoryOperatorSpec MemoryOperatorSpec::distributed(double beta, KernelCoefficient g,
                                                   InnerMap phi, double tau) {
    MemoryOperatorSpec s;
    s.kind = MemoryKind::DistributedKernel;
    s.beta = beta;
    s.g = std::move(g);
    s.phi = std::move(phi);
    s.tau = tau;
    s.validate();
    return s;
}

void MemoryOperatorSpec::validate() const {
    if (kind == MemoryKind::DiscreteDelay && !(tau > 0.0))
        throw std::invalid_argument("MemoryOperatorSpec: delay tau must be positive");
    if (kind == MemoryKind::DistributedKernel || kind == MemoryKind::FractionalIntegral) {
        if (!(beta > 0.0) || beta > 1.0)
            throw std::invalid_argument("MemoryOperatorSpec: beta must lie in (0, 1]");
    }
    if (tau < 0.0) throw std::invalid_argument("MemoryOperatorSpec: tau must be nonnegative");
}

void Trajectory::resize(int dim, const UniformGrid& g) {
    grid = g;
    dimension = dim;
    states.assign(dim, std::vector<double>(g.delay_steps + g.n_steps + 1, 0.0));
    derivs.assign(dim, std::vector<double>(g.n_steps + 1, 0.0));
    inner_iters.assign(g.n_steps + 1, 0);
}

std::vector<double> rect_weights(double alpha, int n_steps, double h) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("rect_weights: alpha must lie in (0, 1]");
    const double scale = std::pow(h, alpha) / special::gamma_fn(alpha + 1.0);
    std::vector<double> w(static_cast<std::size_t>(n_steps) + 1, 0.0);
    double prev = 0.0;  // (m-1)^alpha
    for (int m = 1; m <= n_steps; ++m) {
        double cur = std::pow(static_cast<double>(m), alpha);
        w[m] = scale * (cur - prev);
        prev = cur;
    }
    return w;
}

TrapWeights trap_weights(double alpha, int n_steps, double h) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("trap_weights: alpha must lie in (0, 1]");
    TrapWeights w;
    w.scale = std::pow(h, alpha) / special::gamma_fn(alpha + 2.0);
    w.interior.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
    w.first.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
    const double ap1 = alpha + 1.0;
    for (int m = 1; m <= n_steps; ++m) {
        w.interior[m] = std::pow(m + 1.0, ap1) - 2.0 * std::pow(static_cast<double>(m), ap1) +
                        std::pow(m - 1.0, ap1);
    }
    for (int k = 1; k <= n_steps; ++k) {
        w.first[k] =
            std::pow(k - 1.0, ap1) - (k - 1.0 - alpha) * std::pow(static_cast<double>(k), alpha);
    }
    return w;
}

double trap_integral(const TrapWeights& w, std::span<const double> f, int k) {
    if (k <= 0) return 0.0;
    double lag = w.first[k] * f[0];
    if (k >= 2)
        lag += kernels::dot_rev(std::span(f.data() + 1, static_cast<std::size_t>(k - 1)),
                                std::span(w.interior.data() + 1, static_cast<std::size_t>(k - 1)));
    return w.scale * (lag + f[k]);
}

double rect_integral(std::span<const double> w, std::span<const double> f, int k) {
    if (k <= 0) return 0.0;
    return kernels::dot_rev(std::span(f.data(), static_cast<std::size_t>(k)),
                            std::span(w.data() + 1, static_cast<std::size_t>(k)));
}

std::vector<double> caputo_derivative_grid(std::span<const double> x, double alpha, double h) {
    if (x.size() < 2) throw std::invalid_argument("caputo_derivative_grid: need at least 2 samples");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("caputo_derivative_grid: alpha must lie in (0, 1]");
    const int n = static_cast<int>(x.size()) - 1;
    const double scale = std::pow(h, -alpha) / special::gamma_fn(2.0 - alpha);
    // c[m] = (m+1)^{1-alpha} - m^{1-alpha}
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    const double e = 1.0 - alpha;
    double prev = 0.0;
    for (int m = 0; m < n; ++m) {
        double cur = std::pow(m + 1.0, e);
        c[m] = cur - prev;
        prev = cur;
    }
    std::vector<double> dx(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) dx[j] = x[j + 1] - x[j];

    std::vector<double> out(x.size(), 0.0);
    for (int k = 1; k <= n; ++k) {
        // sum_{j=0..k-1} c[k-1-j] dx[j]
        out[k] = scale * kernels::dot_rev(std::span(dx.data(), static_cast<std::size_t>(k)),
                                          std::span(c.data(), static_cast<std::size_t>(k)));
    }
    return out;
}

namespace {

double delayed_component(const Trajectory& traj, int c, int k, int delay_steps) {
    int j = k - delay_steps;
    if (j < -traj.grid.delay_steps)
        throw std::out_of_range("apply_memory_operator: delayed argument precedes the history");
    return traj.state(c, j);
}

}  // namespace

std::vector<double> apply_memory_operator(const MemoryOperatorSpec& spec, const Trajectory& traj,
                                          int t_index) {
    std::vector<double> out(static_cast<std::size_t>(traj.dimension), 0.0);
    if (spec.kind == MemoryKind::None) return out;

    if (spec.kind == MemoryKind::DiscreteDelay) {
        if (traj.grid.delay_steps <= 0)
            throw std::invalid_argument("apply_memory_operator: grid carries no delay alignment");
        for (int c = 0; c < traj.dimension; ++c)
            out[c] = delayed_component(traj, c, t_index, traj.grid.delay_steps);
        return out;
    }

    // Weakly singular kernel (t-s)^{beta-1} g(t,s) phi(s, u, u_delayed),
    // integrated with the product-trapezoidal rule. FractionalIntegral is
    // the normalized case g = 1/Gamma(beta), phi = u.
    const double t = traj.grid.time(t_index);
    const TrapWeights w = trap_weights(spec.beta, t_index, traj.grid.h);
    const double kernel_gamma = special::gamma_fn(spec.beta);
    const bool normalized = spec.kind == MemoryKind::FractionalIntegral;
    const int delay_steps =
        spec.tau > 0.0 ? static_cast<int>(std::lround(spec.tau / traj.grid.h)) : 0;

    std::vector<double> values(static_cast<std::size_t>(t_index) + 1, 0.0);
    for (int c = 0; c < traj.dimension; ++c) {
        for (int j = 0; j <= t_index; ++j) {
            double s = traj.grid.time(j);
            double u = traj.state(c, j);
            double phi_v;
            if (spec.phi) {
                double ud = delay_steps > 0 ? delayed_component(traj, c, j, delay_steps) : u;
                phi_v = spec.phi(s, u, ud);
            } else {
                phi_v = u;
            }
            if (spec.g) phi_v *= spec.g(t, s);
            values[j] = phi_v;
        }
        double integral = trap_integral(w, values, t_index);
        out[c] = normalized ? integral : integral * kernel_gamma;
    }
    return out;
}

}  // namespace fracdyn
