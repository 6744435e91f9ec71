#include "fracdyn/fhn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracdyn/special.hpp"

namespace fracdyn::fhn {

void FhnParams::validate() const {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("FhnParams: alpha must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("FhnParams: epsilon must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("FhnParams: b must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("FhnParams: tau must be positive");
}

ProblemSpec fhn_rhs(const FhnParams& p, const HistoryFunction& history, double T) {
    p.validate();
    if (history.dimension() != 2)
        throw std::invalid_argument("fhn_rhs: history must be two-dimensional (v, w)");
    ProblemSpec spec;
    spec.dimension = 2;
    spec.alpha = p.alpha;
    spec.memory = MemoryOperatorSpec::discrete_delay(p.tau);
    spec.history = history;
    spec.x0 = {history.eval_component(0.0, 0), history.eval_component(0.0, 1)};
    spec.T = T;
    const double eps = p.epsilon, a = p.a, b = p.b, lam = p.lambda, i_ext = p.i_ext;
    spec.rhs = [eps, a, b, lam, i_ext](double, std::span<const double> x,
                                       std::span<const double>, std::span<const double> m,
                                       std::span<double> out) {
        const double v = x[0], w = x[1];
        out[0] = v - v * v * v / 3.0 - w + i_ext + lam * m[0];
        out[1] = eps * (v + a - b * w);
    };
    return spec;
}

namespace {

double equilibrium_residual(const FhnParams& p, double v) {
    return v - v * v * v / 3.0 - (v + p.a) / p.b + p.i_ext + p.lambda * v;
}

double polish_root(const FhnParams& p, double v) {
    // Newton on the equilibrium equation; derivative 1 + lambda - 1/b - v^2.
    for (int i = 0; i < 60; ++i) {
        double g = equilibrium_residual(p, v);
        double dg = 1.0 + p.lambda - 1.0 / p.b - v * v;
        if (std::fabs(dg) < 1e-14) break;
        double step = g / dg;
        v -= step;
        if (std::fabs(step) < 1e-16 * std::max(1.0, std::fabs(v))) break;
    }
    return v;
}

}  // namespace

Equilibrium equilibrium(const FhnParams& p) {
    p.validate();
    // v^3 + 3 p v + 3 q' = 0 after scaling: the equation
    //   -v^3/3 + (1 + lambda - 1/b) v + (i_ext - a/b) = 0
    // becomes v^3 + pc v + qc = 0 with
    const double pc = -3.0 * (1.0 + p.lambda - 1.0 / p.b);
    const double qc = -3.0 * (p.i_ext - p.a / p.b);

    Equilibrium eq;
    const double disc = -4.0 * pc * pc * pc - 27.0 * qc * qc;
    if (disc > 0.0) {
        // Three real roots (trigonometric form); pc < 0 here.
        double m = 2.0 * std::sqrt(-pc / 3.0);
        double arg = std::clamp(3.0 * qc / (pc * m), -1.0, 1.0);
        double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            eq.v0.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0));
        std::sort(eq.v0.begin(), eq.v0.end());
        eq.unique = false;
    } else {
        // One real root (Cardano, numerically stable branch).
        double half_q = qc / 2.0;
        double d = std::sqrt(std::max(0.0, half_q * half_q + pc * pc * pc / 27.0));
        double u = std::cbrt(-half_q + (half_q >= 0.0 ? -d : d));
        double v = u != 0.0 ? -pc / (3.0 * u) : 0.0;
        eq.v0.push_back(u + v);
        eq.unique = true;
    }
    for (double& v : eq.v0) v = polish_root(p, v);
    for (double v : eq.v0) eq.w0.push_back((v + p.a) / p.b);
    return eq;
}

TheoremConditions theorem_conditions(const FhnParams& p) {
    p.validate();
    TheoremConditions c;
    const double g1 = special::gamma_fn(p.alpha + 1.0);
    const double ratio = p.alpha < 1.0 ? (1.0 - p.alpha) / p.alpha : 0.0;
    c.lambda0 = g1 / std::pow(p.tau, p.alpha) * std::min(0.5, ratio);
    c.degenerate_lambda0 = p.alpha == 1.0;
    c.epsilon0 = p.b * g1 / 2.0 *
                 (1.0 - std::fabs(p.lambda) * std::pow(p.tau, p.alpha) / g1);
    c.lambda_ok = std::fabs(p.lambda) < c.lambda0;
    c.epsilon_ok = p.epsilon > 0.0 && p.epsilon < c.epsilon0;
    c.subthreshold_ok = p.a < 1.0 + p.b * p.b / (4.0 * p.epsilon);
    c.all_satisfied = c.lambda_ok && c.epsilon_ok && c.subthreshold_ok;
    return c;
}

AnnulusSpec annulus(const FhnParams& p, double horizon) {
    p.validate();
    AnnulusSpec s;
    s.delta = std::min(2.0 / 3.0, p.b / 2.0);
    s.C1 = std::fabs(p.lambda) / 2.0;
    s.C2 = p.i_ext * p.i_ext / 2.0 + p.epsilon * p.a * p.a / 2.0;
    s.degenerate = s.C2 == 0.0;

    if (horizon <= 0.0) horizon = std::max(1.0, 2.0 * p.tau);
    gronwall::GronwallInput in;
    in.alpha = p.alpha;
    in.beta = p.alpha;
    in.norm_a = 0.0;
    in.norm_b = s.C1 / special::gamma_fn(p.alpha);
    in.T = horizon;
    s.M = gronwall::compute_bound_constant(in).M;

    s.R1 = std::sqrt(s.C2 / s.delta);
    s.R2 = std::sqrt(2.0 * s.C2 / s.delta + s.M * s.C2 / s.delta);
    return s;
}

LyapunovSeries lyapunov_series(const Trajectory& traj, const FhnParams& p) {
    if (traj.dimension != 2)
        throw std::invalid_argument("lyapunov_series: trajectory must be two-dimensional");
    const AnnulusSpec ann = annulus(p, traj.grid.horizon());
    LyapunovSeries out;
    const int n = traj.grid.n_steps;
    out.V.resize(static_cast<std::size_t>(n) + 1);
    out.envelope.resize(static_cast<std::size_t>(n) + 1);
    out.ultimate_bound = ann.degenerate ? 0.0 : 2.0 * ann.C2 / ann.delta;

    for (int k = 0; k <= n; ++k) {
        double v = traj.state(0, k), w = traj.state(1, k);
        out.V[k] = v * v / 2.0 + w * w / (2.0 * p.epsilon);
    }
    const double v0_plus = out.V[0] + (ann.degenerate ? 0.0 : ann.C2 / ann.delta);
    for (int k = 0; k <= n; ++k) {
        double t = traj.grid.time(k);
        double ml = special::mittag_leffler(
            {p.alpha, 1.0, -(ann.delta / 2.0) * std::pow(t, p.alpha)});
        out.envelope[k] = ann.M * v0_plus * ml + out.ultimate_bound;
        if (out.first_violation < 0 && out.V[k] > out.envelope[k] * (1.0 + 1e-12))
            out.first_violation = k;
    }
    return out;
}

namespace {

std::complex<double> char_fn(std::complex<double> s, double alpha, double c, double lambda,
                             double tau) {
    return std::pow(s, alpha) - c - lambda * std::exp(-s * tau);
}

std::complex<double> char_dfn(std::complex<double> s, double alpha, double lambda, double tau) {
    return alpha * std::pow(s, alpha - 1.0) + lambda * tau * std::exp(-s * tau);
}

}  // namespace

RootScan characteristic_roots(const FhnParams& p, double v0, const RootBox& box) {
    p.validate();
    const double c = 1.0 - v0 * v0 - 1.0 / p.b;
    const double alpha = p.alpha, lam = p.lambda, tau = p.tau;

    RootScan scan;
    const int nr = 21, ni = 21;  // 441 seeds
    const double re_span = box.re_max - box.re_min;
    const double im_span = box.im_max - box.im_min;
    const double dedupe_tol = 1e-6;
    const double box_slack = 0.05;

    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < ni; ++j) {
            std::complex<double> s(box.re_min + re_span * (i + 0.5) / nr,
                                   box.im_min + im_span * (j + 0.5) / ni);
            if (std::abs(s) < 1e-6) s += std::complex<double>(1e-3, 1e-3);
            bool converged = false;
            for (int it = 0; it < 80; ++it) {
                std::complex<double> f = char_fn(s, alpha, c, lam, tau);
                std::complex<double> df = char_dfn(s, alpha, lam, tau);
                if (std::abs(df) < 1e-300) break;
                std::complex<double> step = f / df;
                s -= step;
                if (std::abs(s) < 1e-12) break;  // drifting into the branch point
                if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(s))) {
                    converged = true;
                    break;
                }
                if (std::abs(s) > 1e6) break;
            }
            if (!converged) continue;
            double residual = std::abs(char_fn(s, alpha, c, lam, tau));
            if (residual > 1e-10) continue;
            if (s.real() < box.re_min - box_slack * std::max(1.0, re_span) ||
                s.real() > box.re_max + box_slack * std::max(1.0, re_span) ||
                s.imag() < box.im_min - box_slack * std::max(1.0, im_span) ||
                s.imag() > box.im_max + box_slack * std::max(1.0, im_span))
                continue;
            bool dup = false;
            for (const auto& r : scan.roots) {
                if (std::abs(r.s - s) < dedupe_tol) {
                    dup = true;
                    break;
                }
            }
            if (!dup) scan.roots.push_back({s, residual});
        }
    }
    std::sort(scan.roots.begin(), scan.roots.end(),
              [](const CharacteristicRoot& a, const CharacteristicRoot& b) {
                  if (a.s.real() != b.s.real()) return a.s.real() > b.s.real();
                  return a.s.imag() < b.s.imag();
              });
    if (!scan.roots.empty()) {
        scan.rightmost = scan.roots.front().s;
        scan.unstable = scan.rightmost.real() > 0.0;
    }
    return scan;
}

}  // namespace fracdyn::fhn
