#include "fracdyn/gronwall.hpp"

#include <cmath>
#include <stdexcept>

#include "fracdyn/fraccore.hpp"
#include "fracdyn/kernels.hpp"
#include "fracdyn/special.hpp"

namespace fracdyn::gronwall {

void GronwallInput::validate() const {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("GronwallInput: alpha must lie in (0, 1]");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("GronwallInput: beta must lie in (0, 1]");
    if (!(norm_a >= 0.0) || !(norm_b >= 0.0))
        throw std::invalid_argument("GronwallInput: operator norms must be nonnegative");
    if (!(T > 0.0)) throw std::invalid_argument("GronwallInput: T must be positive");
    if (!(phi_norm >= 0.0) || !(f_sup >= 0.0))
        throw std::invalid_argument("GronwallInput: phi_norm and f_sup must be nonnegative");
    if (!std::isfinite(norm_a + norm_b + T + phi_norm + f_sup))
        throw std::invalid_argument("GronwallInput: inputs must be finite");
}

namespace {

double window_mass(const GronwallInput& in, double h) {
    return in.norm_a * std::pow(h, in.alpha) / in.alpha +
           in.norm_b * std::pow(h, in.beta) / in.beta;
}

/// Forward majorant recursion with unit data; returns max_i U_i.
/// f_unit/phi_unit select which data channel carries the unit load.
double majorant_max(const GronwallInput& in, double h, int n_win, double q, double f_unit,
                    double phi_unit) {
    // Cross-window kernel masses at window distance d >= 1. The integral of
    // (t-s)^{alpha-1} over source window i-d is largest at the left edge of
    // window i, where t-s spans [(d-1)h, dh]:
    //   sup_{t in window i} int_{window i-d} (t-s)^{alpha-1} ds
    //     = h^alpha (d^alpha - (d-1)^alpha) / alpha.
    // These masses telescope to the exact global kernel mass, so the
    // majorant grows like the true Mittag-Leffler envelope.
    std::vector<double> sig_a(static_cast<std::size_t>(n_win) + 1, 0.0);
    std::vector<double> sig_b(static_cast<std::size_t>(n_win) + 1, 0.0);
    const double ca = in.norm_a * std::pow(h, in.alpha) / in.alpha;
    const double cb = in.norm_b * std::pow(h, in.beta) / in.beta;
    for (int d = 1; d <= n_win; ++d) {
        sig_a[d] = ca * (std::pow(static_cast<double>(d), in.alpha) -
                         std::pow(d - 1.0, in.alpha));
        sig_b[d] = cb * (std::pow(static_cast<double>(d), in.beta) -
                         std::pow(d - 1.0, in.beta));
    }

    std::vector<double> U(static_cast<std::size_t>(n_win), 0.0);
    std::vector<double> D(static_cast<std::size_t>(n_win), 0.0);  // max(phi, U_0..U_i)
    double v_max = 0.0;
    double u_max = 0.0;
    for (int i = 0; i < n_win; ++i) {
        double carry = f_unit;
        if (i >= 1) {
            carry += kernels::dot_rev(std::span(U.data(), static_cast<std::size_t>(i)),
                                      std::span(sig_a.data() + 1, static_cast<std::size_t>(i)));
            carry += kernels::dot_rev(std::span(D.data(), static_cast<std::size_t>(i)),
                                      std::span(sig_b.data() + 1, static_cast<std::size_t>(i)));
        }
        // Own-window delayed factor: u(s - tau) <= max(phi, V_{i-1}) + U_i.
        double d_prev = std::max(phi_unit, v_max);
        carry += cb * d_prev;
        U[i] = carry / (1.0 - q);
        if (!std::isfinite(U[i]))
            throw std::overflow_error("compute_bound_constant: majorant overflows (inputs too large)");
        v_max = std::max(v_max, U[i]);
        D[i] = std::max(phi_unit, v_max);
        u_max = std::max(u_max, U[i]);
    }
    return std::max(u_max, phi_unit);
}

}  // namespace

GronwallCertificate compute_bound_constant(const GronwallInput& in) {
    in.validate();
    GronwallCertificate cert;
    if (in.norm_a == 0.0 && in.norm_b == 0.0) {
        cert.M = 1.0;
        cert.h_star = in.T;
        cert.n_intervals = 1;
        cert.q = 0.0;
        return cert;
    }
    // Largest power-of-two window with kernel mass q <= 1/2. A pure dyadic
    // value (independent of T) keeps M non-decreasing in T: growing the
    // horizon only appends windows to the same recursion.
    double h = std::exp2(20);
    int guard = 0;
    while (window_mass(in, h) > 0.5) {
        h *= 0.5;
        if (++guard > 120)
            throw std::invalid_argument("compute_bound_constant: operator norms out of range");
    }
    const double q = window_mass(in, h);
    const int n_win = static_cast<int>(std::ceil(in.T / h - 1e-12));
    if (n_win > (1 << 22))
        throw std::invalid_argument("compute_bound_constant: partition too fine for these inputs");

    const double m_f = majorant_max(in, h, n_win, q, 1.0, 0.0);
    const double m_phi = majorant_max(in, h, n_win, q, 0.0, 1.0);
    cert.M = std::max({m_f, m_phi, 1.0});
    cert.h_star = h;
    cert.n_intervals = n_win;
    cert.q = q;
    return cert;
}

std::vector<double> bound_curve(const GronwallInput& in, const GronwallCertificate& cert,
                                std::span<const double> f) {
    std::vector<double> out(f.size(), 0.0);
    double run = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        run = std::max(run, f[k]);
        out[k] = cert.M * (in.phi_norm + run);
    }
    return out;
}

CertifyResult certify_bound(const GronwallInput& in, std::span<const double> u,
                            std::span<const double> f, double h, bool assume_hypothesis) {
    in.validate();
    if (u.size() != f.size() || u.empty())
        throw std::invalid_argument("certify_bound: u and f must share a nonempty grid");
    if (!(h > 0.0)) throw std::invalid_argument("certify_bound: h must be positive");

    CertifyResult res;
    res.certificate = compute_bound_constant(in);
    const int n = static_cast<int>(u.size()) - 1;

    if (!assume_hypothesis) {
        // Hypothesis check. Delayed samples are majorized by the running sup
        // of u and the history bound, which matches the certificate's folding.
        const TrapWeights wa = trap_weights(in.alpha, n, h);
        const TrapWeights wb = trap_weights(in.beta, n, h);
        const double ga = special::gamma_fn(in.alpha);
        const double gb = special::gamma_fn(in.beta);
        std::vector<double> u_maj(u.size(), 0.0);
        double run = in.phi_norm;
        for (std::size_t k = 0; k < u.size(); ++k) {
            run = std::max(run, u[k]);
            u_maj[k] = run;
        }
        const double slack = 1e-6;
        for (int k = 0; k <= n; ++k) {
            double rhs = f[k] + in.norm_a * ga * trap_integral(wa, u, k) +
                         in.norm_b * gb * trap_integral(wb, u_maj, k);
            if (u[k] > rhs + slack) {
                res.status = CertifyStatus::HypothesisNotSatisfied;
                res.worst_index = k;
                res.worst_margin = rhs - u[k];
                return res;
            }
        }
    }

    const std::vector<double> bound = bound_curve(in, res.certificate, f);
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        double margin = bound[k] - u[k];
        if (margin < res.worst_margin) {
            res.worst_margin = margin;
            res.worst_index = k;
        }
    }
    res.status = res.worst_margin >= 0.0 ? CertifyStatus::Pass : CertifyStatus::Fail;
    return res;
}

namespace {

/// Solve the small dense system (I - c) x = b in place; n <= 8.
void solve_dense(std::vector<double> m, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(m[r * n + col]) > std::fabs(m[pivot * n + col])) pivot = r;
        if (std::fabs(m[pivot * n + col]) < 1e-14)
            throw std::runtime_error("solve_linear_volterra: singular step system (reduce h)");
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(m[col * n + c], m[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            double fct = m[r * n + col] / m[col * n + col];
            for (int c = col; c < n; ++c) m[r * n + c] -= fct * m[col * n + c];
            b[r] -= fct * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= m[r * n + c] * b[c];
        b[r] = s / m[r * n + r];
    }
}

}  // namespace

std::vector<std::vector<double>> solve_linear_volterra(
    double alpha, double beta, std::span<const double> A, std::span<const double> B, int n,
    double tau, const std::function<void(double, std::span<double>)>& f,
    std::span<const double> phi, double T, double h) {
    if (n < 1 || static_cast<int>(A.size()) != n * n || static_cast<int>(B.size()) != n * n)
        throw std::invalid_argument("solve_linear_volterra: matrix shape mismatch");
    int m_tau = tau > 0.0 ? static_cast<int>(std::lround(tau / h)) : 0;
    if (tau > 0.0 && std::fabs(m_tau * h - tau) > 1e-9 * std::max(1.0, tau))
        throw std::invalid_argument("solve_linear_volterra: tau must be grid-aligned");
    const int steps = static_cast<int>(std::ceil(T / h - 1e-9));

    const TrapWeights wa = trap_weights(alpha, steps, h);
    const TrapWeights wb = trap_weights(beta, steps, h);
    const double ga = special::gamma_fn(alpha);
    const double gb = special::gamma_fn(beta);

    // Node storage with m_tau history nodes in front.
    std::vector<std::vector<double>> u(static_cast<std::size_t>(n));
    for (auto& comp : u) comp.assign(static_cast<std::size_t>(m_tau + steps + 1), 0.0);
    for (int c = 0; c < n; ++c)
        for (int k = 0; k < m_tau; ++k) u[c][k] = phi[c];

    auto at = [&](int c, int k) { return u[c][k + m_tau]; };

    std::vector<double> fa(static_cast<std::size_t>(n)), au(static_cast<std::size_t>(steps) + 1),
        bu(static_cast<std::size_t>(steps) + 1), rhs(static_cast<std::size_t>(n)),
        mat(static_cast<std::size_t>(n) * n);

    std::vector<std::vector<double>> Au(static_cast<std::size_t>(n)),
        Bu(static_cast<std::size_t>(n));
    for (auto& v : Au) v.assign(static_cast<std::size_t>(steps) + 1, 0.0);
    for (auto& v : Bu) v.assign(static_cast<std::size_t>(steps) + 1, 0.0);

    auto fill_products = [&](int k) {
        // (A u)(t_k) and (B u(.-tau))(t_k) componentwise.
        for (int r = 0; r < n; ++r) {
            double sa = 0.0, sb = 0.0;
            for (int c = 0; c < n; ++c) {
                sa += A[r * n + c] * at(c, k);
                int jd = k - m_tau;
                sb += B[r * n + c] * (jd >= -m_tau ? u[c][jd + m_tau] : phi[c]);
            }
            Au[r][k] = sa;
            Bu[r][k] = sb;
        }
    };

    f(0.0, fa);
    for (int c = 0; c < n; ++c) u[c][m_tau] = fa[c];
    fill_products(0);

    for (int k = 1; k <= steps; ++k) {
        f(k * h, fa);
        for (int r = 0; r < n; ++r) {
            double ia = wa.first[k] * Au[r][0];
            double ib = wb.first[k] * Bu[r][0];
            if (k >= 2) {
                ia += kernels::dot_rev(std::span(Au[r].data() + 1, static_cast<std::size_t>(k - 1)),
                                       std::span(wa.interior.data() + 1,
                                                 static_cast<std::size_t>(k - 1)));
                ib += kernels::dot_rev(std::span(Bu[r].data() + 1, static_cast<std::size_t>(k - 1)),
                                       std::span(wb.interior.data() + 1,
                                                 static_cast<std::size_t>(k - 1)));
            }
            rhs[r] = fa[r] + ga * wa.scale * ia + gb * wb.scale * ib;
        }
        // Endpoint terms: u_k enters through A u_k (and B u_k when tau = 0).
        const double cea = ga * wa.scale;
        const double ceb = gb * wb.scale;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double v = -cea * A[r * n + c];
                if (m_tau == 0) v -= ceb * B[r * n + c];
                mat[r * n + c] = (r == c ? 1.0 : 0.0) + v;
            }
        if (m_tau > 0) {
            // Delayed endpoint is already known; move it to the right side.
            for (int r = 0; r < n; ++r) {
                double s = 0.0;
                for (int c = 0; c < n; ++c) s += B[r * n + c] * at(c, k - m_tau);
                rhs[r] += ceb * s;
            }
        }
        solve_dense(mat, rhs, n);
        for (int c = 0; c < n; ++c) u[c][k + m_tau] = rhs[c];
        fill_products(k);
    }

    // Strip the history prefix.
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c)
        out[c].assign(u[c].begin() + m_tau, u[c].end());
    return out;
}

}  // namespace fracdyn::gronwall
