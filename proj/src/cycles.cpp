#include "fracdyn/cycles.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "fracdyn/special.hpp"

namespace fracdyn::cycles {

double HistorySegment::distance(const HistorySegment& other) const {
    if (samples.size() != other.samples.size() || nodes() != other.nodes())
        throw std::invalid_argument("HistorySegment: node sets differ");
    double m = 0.0;
    for (std::size_t c = 0; c < samples.size(); ++c)
        for (std::size_t k = 0; k < samples[c].size(); ++k)
            m = std::max(m, std::fabs(samples[c][k] - other.samples[c][k]));
    return m;
}

HistorySegment tail_segment(const Trajectory& traj) {
    const int m = traj.grid.delay_steps;
    const int n = traj.grid.n_steps;
    if (m <= 0) throw std::invalid_argument("tail_segment: trajectory has no delay window");
    HistorySegment seg;
    seg.h = traj.grid.h;
    seg.samples.assign(static_cast<std::size_t>(traj.dimension), {});
    for (int c = 0; c < traj.dimension; ++c) {
        seg.samples[c].reserve(static_cast<std::size_t>(m) + 1);
        for (int k = n - m; k <= n; ++k) seg.samples[c].push_back(traj.state(c, k));
    }
    return seg;
}

HistorySegment poincare_map(const HistorySegment& phi, const fhn::FhnParams& params,
                            double T_map, const SolverConfig& cfg, Trajectory* full_trajectory) {
    if (!(T_map > params.tau))
        throw std::invalid_argument("poincare_map: T_map must exceed the delay");
    ProblemSpec spec = fhn_rhs(params, phi.as_history(), T_map);
    SolverConfig run = cfg;
    run.h = phi.h;  // keep the segment's node set
    Trajectory traj = solve(spec, run);
    HistorySegment out = tail_segment(traj);
    if (full_trajectory) *full_trajectory = std::move(traj);
    return out;
}

namespace {

struct CrossingStats {
    double amplitude = 0.0;
    double period = 0.0;  // mean spacing of upward mean-crossings, 0 if < 2
    int crossings = 0;
};

CrossingStats v_crossings(const Trajectory& traj) {
    CrossingStats st;
    const int n = traj.grid.n_steps;
    double vmin = traj.state(0, 0), vmax = vmin, mean = 0.0;
    for (int k = 0; k <= n; ++k) {
        double v = traj.state(0, k);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        mean += v;
    }
    mean /= n + 1;
    st.amplitude = vmax - vmin;

    double first = 0.0, last = 0.0;
    for (int k = 1; k <= n; ++k) {
        double p = traj.state(0, k - 1) - mean;
        double c = traj.state(0, k) - mean;
        if (p < 0.0 && c >= 0.0) {
            // linear interpolation of the crossing instant
            double frac = p / (p - c);
            double t = traj.grid.time(k - 1) + frac * traj.grid.h;
            if (st.crossings == 0) first = t;
            last = t;
            ++st.crossings;
        }
    }
    if (st.crossings >= 2) st.period = (last - first) / (st.crossings - 1);
    return st;
}

}  // namespace

LimitCycleReport find_cycle(const fhn::FhnParams& params, const HistoryFunction& initial,
                            const CycleConfig& cfg) {
    LimitCycleReport rep;
    rep.transient_discarded = cfg.t_skip;

    // Transient.
    ProblemSpec spec = fhn_rhs(params, initial, std::max(cfg.t_skip, params.tau + cfg.solver.h));
    Trajectory transient = solve(spec, cfg.solver);
    HistorySegment seg = tail_segment(transient);

    // Measurement window: amplitude and crossing-based period estimate.
    Trajectory measured;
    poincare_map(seg, params, std::max(cfg.t_measure, 2.0 * params.tau), cfg.solver, &measured);
    CrossingStats st = v_crossings(measured);
    rep.amplitude = st.amplitude;
    if (st.amplitude <= cfg.amplitude_floor) {
        rep.diagnostic = "amplitude below floor (no sustained oscillation)";
        return rep;
    }
    if (st.crossings < 2) {
        rep.diagnostic = "fewer than two mean-crossings in the measurement window";
        return rep;
    }
    const double h = measured.grid.h;
    double period = st.period;
    // Map horizon: the period rounded to the grid, lifted above the delay.
    double t_star = std::round(period / h) * h;
    while (t_star <= params.tau + h) t_star += std::round(period / h) * h;

    seg = tail_segment(measured);
    Trajectory last_map;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < cfg.max_map_iter; ++it) {
        HistorySegment next = poincare_map(seg, params, t_star, cfg.solver, &last_map);
        residual = seg.distance(next);
        seg = std::move(next);
        if (residual <= cfg.cycle_tol) break;
    }
    rep.map_iterations = it + 1;
    rep.poincare_residual = residual;

    CrossingStats refined = v_crossings(last_map);
    if (refined.crossings >= 2) rep.period = refined.period;
    else rep.period = period;
    rep.amplitude = std::max(rep.amplitude, refined.amplitude);

    rep.found = residual <= cfg.cycle_tol && rep.amplitude > cfg.amplitude_floor;
    if (!rep.found && rep.diagnostic.empty())
        rep.diagnostic = "time-T map iteration did not reach cycle_tol";

    // Annulus membership of the final orbit in the weighted norm.
    const fhn::AnnulusSpec ann = annulus(params, last_map.grid.horizon());
    bool inside = true;
    for (int k = 0; k <= last_map.grid.n_steps; ++k) {
        double v = last_map.state(0, k), w = last_map.state(1, k);
        double r = std::sqrt(v * v + w * w / params.epsilon);
        if (r < ann.R1 * 0.9 || r > ann.R2 * 1.1) {
            inside = false;
            break;
        }
    }
    rep.in_annulus = inside;
    return rep;
}

HolderEstimate holder_constant(const Trajectory& traj, double alpha, int window) {
    const int n = traj.grid.n_steps;
    if (n + 1 < 10) throw std::invalid_argument("holder_constant: need at least 10 nodes");
    HolderEstimate est;
    const double h = traj.grid.h;
    for (int i = 0; i <= n; ++i) {
        int j_max = std::min(n, i + window);
        for (int j = i + 1; j <= j_max; ++j) {
            double diff = 0.0;
            for (int c = 0; c < traj.dimension; ++c)
                diff = std::max(diff, std::fabs(traj.state(c, j) - traj.state(c, i)));
            double q = diff / std::pow((j - i) * h, alpha);
            if (q > est.empirical) est.empirical = q;
        }
    }
    double d_sup = 0.0;
    for (int c = 0; c < traj.dimension; ++c)
        for (int k = 0; k <= n; ++k) d_sup = std::max(d_sup, std::fabs(traj.deriv(c, k)));
    est.theoretical = 2.0 * d_sup / special::gamma_fn(alpha + 1.0);
    return est;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_power_law: need at least two points");
    PowerLawFit fit;
    const int n = static_cast<int>(x.size());
    fit.points = n;
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(x.size()), ly(y.size());
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_power_law: samples must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    fit.exponent = sxy / sxx;
    fit.log_prefactor = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = ly[i] - (fit.log_prefactor + fit.exponent * lx[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.stderr_exponent = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return fit;
}

std::vector<double> log_spaced_taus(double tau_min, double tau_max, int count) {
    if (!(tau_min > 0.0) || !(tau_max > tau_min) || count < 2)
        throw std::invalid_argument("log_spaced_taus: need 0 < tau_min < tau_max and count >= 2");
    std::vector<double> taus(static_cast<std::size_t>(count));
    const double l0 = std::log(tau_max), l1 = std::log(tau_min);
    for (int i = 0; i < count; ++i)
        taus[i] = std::exp(l0 + (l1 - l0) * i / (count - 1));
    return taus;  // decreasing toward tau_min
}

namespace {

int scan_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FRACDYN_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Simulated spike probe: does v exceed its own equilibrium by the margin?
bool simulated_spike(const fhn::FhnParams& base, double tau, double i_ext,
                     const ScanConfig& cfg) {
    fhn::FhnParams p = base;
    p.tau = tau;
    p.i_ext = i_ext;
    // Rest at the zero-current equilibrium, then switch the current on.
    fhn::FhnParams rest = p;
    rest.i_ext = 0.0;
    fhn::Equilibrium rest_eq = equilibrium(rest);
    HistoryFunction hist = HistoryFunction::constant({rest_eq.v0.front(), rest_eq.w0.front()});

    fhn::Equilibrium probe_eq = equilibrium(p);
    double v_eq = probe_eq.v0.front();
    for (std::size_t i = 1; i < probe_eq.v0.size(); ++i)
        v_eq = std::max(v_eq, probe_eq.v0[i]);

    ProblemSpec spec = fhn_rhs(p, hist, cfg.t_obs);
    Trajectory traj = solve(spec, cfg.solver);
    for (int k = 0; k <= traj.grid.n_steps; ++k)
        if (traj.state(0, k) > v_eq + cfg.spike_margin) return true;
    return false;
}

ScanPoint scan_one_tau(double tau, const ScanConfig& cfg,
                       const SpikeTest& spike) {
    ScanPoint pt;
    pt.tau = tau;
    if (spike(tau, 0.0)) {  // already spiking with no drive
        pt.i_th = 0.0;
        pt.bracket_width = 0.0;
        pt.defined = true;
        return pt;
    }
    double lo = 0.0, hi = 0.05;
    bool bracketed = false;
    while (hi <= cfg.i_max) {
        if (spike(tau, hi)) {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!bracketed) {
        pt.defined = false;  // threshold-undefined marker
        return pt;
    }
    for (int i = 0; i < cfg.bisect_steps; ++i) {
        double mid = 0.5 * (lo + hi);
        if (spike(tau, mid)) hi = mid;
        else lo = mid;
    }
    pt.i_th = 0.5 * (lo + hi);
    pt.bracket_width = hi - lo;
    pt.defined = true;
    return pt;
}

}  // namespace

ScanResult threshold_scan(const fhn::FhnParams& base, std::span<const double> tau_list,
                          const ScanConfig& cfg, SpikeTest spike_test) {
    if (tau_list.size() < 2) throw std::invalid_argument("threshold_scan: need >= 2 tau values");
    SpikeTest spike = spike_test
                          ? std::move(spike_test)
                          : SpikeTest([&base, &cfg](double tau, double i) {
                                return simulated_spike(base, tau, i, cfg);
                            });

    ScanResult res;
    res.points.assign(tau_list.size(), {});

    const int threads = std::min<int>(scan_thread_count(cfg.threads),
                                      static_cast<int>(tau_list.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tau_list.size()) return;
            res.points[i] = scan_one_tau(tau_list[i], cfg, spike);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Fit over the defined, strictly positive thresholds.
    std::vector<double> taus, ths;
    for (const auto& p : res.points) {
        if (p.defined && p.i_th > 0.0) {
            taus.push_back(p.tau);
            ths.push_back(p.i_th);
        }
    }
    if (taus.size() >= 2) res.fit = fit_power_law(taus, ths);

    // Monotonicity along increasing tau (the list is decreasing).
    bool nondec = true, noninc = true;
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        if (!res.points[i].defined || !res.points[i - 1].defined) continue;
        double later = res.points[i - 1].i_th;  // larger tau
        double earlier = res.points[i].i_th;    // smaller tau
        double tol = 1e-9 * std::max(1.0, std::fabs(later));
        if (later < earlier - tol) nondec = false;
        if (later > earlier + tol) noninc = false;
    }
    res.monotone = nondec || noninc;
    res.direction = nondec ? (noninc ? 0 : 1) : (noninc ? -1 : 0);
    return res;
}

}  // namespace fracdyn::cycles
