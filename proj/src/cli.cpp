#include "fracdyn/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include "fracdyn/cycles.hpp"
#include "fracdyn/fhn.hpp"
#include "fracdyn/gronwall.hpp"
#include "fracdyn/io.hpp"
#include "fracdyn/kernels.hpp"
#include "fracdyn/stability.hpp"

namespace fracdyn::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

const char* kUsage =
    "usage: fracdyn <command> [config-file] [options]\n"
    "\n"
    "commands:\n"
    "  simulate        integrate the configured problem, emit trajectory.csv\n"
    "  fhn-analyze     equilibria, oscillation conditions, characteristic roots\n"
    "  gronwall        bound certificate (and extremal curve CSV)\n"
    "  verify-uh       Ulam-Hyers check of a candidate trajectory CSV\n"
    "  find-cycle      limit-cycle search via the time-T map\n"
    "  scan-threshold  excitation-threshold scan over the delay\n"
    "  fhn simulate | fhn analyze   aliases for simulate / fhn-analyze\n"
    "\n"
    "options:\n"
    "  --print-config         print the effective configuration and exit\n"
    "  --output-dir DIR       override [run] output_dir\n"
    "  --candidate FILE       verify-uh: candidate trajectory CSV\n"
    "  --reference FILE       verify-uh: optional exact trajectory CSV\n"
    "  --alpha X --tau-min X --tau-max X --tau-count N\n"
    "  --spike-margin X --t-obs X --i-max X     scan-threshold overrides\n";

fhn::FhnParams fhn_params(const config::RunConfig& rc) {
    fhn::FhnParams p;
    p.alpha = rc.fhn.alpha;
    p.epsilon = rc.fhn.epsilon;
    p.a = rc.fhn.a;
    p.b = rc.fhn.b;
    p.lambda = rc.fhn.lambda;
    p.tau = rc.fhn.tau;
    p.i_ext = rc.fhn.i_ext;
    return p;
}

SolverConfig solver_config(const config::RunConfig& rc) {
    return {rc.solver.h, rc.solver.implicit_tol, rc.solver.implicit_max_iter,
            rc.solver.damping};
}

HistoryFunction build_history(const config::RunConfig& rc, int dimension,
                              const std::vector<double>& fallback) {
    const auto& h = rc.history;
    if (h.kind == "polynomial") {
        if (static_cast<int>(h.coeffs.size()) != dimension)
            throw config::ConfigError("history.coeffs",
                                      "needs one coeffs_<i> list per component");
        return HistoryFunction::polynomial(h.coeffs);
    }
    std::vector<double> values = h.values.empty() ? fallback : h.values;
    if (static_cast<int>(values.size()) != dimension)
        throw config::ConfigError("history.values", "needs dimension entries");
    return HistoryFunction::constant(values);
}

}  // namespace

ProblemSpec build_problem(const config::RunConfig& rc) {
    const auto& pc = rc.problem;
    const double delta = pc.forcing_delta;

    if (pc.kind == "fhn") {
        fhn::FhnParams params = fhn_params(rc);
        fhn::Equilibrium eq = equilibrium(params);
        HistoryFunction hist = build_history(rc, 2, {eq.v0.front(), eq.w0.front()});
        ProblemSpec spec = fhn_rhs(params, hist, pc.T);
        if (pc.lipschitz > 0.0) spec.lipschitz = pc.lipschitz;
        if (delta != 0.0) {
            RhsFn base = spec.rhs;
            spec.rhs = [base, delta](double t, std::span<const double> x,
                                     std::span<const double> d, std::span<const double> m,
                                     std::span<double> out) {
                base(t, x, d, m, out);
                for (auto& v : out) v += delta * std::sin(t);
            };
        }
        return spec;
    }

    ProblemSpec spec;
    spec.dimension = pc.dimension;
    spec.alpha = pc.alpha;
    spec.T = pc.T;
    spec.x0 = pc.x0;
    if (pc.lipschitz > 0.0) spec.lipschitz = pc.lipschitz;

    if (pc.kind == "relaxation") {
        double rate = pc.rate;
        spec.rhs = [rate, delta](double t, std::span<const double> x, std::span<const double>,
                                 std::span<const double>, std::span<double> out) {
            for (std::size_t c = 0; c < out.size(); ++c)
                out[c] = -rate * x[c] + delta * std::sin(t);
        };
        if (!spec.lipschitz) spec.lipschitz = std::fabs(rate);
        return spec;
    }

    const int n = pc.dimension;
    std::vector<double> A = pc.A;
    if (pc.kind == "linear") {
        spec.rhs = [A, n, delta](double t, std::span<const double> x, std::span<const double>,
                                 std::span<const double>, std::span<double> out) {
            for (int r = 0; r < n; ++r) {
                double s = delta * std::sin(t);
                for (int c = 0; c < n; ++c) s += A[r * n + c] * x[c];
                out[r] = s;
            }
        };
    } else {  // linear_delay
        std::vector<double> B = pc.B;
        spec.memory = MemoryOperatorSpec::discrete_delay(pc.tau);
        spec.history = build_history(rc, n, pc.x0);
        spec.rhs = [A, B, n, delta](double t, std::span<const double> x,
                                    std::span<const double>, std::span<const double> m,
                                    std::span<double> out) {
            for (int r = 0; r < n; ++r) {
                double s = delta * std::sin(t);
                for (int c = 0; c < n; ++c) s += A[r * n + c] * x[c] + B[r * n + c] * m[c];
                out[r] = s;
            }
        };
    }
    if (!spec.lipschitz) {
        double row_a = 0.0, row_b = 0.0;
        for (int r = 0; r < n; ++r) {
            double sa = 0.0, sb = 0.0;
            for (int c = 0; c < n; ++c) {
                sa += std::fabs(A[r * n + c]);
                if (pc.kind == "linear_delay") sb += std::fabs(pc.B[r * n + c]);
            }
            row_a = std::max(row_a, sa);
            row_b = std::max(row_b, sb);
        }
        spec.lipschitz = std::max(row_a, row_b);
    }
    return spec;
}

namespace {

void write_manifest(const config::RunConfig& rc, const std::filesystem::path& dir,
                    double h_requested, double h_adjusted) {
    io::Report m;
    m.add("version", std::string(kVersion));
    m.add("command", rc.command);
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(io::fnv1a(config::print_config(rc))));
    m.add("config_hash", std::string(hash));
    m.add("h_requested", h_requested);
    m.add("h_adjusted", h_adjusted);
    m.add("kernel_backend", std::string(kernels::active_backend()));
    io::write_file(dir / "manifest.txt", m.str());
}

int cmd_simulate(const config::RunConfig& rc) {
    ProblemSpec spec = build_problem(rc);
    SolverConfig cfg = solver_config(rc);
    const double h_adj = aligned_step(spec, cfg.h);
    const std::filesystem::path dir(rc.output_dir);
    Trajectory traj = solve(spec, cfg);
    io::write_file(dir / "trajectory.csv", io::trajectory_to_csv(traj));
    write_manifest(rc, dir, cfg.h, h_adj);
    if (h_adj != cfg.h)
        std::cout << "note: step adjusted to h = " << io::format_full(h_adj)
                  << " for delay alignment\n";
    std::cout << "wrote " << (dir / "trajectory.csv").string() << " ("
              << traj.grid.n_steps + 1 << " nodes)\n";
    return 0;
}

int cmd_fhn_analyze(const config::RunConfig& rc) {
    fhn::FhnParams params = fhn_params(rc);
    fhn::Equilibrium eq = equilibrium(params);
    fhn::TheoremConditions cond = theorem_conditions(params);
    fhn::AnnulusSpec ann = annulus(params);

    io::Report r;
    r.add("equilibria", static_cast<int>(eq.v0.size()));
    for (std::size_t i = 0; i < eq.v0.size(); ++i) {
        r.add("v0_" + std::to_string(i + 1), eq.v0[i]);
        r.add("w0_" + std::to_string(i + 1), eq.w0[i]);
    }
    r.add("unique_equilibrium", eq.unique);
    r.add("lambda0", cond.lambda0);
    r.add("epsilon0", cond.epsilon0);
    r.add("lambda_ok", cond.lambda_ok);
    r.add("epsilon_ok", cond.epsilon_ok);
    r.add("subthreshold_ok", cond.subthreshold_ok);
    r.add("all_satisfied", cond.all_satisfied);
    r.add("degenerate_lambda0", cond.degenerate_lambda0);
    r.add("delta", ann.delta);
    r.add("C1", ann.C1);
    r.add("C2", ann.C2);
    r.add("M", ann.M);
    r.add("R1", ann.R1);
    r.add("R2", ann.R2);
    r.add("annulus_degenerate", ann.degenerate);

    fhn::RootScan scan = characteristic_roots(params, eq.v0.front());
    r.add("roots_found", static_cast<int>(scan.roots.size()));
    if (!scan.roots.empty()) {
        r.add("rightmost_re", scan.rightmost.real());
        r.add("rightmost_im", scan.rightmost.imag());
    }
    r.add("unstable", scan.unstable);

    const std::filesystem::path dir(rc.output_dir);
    io::write_file(dir / "fhn_analysis.txt", r.str());
    std::vector<std::pair<std::complex<double>, double>> roots;
    for (const auto& root : scan.roots) roots.emplace_back(root.s, root.residual);
    io::write_file(dir / "roots.csv", io::roots_to_csv(roots));
    write_manifest(rc, dir, rc.solver.h, rc.solver.h);
    std::cout << "wrote " << (dir / "fhn_analysis.txt").string() << " and roots.csv ("
              << scan.roots.size() << " roots)\n";
    return 0;
}

int cmd_gronwall(const config::RunConfig& rc) {
    const auto& g = rc.gronwall;
    gronwall::GronwallInput in{g.alpha, g.beta, g.norm_a, g.norm_b, g.T, g.phi_norm, g.f_sup};
    gronwall::GronwallCertificate cert = gronwall::compute_bound_constant(in);

    io::Report r;
    r.add("M", cert.M);
    r.add("h_star", cert.h_star);
    r.add("n_intervals", cert.n_intervals);
    r.add("q", cert.q);
    r.add("bound", cert.bound(in));
    const std::filesystem::path dir(rc.output_dir);
    io::write_file(dir / "gronwall.txt", r.str());

    if (g.emit_csv) {
        // Extremal curve: the scalar equality solution against the bound.
        double h = g.h;
        double tau = g.tau > 0.0 ? std::max(1, static_cast<int>(std::lround(g.tau / h))) * h
                                 : 0.0;
        std::vector<double> A{g.norm_a}, B{g.norm_b}, phi{g.phi_norm};
        auto f = [&](double, std::span<double> out) { out[0] = g.f_sup; };
        auto u = gronwall::solve_linear_volterra(g.alpha, g.beta, A, B, 1, tau, f, phi, g.T, h);
        std::vector<double> fs(u[0].size(), g.f_sup);
        std::vector<double> bound = gronwall::bound_curve(in, cert, fs);
        std::string csv = "t,u,bound\n";
        for (std::size_t k = 0; k < u[0].size(); ++k)
            csv += io::format_full(k * h) + "," + io::format_full(u[0][k]) + "," +
                   io::format_full(bound[k]) + "\n";
        io::write_file(dir / "gronwall_curve.csv", csv);
    }
    write_manifest(rc, dir, g.h, g.h);
    std::cout << "M = " << io::format_full(cert.M) << ", q = " << io::format_full(cert.q)
              << ", intervals = " << cert.n_intervals << "\n";
    return 0;
}

int cmd_verify_uh(const config::RunConfig& rc) {
    if (rc.uh.candidate.empty())
        throw config::ConfigError("uh.candidate", "required for verify-uh (path to a CSV)");
    Trajectory y = io::trajectory_from_csv(io::read_file(rc.uh.candidate));

    config::RunConfig rcT = rc;
    rcT.problem.T = y.grid.horizon();  // bound horizon matches the data
    ProblemSpec spec = build_problem(rcT);

    stability::StabilityReport rep;
    SolverConfig cfg = solver_config(rc);
    if (!rc.uh.reference.empty()) {
        Trajectory x = io::trajectory_from_csv(io::read_file(rc.uh.reference));
        rep.epsilon = stability::measure_residual(y, spec);
        rep.C = stability::uh_constant(spec);
        double dev = 0.0;
        int n = std::min(x.grid.n_steps, y.grid.n_steps);
        for (int k = 0; k <= n; ++k)
            for (int c = 0; c < spec.dimension; ++c)
                dev = std::max(dev, std::fabs(y.state(c, k) - x.state(c, k)));
        rep.max_deviation = dev;
        rep.bound = rep.C * rep.epsilon;
        rep.margin = rep.bound - dev;
        rep.pass = dev <= rep.bound;
    } else {
        rep = stability::verify_uh(y, spec, cfg);
    }

    io::Report r;
    r.add("epsilon", rep.epsilon);
    r.add("C", rep.C);
    r.add("max_deviation", rep.max_deviation);
    r.add("bound", rep.bound);
    r.add("margin", rep.margin);
    r.add("verdict", std::string(rep.pass ? "PASS" : "FAIL"));
    const std::filesystem::path dir(rc.output_dir);
    io::write_file(dir / "uh_report.txt", r.str());
    std::string csv = "epsilon,C,max_deviation,bound,margin,verdict\n";
    csv += io::format_full(rep.epsilon) + "," + io::format_full(rep.C) + "," +
           io::format_full(rep.max_deviation) + "," + io::format_full(rep.bound) + "," +
           io::format_full(rep.margin) + "," + (rep.pass ? "PASS" : "FAIL") + "\n";
    io::write_file(dir / "uh_report.csv", csv);
    write_manifest(rc, dir, rc.solver.h, y.grid.h);
    std::cout << "verdict: " << (rep.pass ? "PASS" : "FAIL")
              << " (deviation = " << io::format_full(rep.max_deviation)
              << ", bound = " << io::format_full(rep.bound) << ")\n";
    return rep.pass ? 0 : 3;
}

int cmd_find_cycle(const config::RunConfig& rc) {
    fhn::FhnParams params = fhn_params(rc);
    fhn::Equilibrium eq = equilibrium(params);
    HistoryFunction hist = build_history(rc, 2, {eq.v0.front() + 0.5, eq.w0.front()});
    cycles::CycleConfig cfg;
    cfg.solver = solver_config(rc);
    cfg.t_skip = rc.cycle.t_skip;
    cfg.t_measure = rc.cycle.t_measure;
    cfg.cycle_tol = rc.cycle.cycle_tol;
    cfg.amplitude_floor = rc.cycle.amplitude_floor;
    cfg.max_map_iter = rc.cycle.max_map_iter;

    cycles::LimitCycleReport rep = cycles::find_cycle(params, hist, cfg);
    io::Report r;
    r.add("found", rep.found);
    r.add("period", rep.period);
    r.add("poincare_residual", rep.poincare_residual);
    r.add("amplitude", rep.amplitude);
    r.add("in_annulus", rep.in_annulus);
    r.add("transient_discarded", rep.transient_discarded);
    r.add("map_iterations", rep.map_iterations);
    if (!rep.diagnostic.empty()) r.add("diagnostic", rep.diagnostic);
    const std::filesystem::path dir(rc.output_dir);
    io::write_file(dir / "cycle.txt", r.str());
    write_manifest(rc, dir, rc.solver.h, aligned_step(fhn_rhs(params, hist, 1.0), rc.solver.h));
    std::cout << (rep.found ? "cycle found" : "no cycle") << ", period = "
              << io::format_full(rep.period) << ", residual = "
              << io::format_full(rep.poincare_residual) << "\n";
    return 0;
}

int cmd_scan_threshold(const config::RunConfig& rc) {
    fhn::FhnParams base = fhn_params(rc);
    const auto& sc = rc.scan;
    std::vector<double> taus = cycles::log_spaced_taus(sc.tau_min, sc.tau_max, sc.tau_count);
    cycles::ScanConfig cfg;
    cfg.solver = solver_config(rc);
    cfg.spike_margin = sc.spike_margin;
    cfg.t_obs = sc.t_obs;
    cfg.i_max = sc.i_max;
    cfg.bisect_steps = sc.bisect_steps;

    cycles::ScanResult res = cycles::threshold_scan(base, taus, cfg);

    std::string csv = "tau,i_th,bracket_width\n";
    for (const auto& p : res.points) {
        csv += io::format_full(p.tau) + ",";
        csv += p.defined ? io::format_full(p.i_th) : "nan";
        csv += ",";
        csv += p.defined ? io::format_full(p.bracket_width) : "nan";
        csv += "\n";
    }
    const std::filesystem::path dir(rc.output_dir);
    io::write_file(dir / "scan.csv", csv);

    io::Report r;
    r.add("points", res.fit.points);
    r.add("exponent", res.fit.exponent);
    r.add("stderr", res.fit.stderr_exponent);
    r.add("r2", res.fit.r2);
    r.add("monotone", res.monotone);
    r.add("direction", res.direction);
    r.add("expected_exponent", 1.0 - base.alpha);
    r.add("exponent_deviation", std::fabs(res.fit.exponent - (1.0 - base.alpha)));
    io::write_file(dir / "scan_fit.txt", r.str());
    write_manifest(rc, dir, rc.solver.h, rc.solver.h);
    std::cout << "fitted exponent = " << io::format_full(res.fit.exponent)
              << " (expected " << io::format_full(1.0 - base.alpha)
              << "), r2 = " << io::format_full(res.fit.r2) << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        std::size_t i = 0;
        std::string command;
        bool print_only = false;
        std::string config_path;
        std::vector<std::pair<std::string, std::string>> overrides;

        auto need_value = [&](const std::string& flag) -> std::string {
            if (i + 1 >= args.size())
                throw config::ConfigError(flag, "missing value");
            return args[++i];
        };

        for (; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--help" || a == "-h") {
                std::cout << kUsage;
                return 0;
            } else if (a == "--print-config") {
                print_only = true;
            } else if (a == "--output-dir") {
                overrides.emplace_back("run.output_dir", need_value(a));
            } else if (a == "--candidate") {
                overrides.emplace_back("uh.candidate", need_value(a));
            } else if (a == "--reference") {
                overrides.emplace_back("uh.reference", need_value(a));
            } else if (a == "--alpha") {
                overrides.emplace_back("fhn.alpha", need_value(a));
            } else if (a == "--tau-min") {
                overrides.emplace_back("scan.tau_min", need_value(a));
            } else if (a == "--tau-max") {
                overrides.emplace_back("scan.tau_max", need_value(a));
            } else if (a == "--tau-count") {
                overrides.emplace_back("scan.tau_count", need_value(a));
            } else if (a == "--spike-margin") {
                overrides.emplace_back("scan.spike_margin", need_value(a));
            } else if (a == "--t-obs") {
                overrides.emplace_back("scan.t_obs", need_value(a));
            } else if (a == "--i-max") {
                overrides.emplace_back("scan.i_max", need_value(a));
            } else if (!a.empty() && a[0] == '-') {
                std::cerr << "unknown option: " << a << "\n" << kUsage;
                return 1;
            } else if (command.empty()) {
                command = a;
            } else if (command == "fhn" && (a == "simulate" || a == "analyze")) {
                command = a == "simulate" ? "simulate" : "fhn-analyze";
            } else if (config_path.empty()) {
                config_path = a;
            } else {
                std::cerr << "unexpected argument: " << a << "\n" << kUsage;
                return 1;
            }
        }
        if (command == "fhn") {
            std::cerr << "usage: fracdyn fhn simulate|analyze ...\n";
            return 1;
        }
        if (command.empty() && !print_only) {
            std::cerr << kUsage;
            return 1;
        }

        std::string text;
        if (!config_path.empty()) text = io::read_file(config_path);
        if (!command.empty()) {
            // The command line wins over any [run] command in the file.
            text += "\n[run]\ncommand = " + command + "\n";
        }
        for (const auto& [key, value] : overrides) {
            auto dot = key.find('.');
            text += "\n[" + key.substr(0, dot) + "]\n" + key.substr(dot + 1) + " = " + value +
                    "\n";
        }
        config::RunConfig rc = config::parse_config(text);

        if (print_only) {
            std::cout << config::print_config(rc);
            return 0;
        }
        if (rc.command == "simulate") return cmd_simulate(rc);
        if (rc.command == "fhn-analyze") return cmd_fhn_analyze(rc);
        if (rc.command == "gronwall") return cmd_gronwall(rc);
        if (rc.command == "verify-uh") return cmd_verify_uh(rc);
        if (rc.command == "find-cycle") return cmd_find_cycle(rc);
        if (rc.command == "scan-threshold") return cmd_scan_threshold(rc);
        std::cerr << "unknown command: " << rc.command << "\n" << kUsage;
        return 1;
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const SolveError& e) {
        std::cerr << "solver failure: " << e.what()
                  << " (residual = " << io::format_full(e.residual()) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace fracdyn::cli
