#pragma once

// FitzHugh-Nagumo with Caputo order alpha and delayed voltage feedback:
//
//   D^alpha v = v - v^3/3 - w + I_ext + lambda v(t - tau)
//   D^alpha w = eps (v + a - b w)
//
// plus the analysis surface: equilibria, oscillation-condition evaluators,
// the Lyapunov annulus, and characteristic roots of the linearization.

#include <complex>
#include <vector>

#include "fracdyn/gronwall.hpp"
#include "fracdyn/solver.hpp"

namespace fracdyn::fhn {

struct FhnParams {
    double alpha = 0.8;    // in (0, 1]
    double epsilon = 0.08; // timescale separation, > 0
    double a = 0.7;
    double b = 0.8;        // > 0
    double lambda = 0.0;   // delayed feedback gain
    double tau = 1.0;      // delay, > 0
    double i_ext = 0.0;

    void validate() const;
};

/// Problem assembly; x0 is taken from the history at t = 0.
ProblemSpec fhn_rhs(const FhnParams& p, const HistoryFunction& history, double T);

struct Equilibrium {
    /// All real roots of the equilibrium cubic, each paired with w0 = (v0+a)/b.
    std::vector<double> v0;
    std::vector<double> w0;
    bool unique = true;  // single real root (the regime the theory assumes)
};

Equilibrium equilibrium(const FhnParams& p);

struct TheoremConditions {
    double lambda0 = 0.0;       // small-delay-coupling threshold
    double epsilon0 = 0.0;      // slow-recovery threshold
    bool lambda_ok = false;     // |lambda| < lambda0
    bool epsilon_ok = false;    // 0 < eps < epsilon0
    bool subthreshold_ok = false;  // a < 1 + b^2/(4 eps)
    bool all_satisfied = false;
    bool degenerate_lambda0 = false;  // alpha = 1 forces lambda0 = 0
};

TheoremConditions theorem_conditions(const FhnParams& p);

struct AnnulusSpec {
    double R1 = 0.0;
    double R2 = 0.0;
    double delta = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double M = 1.0;        // Gronwall amplification entering R2
    bool degenerate = false;  // C2 = 0 collapses the inner radius
};

/// Annulus constants. The Gronwall constant needs a horizon; FhnParams does
/// not carry one, so it defaults to max(1, 2 tau) and can be overridden to
/// the horizon of the trajectory being monitored.
AnnulusSpec annulus(const FhnParams& p, double horizon = 0.0);

struct LyapunovSeries {
    std::vector<double> V;         // V(t_k) = v^2/2 + w^2/(2 eps), nodes t >= 0
    std::vector<double> envelope;  // M (V0 + C2/delta) E_alpha(-(delta/2) t^alpha) + 2 C2/delta
    int first_violation = -1;      // node index, or -1 when V stays below
    double ultimate_bound = 0.0;   // 2 C2 / delta
};

LyapunovSeries lyapunov_series(const Trajectory& traj, const FhnParams& p);

struct CharacteristicRoot {
    std::complex<double> s;
    double residual = 0.0;  // |s^alpha - c - lambda e^{-s tau}|
};

struct RootBox {
    double re_min = -5.0, re_max = 5.0;
    double im_min = -50.0, im_max = 50.0;
};

struct RootScan {
    std::vector<CharacteristicRoot> roots;  // deduplicated, residual <= 1e-8
    bool unstable = false;                  // some root with Re(s) > 0
    std::complex<double> rightmost{0.0, 0.0};  // meaningful when roots nonempty
};

/// Newton search for roots of s^alpha = c + lambda e^{-s tau} on the
/// principal branch, c = 1 - v0^2 - 1/b, seeded from a uniform grid of at
/// least 400 points in the box.
RootScan characteristic_roots(const FhnParams& p, double v0, const RootBox& box = {});

}  // namespace fracdyn::fhn
