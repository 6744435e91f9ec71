#include "fracdyn/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fracdyn/io.hpp"

namespace fracdyn::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key, "expected a number, got '" + v + "'", line);
    return out;
}

int to_int(const std::string& key, const std::string& v, int line) {
    int out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key, "expected an integer, got '" + v + "'", line);
    return out;
}

long to_long(const std::string& key, const std::string& v, int line) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key, "expected an integer, got '" + v + "'", line);
    return out;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'", line);
}

std::vector<double> to_list(const std::string& key, const std::string& v, int line) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (ss >> tok) out.push_back(to_double(key, tok, line));
    return out;
}

std::string list_str(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += io::format_full(v[i]);
    }
    return out;
}

void check(bool ok, const std::string& key, const std::string& constraint, int line) {
    if (!ok) throw ConfigError(key, constraint, line);
}

struct KeyLines {
    // remembers source lines per section.key so validation errors can point back
    std::vector<std::pair<std::string, int>> lines;
    int at(const std::string& key) const {
        for (const auto& [k, l] : lines)
            if (k == key) return l;
        return 0;
    }
};

const char* kCommands[] = {"simulate", "fhn-analyze", "gronwall",
                           "verify-uh", "find-cycle", "scan-threshold"};

void validate(const RunConfig& rc, const KeyLines& kl);

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig rc;
    KeyLines kl;
    std::istringstream in(text);
    std::string raw;
    std::string section = "run";
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            check(line.back() == ']', "config", "malformed section header '" + line + "'",
                  line_no);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        check(eq != std::string::npos, "config", "expected key = value, got '" + line + "'",
              line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string full = section + "." + key;
        kl.lines.emplace_back(full, line_no);

        if (section == "run") {
            if (key == "command") rc.command = value;
            else if (key == "output_dir") rc.output_dir = value;
            else if (key == "seed") rc.seed = to_long(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "problem") {
            auto& p = rc.problem;
            if (key == "kind") p.kind = value;
            else if (key == "alpha") p.alpha = to_double(full, value, line_no);
            else if (key == "dimension") p.dimension = to_int(full, value, line_no);
            else if (key == "T") p.T = to_double(full, value, line_no);
            else if (key == "x0") p.x0 = to_list(full, value, line_no);
            else if (key == "rate") p.rate = to_double(full, value, line_no);
            else if (key == "A") p.A = to_list(full, value, line_no);
            else if (key == "B") p.B = to_list(full, value, line_no);
            else if (key == "tau") p.tau = to_double(full, value, line_no);
            else if (key == "lipschitz") p.lipschitz = to_double(full, value, line_no);
            else if (key == "forcing_delta") p.forcing_delta = to_double(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "fhn") {
            auto& f = rc.fhn;
            if (key == "alpha") f.alpha = to_double(full, value, line_no);
            else if (key == "epsilon") f.epsilon = to_double(full, value, line_no);
            else if (key == "a") f.a = to_double(full, value, line_no);
            else if (key == "b") f.b = to_double(full, value, line_no);
            else if (key == "lambda") f.lambda = to_double(full, value, line_no);
            else if (key == "tau") f.tau = to_double(full, value, line_no);
            else if (key == "i_ext") f.i_ext = to_double(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "history") {
            auto& h = rc.history;
            if (key == "kind") h.kind = value;
            else if (key == "values") h.values = to_list(full, value, line_no);
            else if (key.rfind("coeffs_", 0) == 0) {
                int idx = to_int(full, key.substr(7), line_no);
                check(idx >= 1 && idx <= 64, full, "component index out of range", line_no);
                if (static_cast<int>(h.coeffs.size()) < idx) h.coeffs.resize(idx);
                h.coeffs[idx - 1] = to_list(full, value, line_no);
            } else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "solver") {
            auto& s = rc.solver;
            if (key == "h") s.h = to_double(full, value, line_no);
            else if (key == "implicit_tol") s.implicit_tol = to_double(full, value, line_no);
            else if (key == "implicit_max_iter")
                s.implicit_max_iter = to_int(full, value, line_no);
            else if (key == "damping") s.damping = to_double(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "gronwall") {
            auto& g = rc.gronwall;
            if (key == "alpha") g.alpha = to_double(full, value, line_no);
            else if (key == "beta") g.beta = to_double(full, value, line_no);
            else if (key == "norm_a") g.norm_a = to_double(full, value, line_no);
            else if (key == "norm_b") g.norm_b = to_double(full, value, line_no);
            else if (key == "T") g.T = to_double(full, value, line_no);
            else if (key == "phi_norm") g.phi_norm = to_double(full, value, line_no);
            else if (key == "f_sup") g.f_sup = to_double(full, value, line_no);
            else if (key == "tau") g.tau = to_double(full, value, line_no);
            else if (key == "h") g.h = to_double(full, value, line_no);
            else if (key == "emit_csv") g.emit_csv = to_bool(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "uh") {
            auto& u = rc.uh;
            if (key == "candidate") u.candidate = value;
            else if (key == "reference") u.reference = value;
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "cycle") {
            auto& c = rc.cycle;
            if (key == "t_skip") c.t_skip = to_double(full, value, line_no);
            else if (key == "t_measure") c.t_measure = to_double(full, value, line_no);
            else if (key == "cycle_tol") c.cycle_tol = to_double(full, value, line_no);
            else if (key == "amplitude_floor")
                c.amplitude_floor = to_double(full, value, line_no);
            else if (key == "max_map_iter") c.max_map_iter = to_int(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else if (section == "scan") {
            auto& s = rc.scan;
            if (key == "tau_min") s.tau_min = to_double(full, value, line_no);
            else if (key == "tau_max") s.tau_max = to_double(full, value, line_no);
            else if (key == "tau_count") s.tau_count = to_int(full, value, line_no);
            else if (key == "spike_margin") s.spike_margin = to_double(full, value, line_no);
            else if (key == "t_obs") s.t_obs = to_double(full, value, line_no);
            else if (key == "i_max") s.i_max = to_double(full, value, line_no);
            else if (key == "bisect_steps") s.bisect_steps = to_int(full, value, line_no);
            else throw ConfigError(full, "unknown key", line_no);
        } else {
            throw ConfigError(section, "unknown section", line_no);
        }
    }
    validate(rc, kl);
    return rc;
}

std::string print_config(const RunConfig& rc) {
    std::string out;
    out += "[run]\n";
    out += "command = " + rc.command + "\n";
    out += "output_dir = " + rc.output_dir + "\n";
    out += "seed = " + std::to_string(rc.seed) + "\n\n";

    const auto& p = rc.problem;
    out += "[problem]\n";
    out += "kind = " + p.kind + "\n";
    out += "alpha = " + io::format_full(p.alpha) + "\n";
    out += "dimension = " + std::to_string(p.dimension) + "\n";
    out += "T = " + io::format_full(p.T) + "\n";
    out += "x0 = " + list_str(p.x0) + "\n";
    out += "rate = " + io::format_full(p.rate) + "\n";
    if (!p.A.empty()) out += "A = " + list_str(p.A) + "\n";
    if (!p.B.empty()) out += "B = " + list_str(p.B) + "\n";
    out += "tau = " + io::format_full(p.tau) + "\n";
    out += "lipschitz = " + io::format_full(p.lipschitz) + "\n";
    out += "forcing_delta = " + io::format_full(p.forcing_delta) + "\n\n";

    const auto& f = rc.fhn;
    out += "[fhn]\n";
    out += "alpha = " + io::format_full(f.alpha) + "\n";
    out += "epsilon = " + io::format_full(f.epsilon) + "\n";
    out += "a = " + io::format_full(f.a) + "\n";
    out += "b = " + io::format_full(f.b) + "\n";
    out += "lambda = " + io::format_full(f.lambda) + "\n";
    out += "tau = " + io::format_full(f.tau) + "\n";
    out += "i_ext = " + io::format_full(f.i_ext) + "\n\n";

    const auto& h = rc.history;
    out += "[history]\n";
    out += "kind = " + h.kind + "\n";
    if (!h.values.empty()) out += "values = " + list_str(h.values) + "\n";
    for (std::size_t i = 0; i < h.coeffs.size(); ++i)
        if (!h.coeffs[i].empty())
            out += "coeffs_" + std::to_string(i + 1) + " = " + list_str(h.coeffs[i]) + "\n";
    out += "\n";

    const auto& s = rc.solver;
    out += "[solver]\n";
    out += "h = " + io::format_full(s.h) + "\n";
    out += "implicit_tol = " + io::format_full(s.implicit_tol) + "\n";
    out += "implicit_max_iter = " + std::to_string(s.implicit_max_iter) + "\n";
    out += "damping = " + io::format_full(s.damping) + "\n\n";

    const auto& g = rc.gronwall;
    out += "[gronwall]\n";
    out += "alpha = " + io::format_full(g.alpha) + "\n";
    out += "beta = " + io::format_full(g.beta) + "\n";
    out += "norm_a = " + io::format_full(g.norm_a) + "\n";
    out += "norm_b = " + io::format_full(g.norm_b) + "\n";
    out += "T = " + io::format_full(g.T) + "\n";
    out += "phi_norm = " + io::format_full(g.phi_norm) + "\n";
    out += "f_sup = " + io::format_full(g.f_sup) + "\n";
    out += "tau = " + io::format_full(g.tau) + "\n";
    out += "h = " + io::format_full(g.h) + "\n";
    out += std::string("emit_csv = ") + (g.emit_csv ? "true" : "false") + "\n\n";

    const auto& u = rc.uh;
    out += "[uh]\n";
    if (!u.candidate.empty()) out += "candidate = " + u.candidate + "\n";
    if (!u.reference.empty()) out += "reference = " + u.reference + "\n";
    out += "\n";

    const auto& c = rc.cycle;
    out += "[cycle]\n";
    out += "t_skip = " + io::format_full(c.t_skip) + "\n";
    out += "t_measure = " + io::format_full(c.t_measure) + "\n";
    out += "cycle_tol = " + io::format_full(c.cycle_tol) + "\n";
    out += "amplitude_floor = " + io::format_full(c.amplitude_floor) + "\n";
    out += "max_map_iter = " + std::to_string(c.max_map_iter) + "\n\n";

    const auto& sc = rc.scan;
    out += "[scan]\n";
    out += "tau_min = " + io::format_full(sc.tau_min) + "\n";
    out += "tau_max = " + io::format_full(sc.tau_max) + "\n";
    out += "tau_count = " + std::to_string(sc.tau_count) + "\n";
    out += "spike_margin = " + io::format_full(sc.spike_margin) + "\n";
    out += "t_obs = " + io::format_full(sc.t_obs) + "\n";
    out += "i_max = " + io::format_full(sc.i_max) + "\n";
    out += "bisect_steps = " + std::to_string(sc.bisect_steps) + "\n";
    return out;
}

namespace {

void validate(const RunConfig& rc, const KeyLines& kl) {
    bool cmd_ok = false;
    for (const char* c : kCommands)
        if (rc.command == c) cmd_ok = true;
    check(cmd_ok, "run.command",
          "must be one of simulate, fhn-analyze, gronwall, verify-uh, find-cycle, "
          "scan-threshold (got '" + rc.command + "')",
          kl.at("run.command"));
    check(!rc.output_dir.empty(), "run.output_dir", "must not be empty",
          kl.at("run.output_dir"));

    const auto& p = rc.problem;
    check(p.kind == "fhn" || p.kind == "relaxation" || p.kind == "linear" ||
              p.kind == "linear_delay",
          "problem.kind", "must be one of fhn, relaxation, linear, linear_delay",
          kl.at("problem.kind"));
    check(p.alpha > 0.0 && p.alpha <= 1.0, "problem.alpha", "alpha must lie in (0,1]",
          kl.at("problem.alpha"));
    check(p.dimension >= 1 && p.dimension <= 8, "problem.dimension", "must lie in [1, 8]",
          kl.at("problem.dimension"));
    check(p.T > 0.0, "problem.T", "must be positive", kl.at("problem.T"));
    check(p.tau > 0.0, "problem.tau", "must be positive", kl.at("problem.tau"));
    check(p.lipschitz >= 0.0, "problem.lipschitz", "must be nonnegative",
          kl.at("problem.lipschitz"));
    if (p.kind == "linear" || p.kind == "linear_delay")
        check(static_cast<int>(p.A.size()) == p.dimension * p.dimension, "problem.A",
              "needs dimension^2 entries", kl.at("problem.A"));
    if (p.kind == "linear_delay")
        check(static_cast<int>(p.B.size()) == p.dimension * p.dimension, "problem.B",
              "needs dimension^2 entries", kl.at("problem.B"));
    if (p.kind != "fhn")
        check(static_cast<int>(p.x0.size()) == p.dimension, "problem.x0",
              "needs dimension entries", kl.at("problem.x0"));

    const auto& f = rc.fhn;
    check(f.alpha > 0.0 && f.alpha <= 1.0, "fhn.alpha", "alpha must lie in (0,1]",
          kl.at("fhn.alpha"));
    check(f.epsilon > 0.0, "fhn.epsilon", "must be positive", kl.at("fhn.epsilon"));
    check(f.b > 0.0, "fhn.b", "must be positive", kl.at("fhn.b"));
    check(f.tau > 0.0, "fhn.tau", "must be positive", kl.at("fhn.tau"));

    check(rc.history.kind == "constant" || rc.history.kind == "polynomial", "history.kind",
          "must be constant or polynomial", kl.at("history.kind"));

    const auto& s = rc.solver;
    check(s.h > 0.0, "solver.h", "must be positive", kl.at("solver.h"));
    check(s.implicit_tol > 0.0, "solver.implicit_tol", "must be positive",
          kl.at("solver.implicit_tol"));
    check(s.implicit_max_iter >= 1, "solver.implicit_max_iter", "must be >= 1",
          kl.at("solver.implicit_max_iter"));
    check(s.damping > 0.0 && s.damping <= 1.0, "solver.damping", "must lie in (0,1]",
          kl.at("solver.damping"));

    const auto& g = rc.gronwall;
    check(g.alpha > 0.0 && g.alpha <= 1.0, "gronwall.alpha", "alpha must lie in (0,1]",
          kl.at("gronwall.alpha"));
    check(g.beta > 0.0 && g.beta <= 1.0, "gronwall.beta", "beta must lie in (0,1]",
          kl.at("gronwall.beta"));
    check(g.norm_a >= 0.0, "gronwall.norm_a", "must be nonnegative", kl.at("gronwall.norm_a"));
    check(g.norm_b >= 0.0, "gronwall.norm_b", "must be nonnegative", kl.at("gronwall.norm_b"));
    check(g.T > 0.0, "gronwall.T", "must be positive", kl.at("gronwall.T"));
    check(g.phi_norm >= 0.0, "gronwall.phi_norm", "must be nonnegative",
          kl.at("gronwall.phi_norm"));
    check(g.f_sup >= 0.0, "gronwall.f_sup", "must be nonnegative", kl.at("gronwall.f_sup"));
    check(g.tau >= 0.0, "gronwall.tau", "must be nonnegative", kl.at("gronwall.tau"));
    check(g.h > 0.0, "gronwall.h", "must be positive", kl.at("gronwall.h"));

    const auto& c = rc.cycle;
    check(c.t_skip > 0.0, "cycle.t_skip", "must be positive", kl.at("cycle.t_skip"));
    check(c.t_measure > 0.0, "cycle.t_measure", "must be positive", kl.at("cycle.t_measure"));
    check(c.cycle_tol > 0.0, "cycle.cycle_tol", "must be positive", kl.at("cycle.cycle_tol"));
    check(c.amplitude_floor >= 0.0, "cycle.amplitude_floor", "must be nonnegative",
          kl.at("cycle.amplitude_floor"));
    check(c.max_map_iter >= 1, "cycle.max_map_iter", "must be >= 1",
          kl.at("cycle.max_map_iter"));

    const auto& sc = rc.scan;
    check(sc.tau_min > 0.0, "scan.tau_min", "must be positive", kl.at("scan.tau_min"));
    check(sc.tau_max > sc.tau_min, "scan.tau_max", "must exceed tau_min",
          kl.at("scan.tau_max"));
    check(sc.tau_count >= 5, "scan.tau_count", "must be >= 5", kl.at("scan.tau_count"));
    check(sc.spike_margin > 0.0, "scan.spike_margin", "must be positive",
          kl.at("scan.spike_margin"));
    check(sc.t_obs > 0.0, "scan.t_obs", "must be positive", kl.at("scan.t_obs"));
    check(sc.i_max > 0.0, "scan.i_max", "must be positive", kl.at("scan.i_max"));
    check(sc.bisect_steps >= 1 && sc.bisect_steps <= 60, "scan.bisect_steps",
          "must lie in [1, 60]", kl.at("scan.bisect_steps"));
}

}  // namespace

}  // namespace fracdyn::config
