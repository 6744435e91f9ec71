#include "fracdyn/io.hpp"

#include <charconv>
#include <cinttypes>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracdyn::io {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("trajectory_from_csv: bad numeric field '" + std::string(s) +
                                    "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out;
    const int n = traj.grid.n_steps, m = traj.grid.delay_steps, dim = traj.dimension;
    out.reserve(static_cast<std::size_t>(n + m + 2) * (dim * 2 + 2) * 20);
    out += "# fracdyn trajectory h=" + format_full(traj.grid.h) +
           " delay_steps=" + std::to_string(m) + " dimension=" + std::to_string(dim) + "\n";
    out += "t";
    for (int c = 1; c <= dim; ++c) out += ",x_" + std::to_string(c);
    for (int c = 1; c <= dim; ++c) out += ",d_" + std::to_string(c);
    out += ",inner_iters\n";
    for (int k = -m; k <= n; ++k) {
        out += format_full(k * traj.grid.h);
        for (int c = 0; c < dim; ++c) out += "," + format_full(traj.state(c, k));
        for (int c = 0; c < dim; ++c)
            out += "," + (k >= 0 ? format_full(traj.deriv(c, k)) : std::string("0"));
        out += "," + std::to_string(k >= 0 ? traj.inner_iters[k] : 0) + "\n";
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    double h = 0.0;
    int delay_steps = -1, dim = 0;

    if (!std::getline(in, line) || line.rfind("# fracdyn trajectory", 0) != 0)
        throw std::invalid_argument("trajectory_from_csv: missing metadata line");
    {
        std::istringstream meta(line.substr(std::string("# fracdyn trajectory").size()));
        std::string kv;
        while (meta >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "h") h = parse_double(val);
            else if (key == "delay_steps") delay_steps = std::stoi(val);
            else if (key == "dimension") dim = std::stoi(val);
        }
    }
    if (!(h > 0.0) || delay_steps < 0 || dim < 1)
        throw std::invalid_argument("trajectory_from_csv: incomplete metadata");
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw std::invalid_argument("trajectory_from_csv: missing header row");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (static_cast<int>(fields.size()) != 2 * dim + 2)
            throw std::invalid_argument("trajectory_from_csv: wrong column count");
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(parse_double(f));
        rows.push_back(std::move(row));
    }
    const int total = static_cast<int>(rows.size());
    if (total < delay_steps + 1)
        throw std::invalid_argument("trajectory_from_csv: too few rows");

    Trajectory traj;
    UniformGrid grid;
    grid.h = h;
    grid.delay_steps = delay_steps;
    grid.n_steps = total - delay_steps - 1;
    traj.resize(dim, grid);
    for (int r = 0; r < total; ++r) {
        int k = r - delay_steps;
        for (int c = 0; c < dim; ++c) traj.state(c, k) = rows[r][1 + c];
        if (k >= 0) {
            for (int c = 0; c < dim; ++c) traj.derivs[c][k] = rows[r][1 + dim + c];
            traj.inner_iters[k] = static_cast<int>(rows[r][1 + 2 * dim]);
        }
    }
    return traj;
}

bool trajectories_equal(const Trajectory& a, const Trajectory& b) {
    if (!a.grid.same_as(b.grid) || a.dimension != b.dimension) return false;
    if (a.states != b.states || a.derivs != b.derivs) return false;
    return a.inner_iters == b.inner_iters;
}

std::string roots_to_csv(const std::vector<std::pair<std::complex<double>, double>>& roots) {
    std::string out = "re,im,residual\n";
    for (const auto& [s, r] : roots)
        out += format_full(s.real()) + "," + format_full(s.imag()) + "," + format_full(r) + "\n";
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void Report::add(const std::string& key, const std::string& value) {
    items_.emplace_back(key, value);
}
void Report::add(const std::string& key, double value) { items_.emplace_back(key, format_full(value)); }
void Report::add(const std::string& key, int value) { items_.emplace_back(key, std::to_string(value)); }
void Report::add(const std::string& key, bool value) {
    items_.emplace_back(key, value ? "true" : "false");
}

std::string Report::str() const {
    std::string out;
    for (const auto& [k, v] : items_) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace fracdyn::io
