#pragma once

// Deterministic on-disk formats: trajectory CSV (17 significant digits,
// bit-exact round-trip), key=value reports, and the run manifest.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fracdyn/fraccore.hpp"

namespace fracdyn::io {

/// Columns: t, x_1..x_n, d_1..d_n, inner_iters. History nodes (t < 0) carry
/// zeros in the derivative and iteration columns. A leading '#' metadata
/// line pins h, delay_steps and dimension so parsing is exact.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);

bool trajectories_equal(const Trajectory& a, const Trajectory& b);

/// One row per characteristic root: re, im, residual.
std::string roots_to_csv(const std::vector<std::pair<std::complex<double>, double>>& roots);

std::string format_full(double v);  // %.17g, C locale

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Flat key=value report, keys emitted in insertion order.
class Report {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, int value);
    void add(const std::string& key, bool value);
    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

/// FNV-1a over the canonical config text.
std::uint64_t fnv1a(const std::string& text);

}  // namespace fracdyn::io
