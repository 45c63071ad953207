#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace portalloc::testkit {

/// max over eta in {z_s} of eta - (1 - gamma)^-1 * sum_s pi_s * max(eta - z_s, 0).
/// The objective is concave and piecewise linear with kinks at the z_s, so the
/// maximum sits on one of them.
double rockafellar_tail_mean(std::span<const double> profits, std::span<const double> probabilities, double gamma);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

std::string slurp(const std::filesystem::path& path);

}  // namespace portalloc::testkit
