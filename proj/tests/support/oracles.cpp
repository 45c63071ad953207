#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace portalloc::testkit {

double rockafellar_tail_mean(std::span<const double> z, std::span<const double> pi, double gamma) {
    double best = -std::numeric_limits<double>::infinity();
    for (const double eta : z) {
        double shortfall = 0.0;
        for (std::size_t s = 0; s < z.size(); ++s) shortfall += pi[s] * std::max(eta - z[s], 0.0);
        best = std::max(best, eta - shortfall / (1.0 - gamma));
    }
    return best;
}

std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("portalloc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace portalloc::testkit
