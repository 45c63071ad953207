#include "portalloc/knee_point.hpp"

#include <cmath>

#include "portalloc/errors.hpp"

namespace portalloc {

KneeResult knee_point(std::span<const InertiaPoint> curve) {
    if (curve.size() < 3) throw InvalidInput("knee point needs at least 3 points");
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!std::isfinite(curve[i].inertia)) throw InvalidInput("inertia curve has a non-finite value");
        if (i == 0) continue;
        if (curve[i].k <= curve[i - 1].k) throw InvalidInput("inertia curve k values must be strictly increasing");
        if (curve[i].inertia > curve[i - 1].inertia) throw InvalidInput("inertia curve must be non-increasing");
    }
    const auto& first = curve.front();
    const auto& last = curve.back();
    if (first.inertia == last.inertia) return {first.k, true};

    const double x0 = static_cast<double>(first.k);
    const double y0 = first.inertia;
    const double dx = static_cast<double>(last.k) - x0;
    const double dy = last.inertia - y0;
    const double len = std::hypot(dx, dy);

    // Rounding noise on a straight curve must not beat the tie rule.
    const double tie = 1e-12 * (std::abs(dx) + std::abs(dy));
    std::size_t best = 1;
    double best_d = -1.0;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double px = static_cast<double>(curve[i].k) - x0;
        const double py = curve[i].inertia - y0;
        const double d = std::abs(dx * py - dy * px) / len;
        if (d > best_d + tie) {
            best_d = d;
            best = i;
        }
    }
    return {curve[best].k, false};
}

}  // namespace portalloc
