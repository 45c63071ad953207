#pragma once

#include <cstddef>
#include <span>

#include "portalloc/kmeans.hpp"

namespace portalloc {

struct KneeResult {
    std::size_t k = 0;
    bool degenerate = false;  ///< all inertias equal; k is the smallest k
};

/// Interior point with the largest perpendicular distance to the chord through
/// the first and last points. Ties go to the smaller k. Needs at least three
/// points, strictly increasing k and non-increasing inertia.
KneeResult knee_point(std::span<const InertiaPoint> curve);

}  // namespace portalloc
