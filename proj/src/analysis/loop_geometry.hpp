#pragma once

#include <span>

namespace memdiscern::detail {

// Signed shoelace area of the closed polygon (v, i) clipped to v >= 0
// (upper_half) or v <= 0. Counter-clockwise in the (v, i) plane is positive.
double clipped_signed_area(std::span<const double> v, std::span<const double> i, bool upper_half);

// Number of complete swings of `v`: excursions above the 75% level of its
// range that are separated by dips below the 25% level. Treats the sequence
// as cyclic when `cyclic` is set. Returns at least 1.
int count_cycles(std::span<const double> v, bool cyclic);

// Interior turning points of a sequence after merging equal neighbours.
int count_turning_points(std::span<const double> v);

}  // namespace memdiscern::detail
