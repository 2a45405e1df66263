#include "loop_geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace memdiscern::detail {

double clipped_signed_area(std::span<const double> v, std::span<const double> i, bool upper_half) {
    const std::size_t n = v.size();
    if (n < 3) {
        return 0.0;
    }
    auto inside = [upper_half](double x) { return upper_half ? x >= 0.0 : x <= 0.0; };

    // Sutherland-Hodgman against the line v = 0, shoelace accumulated on the fly.
    double twice_area = 0.0;
    bool have_first = false;
    double first_v = 0.0, first_i = 0.0, last_v = 0.0, last_i = 0.0;
    auto emit = [&](double pv, double pi) {
        if (!have_first) {
            first_v = pv;
            first_i = pi;
            have_first = true;
        } else {
            twice_area += last_v * pi - pv * last_i;
        }
        last_v = pv;
        last_i = pi;
    };

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t prev = k == 0 ? n - 1 : k - 1;
        const double va = v[prev], ia = i[prev];
        const double vb = v[k], ib = i[k];
        const bool a_in = inside(va);
        const bool b_in = inside(vb);
        if (a_in != b_in) {
            const double frac = va / (va - vb);
            emit(0.0, ia + frac * (ib - ia));
        }
        if (b_in) {
            emit(vb, ib);
        }
    }
    if (have_first) {
        twice_area += last_v * first_i - first_v * last_i;
    }
    return 0.5 * twice_area;
}

int count_cycles(std::span<const double> v, bool cyclic) {
    if (v.empty()) {
        return 1;
    }
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        return 1;
    }
    const double upper = lo + 0.75 * (hi - lo);
    const double lower = lo + 0.25 * (hi - lo);

    std::size_t start = 0;
    if (cyclic) {
        start = static_cast<std::size_t>(lo_it - v.begin());
    }
    const std::size_t n = v.size();
    int cycles = 0;
    bool armed = cyclic || v[0] < upper;
    for (std::size_t step = 0; step < n; ++step) {
        const double x = v[(start + step) % n];
        if (armed && x >= upper) {
            ++cycles;
            armed = false;
        } else if (!armed && x <= lower) {
            armed = true;
        }
    }
    return std::max(1, cycles);
}

int count_turning_points(std::span<const double> v) {
    std::vector<double> runs;
    for (double x : v) {
        if (runs.empty() || runs.back() != x) {
            runs.push_back(x);
        }
    }
    int turns = 0;
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        const double d1 = runs[k] - runs[k - 1];
        const double d2 = runs[k + 1] - runs[k];
        if ((d1 > 0.0) != (d2 > 0.0)) {
            ++turns;
        }
    }
    return turns;
}

}  // namespace memdiscern::detail
