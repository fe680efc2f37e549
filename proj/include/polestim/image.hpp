#pragma once

#include <cstdint>
#include <vector>

#include "polestim/errors.hpp"

namespace polestim {

/// Square raster, row-major. Index pair (m, n) is (row, column); the image
/// coordinate frame puts u along columns (left to right) and v along rows
/// (top to bottom), with pixel centers at integer coordinates u = n, v = m.
template <typename T>
struct image {
    int n = 0;
    std::vector<T> data;

    image() = default;
    image(int size, T fill = T{}) : n(size), data(static_cast<size_t>(size) * size, fill) {}

    T& operator()(int m, int col) { return data[static_cast<size_t>(m) * n + col]; }
    const T& operator()(int m, int col) const { return data[static_cast<size_t>(m) * n + col]; }

    bool in_bounds(int m, int col) const { return m >= 0 && m < n && col >= 0 && col < n; }

    bool operator==(const image& o) const { return n == o.n && data == o.data; }
};

using bool_image = image<std::uint8_t>;  // silhouettes, values 0 or 1
using int_image = image<std::int32_t>;   // co-added stacks
using real_image = image<double>;

/// Center pixel index shared by the spectrum DC bin, the rotation center,
/// and the default principal point.
constexpr int center_index(int n) { return n / 2; }

template <typename T, typename U>
image<U> convert_image(const image<T>& src) {
    image<U> out(src.n);
    for (size_t idx = 0; idx < src.data.size(); ++idx) out.data[idx] = static_cast<U>(src.data[idx]);
    return out;
}

}  // namespace polestim
