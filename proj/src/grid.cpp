#include "ps/grid.hpp"

#include <cmath>
#include <string>

namespace ps {

Grid::Grid(int r, int s, double side_x) : r_(r), s_(s), A_(side_x) {
    if (r < 2 || s < 2) {
        throw ValidationError("grid needs at least 2 interior nodes per axis, got r=" +
                              std::to_string(r) + ", s=" + std::to_string(s));
    }
    if (!(side_x > 0.0) || !std::isfinite(side_x)) {
        throw ValidationError("grid side length must be positive and finite, got " +
                              std::to_string(side_x));
    }
    h_ = A_ / static_cast<double>(r_ + 1);
    B_ = static_cast<double>(s_ + 1) * h_;
}

std::vector<double> Grid::interior_x() const {
    std::vector<double> xs(static_cast<std::size_t>(r_));
    for (int i = 1; i <= r_; ++i) xs[static_cast<std::size_t>(i - 1)] = x(i);
    return xs;
}

std::vector<double> Grid::interior_y() const {
    std::vector<double> ys(static_cast<std::size_t>(s_));
    for (int j = 1; j <= s_; ++j) ys[static_cast<std::size_t>(j - 1)] = y(j);
    return ys;
}

int Grid::lex_index(int i, int j) const {
    if (i < 1 || i > r_ || j < 1 || j > s_) {
        throw ValidationError("pixel index (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") outside interior 1.." +
                              std::to_string(r_) + " x 1.." + std::to_string(s_));
    }
    return (i - 1) * s_ + j;
}

std::pair<int, int> Grid::from_lex(int k) const {
    if (k < 1 || k > pixel_count()) {
        throw ValidationError("lexicographic index " + std::to_string(k) +
                              " outside 1.." + std::to_string(pixel_count()));
    }
    const int i = (k - 1) / s_ + 1;
    const int j = (k - 1) % s_ + 1;
    return {i, j};
}

Grid make_grid(int r, int s, double side_x) { return Grid(r, s, side_x); }

} // namespace ps
