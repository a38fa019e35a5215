#pragma once

#include <utility>
#include <vector>

#include "ps/errors.hpp"

namespace ps {

// Rectangular pixel lattice over the domain [-A/2, A/2] x [-B/2, B/2].
//
// There are r interior nodes along x and s along y with uniform pitch
// h = A / (r + 1); the vertical side length follows as B = (s + 1) * h.
// Node coordinates are defined for the full closed range i = 0..r+1,
// j = 0..s+1; the outermost ring is the boundary and always carries
// homogeneous Dirichlet values.  Stored fields hold only the p = r*s
// interior nodes, ordered lexicographically with j fastest:
//   k = (i - 1) * s + j,   k = 1..p   (1-based on both sides).
class Grid {
public:
    Grid(int r, int s, double side_x);

    int r() const { return r_; }
    int s() const { return s_; }
    double side_x() const { return A_; }
    double side_y() const { return B_; }
    double pitch() const { return h_; }
    int pixel_count() const { return r_ * s_; }

    // Node coordinates, valid on the closed ranges 0..r+1 and 0..s+1.
    double x(int i) const { return -0.5 * A_ + i * h_; }
    double y(int j) const { return -0.5 * B_ + j * h_; }

    std::vector<double> interior_x() const; // x_1 .. x_r
    std::vector<double> interior_y() const; // y_1 .. y_s

    // Lexicographic pixel index and its inverse (all 1-based).
    int lex_index(int i, int j) const;
    std::pair<int, int> from_lex(int k) const;

    bool operator==(const Grid& other) const {
        return r_ == other.r_ && s_ == other.s_ && A_ == other.A_;
    }

private:
    int r_;
    int s_;
    double A_;
    double h_;
    double B_;
};

Grid make_grid(int r, int s, double side_x);

} // namespace ps
