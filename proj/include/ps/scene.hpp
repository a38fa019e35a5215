#pragma once

#include <variant>
#include <vector>

#include "ps/grid.hpp"
#include "ps/types.hpp"

namespace ps {

// Height field over a grid: p interior values in lexicographic order.  The
// boundary ring is implicit and identically zero.
struct HeightField {
    Grid grid;
    Vector values; // length p

    // 1-based node access; returns the implicit 0 on the boundary ring.
    double at(int i, int j) const {
        if (i == 0 || j == 0 || i == grid.r() + 1 || j == grid.s() + 1) return 0.0;
        return values[grid.lex_index(i, j) - 1];
    }
};

// Unit light directions as the columns of a 3 x q matrix.  Columns are
// normalized on construction so the unit-norm invariant holds for every
// instance, including ones loaded from files.
class LightSet {
public:
    explicit LightSet(Matrix directions);

    const Matrix& directions() const { return directions_; }
    int count() const { return static_cast<int>(directions_.cols()); }

private:
    Matrix directions_;
};

// Per-pixel albedo, strictly positive.
struct AlbedoMap {
    Vector values; // length p
};

// ------------------------------------------------------------ surface catalog

struct FlatSurface {};

struct GaussianBump {
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.0;  // Gaussian sigma, absolute units
    double height = 0.0; // peak height, absolute units
};

struct SphereCap {
    double radius = 0.0;
    double height = 0.0; // cap height, 0 < height < radius
};

// Fixed composite of four Gaussian bumps (parameters proportional to the
// domain size), the default "interesting" test surface.
struct MultiPeak {};

using SurfaceKind = std::variant<FlatSurface, GaussianBump, SphereCap, MultiPeak>;

struct ConstantAlbedo {
    double value = 1.0;
};

// Smooth strictly positive pattern: 0.75 + 0.25 sin(2 pi x / A) cos(2 pi y / B).
struct PatternedAlbedo {};

using AlbedoKind = std::variant<ConstantAlbedo, PatternedAlbedo>;

// Every generated surface is multiplied by a separable cosine taper that
// ramps from 0 at the boundary to 1 over the outer 10% of each axis, so the
// implicit zero boundary ring is consistent with the stored values.
double boundary_taper(const Grid& grid, double x, double y);

HeightField make_surface(const Grid& grid, const SurfaceKind& kind);

AlbedoMap make_albedo(const Grid& grid, const AlbedoKind& kind);

// q lights on a ring around the view axis: direction t (1-based) is
//   (1 + delta^2)^{-1/2} * (cos th_t, sin th_t, delta),  th_t = 2 pi (t-1)/q.
// `perturb` is empty or holds q per-light offsets added before normalization.
LightSet make_light_ring(int q, double delta,
                         const std::vector<Vector3>& perturb = {});

// Offset that tilts ring light t (1-based) off the ring plane (toward +z) by
// `angle_rad`, for use as a perturb entry of make_light_ring.
Vector3 ring_tilt_offset(int q, double delta, int t, double angle_rad);

} // namespace ps
