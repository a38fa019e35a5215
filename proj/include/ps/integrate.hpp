#pragma once

#include "ps/render.hpp"

namespace ps {

// Height-gradient samples on the interior nodes, lexicographic order.
struct GradientField {
    Grid grid;
    Vector px; // d u / d x
    Vector py; // d u / d y
};

// Right-hand side samples f = div(p) on the interior nodes.
struct LaplacianField {
    Grid grid;
    Vector f;
};

// Normals closer to the image plane than this are rejected as grazing.
inline constexpr double kMinNormalZ = 1e-6;

// Per-pixel gradient from unit normals: (u_x, u_y) = (-n1/n3, -n2/n3).
GradientField gradient_from_normals(const SurfaceField& surface,
                                    const Grid& grid);

// Centered-difference divergence of a gradient field, zero boundary ring.
LaplacianField divergence(const GradientField& gradient);

// The 5-point Laplacian stencil as a matrix-free operator:
//   (A u)_ij = u_{i-1,j} + u_{i,j-1} - 4 u_ij + u_{i,j+1} + u_{i+1,j}
// with homogeneous Dirichlet boundary.  `out = A * u`, both length p.
void apply_five_point(const Grid& grid, const double* u, double* out);
Vector apply_five_point(const Grid& grid, const Vector& u);

enum class PoissonMethod {
    DirectBanded,      // banded Cholesky of -A
    ConjugateGradient, // matrix-free CG on -A u = -h^2 f
    FastSine,          // diagonalization by the discrete sine transform
};

struct PoissonOptions {
    double cg_tol = 1e-10; // relative residual target
    int cg_max_iter = 0;   // 0 = size-based default
};

// Solve A u = h^2 f for the height field u.  All three methods satisfy
// ||A u - h^2 f|| <= 1e-10 ||h^2 f|| on well-posed inputs.
HeightField poisson_solve(const LaplacianField& rhs, PoissonMethod method,
                          const PoissonOptions& options = {});

} // namespace ps
