#pragma once

#include <optional>

#include "ps/render.hpp"

namespace ps {

// Normal/albedo recovery with known light directions: least-squares solve of
// albedo_k * n_k^T L = m_k^T via the pseudoinverse of L.  Pixels whose
// unnormalized normal vanishes are flagged in zero_albedo_pixels and given
// direction (0, 0, 1).
SurfaceField solve_known(const ImageStack& stack, const LightSet& lights);

// Best rank-3 factorization of the stack from its SVD:
//   W = [s1 u1, s2 u2, s3 u3]^T (3 x p),  Z = [v1, v2, v3]^T (3 x q),
// so W^T Z is the closest rank-3 matrix to M.  `sigma` keeps all q singular
// values, descending.
struct Rank3Factors {
    Matrix W; // 3 x p
    Matrix Z; // 3 x q, orthonormal rows
    Vector sigma;
};

Rank3Factors rank3_truncate(const ImageStack& stack);

// Quadratic-constraint matrix: row t of H is
//   [z1^2, z2^2, z3^2, 2 z1 z2, 2 z1 z3, 2 z2 z3]
// for z = Z.col(t), so H g = diag(Z^T G Z) for the symmetric G packed as
// g = (g11, g22, g33, g12, g13, g23).
Matrix build_H(const Matrix& Z);

// Symmetric G solving H g = 1 in the least-squares sense, projected onto the
// positive-definite cone if needed, with its Cholesky factor G = R^T R
// (R upper triangular, positive diagonal).
struct GramSolution {
    Vector6 g;
    Matrix3 G;
    Matrix3 R;
    int H_rank = 0;
    double H_sigma_min = 0.0;
    double H_sigma_max = 0.0;
    bool spd_projected = false; // eigenvalues were clipped up to epsilon_0
};

GramSolution solve_gram(const Matrix& H);

// Sign disambiguation: among the eight matrices diag(+-1, +-1, +-1), pick the
// one maximizing the number of normals with positive third component (ties
// prefer the identity), and apply it to both factors in place.  Returns the
// chosen matrix.
Matrix3 fix_orientation(Matrix& normals, Matrix& lights);

struct UnknownOptions {
    // Optional per-image light intensities (all positive, length q); columns
    // of the stack are divided by them before factorization.
    std::optional<Vector> intensities;
};

// Full unknown-lighting solve: rank-3 truncation, Gram recovery, Cholesky
// split, orientation fix.  Lights are returned unit-normalized; `light_norms`
// holds the pre-normalization column norms (all about 1 for noiseless data).
struct UnknownResult {
    SurfaceField surface;
    LightSet lights;
    Vector light_norms;
    GramSolution gram;
    Rank3Factors factors;
    Matrix3 orientation; // sign matrix chosen by fix_orientation
};

UnknownResult solve_unknown(const ImageStack& stack,
                            const UnknownOptions& options = {});

} // namespace ps
