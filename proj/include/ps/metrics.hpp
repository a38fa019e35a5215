#pragma once

#include "ps/render.hpp"

namespace ps {

// Orthogonal alignment of an estimated direction set to a reference:
// Q = arg min ||Q Lhat - L||_F over orthogonal Q, from the SVD of L Lhat^T.
// With allow_reflection = false the minimizer is restricted to rotations.
struct AlignmentResult {
    Matrix3 Q;
    double max_angle_rad = 0.0;
    double mean_angle_rad = 0.0;
    double residual = 0.0; // ||Q Lhat - L||_F
    bool degenerate = false; // cross-covariance was rank-deficient
};

AlignmentResult procrustes_align(const Matrix& estimated, const Matrix& reference,
                                 bool allow_reflection = true);

// Angle in radians between two direction vectors (sign-sensitive).
double angle_between(const Vector3& a, const Vector3& b);

// Root-mean-square height difference over matching grids; with `normalize`
// the value is divided by max |reference|.
double surface_rmse(const HeightField& estimated, const HeightField& reference,
                    bool normalize);

// Singular-value diagnostics of an image stack.
struct SpectrumReport {
    Vector sigma;           // min(p, q) values, descending
    double ratio_3_1 = 0.0; // sigma_3 / sigma_1 (0 if undefined)
    double ratio_4_1 = 0.0; // sigma_4 / sigma_1 (0 if undefined)
};

SpectrumReport spectrum_report(const ImageStack& stack);

} // namespace ps
