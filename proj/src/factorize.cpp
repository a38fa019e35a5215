#include "ps/factorize.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <string>

namespace ps {

namespace {

// Threshold below which a recovered pixel vector counts as zero albedo.
constexpr double kZeroAlbedo = 1e-300;

void validate_stack(const ImageStack& stack) {
    if (stack.values.rows() != stack.grid.pixel_count()) {
        throw ValidationError("image stack has " +
                              std::to_string(stack.values.rows()) +
                              " rows but the grid has " +
                              std::to_string(stack.grid.pixel_count()) +
                              " pixels");
    }
    if (stack.values.cols() < 1) {
        throw ValidationError("image stack is empty");
    }
    if (!stack.values.allFinite()) {
        throw ValidationError("image stack contains non-finite entries");
    }
}

// Turn the columns of Ntilde (scaled normals) into unit normals plus albedo,
// flagging pixels whose direction is unrecoverable.
SurfaceField normalize_pixels(Matrix ntilde) {
    const int p = static_cast<int>(ntilde.cols());
    Vector rho(p);

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const double norm = ntilde.col(k).norm();
        rho[k] = norm;
        if (norm < kZeroAlbedo) {
            ntilde(0, k) = 0.0;
            ntilde(1, k) = 0.0;
            ntilde(2, k) = 1.0;
        } else {
            ntilde.col(k) /= norm;
        }
    }

    std::vector<int> zeros;
    for (int k = 0; k < p; ++k) {
        if (rho[k] < kZeroAlbedo) {
            rho[k] = 0.0;
            zeros.push_back(k + 1);
        }
    }
    return SurfaceField{std::move(ntilde), AlbedoMap{std::move(rho)},
                        std::move(zeros)};
}

} // namespace

SurfaceField solve_known(const ImageStack& stack, const LightSet& lights) {
    validate_stack(stack);
    const Matrix& M = stack.values;
    const Matrix& L = lights.directions();
    if (L.cols() != M.cols()) {
        throw ValidationError("stack has " + std::to_string(M.cols()) +
                              " images but " + std::to_string(L.cols()) +
                              " lights were given");
    }

    Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    if (L.cols() < 3 || sv(2) < 1e-10 * sv(0)) {
        throw DegeneracyError(
            "degenerate-lights",
            "light directions span fewer than three dimensions; normals are "
            "not recoverable from this set");
    }

    // N~^T = M L^+ with L^+ = V S^-1 U^T.
    const Matrix pinv = svd.matrixV() * sv.head(3).cwiseInverse().asDiagonal() *
                        svd.matrixU().transpose();
    Matrix ntilde = (M * pinv).transpose(); // 3 x p
    return normalize_pixels(std::move(ntilde));
}

Rank3Factors rank3_truncate(const ImageStack& stack) {
    validate_stack(stack);
    const Matrix& M = stack.values;
    const int q = static_cast<int>(M.cols());
    const int m = static_cast<int>(std::min(M.rows(), M.cols()));

    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();

    if (m < 3 || sv(2) <= 1e-10 * sv(0)) {
        throw DegeneracyError(
            "degenerate-data",
            "image stack does not excite three dimensions (third singular "
            "value is negligible); the scene or lighting is degenerate");
    }

    Rank3Factors out;
    out.W = (svd.matrixU().leftCols(3) * sv.head(3).asDiagonal()).transpose();
    out.Z = svd.matrixV().leftCols(3).transpose();
    out.sigma = Vector::Zero(q);
    out.sigma.head(m) = sv.head(m);
    return out;
}

Matrix build_H(const Matrix& Z) {
    if (Z.rows() != 3 || Z.cols() < 1) {
        throw ValidationError("build_H expects a 3 x q matrix");
    }
    if (!Z.allFinite()) {
        throw ValidationError("build_H input contains non-finite entries");
    }
    const int q = static_cast<int>(Z.cols());
    Matrix H(q, 6);
    for (int t = 0; t < q; ++t) {
        const double z1 = Z(0, t);
        const double z2 = Z(1, t);
        const double z3 = Z(2, t);
        H(t, 0) = z1 * z1;
        H(t, 1) = z2 * z2;
        H(t, 2) = z3 * z3;
        H(t, 3) = 2.0 * z1 * z2;
        H(t, 4) = 2.0 * z1 * z3;
        H(t, 5) = 2.0 * z2 * z3;
    }
    return H;
}

GramSolution solve_gram(const Matrix& H) {
    if (H.cols() != 6) {
        throw ValidationError("constraint matrix must have 6 columns");
    }
    if (!H.allFinite()) {
        throw ValidationError("constraint matrix contains non-finite entries");
    }
    const int q = static_cast<int>(H.rows());
    if (q < 6) {
        throw DegeneracyError(
            "too-few-images",
            "recovering the lighting needs at least 6 images taken under "
            "different light directions; got q=" + std::to_string(q));
    }

    Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(5);

    GramSolution out;
    out.H_sigma_max = smax;
    out.H_sigma_min = smin;
    out.H_rank = 0;
    for (int i = 0; i < 6; ++i) {
        if (sv(i) > 1e-10 * smax) ++out.H_rank;
    }

    if (!(smax > 0.0) || smin <= 1e-8 * smax) {
        std::ostringstream msg;
        msg << "the quadratic constraint system is rank-deficient "
               "(sigma_min/sigma_max = "
            << (smax > 0.0 ? smin / smax : 0.0)
            << "); this happens when all light directions lie on a circle "
               "around the viewing axis — move at least one light off the "
               "ring plane";
        throw DegeneracyError("degenerate-lighting", msg.str());
    }

    out.g = svd.solve(Vector::Ones(q));

    Matrix3 G;
    G << out.g(0), out.g(3), out.g(4), //
        out.g(3), out.g(1), out.g(5),  //
        out.g(4), out.g(5), out.g(2);

    Eigen::SelfAdjointEigenSolver<Matrix3> es(G);
    const Vector3 lam = es.eigenvalues(); // ascending
    const double tr = G.trace();
    if (!(tr > 0.0) || lam(0) < -0.1 * tr) {
        throw DegeneracyError(
            "inconsistent-data",
            "recovered Gram matrix is far from positive definite; the image "
            "stack is inconsistent with the Lambertian model");
    }

    const double eps0 = 1e-8 * tr / 3.0;
    if (lam(0) < eps0) {
        Vector3 clipped = lam.cwiseMax(eps0);
        G = es.eigenvectors() * clipped.asDiagonal() *
            es.eigenvectors().transpose();
        G = 0.5 * (G + G.transpose()).eval(); // exact symmetry
        out.spd_projected = true;
    }
    out.G = G;

    Eigen::LLT<Matrix3> llt(G);
    if (llt.info() != Eigen::Success) {
        throw DegeneracyError(
            "inconsistent-data",
            "Cholesky factorization of the recovered Gram matrix failed");
    }
    out.R = llt.matrixU(); // G = R^T R, R upper with positive diagonal
    return out;
}

Matrix3 fix_orientation(Matrix& normals, Matrix& lights) {
    if (normals.rows() != 3 || lights.rows() != 3) {
        throw ValidationError("fix_orientation expects 3 x p and 3 x q inputs");
    }
    const int p = static_cast<int>(normals.cols());
    long pos = 0;
    long neg = 0;
    for (int k = 0; k < p; ++k) {
        if (normals(2, k) > 0.0) ++pos;
        else if (normals(2, k) < 0.0) ++neg;
    }

    // Enumerate diag(s1, s2, s3) lexicographically, +1 before -1, so the
    // identity comes first and wins ties.  Only s3 affects the count.
    Matrix3 best = Matrix3::Identity();
    long best_count = -1;
    for (int bits = 0; bits < 8; ++bits) {
        const double s1 = (bits & 4) ? -1.0 : 1.0;
        const double s2 = (bits & 2) ? -1.0 : 1.0;
        const double s3 = (bits & 1) ? -1.0 : 1.0;
        const long count = (s3 > 0.0) ? pos : neg;
        if (count > best_count) {
            best_count = count;
            best = Vector3(s1, s2, s3).asDiagonal();
        }
    }

    normals = best * normals;
    lights = best * lights;
    return best;
}

UnknownResult solve_unknown(const ImageStack& stack,
                            const UnknownOptions& options) {
    validate_stack(stack);
    ImageStack work = stack;
    if (options.intensities) {
        const Vector& intens = *options.intensities;
        if (intens.size() != work.values.cols()) {
            throw ValidationError("intensity vector must have one entry per "
                                  "image");
        }
        for (int t = 0; t < intens.size(); ++t) {
            if (!(intens(t) > 0.0) || !std::isfinite(intens(t))) {
                throw ValidationError("light intensities must be positive and "
                                      "finite");
            }
            work.values.col(t) /= intens(t);
        }
    }

    UnknownResult out{SurfaceField{},
                      LightSet(Matrix::Identity(3, 3)),
                      Vector(),
                      GramSolution{},
                      Rank3Factors{},
                      Matrix3::Identity()};

    out.factors = rank3_truncate(work);
    out.gram = solve_gram(build_H(out.factors.Z));

    // N~ = R^-T W  and  L^ = R Z  recover the factors in the true gauge up to
    // sign flips, which fix_orientation resolves.
    Matrix ntilde = out.gram.R.transpose()
                        .triangularView<Eigen::Lower>()
                        .solve(out.factors.W);
    Matrix lhat = out.gram.R * out.factors.Z;

    out.surface = normalize_pixels(std::move(ntilde));
    out.orientation = fix_orientation(out.surface.normals, lhat);
    // keep the (0, 0, 1) placeholder on flagged pixels regardless of the sign
    // matrix chosen above
    for (int k : out.surface.zero_albedo_pixels) {
        out.surface.normals.col(k - 1) = Vector3(0.0, 0.0, 1.0);
    }

    out.light_norms = lhat.colwise().norm();
    out.lights = LightSet(std::move(lhat));
    return out;
}

} // namespace ps
