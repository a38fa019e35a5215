#include "ps/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ps {

double angle_between(const Vector3& a, const Vector3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-300 || nb < 1e-300) {
        throw ValidationError("cannot measure the angle of a zero vector");
    }
    // atan2(|a x b|, a . b) is exact in the same places acos(a . b) is but
    // stays fully accurate near 0 and pi, where the cosine formulation loses
    // half the significant digits to cancellation.
    const double cross = a.cross(b).norm();
    const double dot = a.dot(b);
    return std::atan2(cross, dot);
}

AlignmentResult procrustes_align(const Matrix& estimated,
                                 const Matrix& reference,
                                 bool allow_reflection) {
    if (estimated.rows() != 3 || reference.rows() != 3) {
        throw ValidationError("direction sets must be 3 x q matrices");
    }
    if (estimated.cols() != reference.cols()) {
        throw ValidationError("direction sets must have the same size");
    }
    if (estimated.cols() < 3) {
        throw ValidationError("alignment needs at least 3 directions");
    }
    if (!estimated.allFinite() || !reference.allFinite()) {
        throw ValidationError("direction sets contain non-finite entries");
    }

    const Matrix3 C = reference * estimated.transpose();
    Eigen::JacobiSVD<Matrix3> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector3& sv = svd.singularValues();

    AlignmentResult out;
    out.degenerate = !(sv(0) > 0.0) || sv(2) <= 1e-12 * sv(0);

    Matrix3 Q = svd.matrixU() * svd.matrixV().transpose();
    if (!allow_reflection && Q.determinant() < 0.0) {
        Vector3 d(1.0, 1.0, -1.0); // flip the least-significant direction
        Q = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
    }
    out.Q = Q;
    out.residual = (Q * estimated - reference).norm();

    const int q = static_cast<int>(estimated.cols());
    double sum = 0.0;
    double worst = 0.0;
    for (int t = 0; t < q; ++t) {
        const double a =
            angle_between(Q * estimated.col(t), Vector3(reference.col(t)));
        sum += a;
        worst = std::max(worst, a);
    }
    out.max_angle_rad = worst;
    out.mean_angle_rad = sum / q;
    return out;
}

double surface_rmse(const HeightField& estimated, const HeightField& reference,
                    bool normalize) {
    if (!(estimated.grid == reference.grid)) {
        throw ValidationError("height fields live on different grids");
    }
    if (estimated.values.size() != reference.values.size()) {
        throw ValidationError("height fields have different lengths");
    }
    const double n = static_cast<double>(estimated.values.size());
    const double rmse =
        std::sqrt((estimated.values - reference.values).squaredNorm() / n);
    if (!normalize) return rmse;
    const double scale = reference.values.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        throw ValidationError(
            "cannot normalize the error against an identically zero surface");
    }
    return rmse / scale;
}

SpectrumReport spectrum_report(const ImageStack& stack) {
    if (stack.values.size() == 0) {
        throw ValidationError("image stack is empty");
    }
    if (!stack.values.allFinite()) {
        throw ValidationError("image stack contains non-finite entries");
    }
    Eigen::JacobiSVD<Matrix> svd(stack.values);
    SpectrumReport out;
    out.sigma = svd.singularValues();
    const int m = static_cast<int>(out.sigma.size());
    if (m >= 3 && out.sigma(0) > 0.0) out.ratio_3_1 = out.sigma(2) / out.sigma(0);
    if (m >= 4 && out.sigma(0) > 0.0) out.ratio_4_1 = out.sigma(3) / out.sigma(0);
    return out;
}

} // namespace ps
