#include "ps/render.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace ps {

namespace {

void validate_surface(const SurfaceField& surface, int p) {
    if (surface.normals.rows() != 3 || surface.normals.cols() != p) {
        throw ValidationError("normal field must be 3 x " + std::to_string(p));
    }
    if (surface.albedo.values.size() != p) {
        throw ValidationError("albedo map must have " + std::to_string(p) +
                              " entries");
    }
    if (!surface.normals.allFinite() || !surface.albedo.values.allFinite()) {
        throw ValidationError("surface field contains non-finite entries");
    }
    for (int k = 0; k < p; ++k) {
        if (std::abs(surface.normals.col(k).norm() - 1.0) > 1e-8) {
            throw ValidationError("normal at pixel " + std::to_string(k + 1) +
                                  " is not unit length");
        }
        if (surface.albedo.values[k] < 0.0) {
            throw ValidationError("albedo at pixel " + std::to_string(k + 1) +
                                  " is negative");
        }
    }
}

} // namespace

SurfaceField normals_from_height(const HeightField& height) {
    const Grid& g = height.grid;
    const int r = g.r();
    const int s = g.s();
    const int p = g.pixel_count();
    if (height.values.size() != p) {
        throw ValidationError("height field has wrong length");
    }
    if (!height.values.allFinite()) {
        throw ValidationError("height field contains non-finite entries");
    }

    Matrix N(3, p);
    const double* u = height.values.data();
    const double inv2h = 1.0 / (2.0 * g.pitch());

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const int i = k / s + 1;
        const int j = k % s + 1;
        // centered differences; the boundary ring is identically zero
        const double uxp = (i < r) ? u[k + s] : 0.0;
        const double uxm = (i > 1) ? u[k - s] : 0.0;
        const double uyp = (j < s) ? u[k + 1] : 0.0;
        const double uym = (j > 1) ? u[k - 1] : 0.0;
        const double gx = (uxp - uxm) * inv2h;
        const double gy = (uyp - uym) * inv2h;
        const double inv_len = 1.0 / std::sqrt(1.0 + gx * gx + gy * gy);
        N(0, k) = -gx * inv_len;
        N(1, k) = -gy * inv_len;
        N(2, k) = inv_len;
    }

    AlbedoMap albedo{Vector::Ones(p)};
    return SurfaceField{std::move(N), std::move(albedo), {}};
}

RenderResult render(const SurfaceField& surface, const LightSet& lights,
                    const Grid& grid, bool clamp) {
    const int p = grid.pixel_count();
    const int q = lights.count();
    validate_surface(surface, p);

    const Matrix& N = surface.normals;
    const Matrix& L = lights.directions();
    const Vector& rho = surface.albedo.values;

    Matrix M(p, q);
    long shadowed = 0;

#pragma omp parallel for schedule(static) reduction(+ : shadowed)
    for (int k = 0; k < p; ++k) {
        for (int t = 0; t < q; ++t) {
            const double v = rho[k] * (N(0, k) * L(0, t) + N(1, k) * L(1, t) +
                                       N(2, k) * L(2, t));
            if (v <= 0.0) ++shadowed;
            M(k, t) = (clamp && v < 0.0) ? 0.0 : v;
        }
    }

    std::vector<int> ids(static_cast<std::size_t>(q));
    for (int t = 0; t < q; ++t) ids[static_cast<std::size_t>(t)] = t + 1;

    RenderResult out{ImageStack{grid, std::move(M), std::move(ids)},
                     static_cast<double>(shadowed) /
                         (static_cast<double>(p) * static_cast<double>(q))};
    return out;
}

namespace {

// Deterministic standard-normal stream: 53-bit uniforms from mt19937_64
// passed through the Box-Muller transform.  Sequential by construction so a
// given seed always produces the same noise field.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        const double u1 =
            1.0 - std::ldexp(static_cast<double>(gen_() >> 11), -53); // (0,1]
        const double u2 =
            std::ldexp(static_cast<double>(gen_() >> 11), -53); // [0,1)
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        cached_ = rad * std::sin(ang);
        have_ = true;
        return rad * std::cos(ang);
    }

private:
    std::mt19937_64 gen_;
    bool have_ = false;
    double cached_ = 0.0;
};

} // namespace

ImageStack add_noise(const ImageStack& stack, double level, std::uint64_t seed,
                     NoiseModel model) {
    if (!(level >= 0.0) || !std::isfinite(level)) {
        throw ValidationError("noise level must be non-negative and finite");
    }
    ImageStack out = stack;
    if (level == 0.0) return out;

    const int p = static_cast<int>(out.values.rows());
    const int q = static_cast<int>(out.values.cols());
    GaussianStream gauss(seed);

    if (model == NoiseModel::FrobeniusRms) {
        const double sigma = level * stack.values.norm() /
                             std::sqrt(static_cast<double>(p) *
                                       static_cast<double>(q));
        for (int t = 0; t < q; ++t) {
            for (int k = 0; k < p; ++k) out.values(k, t) += sigma * gauss.next();
        }
    } else {
        for (int t = 0; t < q; ++t) {
            for (int k = 0; k < p; ++k) {
                out.values(k, t) *= 1.0 + level * gauss.next();
            }
        }
    }
    return out;
}

} // namespace ps
