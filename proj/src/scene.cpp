#include "ps/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ps {

namespace {

constexpr double kTaperMargin = 0.1; // fraction of each axis

// 1-D cosine ramp: 0 at xi = 0, 1 for xi >= m, C1 at both ends.
double taper1d(double xi) {
    if (xi < 0.0) return 0.0;
    if (xi < kTaperMargin) {
        return 0.5 * (1.0 - std::cos(std::numbers::pi * xi / kTaperMargin));
    }
    if (xi > 1.0 - kTaperMargin) return taper1d(1.0 - xi);
    return 1.0;
}

} // namespace

double boundary_taper(const Grid& grid, double x, double y) {
    const double xi = (x + 0.5 * grid.side_x()) / grid.side_x();
    const double eta = (y + 0.5 * grid.side_y()) / grid.side_y();
    return taper1d(xi) * taper1d(eta);
}

LightSet::LightSet(Matrix directions) : directions_(std::move(directions)) {
    if (directions_.rows() != 3 || directions_.cols() < 1) {
        throw ValidationError("light set must be a 3 x q matrix with q >= 1");
    }
    if (!directions_.allFinite()) {
        throw ValidationError("light set contains non-finite entries");
    }
    for (int t = 0; t < directions_.cols(); ++t) {
        const double norm = directions_.col(t).norm();
        if (norm < 1e-300) {
            throw ValidationError("light direction " + std::to_string(t + 1) +
                                  " has zero length");
        }
        directions_.col(t) /= norm;
    }
}

namespace {

double bump_value(const GaussianBump& b, double x, double y) {
    const double dx = x - b.cx;
    const double dy = y - b.cy;
    return b.height * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
}

// Fixed multi-peak catalog, in fractions of the domain sides.
struct PeakSpec {
    double fx, fy, fw, fa;
};
constexpr PeakSpec kPeaks[] = {
    {-0.18, -0.14, 0.085, 0.150},
    {0.20, 0.10, 0.075, 0.120},
    {-0.02, 0.22, 0.065, 0.095},
    {0.12, -0.22, 0.060, 0.080},
};

std::vector<GaussianBump> multi_peak_bumps(const Grid& grid) {
    std::vector<GaussianBump> bumps;
    for (const PeakSpec& p : kPeaks) {
        bumps.push_back(GaussianBump{p.fx * grid.side_x(), p.fy * grid.side_y(),
                                     p.fw * grid.side_x(), p.fa * grid.side_x()});
    }
    return bumps;
}

void validate_bump(const GaussianBump& b) {
    if (!(b.width > 0.0) || !std::isfinite(b.width)) {
        throw ValidationError("gaussian bump width must be positive and finite");
    }
    if (!(b.height > 0.0) || !std::isfinite(b.height)) {
        throw ValidationError("gaussian bump height must be positive and finite");
    }
    if (!std::isfinite(b.cx) || !std::isfinite(b.cy)) {
        throw ValidationError("gaussian bump center must be finite");
    }
}

double cap_value(const SphereCap& c, double x, double y) {
    const double d2 = x * x + y * y;
    const double plane = c.radius - c.height; // height of the cutting plane
    if (d2 >= c.radius * c.radius) return 0.0;
    const double v = std::sqrt(c.radius * c.radius - d2) - plane;
    return v > 0.0 ? v : 0.0;
}

} // namespace

HeightField make_surface(const Grid& grid, const SurfaceKind& kind) {
    const int r = grid.r();
    const int s = grid.s();
    Vector u = Vector::Zero(grid.pixel_count());

    auto fill = [&](auto&& value_at) {
        for (int i = 1; i <= r; ++i) {
            const double x = grid.x(i);
            for (int j = 1; j <= s; ++j) {
                const double y = grid.y(j);
                u[grid.lex_index(i, j) - 1] =
                    value_at(x, y) * boundary_taper(grid, x, y);
            }
        }
    };

    if (std::holds_alternative<FlatSurface>(kind)) {
        // all zeros
    } else if (const auto* b = std::get_if<GaussianBump>(&kind)) {
        validate_bump(*b);
        fill([&](double x, double y) { return bump_value(*b, x, y); });
    } else if (const auto* c = std::get_if<SphereCap>(&kind)) {
        if (!(c->radius > 0.0) || !std::isfinite(c->radius)) {
            throw ValidationError("sphere cap radius must be positive and finite");
        }
        if (!(c->height > 0.0) || !(c->height < c->radius)) {
            throw ValidationError(
                "sphere cap height must satisfy 0 < height < radius");
        }
        // Footprint radius of the cap; it must stay strictly inside the domain
        // so the zero boundary ring remains consistent.
        const double dmax =
            std::sqrt(c->height * (2.0 * c->radius - c->height));
        const double half_min = 0.5 * std::min(grid.side_x(), grid.side_y());
        if (dmax >= half_min) {
            throw ValidationError("sphere cap footprint (radius " +
                                  std::to_string(dmax) +
                                  ") reaches the domain boundary");
        }
        fill([&](double x, double y) { return cap_value(*c, x, y); });
    } else {
        const auto bumps = multi_peak_bumps(grid);
        fill([&](double x, double y) {
            double v = 0.0;
            for (const GaussianBump& b : bumps) v += bump_value(b, x, y);
            return v;
        });
    }

    if (!u.allFinite()) {
        throw ValidationError("surface descriptor produced non-finite heights");
    }
    return HeightField{grid, std::move(u)};
}

AlbedoMap make_albedo(const Grid& grid, const AlbedoKind& kind) {
    const int p = grid.pixel_count();
    Vector rho(p);
    if (const auto* c = std::get_if<ConstantAlbedo>(&kind)) {
        if (!(c->value > 0.0) || !std::isfinite(c->value)) {
            throw ValidationError("constant albedo must be positive and finite");
        }
        rho.setConstant(c->value);
    } else {
        const double two_pi = 2.0 * std::numbers::pi;
        for (int i = 1; i <= grid.r(); ++i) {
            for (int j = 1; j <= grid.s(); ++j) {
                rho[grid.lex_index(i, j) - 1] =
                    0.75 + 0.25 * std::sin(two_pi * grid.x(i) / grid.side_x()) *
                               std::cos(two_pi * grid.y(j) / grid.side_y());
            }
        }
    }
    return AlbedoMap{std::move(rho)};
}

LightSet make_light_ring(int q, double delta,
                         const std::vector<Vector3>& perturb) {
    if (q < 1) throw ValidationError("light ring needs q >= 1 lights");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ValidationError("light ring elevation delta must be positive");
    }
    if (!perturb.empty() && static_cast<int>(perturb.size()) != q) {
        throw ValidationError("light ring perturbation list must have q entries");
    }
    const double scale = 1.0 / std::sqrt(1.0 + delta * delta);
    Matrix L(3, q);
    for (int t = 0; t < q; ++t) {
        const double th = 2.0 * std::numbers::pi * t / q;
        Vector3 dir(scale * std::cos(th), scale * std::sin(th), scale * delta);
        if (!perturb.empty()) dir += perturb[static_cast<std::size_t>(t)];
        L.col(t) = dir;
    }
    return LightSet(std::move(L)); // normalizes, rejects zero columns
}

Vector3 ring_tilt_offset(int q, double delta, int t, double angle_rad) {
    if (q < 1) throw ValidationError("light ring needs q >= 1 lights");
    if (t < 1 || t > q) {
        throw ValidationError("ring light index " + std::to_string(t) +
                              " outside 1.." + std::to_string(q));
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ValidationError("light ring elevation delta must be positive");
    }
    const double th = 2.0 * std::numbers::pi * (t - 1) / q;
    const double elev = std::atan(delta);
    const Vector3 before(std::cos(elev) * std::cos(th),
                         std::cos(elev) * std::sin(th), std::sin(elev));
    const double tilted = elev + angle_rad;
    const Vector3 after(std::cos(tilted) * std::cos(th),
                        std::cos(tilted) * std::sin(th), std::sin(tilted));
    return after - before;
}

} // namespace ps
