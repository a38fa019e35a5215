#include "ps/reference.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace ps::reference {

SurfaceField normals_from_height(const HeightField& height) {
    const Grid& g = height.grid;
    const int r = g.r();
    const int s = g.s();
    const int p = g.pixel_count();
    if (height.values.size() != p) {
        throw ValidationError("height field has wrong length");
    }

    Matrix N(3, p);
    const double* u = height.values.data();
    const double inv2h = 1.0 / (2.0 * g.pitch());

    for (int k = 0; k < p; ++k) {
        const int i = k / s + 1;
        const int j = k % s + 1;
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
    const Matrix& N = surface.normals;
    const Matrix& L = lights.directions();
    const Vector& rho = surface.albedo.values;

    Matrix M(p, q);
    long shadowed = 0;
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

    return RenderResult{ImageStack{grid, std::move(M), std::move(ids)},
                        static_cast<double>(shadowed) /
                            (static_cast<double>(p) * static_cast<double>(q))};
}

LaplacianField divergence(const GradientField& gradient) {
    const Grid& g = gradient.grid;
    const int r = g.r();
    const int s = g.s();
    const int p = g.pixel_count();

    LaplacianField out{g, Vector(p)};
    const double* px = gradient.px.data();
    const double* py = gradient.py.data();
    double* f = out.f.data();
    const double inv2h = 1.0 / (2.0 * g.pitch());

    for (int k = 0; k < p; ++k) {
        const int i = k / s + 1;
        const int j = k % s + 1;
        const double pxp = (i < r) ? px[k + s] : 0.0;
        const double pxm = (i > 1) ? px[k - s] : 0.0;
        const double pyp = (j < s) ? py[k + 1] : 0.0;
        const double pym = (j > 1) ? py[k - 1] : 0.0;
        f[k] = (pxp - pxm) * inv2h + (pyp - pym) * inv2h;
    }
    return out;
}

namespace {

std::vector<double> sine_table(int n) {
    std::vector<double> S(static_cast<std::size_t>(n) * n);
    for (int a = 1; a <= n; ++a) {
        for (int i = 1; i <= n; ++i) {
            S[static_cast<std::size_t>(a - 1) * n + (i - 1)] =
                std::sin(a * i * std::numbers::pi / (n + 1));
        }
    }
    return S;
}

void dst_rows(int r, int s, const std::vector<double>& S, const double* in,
              double* out) {
    for (int a = 0; a < r; ++a) {
        double* dst = out + static_cast<std::size_t>(a) * s;
        for (int j = 0; j < s; ++j) dst[j] = 0.0;
        const double* srow = S.data() + static_cast<std::size_t>(a) * r;
        for (int i = 0; i < r; ++i) {
            const double c = srow[i];
            const double* src = in + static_cast<std::size_t>(i) * s;
            for (int j = 0; j < s; ++j) dst[j] += c * src[j];
        }
    }
}

void dst_cols(int r, int s, const std::vector<double>& S, const double* in,
              double* out) {
    for (int i = 0; i < r; ++i) {
        const double* src = in + static_cast<std::size_t>(i) * s;
        double* dst = out + static_cast<std::size_t>(i) * s;
        for (int b = 0; b < s; ++b) {
            const double* srow = S.data() + static_cast<std::size_t>(b) * s;
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += src[j] * srow[j];
            dst[b] = acc;
        }
    }
}

} // namespace

HeightField poisson_fast_sine(const LaplacianField& rhs) {
    const Grid& grid = rhs.grid;
    const int r = grid.r();
    const int s = grid.s();
    const int p = grid.pixel_count();

    const Vector b = (grid.pitch() * grid.pitch()) * rhs.f;

    const std::vector<double> Sr = sine_table(r);
    const std::vector<double> Ss = sine_table(s);

    Vector t1(p), t2(p);
    dst_rows(r, s, Sr, b.data(), t1.data());
    dst_cols(r, s, Ss, t1.data(), t2.data());

    const double pi = std::numbers::pi;
    double* c = t2.data();
    for (int a = 0; a < r; ++a) {
        const double ca = 2.0 * std::cos((a + 1) * pi / (r + 1));
        double* row = c + static_cast<std::size_t>(a) * s;
        for (int bidx = 0; bidx < s; ++bidx) {
            const double lam =
                ca + 2.0 * std::cos((bidx + 1) * pi / (s + 1)) - 4.0;
            row[bidx] /= lam;
        }
    }

    dst_rows(r, s, Sr, t2.data(), t1.data());
    Vector u(p);
    dst_cols(r, s, Ss, t1.data(), u.data());

    const double scale = 4.0 / (static_cast<double>(r + 1) * (s + 1));
    double* up = u.data();
    for (int k = 0; k < p; ++k) up[k] *= scale;
    return HeightField{grid, std::move(u)};
}

} // namespace ps::reference
