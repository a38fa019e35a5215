#include "ps/integrate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace ps {

GradientField gradient_from_normals(const SurfaceField& surface,
                                    const Grid& grid) {
    const int p = grid.pixel_count();
    if (surface.normals.rows() != 3 || surface.normals.cols() != p) {
        throw ValidationError("normal field must be 3 x " + std::to_string(p));
    }
    if (!surface.normals.allFinite()) {
        throw ValidationError("normal field contains non-finite entries");
    }

    const Matrix& N = surface.normals;
    std::vector<int> grazing;
    for (int k = 0; k < p; ++k) {
        if (N(2, k) < kMinNormalZ) {
            grazing.push_back(k + 1);
            if (grazing.size() >= 5) break;
        }
    }
    if (!grazing.empty()) {
        std::ostringstream msg;
        msg << "normal field grazes the image plane (n3 < " << kMinNormalZ
            << ") at pixel(s)";
        for (int k : grazing) msg << ' ' << k;
        msg << "; the gradient is unbounded there";
        throw DegeneracyError("grazing-normal", msg.str());
    }

    GradientField out{grid, Vector(p), Vector(p)};
    double* px = out.px.data();
    double* py = out.py.data();

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const double inv_n3 = 1.0 / N(2, k);
        px[k] = -N(0, k) * inv_n3;
        py[k] = -N(1, k) * inv_n3;
    }
    return out;
}

LaplacianField divergence(const GradientField& gradient) {
    const Grid& g = gradient.grid;
    const int r = g.r();
    const int s = g.s();
    const int p = g.pixel_count();
    if (gradient.px.size() != p || gradient.py.size() != p) {
        throw ValidationError("gradient field has wrong length");
    }
    if (!gradient.px.allFinite() || !gradient.py.allFinite()) {
        throw ValidationError("gradient field contains non-finite entries");
    }

    LaplacianField out{g, Vector(p)};
    const double* px = gradient.px.data();
    const double* py = gradient.py.data();
    double* f = out.f.data();
    const double inv2h = 1.0 / (2.0 * g.pitch());

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const int i = k / s + 1;
        const int j = k % s + 1;
        // centered differences with zero extension outside the interior
        const double pxp = (i < r) ? px[k + s] : 0.0;
        const double pxm = (i > 1) ? px[k - s] : 0.0;
        const double pyp = (j < s) ? py[k + 1] : 0.0;
        const double pym = (j > 1) ? py[k - 1] : 0.0;
        f[k] = (pxp - pxm) * inv2h + (pyp - pym) * inv2h;
    }
    return out;
}

void apply_five_point(const Grid& grid, const double* u, double* out) {
    const int r = grid.r();
    const int s = grid.s();
    const int p = grid.pixel_count();

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const int i = k / s;
        const int j = k % s;
        double acc = -4.0 * u[k];
        if (i > 0) acc += u[k - s];
        if (i < r - 1) acc += u[k + s];
        if (j > 0) acc += u[k - 1];
        if (j < s - 1) acc += u[k + 1];
        out[k] = acc;
    }
}

Vector apply_five_point(const Grid& grid, const Vector& u) {
    if (u.size() != grid.pixel_count()) {
        throw ValidationError("five-point operand has wrong length");
    }
    Vector out(u.size());
    apply_five_point(grid, u.data(), out.data());
    return out;
}

namespace {

// out = -(A u), the SPD form of the operator used by Cholesky and CG.
void apply_neg_five_point(const Grid& grid, const double* u, double* out) {
    const int r = grid.r();
    const int s = grid.s();
    const int p = grid.pixel_count();

#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) {
        const int i = k / s;
        const int j = k % s;
        double acc = 4.0 * u[k];
        if (i > 0) acc -= u[k - s];
        if (i < r - 1) acc -= u[k + s];
        if (j > 0) acc -= u[k - 1];
        if (j < s - 1) acc -= u[k + 1];
        out[k] = acc;
    }
}

double dot_serial(const Vector& a, const Vector& b) {
    // fixed summation order so results do not depend on the thread count
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (Eigen::Index k = 0; k < a.size(); ++k) acc += pa[k] * pb[k];
    return acc;
}

// ------------------------------------------------------------ direct banded

// Cholesky factorization of -A in banded storage: band[k * (bw+1) + d] holds
// entry (k + d, k) for d = 0..bw, bw = s.  -A is SPD, so this always
// succeeds on well-posed grids.
Vector solve_direct_banded(const Grid& grid, const Vector& b) {
    const int r = grid.r();
    const int s = grid.s();
    const int p = grid.pixel_count();
    const int bw = s;
    const std::size_t stride = static_cast<std::size_t>(bw) + 1;

    std::vector<double> band(static_cast<std::size_t>(p) * stride, 0.0);
    for (int k = 0; k < p; ++k) {
        band[static_cast<std::size_t>(k) * stride] = 4.0;
        const int i = k / s;
        const int j = k % s;
        if (j < s - 1) band[static_cast<std::size_t>(k) * stride + 1] = -1.0;
        if (i < r - 1) band[static_cast<std::size_t>(k) * stride + bw] = -1.0;
    }

    for (int k = 0; k < p; ++k) {
        double* colk = band.data() + static_cast<std::size_t>(k) * stride;
        const int m = std::min(bw, p - 1 - k);
        if (!(colk[0] > 0.0)) {
            throw DegeneracyError("inconsistent-data",
                                  "banded Cholesky hit a non-positive pivot");
        }
        const double lkk = std::sqrt(colk[0]);
        colk[0] = lkk;
        for (int d = 1; d <= m; ++d) colk[d] /= lkk;
        for (int j2 = 1; j2 <= m; ++j2) {
            const double ljk = colk[j2];
            if (ljk == 0.0) continue;
            double* colj = band.data() + static_cast<std::size_t>(k + j2) * stride;
            const int m2 = m - j2;
            for (int d = 0; d <= m2; ++d) colj[d] -= colk[j2 + d] * ljk;
        }
    }

    // forward substitution L y = b
    Vector y(p);
    for (int k = 0; k < p; ++k) {
        double acc = b[k];
        const int dmax = std::min(bw, k);
        for (int d = 1; d <= dmax; ++d) {
            acc -= band[static_cast<std::size_t>(k - d) * stride + d] * y[k - d];
        }
        y[k] = acc / band[static_cast<std::size_t>(k) * stride];
    }

    // backward substitution L^T u = y
    Vector u(p);
    for (int k = p - 1; k >= 0; --k) {
        double acc = y[k];
        const int dmax = std::min(bw, p - 1 - k);
        for (int d = 1; d <= dmax; ++d) {
            acc -= band[static_cast<std::size_t>(k) * stride + d] * u[k + d];
        }
        u[k] = acc / band[static_cast<std::size_t>(k) * stride];
    }
    return u;
}

// ------------------------------------------------------------------------ CG

Vector solve_cg(const Grid& grid, const Vector& b, const PoissonOptions& opt) {
    const int p = grid.pixel_count();
    const double bnorm = std::sqrt(dot_serial(b, b));
    Vector x = Vector::Zero(p);
    if (bnorm == 0.0) return x;

    if (!(opt.cg_tol > 0.0)) {
        throw ValidationError("CG tolerance must be positive");
    }
    const int max_iter = opt.cg_max_iter > 0
                             ? opt.cg_max_iter
                             : 50 * (grid.r() + grid.s()) + 2000;

    Vector rres = b; // residual of -A x = b with x = 0
    Vector d = rres;
    Vector ad(p);
    double rs = dot_serial(rres, rres);

    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rs) <= opt.cg_tol * bnorm) {
            // confirm with an explicitly recomputed residual
            apply_neg_five_point(grid, x.data(), ad.data());
            Vector exact = b - ad;
            rs = dot_serial(exact, exact);
            if (std::sqrt(rs) <= opt.cg_tol * bnorm) return x;
            rres = std::move(exact);
            d = rres;
        }
        apply_neg_five_point(grid, d.data(), ad.data());
        const double dad = dot_serial(d, ad);
        if (!(dad > 0.0)) {
            throw ConvergenceError("CG lost positive definiteness");
        }
        const double alpha = rs / dad;

        double* xp = x.data();
        double* rp = rres.data();
        const double* dp = d.data();
        const double* adp = ad.data();
#pragma omp parallel for schedule(static)
        for (int k = 0; k < p; ++k) {
            xp[k] += alpha * dp[k];
            rp[k] -= alpha * adp[k];
        }

        const double rs_new = dot_serial(rres, rres);
        const double beta = rs_new / rs;
        rs = rs_new;
        double* dmut = d.data();
#pragma omp parallel for schedule(static)
        for (int k = 0; k < p; ++k) dmut[k] = rp[k] + beta * dmut[k];
    }
    throw ConvergenceError("CG did not reach tolerance " +
                           std::to_string(opt.cg_tol) + " within " +
                           std::to_string(max_iter) + " iterations");
}

// --------------------------------------------------------------- fast sine

// Plain DST-I matrix: S[a][i] = sin(a i pi / (n + 1)), 1-based indices; S is
// symmetric and S^2 = (n + 1)/2 * I.
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

// rows: out[a][j] = sum_i S[a][i] in[i][j]   (apply along the first index)
void dst_rows(int r, int s, const std::vector<double>& S, const double* in,
              double* out) {
#pragma omp parallel for schedule(static)
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

// cols: out[i][b] = sum_j in[i][j] S[j][b]   (apply along the second index)
void dst_cols(int r, int s, const std::vector<double>& S, const double* in,
              double* out) {
#pragma omp parallel for schedule(static)
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

Vector solve_fast_sine(const Grid& grid, const Vector& b) {
    const int r = grid.r();
    const int s = grid.s();
    const int p = grid.pixel_count();

    const std::vector<double> Sr = sine_table(r);
    const std::vector<double> Ss = sine_table(s);

    Vector t1(p), t2(p);
    dst_rows(r, s, Sr, b.data(), t1.data());
    dst_cols(r, s, Ss, t1.data(), t2.data());

    // divide the spectral coefficients by the stencil eigenvalues
    const double pi = std::numbers::pi;
    double* c = t2.data();
#pragma omp parallel for schedule(static)
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
#pragma omp parallel for schedule(static)
    for (int k = 0; k < p; ++k) up[k] *= scale;
    return u;
}

} // namespace

HeightField poisson_solve(const LaplacianField& rhs, PoissonMethod method,
                          const PoissonOptions& options) {
    const Grid& grid = rhs.grid;
    const int p = grid.pixel_count();
    if (rhs.f.size() != p) {
        throw ValidationError("right-hand side has wrong length");
    }
    if (!rhs.f.allFinite()) {
        throw ValidationError("right-hand side contains non-finite entries");
    }

    const double h = grid.pitch();
    const Vector b = (h * h) * rhs.f;

    Vector u;
    switch (method) {
    case PoissonMethod::DirectBanded:
        u = solve_direct_banded(grid, -b);
        break;
    case PoissonMethod::ConjugateGradient:
        u = solve_cg(grid, -b, options);
        break;
    case PoissonMethod::FastSine:
        u = solve_fast_sine(grid, b);
        break;
    }
    return HeightField{grid, std::move(u)};
}

} // namespace ps
