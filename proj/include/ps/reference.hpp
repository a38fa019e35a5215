#pragma once

#include "ps/integrate.hpp"
#include "ps/render.hpp"

// Serial reference implementations of the parallel kernels.  Each mirrors the
// arithmetic of its counterpart exactly — same expressions, same evaluation
// order, no OpenMP — so tests can require bitwise-identical results and the
// benchmark target can measure the parallel speedup.
namespace ps::reference {

SurfaceField normals_from_height(const HeightField& height);

RenderResult render(const SurfaceField& surface, const LightSet& lights,
                    const Grid& grid, bool clamp = false);

LaplacianField divergence(const GradientField& gradient);

HeightField poisson_fast_sine(const LaplacianField& rhs);

} // namespace ps::reference
