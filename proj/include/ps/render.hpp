#pragma once

#include <cstdint>
#include <vector>

#include "ps/scene.hpp"

namespace ps {

// Surface seen by the camera: unit normals (columns of a 3 x p matrix, third
// component positive) and per-pixel albedo.  `zero_albedo_pixels` lists
// 1-based lexicographic indices where a solver could not recover a direction
// and substituted (0, 0, 1); empty for rendered scenes.
struct SurfaceField {
    Matrix normals; // 3 x p
    AlbedoMap albedo;
    std::vector<int> zero_albedo_pixels;
};

// Stack of q images over a common grid: column t holds image t in
// lexicographic pixel order.
struct ImageStack {
    Grid grid;
    Matrix values;              // p x q
    std::vector<int> light_ids; // per-column label, 1-based
};

// Unit normals and unit albedo from a height field via centered differences
// (zero boundary ring):  n = (-u_x, -u_y, 1) / sqrt(1 + u_x^2 + u_y^2).
SurfaceField normals_from_height(const HeightField& height);

struct RenderResult {
    ImageStack stack;
    // Fraction of entries with value <= 0 (light at or below the local
    // horizon), reported whether or not clamping is enabled.
    double shadow_fraction = 0.0;
};

// Lambertian forward model: m_kt = albedo_k * dot(n_k, l_t).  With
// `clamp` set, negative entries are replaced by zero.
RenderResult render(const SurfaceField& surface, const LightSet& lights,
                    const Grid& grid, bool clamp = false);

enum class NoiseModel {
    FrobeniusRms, // sigma = level * ||M||_F / sqrt(p q), i.i.d. additive
    PerEntry,     // entry-relative: m' = m * (1 + level * g)
};

// Additive Gaussian measurement noise, deterministic for a given seed.
ImageStack add_noise(const ImageStack& stack, double level, std::uint64_t seed,
                     NoiseModel model = NoiseModel::FrobeniusRms);

} // namespace ps
