#pragma once

#include <optional>

#include "ps/config.hpp"
#include "ps/factorize.hpp"
#include "ps/io.hpp"
#include "ps/metrics.hpp"

namespace ps {

// Synthetic scene generation: ground truth plus the observed image stack.
struct RenderStage {
    Grid grid;
    HeightField truth;
    SurfaceField truth_surface; // normals from the truth, configured albedo
    LightSet lights;
    ImageStack observed; // noisy when the config says so
    double shadow_fraction = 0.0;
    bool noisy = false;
};

RenderStage run_render(const RunConfig& config);

// Everything the end-to-end run produces.  In unknown mode the estimated
// normals/lights are reported in the estimation gauge; `alignment` holds the
// orthogonal map onto the true lights, and the integrated surface plus the
// metrics are computed after applying it.
struct PipelineResult {
    RenderStage rendered;
    SurfaceField recovered;              // aligned in unknown mode
    Matrix lights_estimate;              // 3 x q, unit columns, aligned
    std::optional<UnknownResult> unknown; // raw solver output (unknown mode)
    AlignmentResult alignment;           // identity in known mode
    HeightField height;                  // integrated surface
    double light_err_max = 0.0;
    double light_err_mean = 0.0;
    double rmse = 0.0;
    double rmse_normalized = 0.0; // 0 when the truth is identically zero
    Report report;
    bool gates_passed = true;
};

PipelineResult run_pipeline(const RunConfig& config);

// Wrap stage failures so CLI messages name the failing stage.
[[noreturn]] void rethrow_in_stage(const Error& error, const std::string& stage);

} // namespace ps
