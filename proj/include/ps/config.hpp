#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ps/integrate.hpp"
#include "ps/render.hpp"

namespace ps {

// Light sources named by a config: either a ring (with optional per-light
// perturbations and off-plane tilts) or an explicit direction file.
struct RingLights {
    int q = 0;
    double delta = 0.0;
    // raw offsets added before normalization, (1-based light, offset)
    std::vector<std::pair<int, Vector3>> perturb;
    // off-plane tilts in degrees, (1-based light, angle)
    std::vector<std::pair<int, double>> tilt;
};

struct FileLights {
    std::string path; // resolved against the config file's directory
};

using LightsKind = std::variant<RingLights, FileLights>;

enum class SolveMode { Known, Unknown };

// Flat key = value run configuration shared by all CLI stages.
struct RunConfig {
    // grid.*
    int r = 0;
    int s = 0;
    double side_x = 0.0;

    // surface.* / albedo.*
    std::optional<SurfaceKind> surface;
    AlbedoKind albedo = ConstantAlbedo{1.0};

    // lights.*
    std::optional<LightsKind> lights;

    // noise.*
    double noise_level = 0.0;
    std::uint64_t noise_seed = 0;
    NoiseModel noise_model = NoiseModel::FrobeniusRms;

    // solve.*
    SolveMode mode = SolveMode::Unknown;
    std::optional<std::string> intensities_file;

    // poisson.*
    PoissonMethod method = PoissonMethod::FastSine;
    PoissonOptions poisson;

    // render.*
    bool clamp = false;

    // output.*
    std::string output_dir;

    // gates.*  (optional pass/fail thresholds checked by the pipeline)
    std::optional<double> gate_light_err;
    std::optional<double> gate_surface_rmse;
};

// Parse a config from text; `base_dir` anchors relative file references.
RunConfig parse_config(const std::string& text, const std::string& base_dir);

// Load from disk; referenced files must exist.
RunConfig load_config(const std::string& path);

// Canonical echo of a parsed config (stable key order), used in manifests.
std::string dump_config(const RunConfig& config);

// Realize the pieces a stage needs.
Grid config_grid(const RunConfig& config);
LightSet config_lights(const RunConfig& config);

} // namespace ps
