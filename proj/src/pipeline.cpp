#include "ps/pipeline.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ps {

void rethrow_in_stage(const Error& error, const std::string& stage) {
    throw Error(error.exit_code(), error.tag(),
                "stage " + stage + ": " + error.what());
}

RenderStage run_render(const RunConfig& cfg) {
    try {
        Grid grid = config_grid(cfg);
        if (!cfg.surface) {
            throw ValidationError("config does not define a surface");
        }
        HeightField truth = make_surface(grid, *cfg.surface);
        SurfaceField surface = normals_from_height(truth);
        surface.albedo = make_albedo(grid, cfg.albedo);
        LightSet lights = config_lights(cfg);

        RenderResult rendered = render(surface, lights, grid, cfg.clamp);
        const bool noisy = cfg.noise_level > 0.0;
        ImageStack observed =
            noisy ? add_noise(rendered.stack, cfg.noise_level, cfg.noise_seed,
                              cfg.noise_model)
                  : rendered.stack;

        return RenderStage{std::move(grid),
                           std::move(truth),
                           std::move(surface),
                           std::move(lights),
                           std::move(observed),
                           rendered.shadow_fraction,
                           noisy};
    } catch (const Error& e) {
        rethrow_in_stage(e, "render");
    }
}

PipelineResult run_pipeline(const RunConfig& cfg) {
    RenderStage rend = run_render(cfg);
    const Grid grid = rend.grid;

    // ----- solve
    SurfaceField recovered;
    Matrix lights_estimate;
    std::optional<UnknownResult> unknown;
    AlignmentResult alignment;
    alignment.Q = Matrix3::Identity();

    try {
        if (cfg.mode == SolveMode::Known) {
            recovered = solve_known(rend.observed, rend.lights);
            lights_estimate = rend.lights.directions();
        } else {
            UnknownOptions opts;
            if (cfg.intensities_file) {
                opts.intensities = read_intensities(*cfg.intensities_file);
            }
            unknown = solve_unknown(rend.observed, opts);
            alignment = procrustes_align(unknown->lights.directions(),
                                         rend.lights.directions());
            recovered = unknown->surface;
            recovered.normals = alignment.Q * recovered.normals;
            lights_estimate = alignment.Q * unknown->lights.directions();
        }
    } catch (const Error& e) {
        rethrow_in_stage(e, "solve");
    }

    // ----- integrate
    HeightField height{grid, Vector()};
    try {
        const GradientField grad = gradient_from_normals(recovered, grid);
        const LaplacianField rhs = divergence(grad);
        height = poisson_solve(rhs, cfg.method, cfg.poisson);
    } catch (const Error& e) {
        rethrow_in_stage(e, "integrate");
    }

    // ----- metrics
    PipelineResult out{std::move(rend),
                       std::move(recovered),
                       std::move(lights_estimate),
                       std::move(unknown),
                       alignment,
                       std::move(height),
                       alignment.max_angle_rad,
                       alignment.mean_angle_rad,
                       0.0,
                       0.0,
                       Report{},
                       true};

    out.rmse = surface_rmse(out.height, out.rendered.truth, false);
    const double scale = out.rendered.truth.values.cwiseAbs().maxCoeff();
    out.rmse_normalized = scale > 0.0 ? out.rmse / scale : 0.0;

    Report& rep = out.report;
    report_add(rep, "shadow.fraction", out.rendered.shadow_fraction);
    report_add(rep, "noise.applied", out.rendered.noisy);
    if (out.unknown) {
        const UnknownResult& u = *out.unknown;
        for (int i = 0; i < u.factors.sigma.size(); ++i) {
            report_add(rep, "spectrum.sigma." + std::to_string(i + 1),
                       u.factors.sigma(i));
        }
        if (u.factors.sigma(0) > 0.0) {
            if (u.factors.sigma.size() >= 3) {
                report_add(rep, "spectrum.ratio_3_1",
                           u.factors.sigma(2) / u.factors.sigma(0));
            }
            if (u.factors.sigma.size() >= 4) {
                report_add(rep, "spectrum.ratio_4_1",
                           u.factors.sigma(3) / u.factors.sigma(0));
            }
        }
        report_add(rep, "gram.h_rank", u.gram.H_rank);
        report_add(rep, "gram.h_sigma_min", u.gram.H_sigma_min);
        report_add(rep, "gram.h_sigma_max", u.gram.H_sigma_max);
        report_add(rep, "gram.spd_projected", u.gram.spd_projected);
        for (int t = 0; t < u.light_norms.size(); ++t) {
            report_add(rep, "lights.norm." + std::to_string(t + 1),
                       u.light_norms(t));
        }
        report_add(rep, "alignment.reflection",
                   out.alignment.Q.determinant() < 0.0);
        report_add(rep, "alignment.degenerate", out.alignment.degenerate);
        report_add(rep, "alignment.residual", out.alignment.residual);
        report_add(rep, "lights.err_max_rad", out.light_err_max);
        report_add(rep, "lights.err_mean_rad", out.light_err_mean);
    }
    report_add(rep, "pixels.zero_albedo",
               static_cast<long>(out.recovered.zero_albedo_pixels.size()));
    report_add(rep, "surface.rmse", out.rmse);
    report_add(rep, "surface.rmse_normalized", out.rmse_normalized);

    bool passed = true;
    if (cfg.gate_light_err && cfg.mode == SolveMode::Unknown) {
        const bool ok = out.light_err_max <= *cfg.gate_light_err;
        report_add(rep, "gates.light_err", ok);
        passed = passed && ok;
    }
    if (cfg.gate_surface_rmse) {
        const double value = scale > 0.0 ? out.rmse_normalized : out.rmse;
        const bool ok = value <= *cfg.gate_surface_rmse;
        report_add(rep, "gates.surface_rmse", ok);
        passed = passed && ok;
    }
    report_add(rep, "gates.passed", passed);
    out.gates_passed = passed;
    return out;
}

} // namespace ps
