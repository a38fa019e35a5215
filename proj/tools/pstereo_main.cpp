// pstereo — synthetic photometric-stereo toolkit.
//
// Subcommands:
//   render     synthesize an image stack from a configured scene
//   solve      recover normals/albedo (and lights) from a stack
//   integrate  rebuild the height field from recovered normals
//   pipeline   render + solve + integrate + metrics in one run
//   report     print a key-value report (optionally one key)

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ps/config.hpp"
#include "ps/factorize.hpp"
#include "ps/integrate.hpp"
#include "ps/io.hpp"
#include "ps/metrics.hpp"
#include "ps/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir; // overrides output.dir when set
};

std::string pick_out_dir(const CommonArgs& args, const ps::RunConfig& cfg) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    throw ps::ValidationError(
        "no output directory: set output.dir in the config or pass --out");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ps::IoError("cannot create directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& dir, const std::string& stage,
                    const ps::RunConfig& cfg) {
    std::ofstream out(join(dir, "manifest.txt"));
    if (!out) throw ps::IoError("cannot write manifest in '" + dir + "'");
    out << "stage = " << stage << '\n';
    out << "format.stack = PSSTACK1 float64 little-endian column-major\n";
    out << "format.normals = PSNORM01 float64 little-endian column-major\n";
    out << "# configuration echo\n";
    out << ps::dump_config(cfg);
}

// ----------------------------------------------------------------- render

int cmd_render(const CommonArgs& args) {
    const ps::RunConfig cfg = ps::load_config(args.config_path);
    const std::string dir = pick_out_dir(args, cfg);
    ensure_dir(dir);

    const ps::RenderStage stage = ps::run_render(cfg);

    ps::write_stack(join(dir, "stack.psm"), stage.observed);
    ps::write_field_csv(join(dir, "truth_height.csv"), stage.grid,
                        stage.truth.values);
    ps::write_normals(join(dir, "truth_normals.psm"), stage.grid,
                      stage.truth_surface.normals);
    ps::write_lights(join(dir, "lights.txt"), stage.lights);

    // image export always clamps below zero so the PGM map stays physical
    ps::ImageStack clamped = stage.observed;
    clamped.values = clamped.values.cwiseMax(0.0);
    ps::write_stack_pgm(join(dir, "image_"), clamped);

    ps::Report rep;
    ps::report_add(rep, "shadow.fraction", stage.shadow_fraction);
    ps::report_add(rep, "noise.applied", stage.noisy);
    ps::write_report(join(dir, "render_report.txt"), rep);

    write_manifest(dir, "render", cfg);
    std::cout << "rendered " << stage.observed.values.cols() << " images ("
              << stage.grid.r() << " x " << stage.grid.s() << " pixels) into "
              << dir << "\n";
    return 0;
}

// ------------------------------------------------------------------ solve

struct SolveArgs : CommonArgs {
    std::string stack_path;
    std::string lights_path; // known mode only
};

int cmd_solve(const SolveArgs& args) {
    const ps::RunConfig cfg = ps::load_config(args.config_path);
    const std::string dir = pick_out_dir(args, cfg);
    ensure_dir(dir);

    const ps::StackDump dump = ps::read_stack(args.stack_path);
    const ps::Grid grid = ps::config_grid(cfg);
    if (dump.r != grid.r() || dump.s != grid.s()) {
        throw ps::ValidationError("stack '" + args.stack_path + "' is " +
                                  std::to_string(dump.r) + " x " +
                                  std::to_string(dump.s) +
                                  " but the config grid is " +
                                  std::to_string(grid.r()) + " x " +
                                  std::to_string(grid.s()));
    }
    ps::ImageStack stack{grid, dump.values, {}};

    ps::Report rep;
    ps::SurfaceField surface;
    if (cfg.mode == ps::SolveMode::Known) {
        std::optional<ps::LightSet> lights;
        if (!args.lights_path.empty()) {
            lights.emplace(ps::read_lights(args.lights_path));
        } else if (cfg.lights) {
            lights.emplace(ps::config_lights(cfg));
        } else {
            throw ps::ValidationError(
                "known-lights solve needs --lights or lights.* in the config");
        }
        surface = ps::solve_known(stack, *lights);
    } else {
        ps::UnknownOptions opts;
        if (cfg.intensities_file) {
            opts.intensities = ps::read_intensities(*cfg.intensities_file);
        }
        const ps::UnknownResult result = ps::solve_unknown(stack, opts);
        surface = result.surface;
        ps::write_lights(join(dir, "lights_est.txt"), result.lights);
        for (int i = 0; i < result.factors.sigma.size(); ++i) {
            ps::report_add(rep, "spectrum.sigma." + std::to_string(i + 1),
                           result.factors.sigma(i));
        }
        ps::report_add(rep, "gram.h_rank", result.gram.H_rank);
        ps::report_add(rep, "gram.h_sigma_min", result.gram.H_sigma_min);
        ps::report_add(rep, "gram.h_sigma_max", result.gram.H_sigma_max);
        ps::report_add(rep, "gram.spd_projected", result.gram.spd_projected);
        for (int t = 0; t < result.light_norms.size(); ++t) {
            ps::report_add(rep, "lights.norm." + std::to_string(t + 1),
                           result.light_norms(t));
        }
    }

    ps::write_normals(join(dir, "normals.psm"), grid, surface.normals);
    ps::write_field_csv(join(dir, "albedo.csv"), grid, surface.albedo.values);
    ps::report_add(rep, "pixels.zero_albedo",
                   static_cast<long>(surface.zero_albedo_pixels.size()));
    ps::write_report(join(dir, "solve_report.txt"), rep);

    write_manifest(dir, "solve", cfg);
    std::cout << "solved " << dump.values.cols() << " images in "
              << (cfg.mode == ps::SolveMode::Known ? "known" : "unknown")
              << "-lights mode into " << dir << "\n";
    return 0;
}

// -------------------------------------------------------------- integrate

struct IntegrateArgs : CommonArgs {
    std::string normals_path;
};

int cmd_integrate(const IntegrateArgs& args) {
    const ps::RunConfig cfg = ps::load_config(args.config_path);
    const std::string dir = pick_out_dir(args, cfg);
    ensure_dir(dir);

    const ps::NormalsDump dump = ps::read_normals(args.normals_path);
    const ps::Grid grid = ps::config_grid(cfg);
    if (dump.r != grid.r() || dump.s != grid.s()) {
        throw ps::ValidationError("normals '" + args.normals_path + "' are " +
                                  std::to_string(dump.r) + " x " +
                                  std::to_string(dump.s) +
                                  " but the config grid is " +
                                  std::to_string(grid.r()) + " x " +
                                  std::to_string(grid.s()));
    }

    ps::SurfaceField surface{dump.normals,
                             ps::AlbedoMap{ps::Vector::Ones(grid.pixel_count())},
                             {}};
    const ps::GradientField grad = ps::gradient_from_normals(surface, grid);
    const ps::LaplacianField rhs = ps::divergence(grad);
    const ps::HeightField height = ps::poisson_solve(rhs, cfg.method, cfg.poisson);

    ps::write_field_csv(join(dir, "height.csv"), grid, height.values);
    ps::write_height_obj(join(dir, "mesh.obj"), height);

    write_manifest(dir, "integrate", cfg);
    std::cout << "integrated " << grid.r() << " x " << grid.s()
              << " normals into " << dir << "\n";
    return 0;
}

// --------------------------------------------------------------- pipeline

int cmd_pipeline(const CommonArgs& args) {
    const ps::RunConfig cfg = ps::load_config(args.config_path);
    const std::string dir = pick_out_dir(args, cfg);
    ensure_dir(dir);

    const ps::PipelineResult result = ps::run_pipeline(cfg);

    ps::write_stack(join(dir, "stack.psm"), result.rendered.observed);
    ps::write_field_csv(join(dir, "truth_height.csv"), result.rendered.grid,
                        result.rendered.truth.values);
    ps::write_lights(join(dir, "lights.txt"), result.rendered.lights);
    ps::write_normals(join(dir, "normals.psm"), result.rendered.grid,
                      result.recovered.normals);
    ps::write_field_csv(join(dir, "albedo.csv"), result.rendered.grid,
                        result.recovered.albedo.values);
    if (result.unknown) {
        ps::write_lights(join(dir, "lights_est.txt"), result.unknown->lights);
    }
    ps::write_field_csv(join(dir, "height.csv"), result.rendered.grid,
                        result.height.values);
    ps::write_height_obj(join(dir, "mesh.obj"), result.height);
    ps::write_report(join(dir, "metrics.txt"), result.report);

    write_manifest(dir, "pipeline", cfg);

    std::cout << "pipeline finished: surface rmse "
              << ps::format_double(result.rmse);
    if (result.rendered.truth.values.cwiseAbs().maxCoeff() > 0.0) {
        std::cout << " (normalized "
                  << ps::format_double(result.rmse_normalized) << ")";
    }
    if (result.unknown) {
        std::cout << ", max light error "
                  << ps::format_double(result.light_err_max) << " rad";
    }
    std::cout << ", results in " << dir << "\n";

    if (!result.gates_passed) {
        std::cerr << "error[gates]: configured thresholds not met (see "
                  << join(dir, "metrics.txt") << ")\n";
        return 1;
    }
    return 0;
}

// ----------------------------------------------------------------- report

int cmd_report(const std::string& path, const std::string& key) {
    const ps::Report rep = ps::read_report(path);
    if (key.empty()) {
        for (const auto& [k, v] : rep) std::cout << k << " = " << v << "\n";
        return 0;
    }
    for (const auto& [k, v] : rep) {
        if (k == key) {
            std::cout << v << "\n";
            return 0;
        }
    }
    throw ps::ValidationError("report '" + path + "' has no key '" + key + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic photometric stereo under known or unknown lighting"};
    app.require_subcommand(1);

    CommonArgs render_args;
    CLI::App* render = app.add_subcommand("render", "synthesize an image stack");
    render->add_option("--config", render_args.config_path, "run configuration")
        ->required();
    render->add_option("--out", render_args.out_dir, "output directory");

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "recover normals and lights");
    solve->add_option("--config", solve_args.config_path, "run configuration")
        ->required();
    solve->add_option("--stack", solve_args.stack_path, "image stack (.psm)")
        ->required();
    solve->add_option("--lights", solve_args.lights_path,
                      "light directions (known mode)");
    solve->add_option("--out", solve_args.out_dir, "output directory");

    IntegrateArgs integrate_args;
    CLI::App* integrate =
        app.add_subcommand("integrate", "height field from normals");
    integrate
        ->add_option("--config", integrate_args.config_path, "run configuration")
        ->required();
    integrate
        ->add_option("--normals", integrate_args.normals_path,
                     "normal field (.psm)")
        ->required();
    integrate->add_option("--out", integrate_args.out_dir, "output directory");

    CommonArgs pipeline_args;
    CLI::App* pipeline =
        app.add_subcommand("pipeline", "render, solve, integrate, report");
    pipeline
        ->add_option("--config", pipeline_args.config_path, "run configuration")
        ->required();
    pipeline->add_option("--out", pipeline_args.out_dir, "output directory");

    std::string report_path;
    std::string report_key;
    CLI::App* report = app.add_subcommand("report", "print a key-value report");
    report->add_option("--file", report_path, "report file")->required();
    report->add_option("--key", report_key, "print just this key");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) return cmd_render(render_args);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (integrate->parsed()) return cmd_integrate(integrate_args);
        if (pipeline->parsed()) return cmd_pipeline(pipeline_args);
        if (report->parsed()) return cmd_report(report_path, report_key);
    } catch (const ps::Error& e) {
        std::cerr << "error[" << e.tag() << "]: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
