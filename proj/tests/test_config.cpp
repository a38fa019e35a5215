#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "ps/config.hpp"
#include "ps/io.hpp"
#include "ps/scene.hpp"

using namespace ps;

namespace {

class TempDir {
public:
    TempDir() {
        std::string tmpl = "/tmp/ps-config-test-XXXXXX";
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& dir() const { return path_; }
    std::string file(const std::string& name) const {
        return path_ + "/" + name;
    }

private:
    std::string path_;
};

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

const char* const kFullConfig = R"(# full demo configuration
grid.r = 100
grid.s = 100
grid.A = 2.02

surface.kind = multi-peak
albedo.kind = constant
albedo.value = 1.0

lights.kind = ring
lights.q = 7
lights.delta = 1.5
lights.tilt.1 = 10.0
lights.perturb.3 = 0.01 -0.02 0.005

noise.level = 0.1
noise.seed = 42
noise.model = rms

solve.mode = unknown
poisson.method = cg
poisson.cg_tol = 1e-11
poisson.cg_max_iter = 5000
render.clamp = on
output.dir = out

gates.light_err = 2e-2
gates.surface_rmse = 5e-2
)";

} // namespace

TEST_CASE("a full configuration parses into the right structure") {
    const RunConfig cfg = parse_config(kFullConfig, "/base");
    CHECK(cfg.r == 100);
    CHECK(cfg.s == 100);
    CHECK(cfg.side_x == 2.02);

    REQUIRE(cfg.surface.has_value());
    CHECK(std::holds_alternative<MultiPeak>(*cfg.surface));
    REQUIRE(std::holds_alternative<ConstantAlbedo>(cfg.albedo));
    CHECK(std::get<ConstantAlbedo>(cfg.albedo).value == 1.0);

    REQUIRE(cfg.lights.has_value());
    const auto& ring = std::get<RingLights>(*cfg.lights);
    CHECK(ring.q == 7);
    CHECK(ring.delta == 1.5);
    REQUIRE(ring.tilt.size() == 1);
    CHECK(ring.tilt[0].first == 1);
    CHECK(ring.tilt[0].second == 10.0);
    REQUIRE(ring.perturb.size() == 1);
    CHECK(ring.perturb[0].first == 3);
    CHECK((ring.perturb[0].second - Vector3(0.01, -0.02, 0.005)).norm() == 0.0);

    CHECK(cfg.noise_level == 0.1);
    CHECK(cfg.noise_seed == 42);
    CHECK(cfg.noise_model == NoiseModel::FrobeniusRms);
    CHECK(cfg.mode == SolveMode::Unknown);
    CHECK(cfg.method == PoissonMethod::ConjugateGradient);
    CHECK(cfg.poisson.cg_tol == 1e-11);
    CHECK(cfg.poisson.cg_max_iter == 5000);
    CHECK(cfg.clamp);
    CHECK(cfg.output_dir == "/base/out"); // resolved against base_dir
    REQUIRE(cfg.gate_light_err.has_value());
    CHECK(*cfg.gate_light_err == 2e-2);
    REQUIRE(cfg.gate_surface_rmse.has_value());
    CHECK(*cfg.gate_surface_rmse == 5e-2);

    const Grid g = config_grid(cfg);
    CHECK(g.r() == 100);
    CHECK(g.pitch() == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("minimal configurations fall back to the defaults") {
    const RunConfig cfg = parse_config("grid.r = 10\ngrid.s = 12\ngrid.A = 1\n", "");
    CHECK_FALSE(cfg.surface.has_value());
    CHECK_FALSE(cfg.lights.has_value());
    CHECK(std::holds_alternative<ConstantAlbedo>(cfg.albedo));
    CHECK(cfg.noise_level == 0.0);
    CHECK(cfg.mode == SolveMode::Unknown);
    CHECK(cfg.method == PoissonMethod::FastSine);
    CHECK_FALSE(cfg.clamp);
    CHECK(cfg.output_dir.empty());
    CHECK_FALSE(cfg.gate_light_err.has_value());

    CHECK_THROWS_AS(config_lights(cfg), ValidationError);
}

TEST_CASE("config lights reproduce the scene-layer generator") {
    const std::string text =
        "grid.r = 4\ngrid.s = 4\ngrid.A = 1\n"
        "lights.kind = ring\nlights.q = 7\nlights.delta = 1.5\n"
        "lights.tilt.1 = 10.0\nlights.perturb.2 = 0.01 0 0\n";
    const RunConfig cfg = parse_config(text, "");
    const LightSet got = config_lights(cfg);

    std::vector<Vector3> offsets(7, Vector3::Zero());
    offsets[0] = ring_tilt_offset(7, 1.5, 1, 10.0 * std::numbers::pi / 180.0);
    offsets[1] = Vector3(0.01, 0.0, 0.0);
    const LightSet expect = make_light_ring(7, 1.5, offsets);
    CHECK((got.directions() - expect.directions()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian bump configs carry their parameters") {
    const std::string text =
        "grid.r = 10\ngrid.s = 10\ngrid.A = 2\n"
        "surface.kind = gaussian-bump\nsurface.center = 0.1 -0.2\n"
        "surface.width = 0.3\nsurface.height = 0.4\n";
    const RunConfig cfg = parse_config(text, "");
    const auto& b = std::get<GaussianBump>(*cfg.surface);
    CHECK(b.cx == 0.1);
    CHECK(b.cy == -0.2);
    CHECK(b.width == 0.3);
    CHECK(b.height == 0.4);

    const std::string cap =
        "grid.r = 10\ngrid.s = 10\ngrid.A = 2\n"
        "surface.kind = sphere-cap\nsurface.radius = 0.5\nsurface.height = 0.2\n";
    const RunConfig cap_cfg = parse_config(cap, "");
    const auto& c = std::get<SphereCap>(*cap_cfg.surface);
    CHECK(c.radius == 0.5);
    CHECK(c.height == 0.2);
}

TEST_CASE("malformed configurations are rejected with clear reasons") {
    const std::string base = "grid.r = 10\ngrid.s = 10\ngrid.A = 1\n";

    SUBCASE("unknown keys") {
        CHECK_THROWS_WITH_AS(parse_config(base + "grid.B = 2\n", ""),
                             doctest::Contains("unknown config key"),
                             ValidationError);
    }
    SUBCASE("duplicate keys") {
        CHECK_THROWS_WITH_AS(parse_config(base + "grid.r = 11\n", ""),
                             doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("missing required keys") {
        CHECK_THROWS_WITH_AS(parse_config("grid.r = 10\ngrid.s = 10\n", ""),
                             doctest::Contains("grid.A"), ValidationError);
    }
    SUBCASE("malformed numbers") {
        CHECK_THROWS_WITH_AS(
            parse_config("grid.r = ten\ngrid.s = 10\ngrid.A = 1\n", ""),
            doctest::Contains("malformed"), ValidationError);
        CHECK_THROWS_AS(parse_config(base + "noise.level = 0.1x\n", ""),
                        ValidationError);
    }
    SUBCASE("value constraints") {
        CHECK_THROWS_AS(parse_config("grid.r = 1\ngrid.s = 10\ngrid.A = 1\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config("grid.r = 10\ngrid.s = 10\ngrid.A = 0\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "noise.level = -0.1\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "albedo.kind = constant\nalbedo.value = 0\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "gates.light_err = 0\n", ""),
                        ValidationError);
    }
    SUBCASE("unknown enum values") {
        CHECK_THROWS_AS(parse_config(base + "surface.kind = pyramid\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "noise.model = salt\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "solve.mode = magic\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "poisson.method = multigrid\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "render.clamp = maybe\n", ""),
                        ValidationError);
    }
    SUBCASE("incomplete surface descriptions") {
        CHECK_THROWS_WITH_AS(
            parse_config(base + "surface.kind = gaussian-bump\n", ""),
            doctest::Contains("surface.center"), ValidationError);
    }
    SUBCASE("keys from another kind do not silently vanish") {
        CHECK_THROWS_WITH_AS(
            parse_config(base + "surface.kind = flat\nsurface.width = 0.3\n", ""),
            doctest::Contains("does not apply"), ValidationError);
        CHECK_THROWS_WITH_AS(
            parse_config(base + "surface.width = 0.3\n", ""),
            doctest::Contains("does not apply"), ValidationError);
    }
    SUBCASE("ring indices must be in range") {
        CHECK_THROWS_AS(
            parse_config(base + "lights.kind = ring\nlights.q = 5\n"
                                "lights.delta = 1\nlights.tilt.6 = 5\n",
                         ""),
            ValidationError);
        CHECK_THROWS_AS(
            parse_config(base + "lights.kind = ring\nlights.q = 5\n"
                                "lights.delta = 1\nlights.perturb.0 = 1 0 0\n",
                         ""),
            ValidationError);
    }
    SUBCASE("lines that are not key = value") {
        CHECK_THROWS_AS(parse_config(base + "what is this\n", ""),
                        ValidationError);
        CHECK_THROWS_AS(parse_config(base + "grid.r =\n", ""), ValidationError);
    }
}

TEST_CASE("file lights resolve relative to the config directory") {
    TempDir tmp;
    spit(tmp.file("mylights.txt"), "0 0 1\n1 0 1\n0 1 1\n");
    const std::string text =
        "grid.r = 5\ngrid.s = 5\ngrid.A = 1\n"
        "lights.kind = file\nlights.file = mylights.txt\n";

    const RunConfig cfg = parse_config(text, tmp.dir());
    const auto& fl = std::get<FileLights>(*cfg.lights);
    CHECK(fl.path == tmp.file("mylights.txt"));
    const LightSet lights = config_lights(cfg);
    CHECK(lights.count() == 3);
    CHECK((lights.directions().col(0) - Vector3(0, 0, 1)).norm() == 0.0);

    // absolute paths pass through untouched
    const std::string abs_text =
        "grid.r = 5\ngrid.s = 5\ngrid.A = 1\n"
        "lights.kind = file\nlights.file = " + tmp.file("mylights.txt") + "\n";
    const RunConfig abs_cfg = parse_config(abs_text, "/somewhere/else");
    CHECK(std::get<FileLights>(*abs_cfg.lights).path == tmp.file("mylights.txt"));
}

TEST_CASE("load_config verifies referenced files") {
    TempDir tmp;
    spit(tmp.file("ok.cfg"),
         "grid.r = 5\ngrid.s = 5\ngrid.A = 1\n"
         "lights.kind = file\nlights.file = lights.txt\n");
    CHECK_THROWS_WITH_AS(load_config(tmp.file("ok.cfg")),
                         doctest::Contains("does not exist"), ValidationError);

    spit(tmp.file("lights.txt"), "0 0 1\n");
    const RunConfig cfg = load_config(tmp.file("ok.cfg"));
    CHECK(std::get<FileLights>(*cfg.lights).path == tmp.file("lights.txt"));

    CHECK_THROWS_AS(load_config(tmp.file("missing.cfg")), IoError);

    spit(tmp.file("intens.cfg"),
         "grid.r = 5\ngrid.s = 5\ngrid.A = 1\n"
         "solve.intensities_file = intens.txt\n");
    CHECK_THROWS_AS(load_config(tmp.file("intens.cfg")), ValidationError);
    spit(tmp.file("intens.txt"), "1.0\n");
    CHECK_NOTHROW(load_config(tmp.file("intens.cfg")));
}

TEST_CASE("dump_config round trips through the parser") {
    const RunConfig cfg = parse_config(kFullConfig, "/base");
    const std::string echoed = dump_config(cfg);
    const RunConfig back = parse_config(echoed, "");

    CHECK(back.r == cfg.r);
    CHECK(back.s == cfg.s);
    CHECK(back.side_x == cfg.side_x);
    CHECK(back.noise_level == cfg.noise_level);
    CHECK(back.noise_seed == cfg.noise_seed);
    CHECK(back.mode == cfg.mode);
    CHECK(back.method == cfg.method);
    CHECK(back.poisson.cg_tol == cfg.poisson.cg_tol);
    CHECK(back.poisson.cg_max_iter == cfg.poisson.cg_max_iter);
    CHECK(back.clamp == cfg.clamp);
    CHECK(back.output_dir == cfg.output_dir);
    CHECK(*back.gate_light_err == *cfg.gate_light_err);
    CHECK(*back.gate_surface_rmse == *cfg.gate_surface_rmse);

    const auto& r1 = std::get<RingLights>(*cfg.lights);
    const auto& r2 = std::get<RingLights>(*back.lights);
    CHECK(r2.q == r1.q);
    CHECK(r2.delta == r1.delta);
    REQUIRE(r2.tilt.size() == r1.tilt.size());
    CHECK(r2.tilt[0] == r1.tilt[0]);
    REQUIRE(r2.perturb.size() == r1.perturb.size());
    CHECK(r2.perturb[0].first == r1.perturb[0].first);
    CHECK((r2.perturb[0].second - r1.perturb[0].second).norm() == 0.0);

    // identical lights after realization
    CHECK((config_lights(back).directions() - config_lights(cfg).directions())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("comments and blank lines are ignored") {
    const std::string text =
        "# leading comment\n"
        "\n"
        "grid.r = 6   # trailing comment\n"
        "grid.s = 7\n"
        "   grid.A = 1.5\t\n";
    const RunConfig cfg = parse_config(text, "");
    CHECK(cfg.r == 6);
    CHECK(cfg.s == 7);
    CHECK(cfg.side_x == 1.5);
}

TEST_CASE("the bundled configurations parse and are mutually consistent") {
    for (const char* name :
         {"paper-noiseless", "paper-noise10", "degenerate-ring"}) {
        const std::string path = std::string(PS_CONFIG_DIR) + "/" + name + ".cfg";
        const RunConfig cfg = load_config(path);
        CHECK(cfg.r == 100);
        CHECK(cfg.s == 100);
        CHECK(cfg.side_x == 2.02);
        REQUIRE(cfg.surface.has_value());
        CHECK(std::holds_alternative<MultiPeak>(*cfg.surface));
        REQUIRE(cfg.lights.has_value());
        const auto& ring = std::get<RingLights>(*cfg.lights);
        CHECK(ring.q == 7);
        CHECK(cfg.mode == SolveMode::Unknown);
    }

    const RunConfig clean = load_config(std::string(PS_CONFIG_DIR) +
                                        "/paper-noiseless.cfg");
    CHECK(clean.noise_level == 0.0);
    CHECK(std::get<RingLights>(*clean.lights).tilt.size() == 1);
    REQUIRE(clean.gate_light_err.has_value());

    const RunConfig noisy = load_config(std::string(PS_CONFIG_DIR) +
                                        "/paper-noise10.cfg");
    CHECK(noisy.noise_level == 0.1);
    CHECK(noisy.noise_model == NoiseModel::FrobeniusRms);

    const RunConfig ring = load_config(std::string(PS_CONFIG_DIR) +
                                       "/degenerate-ring.cfg");
    CHECK(ring.noise_level == 0.0);
    CHECK(std::get<RingLights>(*ring.lights).tilt.empty());
    CHECK_FALSE(ring.gate_light_err.has_value());
}
