#include "ps/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ps/io.hpp"

namespace ps {

namespace {

std::string trim(const std::string& v) {
    const auto a = v.find_first_not_of(" \t\r");
    const auto b = v.find_last_not_of(" \t\r");
    if (a == std::string::npos) return {};
    return v.substr(a, b - a + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ValidationError("config key '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) bad_key(key, "malformed number '" + value + "'");
        if (!std::isfinite(v)) bad_key(key, "value must be finite");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        bad_key(key, "malformed number '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) bad_key(key, "malformed integer '" + value + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        bad_key(key, "malformed integer '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) bad_key(key, "malformed integer '" + value + "'");
        return static_cast<std::uint64_t>(v);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        bad_key(key, "malformed integer '" + value + "'");
    }
}

std::vector<double> parse_tuple(const std::string& key, const std::string& value,
                                std::size_t n) {
    std::istringstream in(value);
    std::vector<double> out;
    double v = 0.0;
    while (in >> v) out.push_back(v);
    if (!in.eof() || out.size() != n) {
        bad_key(key, "expected " + std::to_string(n) + " numbers");
    }
    return out;
}

bool parse_switch(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true") return true;
    if (value == "off" || value == "false") return false;
    bad_key(key, "expected on/off");
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

// Keys that take no index suffix.
const char* const kPlainKeys[] = {
    "grid.r",         "grid.s",           "grid.A",
    "surface.kind",   "surface.center",   "surface.width",
    "surface.height", "surface.radius",   "albedo.kind",
    "albedo.value",   "lights.kind",      "lights.q",
    "lights.delta",   "lights.file",      "noise.level",
    "noise.seed",     "noise.model",      "solve.mode",
    "solve.intensities_file",             "poisson.method",
    "poisson.cg_tol", "poisson.cg_max_iter",
    "render.clamp",   "output.dir",       "gates.light_err",
    "gates.surface_rmse",
};

bool known_key(const std::string& key) {
    for (const char* k : kPlainKeys) {
        if (key == k) return true;
    }
    return key.rfind("lights.perturb.", 0) == 0 ||
           key.rfind("lights.tilt.", 0) == 0;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " has an empty key or value");
        }
        if (!known_key(key)) {
            throw ValidationError("unknown config key '" + key + "'");
        }
        if (!kv.emplace(key, value).second) {
            throw ValidationError("duplicate config key '" + key + "'");
        }
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require = [&](const char* key) -> std::string {
        auto v = take(key);
        if (!v) throw ValidationError("config is missing required key '" +
                                      std::string(key) + "'");
        return *v;
    };

    RunConfig cfg;

    // grid
    cfg.r = static_cast<int>(parse_long("grid.r", require("grid.r")));
    cfg.s = static_cast<int>(parse_long("grid.s", require("grid.s")));
    cfg.side_x = parse_double("grid.A", require("grid.A"));
    if (cfg.r < 2 || cfg.s < 2) {
        throw ValidationError("grid.r and grid.s must be at least 2");
    }
    if (!(cfg.side_x > 0.0)) {
        throw ValidationError("grid.A must be positive");
    }

    // surface
    if (auto kind = take("surface.kind")) {
        if (*kind == "flat") {
            cfg.surface = FlatSurface{};
        } else if (*kind == "gaussian-bump") {
            GaussianBump b;
            const auto c = parse_tuple("surface.center",
                                       require("surface.center"), 2);
            b.cx = c[0];
            b.cy = c[1];
            b.width = parse_double("surface.width", require("surface.width"));
            b.height = parse_double("surface.height", require("surface.height"));
            cfg.surface = b;
        } else if (*kind == "sphere-cap") {
            SphereCap c;
            c.radius = parse_double("surface.radius", require("surface.radius"));
            c.height = parse_double("surface.height", require("surface.height"));
            cfg.surface = c;
        } else if (*kind == "multi-peak") {
            cfg.surface = MultiPeak{};
        } else {
            bad_key("surface.kind", "unknown surface '" + *kind + "'");
        }
    }

    // albedo
    if (auto kind = take("albedo.kind")) {
        if (*kind == "constant") {
            ConstantAlbedo c;
            if (auto v = take("albedo.value")) {
                c.value = parse_double("albedo.value", *v);
            }
            if (!(c.value > 0.0)) {
                throw ValidationError("albedo.value must be positive");
            }
            cfg.albedo = c;
        } else if (*kind == "patterned") {
            cfg.albedo = PatternedAlbedo{};
        } else {
            bad_key("albedo.kind", "unknown albedo '" + *kind + "'");
        }
    }

    // lights
    if (auto kind = take("lights.kind")) {
        if (*kind == "ring") {
            RingLights ring;
            ring.q = static_cast<int>(parse_long("lights.q", require("lights.q")));
            ring.delta = parse_double("lights.delta", require("lights.delta"));
            if (ring.q < 1) bad_key("lights.q", "must be at least 1");
            if (!(ring.delta > 0.0)) bad_key("lights.delta", "must be positive");
            for (auto it = kv.begin(); it != kv.end();) {
                if (it->first.rfind("lights.perturb.", 0) == 0) {
                    const int t = static_cast<int>(parse_long(
                        it->first, it->first.substr(sizeof("lights.perturb.") - 1)));
                    const auto v = parse_tuple(it->first, it->second, 3);
                    if (t < 1 || t > ring.q) bad_key(it->first, "light index out of range");
                    ring.perturb.emplace_back(t, Vector3(v[0], v[1], v[2]));
                    it = kv.erase(it);
                } else if (it->first.rfind("lights.tilt.", 0) == 0) {
                    const int t = static_cast<int>(parse_long(
                        it->first, it->first.substr(sizeof("lights.tilt.") - 1)));
                    if (t < 1 || t > ring.q) bad_key(it->first, "light index out of range");
                    ring.tilt.emplace_back(t, parse_double(it->first, it->second));
                    it = kv.erase(it);
                } else {
                    ++it;
                }
            }
            cfg.lights = ring;
        } else if (*kind == "file") {
            FileLights fl;
            fl.path = resolve(base_dir, require("lights.file"));
            cfg.lights = fl;
        } else {
            bad_key("lights.kind", "unknown lights '" + *kind + "'");
        }
    }

    // noise
    if (auto v = take("noise.level")) {
        cfg.noise_level = parse_double("noise.level", *v);
        if (cfg.noise_level < 0.0) bad_key("noise.level", "must be >= 0");
    }
    if (auto v = take("noise.seed")) cfg.noise_seed = parse_u64("noise.seed", *v);
    if (auto v = take("noise.model")) {
        if (*v == "rms") cfg.noise_model = NoiseModel::FrobeniusRms;
        else if (*v == "per-entry") cfg.noise_model = NoiseModel::PerEntry;
        else bad_key("noise.model", "expected rms or per-entry");
    }

    // solve
    if (auto v = take("solve.mode")) {
        if (*v == "known") cfg.mode = SolveMode::Known;
        else if (*v == "unknown") cfg.mode = SolveMode::Unknown;
        else bad_key("solve.mode", "expected known or unknown");
    }
    if (auto v = take("solve.intensities_file")) {
        cfg.intensities_file = resolve(base_dir, *v);
    }

    // poisson
    if (auto v = take("poisson.method")) {
        if (*v == "direct") cfg.method = PoissonMethod::DirectBanded;
        else if (*v == "cg") cfg.method = PoissonMethod::ConjugateGradient;
        else if (*v == "dst") cfg.method = PoissonMethod::FastSine;
        else bad_key("poisson.method", "expected direct, cg or dst");
    }
    if (auto v = take("poisson.cg_tol")) {
        cfg.poisson.cg_tol = parse_double("poisson.cg_tol", *v);
        if (!(cfg.poisson.cg_tol > 0.0)) bad_key("poisson.cg_tol", "must be positive");
    }
    if (auto v = take("poisson.cg_max_iter")) {
        cfg.poisson.cg_max_iter =
            static_cast<int>(parse_long("poisson.cg_max_iter", *v));
        if (cfg.poisson.cg_max_iter < 0) bad_key("poisson.cg_max_iter", "must be >= 0");
    }

    // render / output / gates
    if (auto v = take("render.clamp")) cfg.clamp = parse_switch("render.clamp", *v);
    if (auto v = take("output.dir")) cfg.output_dir = resolve(base_dir, *v);
    if (auto v = take("gates.light_err")) {
        cfg.gate_light_err = parse_double("gates.light_err", *v);
        if (!(*cfg.gate_light_err > 0.0)) bad_key("gates.light_err", "must be positive");
    }
    if (auto v = take("gates.surface_rmse")) {
        cfg.gate_surface_rmse = parse_double("gates.surface_rmse", *v);
        if (!(*cfg.gate_surface_rmse > 0.0)) bad_key("gates.surface_rmse", "must be positive");
    }

    if (!kv.empty()) {
        // leftovers are keys valid only for another surface/lights kind
        throw ValidationError("config key '" + kv.begin()->first +
                              "' does not apply to this configuration");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    RunConfig cfg = parse_config(text.str(), base_dir);

    // Referenced files must exist at load time.
    if (const auto* fl = cfg.lights ? std::get_if<FileLights>(&*cfg.lights)
                                    : nullptr) {
        if (!std::filesystem::exists(fl->path)) {
            throw ValidationError("lights.file '" + fl->path + "' does not exist");
        }
    }
    if (cfg.intensities_file &&
        !std::filesystem::exists(*cfg.intensities_file)) {
        throw ValidationError("solve.intensities_file '" +
                              *cfg.intensities_file + "' does not exist");
    }
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "grid.r = " << cfg.r << '\n';
    out << "grid.s = " << cfg.s << '\n';
    out << "grid.A = " << format_double(cfg.side_x) << '\n';

    if (cfg.surface) {
        if (std::holds_alternative<FlatSurface>(*cfg.surface)) {
            out << "surface.kind = flat\n";
        } else if (const auto* b = std::get_if<GaussianBump>(&*cfg.surface)) {
            out << "surface.kind = gaussian-bump\n";
            out << "surface.center = " << format_double(b->cx) << ' '
                << format_double(b->cy) << '\n';
            out << "surface.width = " << format_double(b->width) << '\n';
            out << "surface.height = " << format_double(b->height) << '\n';
        } else if (const auto* c = std::get_if<SphereCap>(&*cfg.surface)) {
            out << "surface.kind = sphere-cap\n";
            out << "surface.radius = " << format_double(c->radius) << '\n';
            out << "surface.height = " << format_double(c->height) << '\n';
        } else {
            out << "surface.kind = multi-peak\n";
        }
    }

    if (const auto* c = std::get_if<ConstantAlbedo>(&cfg.albedo)) {
        out << "albedo.kind = constant\n";
        out << "albedo.value = " << format_double(c->value) << '\n';
    } else {
        out << "albedo.kind = patterned\n";
    }

    if (cfg.lights) {
        if (const auto* ring = std::get_if<RingLights>(&*cfg.lights)) {
            out << "lights.kind = ring\n";
            out << "lights.q = " << ring->q << '\n';
            out << "lights.delta = " << format_double(ring->delta) << '\n';
            for (const auto& [t, v] : ring->perturb) {
                out << "lights.perturb." << t << " = " << format_double(v(0))
                    << ' ' << format_double(v(1)) << ' ' << format_double(v(2))
                    << '\n';
            }
            for (const auto& [t, deg] : ring->tilt) {
                out << "lights.tilt." << t << " = " << format_double(deg) << '\n';
            }
        } else {
            out << "lights.kind = file\n";
            out << "lights.file = " << std::get<FileLights>(*cfg.lights).path
                << '\n';
        }
    }

    out << "noise.level = " << format_double(cfg.noise_level) << '\n';
    out << "noise.seed = " << cfg.noise_seed << '\n';
    out << "noise.model = "
        << (cfg.noise_model == NoiseModel::FrobeniusRms ? "rms" : "per-entry")
        << '\n';

    out << "solve.mode = "
        << (cfg.mode == SolveMode::Known ? "known" : "unknown") << '\n';
    if (cfg.intensities_file) {
        out << "solve.intensities_file = " << *cfg.intensities_file << '\n';
    }

    out << "poisson.method = ";
    switch (cfg.method) {
    case PoissonMethod::DirectBanded: out << "direct\n"; break;
    case PoissonMethod::ConjugateGradient: out << "cg\n"; break;
    case PoissonMethod::FastSine: out << "dst\n"; break;
    }
    if (cfg.method == PoissonMethod::ConjugateGradient) {
        out << "poisson.cg_tol = " << format_double(cfg.poisson.cg_tol) << '\n';
        out << "poisson.cg_max_iter = " << cfg.poisson.cg_max_iter << '\n';
    }

    out << "render.clamp = " << (cfg.clamp ? "on" : "off") << '\n';
    if (!cfg.output_dir.empty()) out << "output.dir = " << cfg.output_dir << '\n';
    if (cfg.gate_light_err) {
        out << "gates.light_err = " << format_double(*cfg.gate_light_err) << '\n';
    }
    if (cfg.gate_surface_rmse) {
        out << "gates.surface_rmse = " << format_double(*cfg.gate_surface_rmse)
            << '\n';
    }
    return out.str();
}

Grid config_grid(const RunConfig& cfg) { return make_grid(cfg.r, cfg.s, cfg.side_x); }

LightSet config_lights(const RunConfig& cfg) {
    if (!cfg.lights) {
        throw ValidationError("config does not define any lights");
    }
    if (const auto* ring = std::get_if<RingLights>(&*cfg.lights)) {
        std::vector<Vector3> offsets;
        if (!ring->perturb.empty() || !ring->tilt.empty()) {
            offsets.assign(static_cast<std::size_t>(ring->q), Vector3::Zero());
            for (const auto& [t, v] : ring->perturb) {
                offsets[static_cast<std::size_t>(t - 1)] += v;
            }
            for (const auto& [t, deg] : ring->tilt) {
                offsets[static_cast<std::size_t>(t - 1)] += ring_tilt_offset(
                    ring->q, ring->delta, t, deg * std::numbers::pi / 180.0);
            }
        }
        return make_light_ring(ring->q, ring->delta, offsets);
    }
    return read_lights(std::get<FileLights>(*cfg.lights).path);
}

} // namespace ps
