#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ps/render.hpp"

namespace ps {

// ----------------------------------------------------------- binary dumps
//
// Raw float64 dumps with a fixed 8-byte magic and uint64 dimension header,
// little-endian payload in column-major order.  These are the lossless
// interchange formats between CLI stages.

// "PSSTACK1": header r, s, q; payload (r*s) x q.
void write_stack(const std::string& path, const ImageStack& stack);

struct StackDump {
    int r = 0;
    int s = 0;
    Matrix values; // p x q
};
StackDump read_stack(const std::string& path);

// "PSNORM01": header r, s, 3; payload 3 x (r*s).
void write_normals(const std::string& path, const Grid& grid,
                   const Matrix& normals);

struct NormalsDump {
    int r = 0;
    int s = 0;
    Matrix normals; // 3 x p
};
NormalsDump read_normals(const std::string& path);

// ------------------------------------------------------------- text formats

// Height (or any per-pixel scalar) as an r-row, s-column CSV in full
// precision; read back against a grid that fixes the physical size.
void write_field_csv(const std::string& path, const Grid& grid,
                     const Vector& values);
HeightField read_height_csv(const std::string& path, const Grid& grid);

// Triangle mesh of the height surface (two triangles per grid cell).
void write_height_obj(const std::string& path, const HeightField& height);

// Light directions, one "x y z" row per light; normalized on load.
void write_lights(const std::string& path, const LightSet& lights);
LightSet read_lights(const std::string& path);

// Positive scalars, one per row (per-image light intensities).
Vector read_intensities(const std::string& path);

// ------------------------------------------------------------------- images

// 16-bit binary PGM (P5, big-endian samples).  All images in the stack share
// one affine map [lo, hi] -> [0, 65535]; the map and stack shape are written
// to `<prefix>meta.txt` and each image to `<prefix><t>.pgm` (t = 01, 02, ...).
void write_stack_pgm(const std::string& prefix, const ImageStack& stack);

// ------------------------------------------------------------------ reports

// Ordered flat key-value report ("key = value" lines).
using Report = std::vector<std::pair<std::string, std::string>>;

void report_add(Report& report, const std::string& key, const std::string& value);
void report_add(Report& report, const std::string& key, const char* value);
void report_add(Report& report, const std::string& key, double value);
void report_add(Report& report, const std::string& key, long value);
void report_add(Report& report, const std::string& key, int value);
void report_add(Report& report, const std::string& key, bool value);

void write_report(const std::string& path, const Report& report);
Report read_report(const std::string& path);

// Full-precision decimal form that round-trips a double exactly.
std::string format_double(double value);

} // namespace ps
