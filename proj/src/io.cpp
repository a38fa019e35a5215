#include "ps/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ps {

namespace {

// The binary dumps are written in native byte order; this project targets
// little-endian hosts and the format notes say so explicitly.

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

void check_wrote(std::ostream& out, const std::string& path) {
    if (!out) throw IoError("write to '" + path + "' failed");
}

constexpr char kStackMagic[8] = {'P', 'S', 'S', 'T', 'A', 'C', 'K', '1'};
constexpr char kNormalsMagic[8] = {'P', 'S', 'N', 'O', 'R', 'M', '0', '1'};

} // namespace

std::string format_double(double value) {
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

// ------------------------------------------------------------- binary dumps

void write_stack(const std::string& path, const ImageStack& stack) {
    auto out = open_out(path, true);
    out.write(kStackMagic, 8);
    write_u64(out, static_cast<std::uint64_t>(stack.grid.r()));
    write_u64(out, static_cast<std::uint64_t>(stack.grid.s()));
    write_u64(out, static_cast<std::uint64_t>(stack.values.cols()));
    out.write(reinterpret_cast<const char*>(stack.values.data()),
              static_cast<std::streamsize>(sizeof(double)) *
                  stack.values.size());
    check_wrote(out, path);
}

StackDump read_stack(const std::string& path) {
    auto in = open_in(path, true);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kStackMagic, 8) != 0) {
        throw IoError("'" + path + "' is not an image-stack dump");
    }
    const std::uint64_t r = read_u64(in);
    const std::uint64_t s = read_u64(in);
    const std::uint64_t q = read_u64(in);
    if (!in || r < 1 || s < 1 || q < 1 || r > 100000 || s > 100000 ||
        q > 100000) {
        throw IoError("'" + path + "' has a corrupt stack header");
    }
    StackDump dump;
    dump.r = static_cast<int>(r);
    dump.s = static_cast<int>(s);
    dump.values.resize(static_cast<Eigen::Index>(r * s),
                       static_cast<Eigen::Index>(q));
    in.read(reinterpret_cast<char*>(dump.values.data()),
            static_cast<std::streamsize>(sizeof(double)) * dump.values.size());
    if (!in) throw IoError("'" + path + "' is truncated");
    return dump;
}

void write_normals(const std::string& path, const Grid& grid,
                   const Matrix& normals) {
    if (normals.rows() != 3 || normals.cols() != grid.pixel_count()) {
        throw ValidationError("normal field must be 3 x " +
                              std::to_string(grid.pixel_count()));
    }
    auto out = open_out(path, true);
    out.write(kNormalsMagic, 8);
    write_u64(out, static_cast<std::uint64_t>(grid.r()));
    write_u64(out, static_cast<std::uint64_t>(grid.s()));
    write_u64(out, 3);
    out.write(reinterpret_cast<const char*>(normals.data()),
              static_cast<std::streamsize>(sizeof(double)) * normals.size());
    check_wrote(out, path);
}

NormalsDump read_normals(const std::string& path) {
    auto in = open_in(path, true);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kNormalsMagic, 8) != 0) {
        throw IoError("'" + path + "' is not a normal-field dump");
    }
    const std::uint64_t r = read_u64(in);
    const std::uint64_t s = read_u64(in);
    const std::uint64_t c = read_u64(in);
    if (!in || r < 1 || s < 1 || c != 3 || r > 100000 || s > 100000) {
        throw IoError("'" + path + "' has a corrupt normals header");
    }
    NormalsDump dump;
    dump.r = static_cast<int>(r);
    dump.s = static_cast<int>(s);
    dump.normals.resize(3, static_cast<Eigen::Index>(r * s));
    in.read(reinterpret_cast<char*>(dump.normals.data()),
            static_cast<std::streamsize>(sizeof(double)) * dump.normals.size());
    if (!in) throw IoError("'" + path + "' is truncated");
    return dump;
}

// --------------------------------------------------------------- text files

void write_field_csv(const std::string& path, const Grid& grid,
                     const Vector& values) {
    if (values.size() != grid.pixel_count()) {
        throw ValidationError("field has wrong length for this grid");
    }
    auto out = open_out(path, false);
    for (int i = 1; i <= grid.r(); ++i) {
        for (int j = 1; j <= grid.s(); ++j) {
            if (j > 1) out << ',';
            out << format_double(values[grid.lex_index(i, j) - 1]);
        }
        out << '\n';
    }
    check_wrote(out, path);
}

HeightField read_height_csv(const std::string& path, const Grid& grid) {
    auto in = open_in(path, false);
    Vector values(grid.pixel_count());
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++i;
        if (i > grid.r()) {
            throw ValidationError("'" + path + "' has more than " +
                                  std::to_string(grid.r()) + " rows");
        }
        std::stringstream row(line);
        std::string cell;
        int j = 0;
        while (std::getline(row, cell, ',')) {
            ++j;
            if (j > grid.s()) {
                throw ValidationError("'" + path + "' row " + std::to_string(i) +
                                      " has more than " +
                                      std::to_string(grid.s()) + " columns");
            }
            try {
                values[grid.lex_index(i, j) - 1] = std::stod(cell);
            } catch (const std::exception&) {
                throw IoError("'" + path + "' has a malformed number in row " +
                              std::to_string(i));
            }
        }
        if (j != grid.s()) {
            throw ValidationError("'" + path + "' row " + std::to_string(i) +
                                  " has " + std::to_string(j) +
                                  " columns, expected " +
                                  std::to_string(grid.s()));
        }
    }
    if (i != grid.r()) {
        throw ValidationError("'" + path + "' has " + std::to_string(i) +
                              " rows, expected " + std::to_string(grid.r()));
    }
    return HeightField{grid, std::move(values)};
}

void write_height_obj(const std::string& path, const HeightField& height) {
    const Grid& g = height.grid;
    auto out = open_out(path, false);
    out << "# height-field mesh, " << g.r() << " x " << g.s() << " vertices\n";
    for (int i = 1; i <= g.r(); ++i) {
        for (int j = 1; j <= g.s(); ++j) {
            out << "v " << format_double(g.x(i)) << ' ' << format_double(g.y(j))
                << ' ' << format_double(height.values[g.lex_index(i, j) - 1])
                << '\n';
        }
    }
    // two triangles per cell; vertex numbers equal the lexicographic index
    for (int i = 1; i < g.r(); ++i) {
        for (int j = 1; j < g.s(); ++j) {
            const int a = g.lex_index(i, j);
            const int b = g.lex_index(i + 1, j);
            const int c = g.lex_index(i + 1, j + 1);
            const int d = g.lex_index(i, j + 1);
            out << "f " << a << ' ' << b << ' ' << c << '\n';
            out << "f " << a << ' ' << c << ' ' << d << '\n';
        }
    }
    check_wrote(out, path);
}

void write_lights(const std::string& path, const LightSet& lights) {
    auto out = open_out(path, false);
    const Matrix& L = lights.directions();
    for (int t = 0; t < L.cols(); ++t) {
        out << format_double(L(0, t)) << ' ' << format_double(L(1, t)) << ' '
            << format_double(L(2, t)) << '\n';
    }
    check_wrote(out, path);
}

LightSet read_lights(const std::string& path) {
    auto in = open_in(path, false);
    std::vector<double> nums;
    double v = 0.0;
    while (in >> v) nums.push_back(v);
    if (!in.eof()) {
        throw IoError("'" + path + "' has malformed light entries");
    }
    if (nums.empty() || nums.size() % 3 != 0) {
        throw IoError("'" + path + "' must hold one 'x y z' row per light");
    }
    const int q = static_cast<int>(nums.size() / 3);
    Matrix L(3, q);
    for (int t = 0; t < q; ++t) {
        L(0, t) = nums[static_cast<std::size_t>(t) * 3];
        L(1, t) = nums[static_cast<std::size_t>(t) * 3 + 1];
        L(2, t) = nums[static_cast<std::size_t>(t) * 3 + 2];
    }
    return LightSet(std::move(L)); // normalizes the columns
}

Vector read_intensities(const std::string& path) {
    auto in = open_in(path, false);
    std::vector<double> nums;
    double v = 0.0;
    while (in >> v) nums.push_back(v);
    if (!in.eof()) {
        throw IoError("'" + path + "' has malformed intensity entries");
    }
    if (nums.empty()) {
        throw IoError("'" + path + "' holds no intensities");
    }
    Vector out(static_cast<Eigen::Index>(nums.size()));
    for (std::size_t k = 0; k < nums.size(); ++k) {
        if (!(nums[k] > 0.0) || !std::isfinite(nums[k])) {
            throw ValidationError("light intensities must be positive and "
                                  "finite");
        }
        out[static_cast<Eigen::Index>(k)] = nums[k];
    }
    return out;
}

// ------------------------------------------------------------------- images

void write_stack_pgm(const std::string& prefix, const ImageStack& stack) {
    const int r = stack.grid.r();
    const int s = stack.grid.s();
    const int q = static_cast<int>(stack.values.cols());

    const double lo = stack.values.minCoeff();
    const double hi = stack.values.maxCoeff();
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;

    for (int t = 0; t < q; ++t) {
        char num[16];
        std::snprintf(num, sizeof num, "%02d", t + 1);
        const std::string path = prefix + num + ".pgm";
        auto out = open_out(path, true);
        out << "P5\n" << s << ' ' << r << "\n65535\n";
        std::vector<unsigned char> row(static_cast<std::size_t>(s) * 2);
        for (int i = 1; i <= r; ++i) {
            for (int j = 1; j <= s; ++j) {
                const double v =
                    stack.values(stack.grid.lex_index(i, j) - 1, t);
                const double mapped = (v - lo) * scale;
                const long pix =
                    std::lround(std::min(65535.0, std::max(0.0, mapped)));
                row[static_cast<std::size_t>(j - 1) * 2] =
                    static_cast<unsigned char>((pix >> 8) & 0xff);
                row[static_cast<std::size_t>(j - 1) * 2 + 1] =
                    static_cast<unsigned char>(pix & 0xff);
            }
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size()));
        }
        check_wrote(out, path);
    }

    Report meta;
    report_add(meta, "format.version", 1);
    report_add(meta, "grid.r", r);
    report_add(meta, "grid.s", s);
    report_add(meta, "images", q);
    report_add(meta, "value.lo", lo);
    report_add(meta, "value.hi", hi);
    report_add(meta, "value.map", std::string("pixel = round((v - lo) / (hi - lo) * 65535)"));
    write_report(prefix + "meta.txt", meta);
}

// ------------------------------------------------------------------ reports

void report_add(Report& report, const std::string& key,
                const std::string& value) {
    report.emplace_back(key, value);
}

void report_add(Report& report, const std::string& key, const char* value) {
    report.emplace_back(key, std::string(value));
}

void report_add(Report& report, const std::string& key, double value) {
    report.emplace_back(key, format_double(value));
}

void report_add(Report& report, const std::string& key, long value) {
    report.emplace_back(key, std::to_string(value));
}

void report_add(Report& report, const std::string& key, int value) {
    report.emplace_back(key, std::to_string(value));
}

void report_add(Report& report, const std::string& key, bool value) {
    report.emplace_back(key, value ? "true" : "false");
}

void write_report(const std::string& path, const Report& report) {
    auto out = open_out(path, false);
    for (const auto& [key, value] : report) {
        out << key << " = " << value << '\n';
    }
    check_wrote(out, path);
}

Report read_report(const std::string& path) {
    auto in = open_in(path, false);
    Report report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("'" + path + "' has a line without '='");
        }
        auto trim = [](std::string v) {
            const auto a = v.find_first_not_of(" \t");
            const auto b = v.find_last_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            return v.substr(a, b - a + 1);
        };
        report.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return report;
}

} // namespace ps
