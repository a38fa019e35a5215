#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ps {

// Process exit codes used by the CLI.  Library code communicates failures via
// the exception hierarchy below; each exception carries the exit code it maps
// to plus a short machine-readable tag that is stable across releases.
enum class ExitCode : int {
    Ok = 0,
    Validation = 2,  // bad arguments, malformed config/input files
    Degeneracy = 3,  // numerically degenerate data (rank loss, bad geometry)
    Convergence = 4, // iterative solver failed to converge
    Io = 5,          // filesystem / format failures
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, std::string tag, const std::string& what)
        : std::runtime_error(what), code_(code), tag_(std::move(tag)) {}

    ExitCode exit_code() const noexcept { return code_; }
    const std::string& tag() const noexcept { return tag_; }

private:
    ExitCode code_;
    std::string tag_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what,
                             std::string tag = "invalid-argument")
        : Error(ExitCode::Validation, std::move(tag), what) {}
};

// Tags used with DegeneracyError:
//   "degenerate-lights"   known-lights solve, rank(L) < 3
//   "degenerate-data"     image stack does not excite three dimensions
//   "too-few-images"      unknown-lights solve needs at least six images
//   "degenerate-lighting" lights on a circle around the view axis
//   "inconsistent-data"   recovered Gram matrix far from positive definite
//   "grazing-normal"      normal field too close to the image plane
class DegeneracyError : public Error {
public:
    DegeneracyError(std::string tag, const std::string& what)
        : Error(ExitCode::Degeneracy, std::move(tag), what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what)
        : Error(ExitCode::Convergence, "no-convergence", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what)
        : Error(ExitCode::Io, "io-failure", what) {}
};

} // namespace ps
