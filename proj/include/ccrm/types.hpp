#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccrm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)),
          expected_(expected), got_(got) {}
    const char* kind() const noexcept override { return "dimension_mismatch"; }
    std::size_t expected() const noexcept { return expected_; }
    std::size_t got() const noexcept { return got_; }

private:
    std::size_t expected_;
    std::size_t got_;
};

/// Invalid set or solver parameters (non-SPD matrix, empty box, zero normal, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Configuration that cannot run, detected before iterating.
class ConfigurationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "configuration_error"; }
};

/// An iterative projection did not reach its tolerance.
class ProjectionFailure : public Error {
public:
    ProjectionFailure(const std::string& what, double residual)
        : Error(what + " (achieved residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    const char* kind() const noexcept override { return "projection_failure"; }
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Three distinct collinear points have no equidistant point in their affine hull.
class DegenerateConfiguration : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate_configuration"; }
};

class GenerationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "generation_error"; }
};

template <typename Scalar>
void check_dimension(const Vector<Scalar>& z, Eigen::Index n) {
    if (z.size() != n) {
        throw DimensionMismatch(static_cast<std::size_t>(n), static_cast<std::size_t>(z.size()));
    }
}

}  // namespace ccrm
