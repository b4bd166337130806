#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aqc {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

/// Dense matrices are refused above this qubit count unless the caller
/// overrides the limit explicitly (2^12 x 2^12 complex doubles = 256 MB).
inline constexpr std::size_t kDenseLimitQubits = 12;

/// Cap on the number of flip subsets enumerated in a single cost evaluation.
inline constexpr std::size_t kFlipTermBudget = 1'000'000;

enum class Axis : std::uint8_t { X, Y, Z };

inline const char* axis_name(Axis a) {
    switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
    }
}

/// Column-ordered 2x2 complex matrix acting on a single qubit.
struct Mat2 {
    cplx m00, m01, m10, m11;

    Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
};

/// Half-angle rotation about a Pauli axis, determinant one.
Mat2 rotation_matrix(Axis axis, double angle);

/// Thrown when an operation would exceed a configured memory/term budget.
/// Carries an estimate of what the request would have required.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::uint64_t required)
        : std::runtime_error(what), required_(required) {}

    std::uint64_t required() const { return required_; }

private:
    std::uint64_t required_;
};

/// Configuration-file and experiment-setup failures; message names the
/// offending key or constraint.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aqc
