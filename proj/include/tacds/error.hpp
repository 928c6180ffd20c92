#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tacds {

/// AᵀA is (numerically) rank deficient; callers fall back to recursive LSE.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every rule fired with zero strength for some sample, so the normalized
/// firing strengths are undefined.
class DegenerateCoverageError : public std::runtime_error {
public:
    DegenerateCoverageError(std::size_t sample_index)
        : std::runtime_error("degenerate rule coverage at sample " + std::to_string(sample_index)),
          sample_index_(sample_index) {}

    std::size_t sample_index() const noexcept { return sample_index_; }

private:
    std::size_t sample_index_;
};

class DivergedError : public std::runtime_error {
public:
    DivergedError(const std::string& what, std::size_t epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// An input value lies outside its declared physical range.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV or JSON input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tacds
