#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tacds/common.hpp"

namespace tacds::tace {

/// One decision-scoring observation in physical units.
struct Sample {
    double fuel = 0.0;            // litres, [0, 1000]
    double intercept_time = 0.0;  // minutes, [0, 60]
    double weapon = 0.0;          // percent, [0, 100]
    double danger = 0.0;          // points, [0, 10]
    double score = 0.0;           // points, [0, 10]

    bool operator==(const Sample&) const = default;
};

inline constexpr std::size_t kFieldCount = 5;
inline constexpr std::size_t kInputCount = 4;

struct FieldRange {
    std::string_view name;
    double lo;
    double hi;
};

/// Physical ranges in CSV column order; also the normalization bounds.
inline constexpr std::array<FieldRange, kFieldCount> kFields{{
    {"fuel", 0.0, 1000.0},
    {"intercept_time", 0.0, 60.0},
    {"weapon", 0.0, 100.0},
    {"danger", 0.0, 10.0},
    {"score", 0.0, 10.0},
}};

std::array<double, kFieldCount> to_array(const Sample& s);
Sample from_array(const std::array<double, kFieldCount>& a);

/// Throws RangeError naming the first field outside its range.
void check_ranges(const Sample& s);

struct Dataset {
    std::vector<Sample> samples;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return samples.size(); }
};

/// The eleven expert anchor rows, score 0 through 10.
const std::array<Sample, 11>& anchor_table();

/// Noise-free sample at latent advantage t ∈ [0, 10]: every column is the
/// piecewise-linear interpolation of the anchor table at t.
Sample interpolate_anchor(double t);

struct GenerateOptions {
    bool jitter = true;
    double jitter_fraction = 0.02;  // of each field's range, inputs only
};

/// Draws t ~ U[0, 10] per sample, interpolates the anchors, jitters the
/// four inputs and clips them to range. Deterministic in (seed, n).
Dataset generate(std::uint64_t seed, std::size_t n, const GenerateOptions& options = {});

/// The anchor table as a dataset (t = 0, 1, ..., 10).
Dataset anchors_dataset();

/// Seeded shuffle, then the first round(fraction·n) samples train.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

double normalize_field(std::size_t field, double value);
double denormalize_field(std::size_t field, double value);
Sample normalize(const Sample& s);
Sample denormalize(const Sample& s);

/// Normalized inputs (4 columns) and normalized score.
RegressionSet to_regression(const Dataset& dataset);

/// Header plus one line per sample, columns in kFields order.
void write_csv(std::ostream& out, const Dataset& dataset);
void write_csv(const std::string& path, const Dataset& dataset);
/// Throws ParseError with the 1-based line number on malformed input.
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::string& path);

}  // namespace tacds::tace
