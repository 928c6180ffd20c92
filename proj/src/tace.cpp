#include "tacds/tace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tacds/error.hpp"
#include "tacds/rng.hpp"

namespace tacds::tace {

std::array<double, kFieldCount> to_array(const Sample& s) {
    return {s.fuel, s.intercept_time, s.weapon, s.danger, s.score};
}

Sample from_array(const std::array<double, kFieldCount>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

void check_ranges(const Sample& s) {
    const auto a = to_array(s);
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        if (!(a[f] >= kFields[f].lo && a[f] <= kFields[f].hi)) {
            std::ostringstream msg;
            msg << "field '" << kFields[f].name << "' = " << a[f] << " outside [" << kFields[f].lo << ", "
                << kFields[f].hi << "]";
            throw RangeError(msg.str());
        }
    }
}

const std::array<Sample, 11>& anchor_table() {
    static const std::array<Sample, 11> table{{
        {0, 60, 0, 10, 0},
        {100, 55, 15, 8, 1},
        {200, 50, 25, 7, 2},
        {300, 40, 30, 5, 3},
        {400, 35, 40, 4.5, 4},
        {500, 30, 60, 4, 5},
        {600, 25, 70, 3, 6},
        {700, 15, 85, 2, 7},
        {800, 10, 90, 1.5, 8},
        {900, 5, 96, 1, 9},
        {1000, 1, 100, 0, 10},
    }};
    return table;
}

Sample interpolate_anchor(double t) {
    const auto& table = anchor_table();
    t = std::clamp(t, 0.0, 10.0);
    const auto lo = static_cast<std::size_t>(std::floor(t));
    if (lo >= 10) return table[10];
    const double frac = t - static_cast<double>(lo);
    if (frac == 0.0) return table[lo];
    const auto a = to_array(table[lo]);
    const auto b = to_array(table[lo + 1]);
    std::array<double, kFieldCount> out{};
    for (std::size_t f = 0; f < kFieldCount; ++f) out[f] = a[f] + frac * (b[f] - a[f]);
    return from_array(out);
}

Dataset generate(std::uint64_t seed, std::size_t n, const GenerateOptions& options) {
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    Rng rng(seed);
    Dataset ds;
    ds.seed = seed;
    ds.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 10.0);
        auto a = to_array(interpolate_anchor(t));
        for (std::size_t f = 0; f < kInputCount; ++f) {
            // Draw even when jitter is off so both modes share the t stream.
            const double u = rng.uniform(-1.0, 1.0);
            if (!options.jitter) continue;
            const double span = kFields[f].hi - kFields[f].lo;
            a[f] = std::clamp(a[f] + u * options.jitter_fraction * span, kFields[f].lo, kFields[f].hi);
        }
        ds.samples.push_back(from_array(a));
    }
    return ds;
}

Dataset anchors_dataset() {
    const auto& table = anchor_table();
    return Dataset{{table.begin(), table.end()}, 0};
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("split: fraction must be in (0,1)");
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order.begin(), order.end());
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    Dataset train{{}, dataset.seed};
    Dataset test{{}, dataset.seed};
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).samples.push_back(dataset.samples[order[i]]);
    return {std::move(train), std::move(test)};
}

double normalize_field(std::size_t field, double value) {
    const auto& r = kFields.at(field);
    return (value - r.lo) / (r.hi - r.lo);
}

double denormalize_field(std::size_t field, double value) {
    const auto& r = kFields.at(field);
    return r.lo + value * (r.hi - r.lo);
}

Sample normalize(const Sample& s) {
    auto a = to_array(s);
    for (std::size_t f = 0; f < kFieldCount; ++f) a[f] = normalize_field(f, a[f]);
    return from_array(a);
}

Sample denormalize(const Sample& s) {
    auto a = to_array(s);
    for (std::size_t f = 0; f < kFieldCount; ++f) a[f] = denormalize_field(f, a[f]);
    return from_array(a);
}

RegressionSet to_regression(const Dataset& dataset) {
    Matrix x(dataset.size(), kInputCount);
    Vector y(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto a = to_array(normalize(dataset.samples[i]));
        for (std::size_t f = 0; f < kInputCount; ++f) x(i, f) = a[f];
        y[i] = a[kInputCount];
    }
    return {std::move(x), std::move(y)};
}

void write_csv(std::ostream& out, const Dataset& dataset) {
    for (std::size_t f = 0; f < kFieldCount; ++f) out << (f ? "," : "") << kFields[f].name;
    out << '\n';
    char buf[64];
    for (const auto& s : dataset.samples) {
        const auto a = to_array(s);
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            // Shortest representation that round-trips.
            const auto res = std::to_chars(buf, buf + sizeof buf, a[f]);
            if (f) out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, dataset);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Dataset read_csv(std::istream& in) {
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            std::string expected;
            for (std::size_t f = 0; f < kFieldCount; ++f) expected += (f ? "," : "") + std::string(kFields[f].name);
            if (line != expected) throw ParseError("line " + std::to_string(line_no) + ": expected header '" + expected + "'");
            continue;
        }
        std::array<double, kFieldCount> a{};
        std::size_t f = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            if (f >= kFieldCount)
                throw ParseError("line " + std::to_string(line_no) + ": too many columns");
            while (p < end && *p == ' ') ++p;
            const auto res = std::from_chars(p, end, a[f]);
            if (res.ec != std::errc() || !std::isfinite(a[f]))
                throw ParseError("line " + std::to_string(line_no) + ": bad number in column " + std::to_string(f + 1));
            p = res.ptr;
            while (p < end && *p == ' ') ++p;
            ++f;
            if (p == end) break;
            if (*p != ',') throw ParseError("line " + std::to_string(line_no) + ": expected ','");
            ++p;
        }
        if (f != kFieldCount)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(kFieldCount) + " columns");
        ds.samples.push_back(from_array(a));
    }
    if (!header_seen) throw ParseError("line 1: missing header");
    return ds;
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_csv(in);
}

}  // namespace tacds::tace
