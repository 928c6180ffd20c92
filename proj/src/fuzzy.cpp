#include "tacds/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tacds {

namespace {

constexpr double kMinBellExponent = 1e-3;

}  // namespace

std::string_view to_string(MfShape shape) {
    switch (shape) {
        case MfShape::gaussian: return "gaussian";
        case MfShape::gbell: return "gbell";
        case MfShape::trapezoid: return "trapezoid";
        case MfShape::triangle: return "triangle";
    }
    return "unknown";
}

MfShape parse_mf_shape(std::string_view name) {
    if (name == "gaussian") return MfShape::gaussian;
    if (name == "gbell") return MfShape::gbell;
    if (name == "trapezoid" || name == "trapezoidal") return MfShape::trapezoid;
    if (name == "triangle" || name == "triangular") return MfShape::triangle;
    throw std::invalid_argument("unknown membership function shape: " + std::string(name));
}

MembershipFunction MembershipFunction::gaussian(double center, double sigma) {
    MembershipFunction mf(MfShape::gaussian, {center, sigma, 0.0, 0.0});
    mf.validate();
    return mf;
}

MembershipFunction MembershipFunction::gbell(double a, double b, double center) {
    MembershipFunction mf(MfShape::gbell, {a, b, center, 0.0});
    mf.validate();
    return mf;
}

MembershipFunction MembershipFunction::trapezoid(double a, double b, double c, double d) {
    MembershipFunction mf(MfShape::trapezoid, {a, b, c, d});
    mf.validate();
    return mf;
}

MembershipFunction MembershipFunction::triangle(double a, double b, double c) {
    MembershipFunction mf(MfShape::triangle, {a, b, c, 0.0});
    mf.validate();
    return mf;
}

MembershipFunction MembershipFunction::make(MfShape shape, std::span<const double> params) {
    std::array<double, 4> p{};
    MembershipFunction probe(shape, p);
    if (params.size() != probe.param_count())
        throw std::invalid_argument("membership function " + std::string(to_string(shape)) + " expects " +
                                    std::to_string(probe.param_count()) + " parameters");
    std::copy(params.begin(), params.end(), p.begin());
    MembershipFunction mf(shape, p);
    mf.validate();
    return mf;
}

MembershipFunction MembershipFunction::make_projected(MfShape shape, std::span<const double> params, double min_width) {
    std::array<double, 4> p{};
    MembershipFunction probe(shape, p);
    if (params.size() != probe.param_count())
        throw std::invalid_argument("membership function " + std::string(to_string(shape)) + " expects " +
                                    std::to_string(probe.param_count()) + " parameters");
    std::copy(params.begin(), params.end(), p.begin());
    return MembershipFunction(shape, p).projected(min_width);
}

std::size_t MembershipFunction::param_count() const noexcept {
    switch (shape_) {
        case MfShape::gaussian: return 2;
        case MfShape::gbell: return 3;
        case MfShape::trapezoid: return 4;
        case MfShape::triangle: return 3;
    }
    return 0;
}

void MembershipFunction::validate() const {
    for (double v : params())
        if (!std::isfinite(v)) throw std::invalid_argument("membership function parameter is not finite");
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian:
            if (!(p[1] > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
            break;
        case MfShape::gbell:
            if (!(p[0] > 0.0) || !(p[1] > 0.0)) throw std::invalid_argument("gbell a and b must be positive");
            break;
        case MfShape::trapezoid:
            if (!(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]))
                throw std::invalid_argument("trapezoid knots must satisfy a <= b <= c <= d");
            break;
        case MfShape::triangle:
            if (!(p[0] <= p[1] && p[1] <= p[2])) throw std::invalid_argument("triangle knots must satisfy a <= b <= c");
            break;
    }
}

double MembershipFunction::eval(double x) const noexcept {
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian: {
            const double u = (x - p[0]) / p[1];
            return std::exp(-0.5 * u * u);
        }
        case MfShape::gbell: {
            const double u = std::abs((x - p[2]) / p[0]);
            return 1.0 / (1.0 + std::pow(u, 2.0 * p[1]));
        }
        case MfShape::trapezoid: {
            if (x < p[0] || x > p[3]) return 0.0;
            if (x >= p[1] && x <= p[2]) return 1.0;
            if (x < p[1]) return (x - p[0]) / (p[1] - p[0]);
            return (p[3] - x) / (p[3] - p[2]);
        }
        case MfShape::triangle: {
            if (x < p[0] || x > p[2]) return 0.0;
            if (x == p[1]) return 1.0;
            if (x < p[1]) return (x - p[0]) / (p[1] - p[0]);
            return (p[2] - x) / (p[2] - p[1]);
        }
    }
    return 0.0;
}

MfGradient MembershipFunction::grad(double x) const noexcept {
    MfGradient g;
    g.size = param_count();
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian: {
            const double diff = x - p[0];
            const double s2 = p[1] * p[1];
            const double mu = std::exp(-0.5 * diff * diff / s2);
            g.d[0] = mu * diff / s2;
            g.d[1] = mu * diff * diff / (s2 * p[1]);
            break;
        }
        case MfShape::gbell: {
            const double u = (x - p[2]) / p[0];
            const double au = std::abs(u);
            if (au == 0.0) break;
            const double z = std::pow(au, 2.0 * p[1]);
            const double mu = 1.0 / (1.0 + z);
            const double mu2 = mu * mu;
            g.d[0] = 2.0 * p[1] * z * mu2 / p[0];
            g.d[1] = -2.0 * std::log(au) * z * mu2;
            g.d[2] = 2.0 * p[1] * z * mu2 / (u * p[0]);
            break;
        }
        case MfShape::trapezoid: {
            if (x <= p[0] || x > p[3]) break;
            if (x <= p[1]) {
                const double w = p[1] - p[0];
                g.d[0] = (x - p[1]) / (w * w);
                g.d[1] = -(x - p[0]) / (w * w);
            } else if (x > p[2]) {
                const double w = p[3] - p[2];
                g.d[2] = (p[3] - x) / (w * w);
                g.d[3] = (x - p[2]) / (w * w);
            }
            break;
        }
        case MfShape::triangle: {
            if (x <= p[0] || x > p[2]) break;
            if (x <= p[1]) {
                const double w = p[1] - p[0];
                g.d[0] = (x - p[1]) / (w * w);
                g.d[1] = -(x - p[0]) / (w * w);
            } else {
                const double w = p[2] - p[1];
                g.d[1] = (p[2] - x) / (w * w);
                g.d[2] = (x - p[1]) / (w * w);
            }
            break;
        }
    }
    return g;
}

double MembershipFunction::dx(double x) const noexcept {
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian: return -grad(x).d[0];
        case MfShape::gbell: return -grad(x).d[2];
        case MfShape::trapezoid:
            if (x <= p[0] || x > p[3]) return 0.0;
            if (x <= p[1]) return 1.0 / (p[1] - p[0]);
            if (x <= p[2]) return 0.0;
            return -1.0 / (p[3] - p[2]);
        case MfShape::triangle:
            if (x <= p[0] || x > p[2]) return 0.0;
            if (x <= p[1]) return 1.0 / (p[1] - p[0]);
            return -1.0 / (p[2] - p[1]);
    }
    return 0.0;
}

double MembershipFunction::center() const noexcept {
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian: return p[0];
        case MfShape::gbell: return p[2];
        case MfShape::trapezoid: return 0.5 * (p[1] + p[2]);
        case MfShape::triangle: return p[1];
    }
    return 0.0;
}

double MembershipFunction::centroid() const noexcept {
    const auto& p = params_;
    switch (shape_) {
        case MfShape::gaussian: return p[0];
        case MfShape::gbell: return p[2];
        case MfShape::triangle: return (p[0] + p[1] + p[2]) / 3.0;
        case MfShape::trapezoid: {
            // Decompose into rising triangle, plateau rectangle, falling triangle.
            const double a1 = 0.5 * (p[1] - p[0]);
            const double a2 = p[2] - p[1];
            const double a3 = 0.5 * (p[3] - p[2]);
            const double area = a1 + a2 + a3;
            if (area == 0.0) return p[1];
            const double m1 = (p[0] + 2.0 * p[1]) / 3.0;
            const double m2 = 0.5 * (p[1] + p[2]);
            const double m3 = (2.0 * p[2] + p[3]) / 3.0;
            return (a1 * m1 + a2 * m2 + a3 * m3) / area;
        }
    }
    return 0.0;
}

MembershipFunction MembershipFunction::with_center(double c) const noexcept {
    MembershipFunction out = *this;
    auto& p = out.params_;
    const double shift = c - center();
    switch (shape_) {
        case MfShape::gaussian: p[0] = c; break;
        case MfShape::gbell: p[2] = c; break;
        case MfShape::trapezoid:
            for (auto& v : p) v += shift;
            break;
        case MfShape::triangle:
            for (std::size_t i = 0; i < 3; ++i) p[i] += shift;
            break;
    }
    return out;
}

MembershipFunction MembershipFunction::projected(double min_width) const {
    MembershipFunction out = *this;
    auto& p = out.params_;
    switch (shape_) {
        case MfShape::gaussian: p[1] = std::max(p[1], min_width); break;
        case MfShape::gbell:
            p[0] = std::max(p[0], min_width);
            p[1] = std::max(p[1], kMinBellExponent);
            break;
        case MfShape::trapezoid: std::sort(p.begin(), p.end()); break;
        case MfShape::triangle: std::sort(p.begin(), p.begin() + 3); break;
    }
    out.validate();
    return out;
}

LinguisticVariable::LinguisticVariable(std::string name, double lo, double hi, std::vector<LabeledMf> mfs)
    : name_(std::move(name)), lo_(lo), hi_(hi), mfs_(std::move(mfs)) {
    if (!(lo_ < hi_)) throw std::invalid_argument("linguistic variable '" + name_ + "': lo must be < hi");
    if (mfs_.empty()) throw std::invalid_argument("linguistic variable '" + name_ + "': needs at least one MF");
    for (const auto& m : mfs_) {
        const double c = m.mf.center();
        if (c < lo_ || c > hi_)
            throw std::invalid_argument("linguistic variable '" + name_ + "': MF '" + m.label + "' center out of range");
    }
}

double LinguisticVariable::clip(double x) const noexcept { return std::clamp(x, lo_, hi_); }

void LinguisticVariable::set_mf(std::size_t i, MembershipFunction mf) { mfs_.at(i).mf = mf; }

LinguisticVariable make_uniform_variable(std::string name, double lo, double hi, std::size_t count, MfShape shape,
                                         std::vector<std::string> labels) {
    if (count == 0) throw std::invalid_argument("make_uniform_variable: count must be >= 1");
    if (!(lo < hi)) throw std::invalid_argument("make_uniform_variable: lo must be < hi");
    const double spacing = count > 1 ? (hi - lo) / static_cast<double>(count - 1) : (hi - lo);
    std::vector<LabeledMf> mfs;
    mfs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double c = count > 1 ? lo + spacing * static_cast<double>(i) : 0.5 * (lo + hi);
        const double half = 0.5 * spacing;
        MembershipFunction mf = [&] {
            switch (shape) {
                case MfShape::gaussian:
                    // exp(-half² / 2σ²) = 0.5 at the midpoint between neighbours.
                    return MembershipFunction::gaussian(c, half / std::sqrt(2.0 * std::log(2.0)));
                case MfShape::gbell: return MembershipFunction::gbell(half, 2.0, c);
                case MfShape::trapezoid:
                    return MembershipFunction::trapezoid(c - 1.5 * half, c - 0.5 * half, c + 0.5 * half,
                                                         c + 1.5 * half);
                case MfShape::triangle: return MembershipFunction::triangle(c - spacing, c, c + spacing);
            }
            throw std::invalid_argument("make_uniform_variable: unknown shape");
        }();
        std::string label = i < labels.size() ? labels[i] : name + "_" + std::to_string(i);
        mfs.push_back({std::move(label), mf});
    }
    return LinguisticVariable(std::move(name), lo, hi, std::move(mfs));
}

std::vector<Antecedent> grid_partition(std::span<const LinguisticVariable> variables) {
    if (variables.empty()) throw std::invalid_argument("grid_partition: empty variable list");
    std::size_t total = 1;
    for (const auto& v : variables) total *= v.size();
    std::vector<Antecedent> out;
    out.reserve(total);
    Antecedent current(variables.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        out.push_back(current);
        for (std::size_t v = variables.size(); v-- > 0;) {
            if (++current[v] < variables[v].size()) break;
            current[v] = 0;
        }
    }
    return out;
}

double firing_strength(std::span<const double> degrees) noexcept {
    double w = 1.0;
    for (double d : degrees) w *= d;
    return w;
}

double firing_strength(std::span<const LinguisticVariable> variables, const Antecedent& antecedent,
                       std::span<const double> x) {
    if (antecedent.size() != variables.size() || x.size() != variables.size())
        throw std::invalid_argument("firing_strength: dimension mismatch");
    double w = 1.0;
    for (std::size_t v = 0; v < variables.size(); ++v) w *= variables[v].degree(antecedent[v], x[v]);
    return w;
}

void MamdaniModel::validate() const {
    if (inputs.empty()) throw std::invalid_argument("mamdani model: no input variables");
    for (const auto& r : rules) {
        if (r.antecedent.size() != inputs.size()) throw std::invalid_argument("mamdani rule: antecedent arity mismatch");
        for (std::size_t v = 0; v < inputs.size(); ++v)
            if (r.antecedent[v] >= inputs[v].size()) throw std::invalid_argument("mamdani rule: MF index out of range");
        if (r.consequent >= output.size()) throw std::invalid_argument("mamdani rule: consequent index out of range");
        if (!(r.weight >= 0.0 && r.weight <= 1.0)) throw std::invalid_argument("mamdani rule: weight outside [0,1]");
    }
}

MamdaniEvaluator::MamdaniEvaluator(const MamdaniModel& model, MamdaniOptions options)
    : model_(&model), options_(options) {
    if (options_.resolution < 2) throw std::invalid_argument("mamdani: resolution must be >= 2");
    model.validate();
    const auto& out = model.output;
    const std::size_t n = options_.resolution;
    grid_.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        grid_[j] = out.lo() + out.width() * static_cast<double>(j) / static_cast<double>(n - 1);
    output_degrees_.resize(out.size() * n);
    for (std::size_t c = 0; c < out.size(); ++c)
        for (std::size_t j = 0; j < n; ++j) output_degrees_[c * n + j] = out[c].mf.eval(grid_[j]);
}

MamdaniResult MamdaniEvaluator::operator()(std::span<const double> x) const {
    const auto& model = *model_;
    if (x.size() != model.inputs.size()) throw std::invalid_argument("mamdani_infer: input arity mismatch");
    const std::size_t n_out = model.output.size();

    // Max activation per consequent set: max_r a_r·μ_c(z) = (max_r a_r)·μ_c(z).
    std::array<double, 16> small{};
    std::vector<double> big;
    double* peak = small.data();
    if (n_out > small.size()) {
        big.assign(n_out, 0.0);
        peak = big.data();
    }
    for (const auto& rule : model.rules) {
        double t = 1.0;
        for (std::size_t v = 0; v < x.size() && t > 0.0; ++v) {
            const double d = model.inputs[v].degree(rule.antecedent[v], x[v]);
            t = options_.tnorm == TNorm::product ? t * d : std::min(t, d);
        }
        const double a = rule.weight * t;
        peak[rule.consequent] = std::max(peak[rule.consequent], a);
    }

    const std::size_t n = grid_.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double agg = 0.0;
        for (std::size_t c = 0; c < n_out; ++c) agg = std::max(agg, peak[c] * output_degrees_[c * n + j]);
        num += grid_[j] * agg;
        den += agg;
    }
    if (den <= 0.0) return {0.5 * (model.output.lo() + model.output.hi()), true};
    return {num / den, false};
}

MamdaniResult mamdani_infer(const MamdaniModel& model, std::span<const double> x, MamdaniOptions options) {
    return MamdaniEvaluator(model, options)(x);
}

}  // namespace tacds
