#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tacds {

enum class MfShape { gaussian, gbell, trapezoid, triangle };

std::string_view to_string(MfShape shape);
MfShape parse_mf_shape(std::string_view name);

/// Gradient of a membership degree with respect to the shape parameters,
/// in the same order as MembershipFunction::params().
struct MfGradient {
    std::array<double, 4> d{};
    std::size_t size = 0;

    double operator[](std::size_t i) const { return d[i]; }
};

/// Parametric fuzzy set.
///
/// Parameter layouts:
///   gaussian   (center, sigma)
///   gbell      (a, b, center)      1 / (1 + |(x - center) / a|^(2b))
///   trapezoid  (a, b, c, d)        feet a, d; shoulders b, c
///   triangle   (a, b, c)           feet a, c; peak b
///
/// Piecewise-linear shapes report the derivative of the segment to the left
/// of x at knots.
class MembershipFunction {
public:
    static MembershipFunction gaussian(double center, double sigma);
    static MembershipFunction gbell(double a, double b, double center);
    static MembershipFunction trapezoid(double a, double b, double c, double d);
    static MembershipFunction triangle(double a, double b, double c);
    static MembershipFunction make(MfShape shape, std::span<const double> params);
    /// Like make(), but repairs invalid parameters with projected() instead of throwing.
    static MembershipFunction make_projected(MfShape shape, std::span<const double> params, double min_width);

    MfShape shape() const noexcept { return shape_; }
    std::size_t param_count() const noexcept;
    std::span<const double> params() const noexcept { return {params_.data(), param_count()}; }

    double eval(double x) const noexcept;
    MfGradient grad(double x) const noexcept;
    /// d(degree)/dx, left-sided at knots.
    double dx(double x) const noexcept;

    /// Location parameter: peak for bell shapes, plateau midpoint for trapezoids.
    double center() const noexcept;
    /// Centre of gravity of the (untruncated) set.
    double centroid() const noexcept;
    /// Copy translated so that center() == c; widths are unchanged.
    MembershipFunction with_center(double c) const noexcept;

    /// Restores shape invariants after an unconstrained parameter step:
    /// widths clamped to >= min_width, knots re-sorted.
    MembershipFunction projected(double min_width) const;

private:
    MembershipFunction(MfShape shape, std::array<double, 4> params) : shape_(shape), params_(params) {}
    void validate() const;

    MfShape shape_ = MfShape::gaussian;
    std::array<double, 4> params_{};
};

inline double mf_eval(const MembershipFunction& mf, double x) { return mf.eval(x); }
inline MfGradient mf_grad(const MembershipFunction& mf, double x) { return mf.grad(x); }

struct LabeledMf {
    std::string label;
    MembershipFunction mf;
};

class LinguisticVariable {
public:
    LinguisticVariable(std::string name, double lo, double hi, std::vector<LabeledMf> mfs);

    const std::string& name() const noexcept { return name_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }
    std::size_t size() const noexcept { return mfs_.size(); }
    const LabeledMf& operator[](std::size_t i) const { return mfs_[i]; }
    const std::vector<LabeledMf>& mfs() const noexcept { return mfs_; }

    double clip(double x) const noexcept;
    /// Degree of membership of the clipped x in MF i.
    double degree(std::size_t i, double x) const noexcept { return mfs_[i].mf.eval(clip(x)); }

    /// Replaces MF i; the caller keeps its center within range.
    void set_mf(std::size_t i, MembershipFunction mf);

private:
    std::string name_;
    double lo_;
    double hi_;
    std::vector<LabeledMf> mfs_;
};

/// Evenly spread MFs over [lo, hi] whose neighbours cross near degree 0.5.
/// Triangles are isosceles.
LinguisticVariable make_uniform_variable(std::string name, double lo, double hi, std::size_t count, MfShape shape,
                                         std::vector<std::string> labels = {});

using Antecedent = std::vector<std::size_t>;

/// Cartesian product of MF indices, lexicographic with the last variable
/// varying fastest.
std::vector<Antecedent> grid_partition(std::span<const LinguisticVariable> variables);

enum class TNorm { product, min };

/// Product T-norm of member degrees.
double firing_strength(std::span<const double> degrees) noexcept;
double firing_strength(std::span<const LinguisticVariable> variables, const Antecedent& antecedent,
                       std::span<const double> x);

struct MamdaniRule {
    Antecedent antecedent;
    std::size_t consequent = 0;
    double weight = 1.0;
};

struct MamdaniModel {
    std::vector<LinguisticVariable> inputs;
    LinguisticVariable output;
    std::vector<MamdaniRule> rules;

    /// Throws std::invalid_argument on out-of-range indices or weights.
    void validate() const;
};

struct MamdaniOptions {
    std::size_t resolution = 201;
    TNorm tnorm = TNorm::product;
};

struct MamdaniResult {
    double value = 0.0;
    bool no_rule_fired = false;
};

/// Product implication, max aggregation, centroid over a uniform grid of
/// the output range. Output MF degrees on the grid are cached, so reuse one
/// evaluator across many inputs.
class MamdaniEvaluator {
public:
    explicit MamdaniEvaluator(const MamdaniModel& model, MamdaniOptions options = {});

    MamdaniResult operator()(std::span<const double> x) const;

private:
    const MamdaniModel* model_;
    MamdaniOptions options_;
    std::vector<double> grid_;
    std::vector<double> output_degrees_;  // [consequent][grid point]
};

MamdaniResult mamdani_infer(const MamdaniModel& model, std::span<const double> x, MamdaniOptions options = {});

}  // namespace tacds
