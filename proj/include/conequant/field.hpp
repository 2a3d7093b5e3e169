#pragma once

#include "conequant/jet.hpp"

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace conequant::jet {

/// Domain violation during evaluation (division by zero, log of a
/// non-positive value, abs at zero, ...). `subexpression()` names the node
/// that failed.
class EvaluationError : public std::domain_error {
public:
    EvaluationError(const std::string& what, std::string subexpression);
    [[nodiscard]] const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

namespace detail {
struct Node;
struct FieldAccess;
}

/// Closed-form scalar expression over a fixed number of coordinates.
///
/// Fields are immutable and share structure, so copying is cheap and they may
/// be evaluated from any thread. Constants have arity 0 and combine with
/// fields of any arity; combining two fields of different nonzero arity is an
/// error.
class ScalarField {
public:
    ScalarField();
    ScalarField(double c);  // NOLINT(google-explicit-constructor)
    ScalarField(Complex c); // NOLINT(google-explicit-constructor)

    /// Projection onto coordinate `index` of an `arity`-dimensional chart.
    static ScalarField coordinate(int index, int arity);

    [[nodiscard]] int arity() const noexcept { return arity_; }
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool is_real() const;
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] const detail::Node& node() const { return *node_; }

private:
    friend struct detail::FieldAccess;
    ScalarField(std::shared_ptr<const detail::Node> node, int arity);

    std::shared_ptr<const detail::Node> node_;
    int arity_ = 0;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);

ScalarField sin(const ScalarField& a);
ScalarField cos(const ScalarField& a);
ScalarField tan(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField sqrt(const ScalarField& a);
/// |a|; its derivative is sign(a), and both fail to evaluate at a = 0.
ScalarField abs(const ScalarField& a);
ScalarField sign(const ScalarField& a);
ScalarField pow(const ScalarField& a, double exponent);
ScalarField pow(const ScalarField& a, const ScalarField& exponent);
/// J_nu(argument); the argument must evaluate to a nonnegative real.
ScalarField bessel_j(double nu, const ScalarField& argument);
/// L_n^mu(argument); the argument must evaluate to a real.
ScalarField laguerre(int n, double mu, const ScalarField& argument);

/// Symbolic partial derivative with respect to coordinate `index`.
ScalarField diff(const ScalarField& f, int index);

/// Value and partials up to `order` (0, 1 or 2) at `x`, over the reals.
/// Throws EvaluationError if the field holds a non-real constant.
[[nodiscard]] RealJet eval_jet(const ScalarField& f, std::span<const double> x, int order = 2);

/// Same as eval_jet but over the complex numbers.
[[nodiscard]] ComplexJet eval_jet_complex(const ScalarField& f, std::span<const double> x,
                                          int order = 2);

/// Maximum relative deviation between jet derivatives and central finite
/// differences: gradients against differences of values, Hessians against
/// differences of jet gradients. Deviations are measured as
/// |jet - fd| / max(1, |fd|).
[[nodiscard]] double fd_check(const ScalarField& f, std::span<const double> x, double step);

}  // namespace conequant::jet
