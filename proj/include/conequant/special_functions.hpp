#pragma once

#include <stdexcept>
#include <string>

namespace conequant::special {

/// Raised when the gamma function is evaluated at a nonpositive integer.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Order of a Bessel function of the first kind; must be finite and >= 0.
class BesselOrder {
public:
    explicit BesselOrder(double nu);
    [[nodiscard]] double value() const noexcept { return nu_; }

private:
    double nu_;
};

/// Degree n and (real) upper parameter mu of a generalized Laguerre polynomial.
class LaguerreIndex {
public:
    LaguerreIndex(int n, double mu);
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double mu() const noexcept { return mu_; }

private:
    int n_;
    double mu_;
};

/// Value plus first and second derivative with respect to the argument.
struct Derivatives2 {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// Gamma function. Lanczos approximation for x >= 1/2, reflection below.
[[nodiscard]] double gamma_fn(double x);

/// Bessel function of the first kind J_nu(x) for x >= 0.
///
/// The ascending series (with compensated summation) is used for x <= 12.
/// Above that the value is obtained by downward recurrence in the order,
/// normalized against the Hankel asymptotic expansion at the fractional
/// orders {nu}, {nu}+1, which is accurate there.
[[nodiscard]] double bessel_j(BesselOrder nu, double x);

/// J_nu, J_nu' and J_nu'' at x > 0 (x = 0 allowed only for the value).
[[nodiscard]] Derivatives2 bessel_j_derivatives(BesselOrder nu, double x);

/// Generalized Laguerre polynomial L_n^mu(x) by upward three-term recurrence.
[[nodiscard]] double laguerre(LaguerreIndex idx, double x);

/// L_n^mu and its first two derivatives, using d/dx L_n^mu = -L_{n-1}^{mu+1}.
[[nodiscard]] Derivatives2 laguerre_derivatives(LaguerreIndex idx, double x);

}  // namespace conequant::special
