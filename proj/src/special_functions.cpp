#include "conequant/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace conequant::special {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 12.0;
constexpr int kMaxSeriesTerms = 200;

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double bessel_series(double nu, double x)
{
    if (x == 0.0) {
        return nu == 0.0 ? 1.0 : 0.0;
    }
    const double half = 0.5 * x;
    const double q = half * half;
    double term = std::pow(half, nu) / gamma_fn(nu + 1.0);
    double sum = term;
    double carry = 0.0;
    for (int m = 1; m < kMaxSeriesTerms; ++m) {
        term *= -q / (m * (m + nu));
        // Kahan summation
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            return sum;
        }
    }
    throw std::runtime_error("bessel_j: series did not converge");
}

// Hankel asymptotic expansion, valid for x well above the order; used only
// for orders in [0, 2) and x > kSeriesLimit.
double bessel_hankel(double nu, double x)
{
    const double mu4 = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = std::abs(term);
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu4 - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(term);
        if (mag > last) {
            break;
        }
        last = mag;
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        default: p += term; break;
        }
        if (mag < 1e-17) {
            break;
        }
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_large(double nu, double x)
{
    const double base = nu - std::floor(nu);
    const int target = static_cast<int>(std::floor(nu));
    const double top = std::max(nu, x);
    const int start = target + static_cast<int>(std::max(x, nu)) + 30 +
                      static_cast<int>(std::sqrt(40.0 * top));

    double above = 0.0;
    double current = 1e-30;
    double at_target = target == start ? current : 0.0;
    double at_zero = 0.0;
    double at_one = 0.0;
    for (int m = start; m > 0; --m) {
        const double below = 2.0 * (base + m) / x * current - above;
        above = current;
        current = below;
        if (std::abs(current) > 1e200) {
            current *= 1e-200;
            above *= 1e-200;
            at_target *= 1e-200;
        }
        if (m - 1 == target) {
            at_target = current;
        }
        if (m == 1) {
            at_one = above;
            at_zero = current;
        }
    }
    const double j0 = bessel_hankel(base, x);
    const double j1 = bessel_hankel(base + 1.0, x);
    const double scale = (j0 * at_zero + j1 * at_one) / (at_zero * at_zero + at_one * at_one);
    return scale * at_target;
}

double laguerre_raw(int n, double mu, double x)
{
    if (n < 0) {
        return 0.0;
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = 1.0 + mu - x;
    for (int j = 1; j < n; ++j) {
        const double next = ((2.0 * j + 1.0 + mu - x) * cur - (j + mu) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu)
{
    if (!std::isfinite(nu) || nu < 0.0) {
        throw std::invalid_argument("Bessel order must be finite and nonnegative");
    }
}

LaguerreIndex::LaguerreIndex(int n, double mu) : n_(n), mu_(mu)
{
    if (n < 0) {
        throw std::invalid_argument("Laguerre degree must be nonnegative");
    }
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("Laguerre parameter must be finite");
    }
}

double gamma_fn(double x)
{
    if (is_nonpositive_integer(x)) {
        throw PoleError("gamma_fn: pole at " + std::to_string(x));
    }
    if (x < 0.5) {
        return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        a += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    // split the power to keep t^(z+1/2) finite up to x ~ 170
    const double half_pow = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * kPi) * half_pow * (half_pow * std::exp(-t)) * a;
}

double bessel_j(BesselOrder order, double x)
{
    if (!(x >= 0.0)) {
        throw std::domain_error("bessel_j: argument must be >= 0");
    }
    const double nu = order.value();
    if (x <= kSeriesLimit) {
        return bessel_series(nu, x);
    }
    return bessel_large(nu, x);
}

Derivatives2 bessel_j_derivatives(BesselOrder order, double x)
{
    const double nu = order.value();
    Derivatives2 d;
    d.value = bessel_j(order, x);
    if (x == 0.0) {
        throw std::domain_error("bessel_j_derivatives: derivatives requested at x = 0");
    }
    const double next = bessel_j(BesselOrder(nu + 1.0), x);
    d.first = nu / x * d.value - next;
    d.second = -d.first / x - (1.0 - nu * nu / (x * x)) * d.value;
    return d;
}

double laguerre(LaguerreIndex idx, double x) { return laguerre_raw(idx.n(), idx.mu(), x); }

Derivatives2 laguerre_derivatives(LaguerreIndex idx, double x)
{
    const int n = idx.n();
    const double mu = idx.mu();
    return {laguerre_raw(n, mu, x), -laguerre_raw(n - 1, mu + 1.0, x),
            laguerre_raw(n - 2, mu + 2.0, x)};
}

}  // namespace conequant::special
