#pragma once

#include <functional>
#include <vector>

namespace conequant::quad {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
[[nodiscard]] GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
template <typename T>
T integrate(const std::function<T(double)>& f, double a, double b, int panels, const GaussRule& rule)
{
    T sum{};
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        T panel{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
        }
        sum += 0.5 * width * panel;
    }
    return sum;
}

}  // namespace conequant::quad
