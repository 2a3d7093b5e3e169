#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace conequant::jet {

/// Largest number of coordinates a field may depend on.
inline constexpr int kMaxVars = 4;

using Complex = std::complex<double>;

/// Value, gradient and Hessian of a scalar field at one point.
///
/// Only the leading `dim` entries of `grad` and the leading `dim x dim` block
/// of `hess` are meaningful. The Hessian is stored in full and kept symmetric.
template <typename T>
struct Jet {
    int dim = 0;
    int order = 2;
    T value{};
    std::array<T, kMaxVars> grad{};
    std::array<T, kMaxVars * kMaxVars> hess{};

    [[nodiscard]] T d(int i) const { return grad[static_cast<std::size_t>(i)]; }
    [[nodiscard]] T dd(int i, int j) const
    {
        return hess[static_cast<std::size_t>(i * kMaxVars + j)];
    }
    T& dd_ref(int i, int j) { return hess[static_cast<std::size_t>(i * kMaxVars + j)]; }
};

using RealJet = Jet<double>;
using ComplexJet = Jet<Complex>;

namespace detail {

template <typename T>
Jet<T> constant_jet(int dim, int order, T v)
{
    Jet<T> j;
    j.dim = dim;
    j.order = order;
    j.value = v;
    return j;
}

template <typename T>
Jet<T> variable_jet(int dim, int order, int index, double x)
{
    Jet<T> j = constant_jet<T>(dim, order, T(x));
    if (order >= 1) {
        j.grad[static_cast<std::size_t>(index)] = T(1.0);
    }
    return j;
}

template <typename T>
Jet<T> add(const Jet<T>& a, const Jet<T>& b, double sign = 1.0)
{
    Jet<T> out = a;
    out.value = a.value + sign * b.value;
    for (int i = 0; i < a.dim; ++i) {
        out.grad[i] = a.grad[i] + sign * b.grad[i];
        for (int j = 0; j < a.dim; ++j) {
            out.dd_ref(i, j) = a.dd(i, j) + sign * b.dd(i, j);
        }
    }
    return out;
}

template <typename T>
Jet<T> scale(const Jet<T>& a, T s)
{
    Jet<T> out = a;
    out.value *= s;
    for (int i = 0; i < a.dim; ++i) {
        out.grad[i] *= s;
        for (int j = 0; j < a.dim; ++j) {
            out.dd_ref(i, j) *= s;
        }
    }
    return out;
}

template <typename T>
Jet<T> mul(const Jet<T>& a, const Jet<T>& b)
{
    Jet<T> out = a;
    out.value = a.value * b.value;
    for (int i = 0; i < a.dim; ++i) {
        out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    }
    if (a.order >= 2) {
        for (int i = 0; i < a.dim; ++i) {
            for (int j = i; j < a.dim; ++j) {
                const T h = a.dd(i, j) * b.value + a.grad[i] * b.grad[j] +
                            a.grad[j] * b.grad[i] + a.value * b.dd(i, j);
                out.dd_ref(i, j) = h;
                out.dd_ref(j, i) = h;
            }
        }
    }
    return out;
}

/// f(g) given f, f', f'' evaluated at g.value.
template <typename T>
Jet<T> chain(const Jet<T>& g, T f0, T f1, T f2)
{
    Jet<T> out = g;
    out.value = f0;
    for (int i = 0; i < g.dim; ++i) {
        out.grad[i] = f1 * g.grad[i];
    }
    if (g.order >= 2) {
        for (int i = 0; i < g.dim; ++i) {
            for (int j = i; j < g.dim; ++j) {
                const T h = f2 * g.grad[i] * g.grad[j] + f1 * g.dd(i, j);
                out.dd_ref(i, j) = h;
                out.dd_ref(j, i) = h;
            }
        }
    }
    return out;
}

}  // namespace detail

}  // namespace conequant::jet
