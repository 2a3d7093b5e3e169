#include "conequant/field.hpp"

#include "conequant/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

namespace conequant::jet {

namespace detail {

struct FieldAccess {
    static const std::shared_ptr<const Node>& node(const ScalarField& f) { return f.node_; }
    static ScalarField make(std::shared_ptr<const Node> n, int arity)
    {
        return ScalarField(std::move(n), arity);
    }
};

enum class Op {
    Const,
    Var,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    PowConst,
    Pow,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Sign,
    Bessel,
    Laguerre,
};

struct Node {
    Op op = Op::Const;
    Complex c{};
    double param = 0.0;  // exponent, Bessel order or Laguerre mu
    int index = 0;       // coordinate index or Laguerre degree
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

}  // namespace detail

using detail::Node;
using detail::Op;

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(Complex c)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->c = c;
    return n;
}

bool is_const(const Node& n) { return n.op == Op::Const; }
bool is_const_value(const Node& n, double v) { return n.op == Op::Const && n.c == Complex(v); }

int combine_arity(int a, int b)
{
    if (a != 0 && b != 0 && a != b) {
        throw std::invalid_argument("cannot combine fields of arity " + std::to_string(a) +
                                    " and " + std::to_string(b));
    }
    return std::max(a, b);
}

std::string format_number(Complex c)
{
    std::ostringstream os;
    os.precision(12);
    if (c.imag() == 0.0) {
        os << c.real();
    } else {
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    return os.str();
}

std::string render(const Node& n)
{
    auto unary = [&](const char* name) { return std::string(name) + "(" + render(*n.a) + ")"; };
    auto binary = [&](const char* sym) {
        return "(" + render(*n.a) + " " + sym + " " + render(*n.b) + ")";
    };
    switch (n.op) {
    case Op::Const: return format_number(n.c);
    case Op::Var: return "x" + std::to_string(n.index);
    case Op::Neg: return "-" + render(*n.a);
    case Op::Add: return binary("+");
    case Op::Sub: return binary("-");
    case Op::Mul: return binary("*");
    case Op::Div: return binary("/");
    case Op::PowConst: return "pow(" + render(*n.a) + ", " + format_number(n.param) + ")";
    case Op::Pow: return "pow(" + render(*n.a) + ", " + render(*n.b) + ")";
    case Op::Sin: return unary("sin");
    case Op::Cos: return unary("cos");
    case Op::Tan: return unary("tan");
    case Op::Exp: return unary("exp");
    case Op::Log: return unary("log");
    case Op::Sqrt: return unary("sqrt");
    case Op::Abs: return unary("abs");
    case Op::Sign: return unary("sign");
    case Op::Bessel:
        return "J_" + format_number(n.param) + "(" + render(*n.a) + ")";
    case Op::Laguerre:
        return "L_" + std::to_string(n.index) + "^" + format_number(n.param) + "(" +
               render(*n.a) + ")";
    }
    return "?";
}

[[noreturn]] void fail(const std::string& what, const Node& n)
{
    throw EvaluationError(what, render(n));
}

template <typename T>
struct EvalContext {
    std::span<const double> x;
    int dim;
    int order;
};

template <typename T>
double real_argument(T v, const Node& n)
{
    if constexpr (std::is_same_v<T, double>) {
        return v;
    } else {
        if (v.imag() != 0.0) {
            fail("real argument required", n);
        }
        return v.real();
    }
}

template <typename T>
bool is_zero(T v)
{
    return v == T(0.0);
}

template <typename T>
Jet<T> eval_node(const Node& n, const EvalContext<T>& ctx);

template <typename T>
Jet<T> eval_unary(const Node& n, const EvalContext<T>& ctx)
{
    const Jet<T> g = eval_node(*n.a, ctx);
    const T v = g.value;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tan;
    switch (n.op) {
    case Op::Neg: return detail::scale(g, T(-1.0));
    case Op::Sin: return detail::chain(g, sin(v), cos(v), -sin(v));
    case Op::Cos: return detail::chain(g, cos(v), -sin(v), -cos(v));
    case Op::Tan: {
        const T c = cos(v);
        if (is_zero(c)) {
            fail("tan at a pole", n);
        }
        const T t = tan(v);
        const T sec2 = T(1.0) + t * t;
        return detail::chain(g, t, sec2, T(2.0) * t * sec2);
    }
    case Op::Exp: {
        const T e = exp(v);
        return detail::chain(g, e, e, e);
    }
    case Op::Log: {
        if constexpr (std::is_same_v<T, double>) {
            if (!(v > 0.0)) {
                fail("log of a non-positive value", n);
            }
        } else {
            if (is_zero(v)) {
                fail("log of zero", n);
            }
        }
        return detail::chain(g, log(v), T(1.0) / v, T(-1.0) / (v * v));
    }
    case Op::Sqrt: {
        if constexpr (std::is_same_v<T, double>) {
            if (v < 0.0) {
                fail("sqrt of a negative value", n);
            }
        }
        if (is_zero(v) && ctx.order >= 1) {
            fail("sqrt differentiated at zero", n);
        }
        const T s = sqrt(v);
        if (is_zero(v)) {
            return detail::chain(g, s, T(0.0), T(0.0));
        }
        return detail::chain(g, s, T(0.5) / s, T(-0.25) / (s * v));
    }
    case Op::Abs:
    case Op::Sign: {
        const double re = real_argument(v, n);
        if (re == 0.0) {
            fail(n.op == Op::Abs ? "abs at zero" : "sign at zero", n);
        }
        const double s = re > 0.0 ? 1.0 : -1.0;
        if (n.op == Op::Sign) {
            return detail::constant_jet<T>(ctx.dim, ctx.order, T(s));
        }
        return detail::scale(g, T(s));
    }
    case Op::PowConst: {
        const double p = n.param;
        if (p == 0.0) {
            return detail::constant_jet<T>(ctx.dim, ctx.order, T(1.0));
        }
        const bool integer_power = p == std::floor(p);
        if constexpr (std::is_same_v<T, double>) {
            if (v < 0.0 && !integer_power) {
                fail("non-integer power of a negative value", n);
            }
        }
        if (is_zero(v) && !(integer_power && p > 0.0)) {
            fail("power singular at zero", n);
        }
        if (is_zero(v)) {
            auto ipow = [](double base, double e) { return e < 0.0 ? 0.0 : std::pow(base, e); };
            return detail::chain(g, T(ipow(0.0, p)), T(p * ipow(0.0, p - 1.0)),
                                 T(p * (p - 1.0) * ipow(0.0, p - 2.0)));
        }
        using std::pow;
        const T f0 = integer_power ? T(pow(v, static_cast<int>(p))) : T(pow(v, p));
        return detail::chain(g, f0, T(p) * f0 / v, T(p * (p - 1.0)) * f0 / (v * v));
    }
    case Op::Bessel: {
        const double arg = real_argument(v, n);
        if (arg < 0.0) {
            fail("Bessel function of a negative argument", n);
        }
        if (arg == 0.0 && ctx.order >= 1) {
            fail("Bessel function differentiated at zero", n);
        }
        const special::BesselOrder nu(n.param);
        if (ctx.order == 0) {
            return detail::constant_jet<T>(ctx.dim, 0, T(special::bessel_j(nu, arg)));
        }
        const auto d = special::bessel_j_derivatives(nu, arg);
        return detail::chain(g, T(d.value), T(d.first), T(d.second));
    }
    case Op::Laguerre: {
        const double arg = real_argument(v, n);
        const auto d = special::laguerre_derivatives(special::LaguerreIndex(n.index, n.param), arg);
        return detail::chain(g, T(d.value), T(d.first), T(d.second));
    }
    default: break;
    }
    fail("unexpected node", n);
}

template <typename T>
Jet<T> eval_node(const Node& n, const EvalContext<T>& ctx)
{
    switch (n.op) {
    case Op::Const:
        if constexpr (std::is_same_v<T, double>) {
            if (n.c.imag() != 0.0) {
                fail("complex constant in a real evaluation", n);
            }
            return detail::constant_jet<T>(ctx.dim, ctx.order, n.c.real());
        } else {
            return detail::constant_jet<T>(ctx.dim, ctx.order, n.c);
        }
    case Op::Var:
        return detail::variable_jet<T>(ctx.dim, ctx.order, n.index,
                                       ctx.x[static_cast<std::size_t>(n.index)]);
    case Op::Add: return detail::add(eval_node(*n.a, ctx), eval_node(*n.b, ctx));
    case Op::Sub: return detail::add(eval_node(*n.a, ctx), eval_node(*n.b, ctx), -1.0);
    case Op::Mul: return detail::mul(eval_node(*n.a, ctx), eval_node(*n.b, ctx));
    case Op::Div: {
        const Jet<T> den = eval_node(*n.b, ctx);
        if (is_zero(den.value)) {
            fail("division by zero", n);
        }
        const T inv = T(1.0) / den.value;
        const Jet<T> recip = detail::chain(den, inv, -inv * inv, T(2.0) * inv * inv * inv);
        return detail::mul(eval_node(*n.a, ctx), recip);
    }
    case Op::Pow: {
        // a^b = exp(b log a)
        const Jet<T> base = eval_node(*n.a, ctx);
        if constexpr (std::is_same_v<T, double>) {
            if (!(base.value > 0.0)) {
                fail("general power of a non-positive base", n);
            }
        } else {
            if (is_zero(base.value)) {
                fail("general power of zero", n);
            }
        }
        using std::exp;
        using std::log;
        const T lv = log(base.value);
        const T inv = T(1.0) / base.value;
        const Jet<T> lg = detail::chain(base, lv, inv, -inv * inv);
        const Jet<T> prod = detail::mul(eval_node(*n.b, ctx), lg);
        const T e = exp(prod.value);
        return detail::chain(prod, e, e, e);
    }
    default: return eval_unary(n, ctx);
    }
}

template <typename T>
Jet<T> evaluate(const ScalarField& f, std::span<const double> x, int order)
{
    if (order < 0 || order > 2) {
        throw std::invalid_argument("jet order must be 0, 1 or 2");
    }
    if (f.arity() != 0 && static_cast<int>(x.size()) != f.arity()) {
        throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                    " does not match field arity " +
                                    std::to_string(f.arity()));
    }
    if (static_cast<int>(x.size()) > kMaxVars) {
        throw std::invalid_argument("too many coordinates for a jet");
    }
    const EvalContext<T> ctx{x, static_cast<int>(x.size()), order};
    return eval_node(f.node(), ctx);
}

}  // namespace

EvaluationError::EvaluationError(const std::string& what, std::string subexpression)
    : std::domain_error(what + " in " + subexpression), subexpression_(std::move(subexpression))
{
}

using detail::FieldAccess;

namespace {

NodePtr node_of(const ScalarField& f) { return FieldAccess::node(f); }

ScalarField wrap(NodePtr n, int arity) { return FieldAccess::make(std::move(n), arity); }

ScalarField make_binary(Op op, const ScalarField& a, const ScalarField& b, int arity)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = node_of(a);
    n->b = node_of(b);
    return wrap(std::move(n), arity);
}

ScalarField make_unary(Op op, const ScalarField& a, double param = 0.0, int index = 0)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = node_of(a);
    n->param = param;
    n->index = index;
    return wrap(std::move(n), a.arity());
}

}  // namespace

ScalarField::ScalarField() : ScalarField(0.0) {}

ScalarField::ScalarField(double c) : node_(make_const(Complex(c))), arity_(0) {}

ScalarField::ScalarField(Complex c) : node_(make_const(c)), arity_(0) {}

ScalarField::ScalarField(std::shared_ptr<const detail::Node> node, int arity)
    : node_(std::move(node)), arity_(arity)
{
}

ScalarField ScalarField::coordinate(int index, int arity)
{
    if (arity < 1 || arity > kMaxVars || index < 0 || index >= arity) {
        throw std::invalid_argument("invalid coordinate index/arity");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->index = index;
    return wrap(std::move(n), arity);
}

bool ScalarField::is_zero() const { return is_const_value(*node_, 0.0); }

bool ScalarField::is_real() const
{
    std::vector<const Node*> stack{node_.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (n->op == Op::Const && n->c.imag() != 0.0) {
            return false;
        }
        if (n->a) {
            stack.push_back(n->a.get());
        }
        if (n->b) {
            stack.push_back(n->b.get());
        }
    }
    return true;
}

std::string ScalarField::to_string() const { return render(*node_); }

// The builders fold constant operands and the neutral elements 0 and 1.
// No other rewriting takes place.
ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    const int arity = combine_arity(a.arity(), b.arity());
    if (is_const(a.node()) && is_const(b.node())) {
        return ScalarField(a.node().c + b.node().c);
    }
    if (a.is_zero()) {
        return wrap(node_of(b), arity);
    }
    if (b.is_zero()) {
        return wrap(node_of(a), arity);
    }
    return make_binary(Op::Add, a, b, arity);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    const int arity = combine_arity(a.arity(), b.arity());
    if (is_const(a.node()) && is_const(b.node())) {
        return ScalarField(a.node().c - b.node().c);
    }
    if (b.is_zero()) {
        return wrap(node_of(a), arity);
    }
    if (a.is_zero()) {
        return wrap(node_of(-b), arity);
    }
    return make_binary(Op::Sub, a, b, arity);
}

ScalarField operator*(const ScalarField& a, const ScalarField& b)
{
    const int arity = combine_arity(a.arity(), b.arity());
    if (is_const(a.node()) && is_const(b.node())) {
        return ScalarField(a.node().c * b.node().c);
    }
    if (a.is_zero() || b.is_zero()) {
        return ScalarField(0.0);
    }
    if (is_const_value(a.node(), 1.0)) {
        return wrap(node_of(b), arity);
    }
    if (is_const_value(b.node(), 1.0)) {
        return wrap(node_of(a), arity);
    }
    return make_binary(Op::Mul, a, b, arity);
}

ScalarField operator/(const ScalarField& a, const ScalarField& b)
{
    const int arity = combine_arity(a.arity(), b.arity());
    if (is_const(a.node()) && is_const(b.node()) && b.node().c != Complex(0.0)) {
        return ScalarField(a.node().c / b.node().c);
    }
    if (a.is_zero() && !b.is_zero()) {
        return ScalarField(0.0);
    }
    if (is_const_value(b.node(), 1.0)) {
        return wrap(node_of(a), arity);
    }
    return make_binary(Op::Div, a, b, arity);
}

ScalarField operator-(const ScalarField& a)
{
    if (is_const(a.node())) {
        return ScalarField(-a.node().c);
    }
    return make_unary(Op::Neg, a);
}

ScalarField sin(const ScalarField& a)
{
    if (is_const(a.node())) {
        return ScalarField(std::sin(a.node().c));
    }
    return make_unary(Op::Sin, a);
}

ScalarField cos(const ScalarField& a)
{
    if (is_const(a.node())) {
        return ScalarField(std::cos(a.node().c));
    }
    return make_unary(Op::Cos, a);
}

ScalarField tan(const ScalarField& a) { return make_unary(Op::Tan, a); }
ScalarField exp(const ScalarField& a) { return make_unary(Op::Exp, a); }
ScalarField log(const ScalarField& a) { return make_unary(Op::Log, a); }
ScalarField sqrt(const ScalarField& a) { return make_unary(Op::Sqrt, a); }
ScalarField abs(const ScalarField& a) { return make_unary(Op::Abs, a); }
ScalarField sign(const ScalarField& a) { return make_unary(Op::Sign, a); }

ScalarField pow(const ScalarField& a, double exponent)
{
    if (exponent == 0.0) {
        return ScalarField(1.0);
    }
    if (exponent == 1.0) {
        return a;
    }
    return make_unary(Op::PowConst, a, exponent);
}

ScalarField pow(const ScalarField& a, const ScalarField& exponent)
{
    if (is_const(exponent.node()) && exponent.node().c.imag() == 0.0) {
        return pow(a, exponent.node().c.real());
    }
    return make_binary(Op::Pow, a, exponent, combine_arity(a.arity(), exponent.arity()));
}

ScalarField bessel_j(double nu, const ScalarField& argument)
{
    (void)special::BesselOrder(nu);
    return make_unary(Op::Bessel, argument, nu);
}

ScalarField laguerre(int n, double mu, const ScalarField& argument)
{
    (void)special::LaguerreIndex(n, mu);
    return make_unary(Op::Laguerre, argument, mu, n);
}

ScalarField diff(const ScalarField& f, int index)
{
    const Node& n = f.node();
    const int arity = f.arity();
    auto sub = [&](const NodePtr& p) { return wrap(p, arity); };
    switch (n.op) {
    case Op::Const: return ScalarField(0.0);
    case Op::Var: return ScalarField(n.index == index ? 1.0 : 0.0);
    case Op::Neg: return -diff(sub(n.a), index);
    case Op::Add: return diff(sub(n.a), index) + diff(sub(n.b), index);
    case Op::Sub: return diff(sub(n.a), index) - diff(sub(n.b), index);
    case Op::Mul: {
        const ScalarField a = sub(n.a);
        const ScalarField b = sub(n.b);
        return diff(a, index) * b + a * diff(b, index);
    }
    case Op::Div: {
        const ScalarField a = sub(n.a);
        const ScalarField b = sub(n.b);
        return diff(a, index) / b - a * diff(b, index) / (b * b);
    }
    case Op::PowConst: {
        const ScalarField a = sub(n.a);
        return ScalarField(n.param) * pow(a, n.param - 1.0) * diff(a, index);
    }
    case Op::Pow: {
        const ScalarField a = sub(n.a);
        const ScalarField b = sub(n.b);
        return f * (diff(b, index) * log(a) + b * diff(a, index) / a);
    }
    case Op::Sin: return cos(sub(n.a)) * diff(sub(n.a), index);
    case Op::Cos: return -sin(sub(n.a)) * diff(sub(n.a), index);
    case Op::Tan: {
        const ScalarField t = f;
        return (ScalarField(1.0) + t * t) * diff(sub(n.a), index);
    }
    case Op::Exp: return f * diff(sub(n.a), index);
    case Op::Log: return diff(sub(n.a), index) / sub(n.a);
    case Op::Sqrt: return diff(sub(n.a), index) / (ScalarField(2.0) * f);
    case Op::Abs: return sign(sub(n.a)) * diff(sub(n.a), index);
    case Op::Sign: return ScalarField(0.0);
    case Op::Bessel: {
        const ScalarField a = sub(n.a);
        const ScalarField da = diff(a, index);
        if (da.is_zero()) {
            return ScalarField(0.0);
        }
        // J_nu' = (nu/x) J_nu - J_{nu+1}
        ScalarField outer = -bessel_j(n.param + 1.0, a);
        if (n.param != 0.0) {
            outer = ScalarField(n.param) / a * f + outer;
        }
        return outer * da;
    }
    case Op::Laguerre: {
        if (n.index == 0) {
            return ScalarField(0.0);
        }
        const ScalarField a = sub(n.a);
        return -laguerre(n.index - 1, n.param + 1.0, a) * diff(a, index);
    }
    }
    return ScalarField(0.0);
}

RealJet eval_jet(const ScalarField& f, std::span<const double> x, int order)
{
    return evaluate<double>(f, x, order);
}

ComplexJet eval_jet_complex(const ScalarField& f, std::span<const double> x, int order)
{
    return evaluate<Complex>(f, x, order);
}

double fd_check(const ScalarField& f, std::span<const double> x, double step)
{
    if (!(step > 0.0)) {
        throw std::invalid_argument("fd_check: step must be positive");
    }
    const int n = static_cast<int>(x.size());
    const ComplexJet center = eval_jet_complex(f, x, 2);
    std::vector<double> shifted(x.begin(), x.end());
    double worst = 0.0;
    auto record = [&worst](Complex exact, Complex approx) {
        worst = std::max(worst, std::abs(exact - approx) / std::max(1.0, std::abs(approx)));
    };
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        shifted[ui] = x[ui] + step;
        const ComplexJet plus = eval_jet_complex(f, shifted, 1);
        shifted[ui] = x[ui] - step;
        const ComplexJet minus = eval_jet_complex(f, shifted, 1);
        shifted[ui] = x[ui];
        record(center.d(i), (plus.value - minus.value) / (2.0 * step));
        for (int j = 0; j < n; ++j) {
            record(center.dd(j, i), (plus.d(j) - minus.d(j)) / (2.0 * step));
        }
    }
    return worst;
}

}  // namespace conequant::jet
