#include "conequant/cone_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conequant::cone {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_angle(double phi)
{
    double a = std::fmod(phi, kTwoPi);
    if (a < 0.0) {
        a += kTwoPi;
    }
    return a >= kTwoPi ? 0.0 : a;
}

using Vec = std::array<double, 4>;  // r, phi, rdot, phidot

Vec rhs(const ModelParams& params, const Vec& y)
{
    const State s{0.0, y[0], y[1], y[2], y[3]};
    const Acceleration a = eom(params, s);
    return {y[2], y[3], a.rddot, a.phiddot};
}

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms)
{
    Vec out = y;
    for (const auto& [c, k] : terms) {
        for (int i = 0; i < 4; ++i) {
            out[i] += h * c * (*k)[i];
        }
    }
    return out;
}

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol)
{
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        sum += (err[i] / sk) * (err[i] / sk);
    }
    return std::sqrt(sum / 4.0);
}

// Hairer's starting step heuristic for a method of order 5.
double initial_step(const ModelParams& params, const Vec& y0, const Vec& f0, double span,
                    double rtol, double atol)
{
    double d0 = 0.0;
    double d1 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        d0 += (y0[i] / sk) * (y0[i] / sk);
        d1 += (f0[i] / sk) * (f0[i] / sk);
    }
    d0 = std::sqrt(d0 / 4.0);
    d1 = std::sqrt(d1 / 4.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec y1 = axpy(y0, h0, {{1.0, &f0}});
    const Vec f1 = rhs(params, y1);
    double d2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    d2 = std::sqrt(d2 / 4.0) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

ModelParams::ModelParams(Model model, double k, double omega) : model_(model), k_(k), omega_(omega)
{
    if (!(k > 0.0 && k < 1.0)) {
        throw std::invalid_argument("k must lie in (0, 1)");
    }
    if (model == Model::kHarmonic && !(omega > 0.0 && std::isfinite(omega))) {
        throw std::invalid_argument("omega must be positive");
    }
}

ModelParams ModelParams::free(double k) { return {Model::kFree, k, 0.0}; }

ModelParams ModelParams::harmonic(double k, double omega) { return {Model::kHarmonic, k, omega}; }

State State::reduced() const
{
    State s = *this;
    s.phi = reduce_angle(phi);
    return s;
}

double lagrangian(const ModelParams& params, const State& s)
{
    const double k = params.k();
    const double kinetic = 0.5 * (s.rdot * s.rdot + k * k * s.r * s.r * s.phidot * s.phidot);
    const double w = params.omega();
    return params.harmonic() ? kinetic - 0.5 * w * w * s.r * s.r : kinetic;
}

Acceleration eom(const ModelParams& params, const State& s)
{
    if (s.r == 0.0) {
        throw VertexError("equations of motion evaluated at the vertex r = 0");
    }
    const double k = params.k();
    double rddot = k * k * s.r * s.phidot * s.phidot;
    if (params.harmonic()) {
        rddot -= params.omega() * params.omega() * s.r;
    }
    return {rddot, -2.0 * s.rdot * s.phidot / s.r};
}

PlanarState linearize(double k, const State& s)
{
    if (s.r == 0.0) {
        throw VertexError("linearize: r = 0");
    }
    const double c = std::cos(k * s.phi);
    const double sn = std::sin(k * s.phi);
    return {s.r * c, s.r * sn, s.rdot * c - s.r * k * s.phidot * sn,
            s.rdot * sn + s.r * k * s.phidot * c};
}

PolarPoint inverse_linearize(double k, double u, double v)
{
    if (u == 0.0 && v == 0.0) {
        throw VertexError("inverse_linearize: (u, v) = (0, 0)");
    }
    return {std::hypot(u, v), reduce_angle(std::atan2(v, u) / k)};
}

std::vector<FirstIntegral> noether_integrals(const ModelParams& params)
{
    const double k = params.k();
    const double w = params.omega();
    auto planar = [k](const State& s) { return linearize(k, s); };
    auto angular = [k](const State& s) { return k * k * s.r * s.r * s.phidot; };

    if (!params.harmonic()) {
        auto energy = [planar](const State& s) {
            const PlanarState p = planar(s);
            return 0.5 * (p.udot * p.udot + p.vdot * p.vdot);
        };
        return {
            {"Gamma_5",
             [planar](const State& s) {
                 const PlanarState p = planar(s);
                 const double a = p.u - s.t * p.udot;
                 const double b = p.v - s.t * p.vdot;
                 return 0.5 * (a * a + b * b);
             }},
            {"Gamma_6",
             [planar, energy](const State& s) {
                 const PlanarState p = planar(s);
                 return s.t * energy(s) - 0.5 * (p.u * p.udot + p.v * p.vdot);
             }},
            {"Gamma_7", energy},
            {"Gamma_8", [planar](const State& s) { const PlanarState p = planar(s); return p.u - s.t * p.udot; }},
            {"Gamma_9", [planar](const State& s) { return planar(s).udot; }},
            {"Gamma_10", [planar](const State& s) { const PlanarState p = planar(s); return p.v - s.t * p.vdot; }},
            {"Gamma_11", [planar](const State& s) { return planar(s).vdot; }},
            {"Gamma_15", angular},
        };
    }

    auto energy = [planar, w](const State& s) {
        const PlanarState p = planar(s);
        return 0.5 * (p.udot * p.udot + p.vdot * p.vdot) +
               0.5 * w * w * (p.u * p.u + p.v * p.v);
    };
    // f E - f'/2 x.xdot + f''/4 |x|^2 is conserved whenever f''' = -4 w^2 f'
    auto fradkin = [planar, energy](double f, double df, double ddf, const State& s) {
        const PlanarState p = planar(s);
        return f * energy(s) - 0.5 * df * (p.u * p.udot + p.v * p.vdot) +
               0.25 * ddf * (p.u * p.u + p.v * p.v);
    };
    return {
        {"Xi_8", angular},
        {"Xi_9", energy},
        {"Xi_10",
         [fradkin, w](const State& s) {
             const double c = std::cos(2.0 * w * s.t);
             const double sn = std::sin(2.0 * w * s.t);
             return fradkin(c, -2.0 * w * sn, -4.0 * w * w * c, s);
         }},
        {"Xi_11",
         [fradkin, w](const State& s) {
             const double c = std::cos(2.0 * w * s.t);
             const double sn = std::sin(2.0 * w * s.t);
             return fradkin(sn, 2.0 * w * c, -4.0 * w * w * sn, s);
         }},
        {"Xi_12",
         [planar, w](const State& s) {
             const PlanarState p = planar(s);
             return std::cos(w * s.t) * p.udot + w * std::sin(w * s.t) * p.u;
         }},
        {"Xi_13",
         [planar, w](const State& s) {
             const PlanarState p = planar(s);
             return std::sin(w * s.t) * p.udot - w * std::cos(w * s.t) * p.u;
         }},
        {"Xi_14",
         [planar, w](const State& s) {
             const PlanarState p = planar(s);
             return std::cos(w * s.t) * p.vdot + w * std::sin(w * s.t) * p.v;
         }},
        {"Xi_15",
         [planar, w](const State& s) {
             const PlanarState p = planar(s);
             return std::sin(w * s.t) * p.vdot - w * std::cos(w * s.t) * p.v;
         }},
    };
}

Trajectory integrate(const ModelParams& params, const State& initial, double t_end,
                     const IntegrateOptions& options)
{
    if (initial.r == 0.0) {
        throw VertexError("integrate: initial state at the vertex");
    }
    if (!(options.rtol > 0.0 && options.atol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }
    if (!(t_end >= initial.t)) {
        throw std::invalid_argument("integrate: t_end before the initial time");
    }

    // Dormand-Prince 5(4) tableau
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    // PI controller constants from Hairer's DOPRI5
    constexpr double beta = 0.04;
    constexpr double expo = 0.2 - 0.75 * beta;
    constexpr double safe = 0.9;

    const auto integrals = noether_integrals(params);
    Trajectory traj;
    traj.rtol = options.rtol;
    traj.atol = options.atol;

    auto record = [&](double t, const Vec& y) {
        Sample s;
        s.state = State{t, y[0], y[1], y[2], y[3]};
        for (int i = 0; i < kIntegralCount; ++i) {
            s.integrals[static_cast<std::size_t>(i)] = integrals[static_cast<std::size_t>(i)].value(s.state);
        }
        traj.samples.push_back(s);
    };

    double t = initial.t;
    Vec y{initial.r, initial.phi, initial.rdot, initial.phidot};
    record(t, y);
    if (t_end == t) {
        return traj;
    }

    const double span = t_end - initial.t;
    Vec k1 = rhs(params, y);
    double h = initial_step(params, y, k1, span, options.rtol, options.atol);
    double facold = 1e-4;
    bool rejected_last = false;
    long grid_index = 1;

    auto next_target = [&]() {
        if (options.sample_interval > 0.0) {
            return std::min(t_end, initial.t + static_cast<double>(grid_index) * options.sample_interval);
        }
        return t_end;
    };

    while (t < t_end) {
        if (traj.steps_accepted + traj.steps_rejected >= options.max_steps) {
            throw IntegrationError("integrate: step budget exhausted");
        }
        const double target = next_target();
        const double h_free = h;
        bool lands = false;
        if (t + h >= target || target - (t + h) < 1e-12 * std::max(1.0, std::abs(target))) {
            h = target - t;
            lands = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationError("integrate: step size underflow at t = " + std::to_string(t));
        }

        Vec k2, k3, k4, k5, k6, k7, y1;
        try {
            k2 = rhs(params, axpy(y, h, {{a21, &k1}}));
            k3 = rhs(params, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
            k4 = rhs(params, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = rhs(params, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = rhs(params, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y1 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            k7 = rhs(params, y1);
        } catch (const VertexError&) {
            // a stage landed exactly on the vertex
            traj.vertex_event = true;
            return traj;
        }
        Vec err{};
        for (int i = 0; i < 4; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const double en = error_norm(err, y, y1, options.rtol, options.atol);
        const double fac11 = std::pow(std::max(en, 1e-300), expo);

        if (en <= 1.0) {
            double fac = fac11 / std::pow(facold, beta);
            fac = std::clamp(fac / safe, 0.1, 5.0);
            double h_new = h / fac;
            if (rejected_last) {
                h_new = std::min(h_new, h);
            }
            facold = std::max(en, 1e-4);
            ++traj.steps_accepted;
            rejected_last = false;

            if (std::abs(y1[0]) < options.vertex_guard || (y1[0] > 0.0) != (y[0] > 0.0)) {
                traj.vertex_event = true;
                return traj;
            }
            t = lands ? target : t + h;
            y = y1;
            k1 = k7;
            if (options.sample_interval <= 0.0 || lands) {
                record(t, y);
                if (lands && options.sample_interval > 0.0) {
                    ++grid_index;
                }
            }
            // a step clipped to land on a sample keeps the controller's own size
            h = lands ? std::max(h_new, h_free) : h_new;
        } else {
            h /= std::min(5.0, fac11 / safe);
            ++traj.steps_rejected;
            rejected_last = true;
        }
    }
    return traj;
}

double integral_drift(const Trajectory& trajectory, int i)
{
    if (trajectory.samples.empty()) {
        return 0.0;
    }
    const auto idx = static_cast<std::size_t>(i);
    const double i0 = trajectory.samples.front().integrals.at(idx);
    double worst = 0.0;
    for (const Sample& s : trajectory.samples) {
        worst = std::max(worst, std::abs(s.integrals[idx] - i0) / (1.0 + std::abs(i0)));
    }
    return worst;
}

namespace {

ExactPoint exact_from_planar(double num, double den, double k)
{
    const double radicand = num * num + den * den;
    if (radicand == 0.0) {
        throw VertexError("exact solution passes through the vertex");
    }
    const double kphi = std::atan2(num, den);
    return {std::sqrt(radicand), reduce_angle(kphi / k), kphi};
}

}  // namespace

ExactPoint exact_free(const ExactSolutionParams& c, double k, double t)
{
    return exact_from_planar(c.c1 * t + c.c2, c.c3 * t + c.c4, k);
}

ExactPoint exact_ho(const ExactSolutionParams& c, double k, double omega, double t)
{
    const double cs = std::cos(omega * t);
    const double sn = std::sin(omega * t);
    return exact_from_planar(c.c1 * cs + c.c2 * sn, c.c3 * cs + c.c4 * sn, k);
}

State state_from_constants(const ModelParams& params, const ExactSolutionParams& c, double t)
{
    // v is the printed numerator, u the denominator
    double u, v, udot, vdot;
    if (params.harmonic()) {
        const double w = params.omega();
        const double cs = std::cos(w * t);
        const double sn = std::sin(w * t);
        v = c.c1 * cs + c.c2 * sn;
        u = c.c3 * cs + c.c4 * sn;
        vdot = w * (-c.c1 * sn + c.c2 * cs);
        udot = w * (-c.c3 * sn + c.c4 * cs);
    } else {
        v = c.c1 * t + c.c2;
        u = c.c3 * t + c.c4;
        vdot = c.c1;
        udot = c.c3;
    }
    const double r2 = u * u + v * v;
    if (r2 == 0.0) {
        throw VertexError("state_from_constants: solution at the vertex");
    }
    const double r = std::sqrt(r2);
    const double k = params.k();
    // phi is the lift atan2(v, u) / k so that linearize reproduces (u, v)
    return State{t, r, std::atan2(v, u) / k, (u * udot + v * vdot) / r, (u * vdot - v * udot) / (k * r2)};
}

}  // namespace conequant::cone
