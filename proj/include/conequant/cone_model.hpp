#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conequant::cone {

enum class Model { kFree, kHarmonic };

/// Thrown when a computation reaches the cone vertex r = 0, where the
/// parametrization breaks down.
class VertexError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Step-size underflow or an exhausted step budget.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// k = sin(alpha) with unit mass; omega only for the oscillator.
class ModelParams {
public:
    static ModelParams free(double k);
    static ModelParams harmonic(double k, double omega);

    [[nodiscard]] Model model() const noexcept { return model_; }
    [[nodiscard]] double k() const noexcept { return k_; }
    /// Zero for the free particle.
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] bool harmonic() const noexcept { return model_ == Model::kHarmonic; }

private:
    ModelParams(Model model, double k, double omega);

    Model model_;
    double k_;
    double omega_;
};

/// Point of the tangent bundle. r is signed (its sign picks the nappe).
struct State {
    double t = 0.0;
    double r = 1.0;
    double phi = 0.0;
    double rdot = 0.0;
    double phidot = 0.0;

    /// Copy with phi reduced to [0, 2 pi).
    [[nodiscard]] State reduced() const;
};

struct Acceleration {
    double rddot;
    double phiddot;
};

double lagrangian(const ModelParams& params, const State& s);

/// Right-hand side of the Lagrange equations. Throws VertexError at r = 0.
Acceleration eom(const ModelParams& params, const State& s);

struct FirstIntegral {
    std::string label;  // generator it belongs to, e.g. "Gamma_15"
    std::function<double(const State&)> value;
};

/// The eight Noether first integrals, pulled back from the planar free
/// particle (resp. isotropic oscillator) through u = r cos(k phi),
/// v = r sin(k phi). The angle must be continuous along a trajectory.
std::vector<FirstIntegral> noether_integrals(const ModelParams& params);

inline constexpr int kIntegralCount = 8;

struct Sample {
    State state;  // phi is the continuous lift, not reduced
    std::array<double, kIntegralCount> integrals{};
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double vertex_guard = 1e-8;
    /// If positive, samples are taken exactly on the grid t0 + m * interval
    /// (and at t_end); otherwise after every accepted step.
    double sample_interval = 0.0;
    long max_steps = 5'000'000;
};

struct Trajectory {
    std::vector<Sample> samples;
    double rtol = 0.0;
    double atol = 0.0;
    /// The run stopped early because |r| fell below the guard or r changed sign.
    bool vertex_event = false;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

/// Dormand-Prince 5(4) with PI step control, from `initial` up to `t_end`.
Trajectory integrate(const ModelParams& params, const State& initial, double t_end,
                     const IntegrateOptions& options = {});

/// Drift of integral `i`: max |I - I(t0)| / (1 + |I(t0)|) over the samples.
double integral_drift(const Trajectory& trajectory, int i);

struct ExactSolutionParams {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

struct ExactPoint {
    double r;     // positive branch
    double phi;   // reduced to [0, 2 pi)
    double kphi;  // atan2(numerator, denominator), in (-pi, pi]
};

ExactPoint exact_free(const ExactSolutionParams& c, double k, double t);
ExactPoint exact_ho(const ExactSolutionParams& c, double k, double omega, double t);

/// State at time t on the positive-branch general solution with constants c.
State state_from_constants(const ModelParams& params, const ExactSolutionParams& c, double t);

struct PlanarState {
    double u;
    double v;
    double udot;
    double vdot;
};

/// u = r cos(k phi), v = r sin(k phi) and the velocity pushforward.
PlanarState linearize(double k, const State& s);

struct PolarPoint {
    double r;
    double phi;
};

/// r = sqrt(u^2 + v^2) > 0, phi = atan2(v, u) / k reduced to [0, 2 pi).
PolarPoint inverse_linearize(double k, double u, double v);

}  // namespace conequant::cone
