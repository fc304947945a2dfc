#pragma once

#include "hawkes_ld/params.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hawkes_ld {

struct OdeOptions {
    /// Absolute and relative local error tolerance of the embedded RK pair.
    double tol = 1e-10;
    /// Upper bound on an accepted step, as a fraction of the horizon. Keeps
    /// the cubic Hermite dense output accurate on nearly linear stretches.
    double max_step_fraction = 1.0 / 128.0;
    std::size_t max_steps = 1'000'000;
};

/// Options for solves whose endpoint alone is used: steps limited only by the
/// error control.
inline OdeOptions endpoint_only(double tol) {
    return {.tol = tol, .max_step_fraction = 1.0};
}

/// Value above which a Riccati flow is declared to have exploded:
/// (50 + |ln alpha|) / alpha. Past it exp(alpha x) dominates every other
/// term and the remaining time to infinity is below 1e-20.
double blowup_cap(const HawkesParams& p);

/// Accepted-step grid of an augmented ODE system with cubic Hermite dense
/// output for every component. Immutable once returned by an integrator.
class Trajectory {
public:
    explicit Trajectory(std::size_t dimension) : dim_(dimension) {}

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }

    double value(std::size_t i, std::size_t component) const { return values_[i * dim_ + component]; }
    double slope(std::size_t i, std::size_t component) const { return slopes_[i * dim_ + component]; }
    double final_value(std::size_t component) const { return value(size() - 1, component); }
    double end_time() const { return times_.back(); }

    /// Hermite interpolant at t in [0, end_time()].
    double at(double t, std::size_t component) const;

    /// Set when the leading component passed the cap, or when reaching infinity
    /// before the horizon became certain; blowup_time() is then the time of
    /// the step that established it.
    bool blown_up() const noexcept { return blowup_time_.has_value(); }
    std::optional<double> blowup_time() const noexcept { return blowup_time_; }

    void push(double t, const double* y, const double* dy);
    void mark_blowup(double t) { blowup_time_ = t; }

private:
    std::size_t dim_;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::optional<double> blowup_time_;
};

/// Component layout of the Z-flow: A, B, gamma = dA/dtheta, d(gamma)/dtheta,
/// and log(gamma) integrated directly.
namespace zflow {
inline constexpr std::size_t a = 0;
inline constexpr std::size_t b = 1;
inline constexpr std::size_t gamma = 2;
inline constexpr std::size_t dgamma = 3;
inline constexpr std::size_t log_gamma = 4;
inline constexpr std::size_t dimension = 5;
}  // namespace zflow

/// Component layout of the N-flow started at C(0) = theta/alpha: C, D,
/// r = d(C - theta/alpha)/dtheta, dr/dtheta, log of the fundamental solution
/// Gamma' = (alpha e^{alpha C} - beta) Gamma, and M = int e^{alpha C}/Gamma.
/// With these, r(t) = Gamma(t) M(t).
namespace nflow {
inline constexpr std::size_t c = 0;
inline constexpr std::size_t d = 1;
inline constexpr std::size_t r = 2;
inline constexpr std::size_t dr = 3;
inline constexpr std::size_t log_fundamental = 4;
inline constexpr std::size_t weight = 5;
inline constexpr std::size_t dimension = 6;
}  // namespace nflow

/// A' = -beta A + e^{alpha A} - 1, A(0) = theta, with B and the sensitivities.
Trajectory integrate_z_flow(const HawkesParams& p, double theta, double T, const OdeOptions& opt = {});

/// C' = -beta C + e^{alpha C} - 1 + beta theta/alpha, C(0) = theta/alpha, with D
/// and the sensitivities.
Trajectory integrate_n_flow(const HawkesParams& p, double theta, double T, const OdeOptions& opt = {});

/// A single solved component on [0, T] (or up to blow-up).
struct OdeCurve {
    double theta0 = 0.0;  ///< initial value of the curve
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> slopes;
    bool blown_up = false;
    std::optional<double> blowup_time;

    double at(double t) const;
    double final_value() const { return values.back(); }
};

OdeCurve solve_A(const HawkesParams& p, double theta, double T, double tol = 1e-10);
OdeCurve solve_B(const HawkesParams& p, double theta, double T, double tol = 1e-10);
/// C started at theta / alpha.
OdeCurve solve_C(const HawkesParams& p, double theta, double T, double tol = 1e-10);
OdeCurve solve_D(const HawkesParams& p, double theta, double T, double tol = 1e-10);

/// dA(T; theta)/dtheta. Throws NumericalFailure if the A-flow explodes before T.
double sensitivity_gamma(const HawkesParams& p, double theta, double T, double tol = 1e-10);
/// d[C(T; theta/alpha) - theta/alpha]/dtheta. Throws NumericalFailure on explosion.
double sensitivity_r(const HawkesParams& p, double theta, double T, double tol = 1e-10);

/// Largest initial value for which a flow survives to T. The flow started at
/// theta_c - bracket_width reaches T; at theta_c + bracket_width it explodes.
struct ExplosionBoundary {
    double theta_c = 0.0;
    double T = 0.0;
    double bracket_width = 0.0;
};

ExplosionBoundary find_theta_c(const HawkesParams& p, double T, double tol = 1e-10);
ExplosionBoundary find_theta_d(const HawkesParams& p, double T, double tol = 1e-10);

/// log E[e^{theta Z_T} | Z_0 = z0] = A(T;theta) z0 + B(T;theta); +infinity past theta_c(T).
double log_mgf_Z(const HawkesParams& p, double z0, double theta, double T, double tol = 1e-10);
/// log E[e^{theta N_T} | Z_0 = z0] = (C(T;theta/alpha) - theta/alpha) z0 + D(T;theta/alpha);
/// +infinity past theta_d(T).
double log_mgf_N(const HawkesParams& p, double z0, double theta, double T, double tol = 1e-10);

/// CSV with header `t,value`.
void write_curve_csv(std::ostream& out, const OdeCurve& curve);

}  // namespace hawkes_ld
