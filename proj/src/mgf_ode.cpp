#include "hawkes_ld/mgf_ode.hpp"

#include "hawkes_ld/csv.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace hawkes_ld {

namespace {

namespace odeint = boost::numeric::odeint;

double hermite(double t0, double t1, double y0, double y1, double d0, double d1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

/// Leading component of both flows: y' = e^{alpha y} - 1 - beta (y - y_rest).
/// Once e^{alpha y} >= 2 (1 + beta (y - y_rest)) and e^{alpha y} >= 2 beta/alpha,
/// the field stays above e^{alpha y}/2, so infinity is reached within
/// 2 e^{-alpha y}/alpha. Explosion is certain if that is shorter than what is
/// left of the horizon.
struct ExplosionCertificate {
    double alpha;
    double beta;
    double y_rest;

    bool certain(double y, double time_left) const {
        const double e = std::exp(alpha * y);
        return e >= 2.0 * (1.0 + beta * (y - y_rest)) && e >= 2.0 * beta / alpha && 2.0 / (alpha * e) < time_left;
    }
};

template <std::size_t N, class Rhs>
Trajectory integrate(Rhs rhs, const std::array<double, N>& y0, double T, double cap, const ExplosionCertificate& cert,
                     const OdeOptions& opt) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("ODE horizon must be finite and positive");
    }
    if (!(opt.tol > 0.0)) {
        throw std::invalid_argument("ODE tolerance must be positive");
    }
    using State = std::array<double, N>;
    auto system = [&rhs](const State& y, State& dy, double) { rhs(y, dy); };
    auto stepper = odeint::make_controlled(opt.tol, opt.tol, odeint::runge_kutta_dopri5<State>());

    Trajectory out(N);
    State y = y0;
    State dy{};
    system(y, dy, 0.0);
    out.push(0.0, y.data(), dy.data());

    const double max_step = T * opt.max_step_fraction;
    double t = 0.0;
    double dt = max_step / 4.0;
    std::size_t attempts = 0;
    while (t < T) {
        if (++attempts > opt.max_steps) {
            throw NumericalFailure("ODE integration exceeded the step budget");
        }
        double h = std::min({dt, max_step, T - t});
        State trial = y;
        double trial_t = t;
        if (stepper.try_step(system, trial, trial_t, h) == odeint::fail) {
            dt = h;
            continue;
        }
        const bool finite = std::all_of(trial.begin(), trial.end(), [](double v) { return std::isfinite(v); });
        if (!finite || trial[0] > cap || cert.certain(trial[0], T - trial_t)) {
            out.mark_blowup(trial_t);
            return out;
        }
        if (T - trial_t <= 1e-13 * T) {
            trial_t = T;
        }
        y = trial;
        t = trial_t;
        dt = h;
        system(y, dy, t);
        out.push(t, y.data(), dy.data());
    }
    return out;
}

OdeCurve extract(const Trajectory& traj, std::size_t component, double theta0) {
    OdeCurve curve;
    curve.theta0 = theta0;
    curve.grid = traj.times();
    curve.values.reserve(traj.size());
    curve.slopes.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        curve.values.push_back(traj.value(i, component));
        curve.slopes.push_back(traj.slope(i, component));
    }
    curve.blown_up = traj.blown_up();
    curve.blowup_time = traj.blowup_time();
    return curve;
}

template <class Flow>
ExplosionBoundary bisect_boundary(Flow survives, double T) {
    double lo = 0.0;  // theta = 0 is a fixed point of both flows
    double hi = 1.0;
    int guard = 0;
    while (survives(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) {
            throw NumericalFailure("no explosion boundary found below 2^60");
        }
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (survives(mid) ? lo : hi) = mid;
    }
    ExplosionBoundary b{0.5 * (lo + hi), T, hi - lo};
    if (!survives(b.theta_c - b.bracket_width) || survives(b.theta_c + b.bracket_width)) {
        throw NumericalFailure("explosion boundary failed its survive/explode check");
    }
    return b;
}

}  // namespace

double blowup_cap(const HawkesParams& p) {
    return (50.0 + std::abs(std::log(p.alpha()))) / p.alpha();
}

void Trajectory::push(double t, const double* y, const double* dy) {
    times_.push_back(t);
    values_.insert(values_.end(), y, y + dim_);
    slopes_.insert(slopes_.end(), dy, dy + dim_);
}

double Trajectory::at(double t, std::size_t component) const {
    if (!(t >= 0.0 && t <= end_time())) {
        throw std::out_of_range("dense output requested outside the solved interval");
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        return final_value(component);
    }
    const std::size_t i1 = static_cast<std::size_t>(it - times_.begin());
    const std::size_t i0 = i1 - 1;
    return hermite(times_[i0], times_[i1], value(i0, component), value(i1, component), slope(i0, component),
                   slope(i1, component), t);
}

double OdeCurve::at(double t) const {
    if (!(t >= 0.0 && t <= grid.back())) {
        throw std::out_of_range("dense output requested outside the solved interval");
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) {
        return values.back();
    }
    const std::size_t i1 = static_cast<std::size_t>(it - grid.begin());
    const std::size_t i0 = i1 - 1;
    return hermite(grid[i0], grid[i1], values[i0], values[i1], slopes[i0], slopes[i1], t);
}

Trajectory integrate_z_flow(const HawkesParams& p, double theta, double T, const OdeOptions& opt) {
    const double alpha = p.alpha();
    const double beta = p.beta();
    const double mu = p.mu();
    auto rhs = [=](const std::array<double, zflow::dimension>& y, std::array<double, zflow::dimension>& dy) {
        const double e = std::exp(alpha * y[zflow::a]);
        const double em1 = std::expm1(alpha * y[zflow::a]);
        const double lin = alpha * e - beta;
        dy[zflow::a] = -beta * y[zflow::a] + em1;
        dy[zflow::b] = mu * em1;
        dy[zflow::gamma] = lin * y[zflow::gamma];
        dy[zflow::dgamma] = lin * y[zflow::dgamma] + alpha * alpha * e * y[zflow::gamma] * y[zflow::gamma];
        dy[zflow::log_gamma] = lin;
    };
    return integrate<zflow::dimension>(rhs, {theta, 0.0, 1.0, 0.0, 0.0}, T, blowup_cap(p), {alpha, beta, 0.0},
                                       opt);
}

Trajectory integrate_n_flow(const HawkesParams& p, double theta, double T, const OdeOptions& opt) {
    const double alpha = p.alpha();
    const double beta = p.beta();
    const double mu = p.mu();
    const double c0 = theta / alpha;
    auto rhs = [=](const std::array<double, nflow::dimension>& y, std::array<double, nflow::dimension>& dy) {
        const double c = y[nflow::c];
        const double e = std::exp(alpha * c);
        const double em1 = std::expm1(alpha * c);
        const double lin = alpha * e - beta;
        const double dc_dtheta = y[nflow::r] + 1.0 / alpha;
        dy[nflow::c] = -beta * (c - c0) + em1;
        dy[nflow::d] = mu * em1;
        dy[nflow::r] = lin * y[nflow::r] + e;
        dy[nflow::dr] = lin * y[nflow::dr] + alpha * alpha * e * dc_dtheta * dc_dtheta;
        dy[nflow::log_fundamental] = lin;
        dy[nflow::weight] = std::exp(alpha * c - y[nflow::log_fundamental]);
    };
    return integrate<nflow::dimension>(rhs, {c0, 0.0, 0.0, 0.0, 0.0, 0.0}, T, blowup_cap(p), {alpha, beta, c0},
                                       opt);
}

OdeCurve solve_A(const HawkesParams& p, double theta, double T, double tol) {
    return extract(integrate_z_flow(p, theta, T, {.tol = tol}), zflow::a, theta);
}

OdeCurve solve_B(const HawkesParams& p, double theta, double T, double tol) {
    return extract(integrate_z_flow(p, theta, T, {.tol = tol}), zflow::b, 0.0);
}

OdeCurve solve_C(const HawkesParams& p, double theta, double T, double tol) {
    return extract(integrate_n_flow(p, theta, T, {.tol = tol}), nflow::c, theta / p.alpha());
}

OdeCurve solve_D(const HawkesParams& p, double theta, double T, double tol) {
    return extract(integrate_n_flow(p, theta, T, {.tol = tol}), nflow::d, 0.0);
}

double sensitivity_gamma(const HawkesParams& p, double theta, double T, double tol) {
    const auto traj = integrate_z_flow(p, theta, T, endpoint_only(tol));
    if (traj.blown_up()) {
        throw NumericalFailure("A-flow explodes before T; gamma(T) undefined");
    }
    return traj.final_value(zflow::gamma);
}

double sensitivity_r(const HawkesParams& p, double theta, double T, double tol) {
    const auto traj = integrate_n_flow(p, theta, T, endpoint_only(tol));
    if (traj.blown_up()) {
        throw NumericalFailure("C-flow explodes before T; r(T) undefined");
    }
    return traj.final_value(nflow::r);
}

ExplosionBoundary find_theta_c(const HawkesParams& p, double T, double tol) {
    return bisect_boundary(
        [&](double theta) { return !integrate_z_flow(p, theta, T, endpoint_only(tol)).blown_up(); }, T);
}

ExplosionBoundary find_theta_d(const HawkesParams& p, double T, double tol) {
    return bisect_boundary(
        [&](double theta) { return !integrate_n_flow(p, theta, T, endpoint_only(tol)).blown_up(); }, T);
}

double log_mgf_Z(const HawkesParams& p, double z0, double theta, double T, double tol) {
    const auto traj = integrate_z_flow(p, theta, T, endpoint_only(tol));
    if (traj.blown_up()) {
        return std::numeric_limits<double>::infinity();
    }
    return traj.final_value(zflow::a) * z0 + traj.final_value(zflow::b);
}

double log_mgf_N(const HawkesParams& p, double z0, double theta, double T, double tol) {
    const auto traj = integrate_n_flow(p, theta, T, endpoint_only(tol));
    if (traj.blown_up()) {
        return std::numeric_limits<double>::infinity();
    }
    return (traj.final_value(nflow::c) - theta / p.alpha()) * z0 + traj.final_value(nflow::d);
}

void write_curve_csv(std::ostream& out, const OdeCurve& curve) {
    out << "t,value\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        write_csv_row(out, {format_double(curve.grid[i]), format_double(curve.values[i])});
    }
}

}  // namespace hawkes_ld
