#include "hawkes_ld/rate.hpp"

#include "hawkes_ld/csv.hpp"
#include "hawkes_ld/mgf_ode.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace hawkes_ld {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// What the root finder needs from one flow solve at a given theta: the
/// derivative of the limiting log-MGF (the map whose level set we want), its
/// own derivative, and the log-MGF itself.
struct FlowPoint {
    bool blown_up = false;
    double slope = 0.0;
    double curvature = 0.0;
    double log_mgf = 0.0;
};

void check_horizon(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("horizon T must be finite and positive");
    }
}

/// Solves slope(theta) = x for the increasing map theta -> slope and returns
/// sup_theta {theta x - log_mgf(theta)}.
LegendreResult solve_legendre(const std::function<FlowPoint(double)>& eval, double x, double left_clamp) {
    int evals = 0;
    auto at = [&](double theta) {
        ++evals;
        return eval(theta);
    };
    const double ftol = 1e-12 * std::max(1.0, std::abs(x));

    const FlowPoint at_zero = at(0.0);
    const double f_zero = at_zero.slope - x;
    if (std::abs(f_zero) <= ftol) {
        return {0.0, 0.0, Boundary::lln_zero, evals};
    }

    double lo = 0.0;
    double hi = 0.0;
    double f_lo = f_zero;
    double f_hi = f_zero;
    bool hi_blown = false;
    if (f_zero < 0.0) {
        hi = 1.0;
        for (int k = 0;; ++k) {
            if (k > 64) {
                throw NumericalFailure("rate root bracket: no upper end found up to theta = " + std::to_string(hi));
            }
            const FlowPoint p = at(hi);
            if (p.blown_up) {
                hi_blown = true;
                f_hi = inf;
                break;
            }
            f_hi = p.slope - x;
            if (f_hi >= 0.0) {
                break;
            }
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
        }
    } else {
        lo = -1.0;
        for (;;) {
            lo = std::max(lo, left_clamp);
            const FlowPoint p = at(lo);
            f_lo = p.slope - x;
            if (f_lo <= 0.0) {
                break;
            }
            if (lo == left_clamp) {
                return {std::max(0.0, lo * x - p.log_mgf), lo, Boundary::domain_edge, evals};
            }
            hi = lo;
            f_hi = f_lo;
            lo *= 2.0;
        }
    }

    // Safeguarded Newton inside [lo, hi]; a blown-up solve counts as f = +inf.
    double theta = (hi_blown || std::abs(f_lo) < std::abs(f_hi)) ? lo : hi;
    FlowPoint cur = at(theta);
    for (int k = 0; k < 200; ++k) {
        const double f = cur.slope - x;
        if (std::abs(f) <= ftol || hi - lo <= 4e-16 * std::max(1.0, std::abs(theta))) {
            return {std::max(0.0, theta * x - cur.log_mgf), theta, Boundary::interior, evals};
        }
        double next = theta - f / cur.curvature;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        FlowPoint p = at(next);
        while (p.blown_up) {
            hi = next;
            next = 0.5 * (lo + hi);
            if (hi - lo <= 4e-16 * std::max(1.0, std::abs(lo))) {
                throw NumericalFailure("rate root bracket collapsed onto the explosion boundary");
            }
            p = at(next);
        }
        ((p.slope - x < 0.0) ? lo : hi) = next;
        theta = next;
        cur = p;
    }
    std::ostringstream msg;
    msg << "rate root finding did not converge; bracket [" << format_double(lo) << ", " << format_double(hi)
        << "], residual " << format_double(cur.slope - x);
    throw NumericalFailure(msg.str());
}

}  // namespace

std::string to_string(Boundary b) {
    switch (b) {
    case Boundary::interior:
        return "interior";
    case Boundary::lln_zero:
        return "lln_zero";
    case Boundary::domain_edge:
        return "domain_edge";
    case Boundary::infinite:
        return "infinite";
    }
    return "unknown";
}

LegendreResult rate_J(const HawkesParams& p, double x, double T, double tol) {
    check_horizon(T);
    if (std::isnan(x)) {
        throw std::invalid_argument("x must not be NaN");
    }
    const double edge = std::exp(-p.beta() * T);
    if (x < edge) {
        return {inf, std::nullopt, Boundary::infinite, 0};
    }
    if (x == edge) {
        return {no_event_rate(p, T), std::nullopt, Boundary::domain_edge, 0};
    }
    if (std::isinf(x)) {
        return {inf, std::nullopt, Boundary::infinite, 0};
    }
    auto eval = [&](double theta) {
        const auto traj = integrate_z_flow(p, theta, T, endpoint_only(tol));
        if (traj.blown_up()) {
            return FlowPoint{true};
        }
        return FlowPoint{false, traj.final_value(zflow::gamma), traj.final_value(zflow::dgamma),
                         traj.final_value(zflow::a)};
    };
    // A(T;theta) is close to theta e^{-beta T} for very negative theta, so the
    // clamp must grow with e^{beta T} to push e^{alpha A} below e^{-40}.
    const double left_clamp = -40.0 / p.alpha() * std::exp(std::min(p.beta() * T, 600.0));
    return solve_legendre(eval, x, left_clamp);
}

LegendreResult rate_H(const HawkesParams& p, double x, double T, double tol) {
    check_horizon(T);
    if (std::isnan(x)) {
        throw std::invalid_argument("x must not be NaN");
    }
    if (x < 0.0 || std::isinf(x)) {
        return {inf, std::nullopt, Boundary::infinite, 0};
    }
    if (x == 0.0) {
        return {no_event_rate(p, T), std::nullopt, Boundary::domain_edge, 0};
    }
    const double alpha = p.alpha();
    auto eval = [&](double theta) {
        const auto traj = integrate_n_flow(p, theta, T, endpoint_only(tol));
        if (traj.blown_up()) {
            return FlowPoint{true};
        }
        return FlowPoint{false, traj.final_value(nflow::r), traj.final_value(nflow::dr),
                         traj.final_value(nflow::c) - theta / alpha};
    };
    // theta enters the N-flow as alpha * C(0) = theta, so e^{theta} sets the scale.
    return solve_legendre(eval, x, std::min(-40.0, -40.0 / alpha));
}

SampledPath::SampledPath(PathKind kind, std::vector<double> times, std::vector<double> values)
    : kind_(kind), times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2 || times_.size() != values_.size()) {
        throw std::invalid_argument("path needs at least two samples and matching sizes");
    }
    if (times_.front() != 0.0) {
        throw std::invalid_argument("path grid must start at 0");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i])) {
            throw std::invalid_argument("path grid must be finite and strictly increasing");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("path values must be finite and nonnegative");
        }
    }
    if (kind_ == PathKind::z_path && values_.front() != 1.0) {
        throw std::invalid_argument("Z-path must start at 1");
    }
    if (kind_ == PathKind::n_path) {
        if (values_.front() != 0.0) {
            throw std::invalid_argument("N-path must start at 0");
        }
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] < values_[i - 1]) {
                throw std::invalid_argument("N-path must be nondecreasing");
            }
        }
    }
}

double functional_I_Z(const HawkesParams& p, const SampledPath& g) {
    if (g.kind() != PathKind::z_path) {
        throw std::invalid_argument("functional_I_Z needs a Z-path");
    }
    const double alpha = p.alpha();
    const double beta = p.beta();
    const auto& t = g.times();
    const auto& v = g.values();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double g0 = v[i];
        const double g1 = v[i + 1];
        if (!(g0 > 0.0) || !(g1 > 0.0)) {
            return inf;
        }
        const double h = t[i + 1] - t[i];
        double k = std::log(g1 / g0) / h;
        const double g_min = std::min(g0, g1);
        if (k < -beta - 1e-10 * (1.0 + beta * g_min) / g_min) {
            return inf;
        }
        k = std::max(k, -beta);
        // With g' = k g the integrand is g (u log u - u + 1), u = (beta + k)/alpha.
        const double u = (beta + k) / alpha;
        const double ell = (u > 0.0 ? u * std::log(u) : 0.0) - u + 1.0;
        const double kh = k * h;
        const double integral_g = kh == 0.0 ? g0 * h : g0 * h * std::expm1(kh) / kh;
        total += ell * integral_g;
    }
    return total;
}

double functional_I_N(const HawkesParams& p, const SampledPath& h) {
    if (h.kind() != PathKind::n_path) {
        throw std::invalid_argument("functional_I_N needs an N-path");
    }
    using boost::math::quadrature::gauss;
    const double alpha = p.alpha();
    const double beta = p.beta();
    const auto& t = h.times();
    const auto& v = h.values();
    // phi is the scaled intensity e^{-beta t}(1 + alpha int_0^t e^{beta s} h'(s) ds),
    // which solves phi' = -beta phi + alpha h'.
    double phi0 = 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double len = t[i + 1] - t[i];
        const double c = (v[i + 1] - v[i]) / len;
        const double a = alpha * c / beta;
        const double decay = -std::expm1(-beta * len);
        const double integral_phi = a * len + (phi0 - a) * decay / beta;
        double seg = integral_phi;
        if (c > 0.0) {
            const double integral_log_phi =
                gauss<double, 10>::integrate([&](double u) { return std::log(a + (phi0 - a) * std::exp(-beta * u)); },
                                             0.0, len);
            seg += c * len * (std::log(c) - 1.0) - c * integral_log_phi;
        }
        total += seg;
        phi0 = a + (phi0 - a) * (1.0 - decay);
    }
    return total;
}

SampledPath optimal_path_Z(const HawkesParams& p, double x, double T, std::size_t grid_size, double tol) {
    if (grid_size < 2) {
        throw std::invalid_argument("grid_size must be at least 2");
    }
    const LegendreResult r = rate_J(p, x, T, tol);
    if (r.boundary != Boundary::interior && r.boundary != Boundary::lln_zero) {
        throw NumericalFailure("no interior optimal Z-path for x = " + format_double(x) + " (" +
                               to_string(r.boundary) + ")");
    }
    const auto traj = integrate_z_flow(p, *r.theta_star, T, {.tol = tol});
    const double log_end = traj.final_value(zflow::log_gamma);
    std::vector<double> times(grid_size);
    std::vector<double> values(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        times[i] = i + 1 == grid_size ? T : T * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        values[i] = i == 0 ? 1.0 : std::exp(log_end - traj.at(T - times[i], zflow::log_gamma));
    }
    return SampledPath(PathKind::z_path, std::move(times), std::move(values));
}

SampledPath optimal_path_N(const HawkesParams& p, double x, double T, std::size_t grid_size, double tol) {
    if (grid_size < 2) {
        throw std::invalid_argument("grid_size must be at least 2");
    }
    const LegendreResult r = rate_H(p, x, T, tol);
    if (r.boundary != Boundary::interior && r.boundary != Boundary::lln_zero) {
        throw NumericalFailure("no interior optimal N-path for x = " + format_double(x) + " (" +
                               to_string(r.boundary) + ")");
    }
    const auto traj = integrate_n_flow(p, *r.theta_star, T, {.tol = tol});
    const double scale = std::exp(traj.final_value(nflow::log_fundamental));
    const double weight_end = traj.final_value(nflow::weight);
    std::vector<double> times(grid_size);
    std::vector<double> values(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        times[i] = i + 1 == grid_size ? T : T * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        values[i] = i == 0 ? 0.0 : scale * (weight_end - traj.at(T - times[i], nflow::weight));
        // Hermite interpolation of an increasing curve can wiggle at rounding level.
        if (i > 0) {
            values[i] = std::max(values[i], values[i - 1]);
        }
    }
    return SampledPath(PathKind::n_path, std::move(times), std::move(values));
}

void write_path_csv(std::ostream& out, const SampledPath& path) {
    out << "t,value\n";
    for (std::size_t i = 0; i < path.times().size(); ++i) {
        write_csv_row(out, {format_double(path.times()[i]), format_double(path.values()[i])});
    }
}

void write_rate_sweep_csv(std::ostream& out, const std::vector<double>& xs,
                          const std::vector<LegendreResult>& results) {
    if (xs.size() != results.size()) {
        throw std::invalid_argument("sweep abscissae and results differ in length");
    }
    out << "x,rate,theta_star,boundary\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& r = results[i];
        write_csv_row(out, {format_double(xs[i]), format_double(r.value),
                            r.theta_star ? format_double(*r.theta_star) : std::string(), to_string(r.boundary)});
    }
}

}  // namespace hawkes_ld
