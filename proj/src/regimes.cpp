#include "hawkes_ld/regimes.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hawkes_ld {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite and positive");
    }
}

void require_subcritical(const HawkesParams& p) {
    if (!(p.beta() > p.alpha())) {
        throw std::invalid_argument("subcritical rates need beta > alpha");
    }
}

/// x log(x / d) with the x = 0 limit.
double xlogx_over(double x, double d) {
    return x == 0.0 ? 0.0 : x * std::log(x / d);
}

/// Below this value of (alpha / sqrt 2)^2 |theta| T^2 both branches are
/// replaced by their Taylor expansions around theta = 0.
constexpr double series_cutoff = 1e-8;

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
    case Regime::critical:
        return "critical";
    case Regime::supercritical:
        return "supercritical";
    case Regime::subcritical:
        return "subcritical";
    }
    return "unknown";
}

RegimeClass classify(const HawkesParams& p, std::optional<Regime> forced) {
    const double tol = 1e-12 * std::max(p.alpha(), p.beta());
    if (forced) {
        return {*forced, tol};
    }
    const double d = p.alpha() - p.beta();
    if (std::abs(d) <= tol) {
        return {Regime::critical, tol};
    }
    return {d > 0.0 ? Regime::supercritical : Regime::subcritical, tol};
}

double critical_rate_Z(double alpha, double x, double T) {
    check_positive(alpha, "alpha");
    check_positive(T, "T");
    if (x < 0.0) {
        return inf;
    }
    const double d = std::sqrt(x) - 1.0;
    return 2.0 * d * d / (alpha * alpha * T);
}

double critical_lambda_pole(double alpha, double T) {
    check_positive(alpha, "alpha");
    check_positive(T, "T");
    return std::numbers::pi * std::numbers::pi / (2.0 * alpha * alpha * T * T);
}

double critical_lambda(double alpha, double theta, double T) {
    if (theta >= critical_lambda_pole(alpha, T)) {
        return inf;
    }
    const double k = alpha / std::numbers::sqrt2;
    const double y2 = k * k * std::abs(theta) * T * T;
    if (y2 < series_cutoff) {
        return theta * T + alpha * alpha * theta * theta * T * T * T / 6.0;
    }
    const double s = std::sqrt(std::abs(theta));
    if (theta < 0.0) {
        return -(s / k) * std::tanh(k * s * T);
    }
    return (s / k) * std::tan(k * s * T);
}

double critical_lambda_slope(double alpha, double theta, double T) {
    if (theta >= critical_lambda_pole(alpha, T)) {
        return inf;
    }
    const double k = alpha / std::numbers::sqrt2;
    const double y2 = k * k * std::abs(theta) * T * T;
    if (y2 < series_cutoff) {
        return T * (1.0 + alpha * alpha * T * T * theta / 3.0);
    }
    const double s = std::sqrt(std::abs(theta));
    const double y = k * s * T;
    if (theta < 0.0) {
        const double sech = 1.0 / std::cosh(y);
        return (std::tanh(y) / k + s * T * sech * sech) / (2.0 * s);
    }
    const double sec = 1.0 / std::cos(y);
    return (std::tan(y) / k + s * T * sec * sec) / (2.0 * s);
}

double critical_rate_N(double alpha, double x, double T) {
    check_positive(alpha, "alpha");
    check_positive(T, "T");
    if (!(x > 0.0)) {
        return inf;  // Lambda(theta) ~ -sqrt(2|theta|)/alpha, so sup -Lambda diverges
    }
    if (x == T) {
        return 0.0;
    }
    auto excess = [&](double theta) { return critical_lambda_slope(alpha, theta, T) - x; };
    double lo = 0.0;
    double hi = 0.0;
    if (x < T) {
        lo = -1.0;
        while (excess(lo) > 0.0) {
            hi = lo;
            lo *= 2.0;
            if (!std::isfinite(lo)) {
                throw NumericalFailure("critical Legendre transform: no lower bracket");
            }
        }
    } else {
        hi = (1.0 - 1e-8) * critical_lambda_pole(alpha, T);
        if (excess(hi) < 0.0) {
            return hi * x - critical_lambda(alpha, hi, T);
        }
    }
    std::uintmax_t max_iter = 200;
    const auto bracket =
        boost::math::tools::toms748_solve(excess, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double theta = 0.5 * (bracket.first + bracket.second);
    return std::max(0.0, theta * x - critical_lambda(alpha, theta, T));
}

double subcritical_rate(const HawkesParams& p, double x, double T) {
    require_subcritical(p);
    check_positive(T, "T");
    if (x < 0.0) {
        return inf;
    }
    const double d = p.alpha() * x + 1.0 + p.mu() * p.beta() * T;
    return xlogx_over(p.beta() * x, d) / p.beta() - x + d / p.beta();
}

double subcritical_rate_I0(const HawkesParams& p, double x) {
    require_subcritical(p);
    if (x < 0.0) {
        return inf;
    }
    const double d = p.alpha() * x + 1.0;
    return xlogx_over(p.beta() * x, d) / p.beta() - x + d / p.beta();
}

double subcritical_rate_I1(const HawkesParams& p, double x, double T) {
    require_subcritical(p);
    check_positive(T, "T");
    if (!(p.mu() > 0.0)) {
        throw std::invalid_argument("the immigrant rate needs mu > 0");
    }
    if (x < 0.0) {
        return inf;
    }
    const double v = x / T;
    const double ratio = p.alpha() / p.beta();
    return T * (xlogx_over(v, p.mu() + v * ratio) - v + v * ratio + p.mu());
}

double decomposition_residual(const HawkesParams& p, double x, double T, std::size_t grid_size) {
    if (grid_size < 3) {
        throw std::invalid_argument("grid_size must be at least 3");
    }
    if (x < 0.0) {
        throw std::invalid_argument("x must be nonnegative");
    }
    auto split = [&](double y) { return subcritical_rate_I0(p, x - y) + subcritical_rate_I1(p, y, T); };
    const double target = subcritical_rate(p, x, T);
    if (x == 0.0) {
        return std::abs(split(0.0) - target);
    }
    std::size_t best = 0;
    double best_value = inf;
    const double step = x / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double v = split(std::min(x, step * static_cast<double>(i)));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double a = step * static_cast<double>(best > 0 ? best - 1 : 0);
    const double b = std::min(x, step * static_cast<double>(best + 1));
    const auto refined = boost::math::tools::brent_find_minima(split, a, b, std::numeric_limits<double>::digits);
    return std::abs(std::min(best_value, refined.second) - target);
}

double DegenerateLimits::time_scale(double n) const {
    if (!(n > 1.0)) {
        throw std::invalid_argument("n must exceed 1");
    }
    return time_coefficient * std::log(n);
}

DegenerateLimits degenerate_limits(const HawkesParams& p, const RegimeClass& regime, double T) {
    if (!(T > 0.0 && T < 1.0)) {
        throw std::invalid_argument("degenerate limits need 0 < T < 1");
    }
    if (regime.classification == Regime::critical) {
        throw std::invalid_argument("the critical regime has a non-degenerate rate function");
    }
    if (classify(p).classification != regime.classification) {
        throw std::invalid_argument("regime class does not match the parameters");
    }
    const double gap = std::abs(p.alpha() - p.beta());
    DegenerateLimits out;
    out.regime = regime.classification;
    out.time_coefficient = 1.0 / gap;
    if (regime.classification == Regime::supercritical) {
        out.z_exponent = 1.0 + T;
        out.n_constant = 1.0 / gap;
    } else {
        out.z_exponent = 1.0 - T;
    }
    return out;
}

}  // namespace hawkes_ld
