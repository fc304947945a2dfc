#include "hawkes_ld/applications.hpp"

#include "hawkes_ld/rate.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hawkes_ld {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Bits of precision asked of Brent's method; the abscissa is then good to
/// about 1e-9 relative and the minimum value to far better.
constexpr int min_bits = 30;

template <class F>
std::pair<double, double> minimize(F f, double a, double b) {
    if (a == b) {
        return {a, f(a)};
    }
    std::uintmax_t max_iter = 200;
    return boost::math::tools::brent_find_minima(f, std::min(a, b), std::max(a, b), min_bits, max_iter);
}

void check_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite and positive");
    }
}

/// sup over theta < theta_plus of theta v - log_mgf(theta), by bracketing the
/// concave objective and a 1-D maximization.
double generic_conjugate(const ClaimModel& m, double v) {
    auto neg = [&](double theta) { return m.log_mgf(theta) - theta * v; };
    if (v == m.mean()) {
        return 0.0;
    }
    double a = 0.0;
    double b = 0.0;
    if (v > m.mean()) {
        if (std::isfinite(m.theta_plus())) {
            b = m.theta_plus() * (1.0 - 1e-12);
        } else {
            b = 1.0;
            while (neg(2.0 * b) < neg(b) && b < 1e12) {
                b *= 2.0;
            }
            b *= 2.0;
        }
    } else {
        a = -1.0;
        while (neg(2.0 * a) < neg(a) && a > -1e12) {
            a *= 2.0;
        }
        a *= 2.0;
    }
    return std::max(0.0, -minimize(neg, a, b).second);
}

}  // namespace

std::string to_string(ClaimKind k) {
    switch (k) {
    case ClaimKind::poisson:
        return "poisson";
    case ClaimKind::deterministic:
        return "deterministic";
    case ClaimKind::exponential:
        return "exponential";
    case ClaimKind::generic:
        return "generic";
    }
    return "unknown";
}

ClaimModel::ClaimModel(ClaimKind kind, double param, double theta_plus, double mean)
    : kind_(kind), param_(param), theta_plus_(theta_plus), mean_(mean) {
    check_finite_positive(param, "claim parameter");
    check_finite_positive(mean, "claim mean");
    if (!(theta_plus > 0.0)) {
        throw std::invalid_argument("theta_plus must be positive");
    }
}

ClaimModel ClaimModel::poisson(double rate) {
    return ClaimModel(ClaimKind::poisson, rate, inf, rate);
}

ClaimModel ClaimModel::deterministic(double size) {
    return ClaimModel(ClaimKind::deterministic, size, inf, size);
}

ClaimModel ClaimModel::exponential(double mean) {
    check_finite_positive(mean, "claim mean");
    return ClaimModel(ClaimKind::exponential, mean, 1.0 / mean, mean);
}

ClaimModel ClaimModel::generic(std::function<double(double)> log_mgf, double theta_plus, double mean,
                               std::function<double(std::mt19937_64&)> sampler) {
    if (!log_mgf) {
        throw std::invalid_argument("generic claim model needs a log-MGF");
    }
    ClaimModel m(ClaimKind::generic, mean, theta_plus, mean);
    m.generic_log_mgf_ = std::move(log_mgf);
    m.sampler_ = std::move(sampler);
    return m;
}

double ClaimModel::log_mgf(double theta) const {
    if (theta >= theta_plus_) {
        return inf;
    }
    switch (kind_) {
    case ClaimKind::poisson:
        return param_ * std::expm1(theta);
    case ClaimKind::deterministic:
        return param_ * theta;
    case ClaimKind::exponential:
        return -std::log1p(-param_ * theta);
    case ClaimKind::generic:
        return generic_log_mgf_(theta);
    }
    return inf;
}

double ClaimModel::sample(std::mt19937_64& rng) const {
    switch (kind_) {
    case ClaimKind::poisson:
        return static_cast<double>(std::poisson_distribution<long long>(param_)(rng));
    case ClaimKind::deterministic:
        return param_;
    case ClaimKind::exponential:
        return std::exponential_distribution<double>(1.0 / param_)(rng);
    case ClaimKind::generic:
        if (!sampler_) {
            throw std::invalid_argument("generic claim model has no sampler");
        }
        return sampler_(rng);
    }
    return 0.0;
}

double claim_conjugate(const ClaimModel& claims, double v) {
    if (std::isnan(v)) {
        throw std::invalid_argument("v must not be NaN");
    }
    if (v < 0.0) {
        return inf;
    }
    const double a = claims.parameter();
    switch (claims.kind()) {
    case ClaimKind::poisson:
        return v == 0.0 ? a : v * std::log(v / a) - v + a;
    case ClaimKind::deterministic:
        return v == a ? 0.0 : inf;
    case ClaimKind::exponential:
        return v == 0.0 ? inf : v / a - 1.0 - std::log(v / a);
    case ClaimKind::generic:
        return generic_conjugate(claims, v);
    }
    return inf;
}

double lln_ruin_time(const HawkesParams& p, const ClaimModel& claims, double x) {
    check_finite_positive(x, "x");
    const double d = p.alpha() - p.beta();
    const double u = x / claims.mean();
    if (d == 0.0) {
        return u;
    }
    if (d * u + 1.0 <= 0.0) {
        return inf;
    }
    return std::log1p(d * u) / d;
}

void RuinSpec::validate() const {
    check_finite_positive(x, "x");
    check_finite_positive(T, "T");
}

ExponentResult ruin_exponent(const HawkesParams& p, const RuinSpec& spec, double tol) {
    spec.validate();
    const double x = spec.x;
    const double T = spec.T;
    const ClaimModel& claims = spec.claims;
    if (T >= lln_ruin_time(p, claims, x)) {
        return {0.0, true};
    }
    auto H = [&](double y) { return rate_H(p, y, T, tol).value; };
    if (claims.kind() == ClaimKind::deterministic) {
        return {H(x / claims.mean()), false};
    }
    const double typical = lln_n(p, T);
    // For claims totalling w, H(y) falls until y = typical and the perspective
    // term y conj(w/y) falls until y = w/mean, so the minimizer lies between.
    auto inner = [&](double w) {
        if (w <= 0.0) {
            return no_event_rate(p, T);
        }
        auto objective = [&](double y) { return H(y) + y * claim_conjugate(claims, w / y); };
        return minimize(objective, typical, w / claims.mean()).second;
    };
    if (!std::isfinite(claims.theta_plus())) {
        return {std::max(0.0, inner(x)), false};
    }
    const double tp = claims.theta_plus();
    auto outer = [&](double z) { return inner(x - z) + tp * z; };
    const auto best = minimize(outer, 0.0, x);
    return {std::max(0.0, std::min({best.second, outer(0.0), outer(x)})), false};
}

ExponentResult queue_loss_exponent(const HawkesParams& p, double x, double T, double c, double tol) {
    check_finite_positive(x, "x");
    check_finite_positive(T, "T");
    check_finite_positive(c, "c");
    const double window = std::min(T, c);
    // Largest number in the system along the fluid path: arrivals over the
    // last c time units, scaled by n.
    double typical = lln_n(p, window);
    if (T > c && p.alpha() >= p.beta()) {
        typical = lln_n(p, T) - lln_n(p, T - c);
    }
    if (x <= typical) {
        return {0.0, true};
    }

    // Before the first departure the count is N_s itself.
    double first = rate_H(p, x, window, tol).value;
    for (int i = 1; i < 8; ++i) {
        first = std::min(first, rate_H(p, x, window * i / 8.0, tol).value);
    }
    if (T <= c) {
        return {first, false};
    }

    // Afterwards: the intensity is scaled to y at s - c, then N grows by x
    // over the last c units.
    const double typical_window = lln_n(p, c);
    auto branch = [&](double s) {
        const double lag = s - c;
        if (lag <= 0.0) {
            return rate_H(p, x, c, tol).value;
        }
        auto objective = [&](double y) {
            return y * rate_H(p, x / y, c, tol).value + rate_J(p, y, lag, tol).value;
        };
        return minimize(objective, lln_z(p, lag), x / typical_window).second;
    };
    const int coarse = 64;
    double lo = c;
    double hi = T;
    double step = (hi - lo) / (coarse - 1);
    double best_s = c;
    double best = inf;
    auto scan = [&](double a, int points) {
        for (int i = 0; i < points; ++i) {
            const double s = std::min(T, a + step * i);
            const double v = branch(s);
            if (v < best) {
                best = v;
                best_s = s;
            }
        }
    };
    scan(lo, coarse);
    for (int round = 0; round < 2; ++round) {
        const double a = std::max(c, best_s - step);
        const double b = std::min(T, best_s + step);
        step /= 4.0;
        scan(a, static_cast<int>(std::lround((b - a) / step)) + 1);
    }
    const auto polished = minimize(branch, std::max(c, best_s - step), std::min(T, best_s + step));
    best = std::min(best, polished.second);
    return {std::max(0.0, std::min(first, best)), false};
}

McEstimate mc_ruin_probability(const HawkesParams& p, const RuinSpec& spec, double n, double premium_rate,
                               std::size_t trials, std::uint64_t seed) {
    spec.validate();
    check_finite_positive(n, "n");
    if (trials == 0) {
        return {0.0, 0.0, false};
    }
    const double T = spec.T;
    const double rho = premium_rate;
    auto hits = run_trials(trials, seed, [&](std::mt19937_64& rng) {
        double claims_total = 0.0;
        bool ruined = false;
        auto surplus = [&](double t) { return n * spec.x + rho * t - claims_total; };
        for_each_event(p, n, T, rng, [&](double t) {
            // With a negative premium the surplus can also hit 0 between claims.
            if (rho < 0.0 && surplus(t) <= 0.0) {
                ruined = true;
                return false;
            }
            claims_total += spec.claims.sample(rng);
            ruined = surplus(t) <= 0.0;
            return !ruined;
        });
        if (!ruined && rho < 0.0) {
            ruined = surplus(T) <= 0.0;
        }
        return ruined ? 1.0 : 0.0;
    });
    double total = 0.0;
    for (double h : hits) {
        total += h;
    }
    const double k = static_cast<double>(trials);
    const double est = total / k;
    return {est, std::sqrt(est * (1.0 - est) / k), true};
}

}  // namespace hawkes_ld
