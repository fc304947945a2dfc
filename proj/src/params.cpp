#include "hawkes_ld/params.hpp"

#include <cmath>

namespace hawkes_ld {

HawkesParams::HawkesParams(double alpha, double beta, double mu) : alpha_(alpha), beta_(beta), mu_(mu) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw std::invalid_argument("alpha must be finite and strictly positive");
    }
    if (!std::isfinite(beta) || beta <= 0.0) {
        throw std::invalid_argument("beta must be finite and strictly positive");
    }
    if (!std::isfinite(mu) || mu < 0.0) {
        throw std::invalid_argument("mu must be finite and non-negative");
    }
}

double lln_z(const HawkesParams& p, double t) {
    return std::exp((p.alpha() - p.beta()) * t);
}

double lln_n(const HawkesParams& p, double t) {
    const double d = p.alpha() - p.beta();
    if (d == 0.0) {
        return t;
    }
    return std::expm1(d * t) / d;
}

double no_event_rate(const HawkesParams& p, double T) {
    return -std::expm1(-p.beta() * T) / p.beta();
}

}  // namespace hawkes_ld
