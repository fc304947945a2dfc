#pragma once

#include "hawkes_ld/params.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace hawkes_ld {

enum class Regime { critical, supercritical, subcritical };

std::string to_string(Regime r);

struct RegimeClass {
    Regime classification = Regime::critical;
    /// alpha and beta count as equal when |alpha - beta| <= tolerance.
    double tolerance = 0.0;
};

/// Sign of alpha - beta with relative tolerance 1e-12 max(alpha, beta). A
/// caller may force a class, which is then returned as is.
RegimeClass classify(const HawkesParams& p, std::optional<Regime> forced = std::nullopt);

/// Critical regime, rate of Z_{t_n T}/n: 2 (sqrt(x) - 1)^2 / (alpha^2 T) for x >= 0.
double critical_rate_Z(double alpha, double x, double T);

/// Critical regime limiting log-MGF of N_{t_n T}/(n t_n). Negative tanh branch
/// for theta <= 0, tan branch above; +infinity from the pole pi^2/(2 alpha^2 T^2) on.
double critical_lambda(double alpha, double theta, double T);

/// Derivative of critical_lambda; T at theta = 0.
double critical_lambda_slope(double alpha, double theta, double T);

/// Pole of the tan branch of critical_lambda.
double critical_lambda_pole(double alpha, double T);

/// Legendre transform of critical_lambda; +infinity for x <= 0.
double critical_rate_N(double alpha, double x, double T);

/// Subcritical rate of N_{nT}/n:
/// x log(beta x/(alpha x + 1 + mu beta T)) - x + (alpha x + 1 + mu beta T)/beta.
double subcritical_rate(const HawkesParams& p, double x, double T);

/// The same rate with mu = 0 (initial-intensity offspring only).
double subcritical_rate_I0(const HawkesParams& p, double x);

/// Large-time rate of the immigrant part over a window of length T; needs mu > 0.
double subcritical_rate_I1(const HawkesParams& p, double x, double T);

/// |inf_{0<=y<=x} {I0(x - y) + I1(y)} - subcritical_rate(x)|, the infimum
/// found by a grid scan followed by a bracketed 1-D minimization.
double decomposition_residual(const HawkesParams& p, double x, double T, std::size_t grid_size = 2048);

/// Concentration constants of the degenerate (indicator) rate functions.
struct DegenerateLimits {
    Regime regime = Regime::supercritical;
    /// Z_{t_n T} / n^{z_exponent} -> z_constant.
    double z_constant = 1.0;
    double z_exponent = 1.0;
    /// N_{t_n T} / n^{z_exponent} -> n_constant (supercritical only).
    std::optional<double> n_constant;
    /// t_n = time_coefficient * log n.
    double time_coefficient = 1.0;

    double time_scale(double n) const;
};

/// Needs 0 < T < 1 and a non-critical class consistent with the parameters.
DegenerateLimits degenerate_limits(const HawkesParams& p, const RegimeClass& regime, double T);

}  // namespace hawkes_ld
