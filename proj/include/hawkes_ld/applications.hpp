#pragma once

#include "hawkes_ld/params.hpp"
#include "hawkes_ld/simulation.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace hawkes_ld {

enum class ClaimKind { poisson, deterministic, exponential, generic };

std::string to_string(ClaimKind k);

/// Claim-size distribution: log-MGF, the edge theta_plus of its finite
/// domain (may be +infinity), and the mean.
class ClaimModel {
public:
    static ClaimModel poisson(double rate);
    static ClaimModel deterministic(double size);
    static ClaimModel exponential(double mean);
    /// `log_mgf` must be finite and convex on (-inf, theta_plus); `sampler`
    /// is only needed for Monte Carlo.
    static ClaimModel generic(std::function<double(double)> log_mgf, double theta_plus, double mean,
                              std::function<double(std::mt19937_64&)> sampler = {});

    ClaimKind kind() const noexcept { return kind_; }
    /// Rate, size or mean of the built-in kinds; the mean for generic models.
    double parameter() const noexcept { return param_; }
    double theta_plus() const noexcept { return theta_plus_; }
    double mean() const noexcept { return mean_; }

    /// log E[e^{theta Y}]; +infinity at and above theta_plus.
    double log_mgf(double theta) const;
    double sample(std::mt19937_64& rng) const;

private:
    ClaimModel(ClaimKind kind, double param, double theta_plus, double mean);

    ClaimKind kind_;
    double param_;
    double theta_plus_;
    double mean_;
    std::function<double(double)> generic_log_mgf_;
    std::function<double(std::mt19937_64&)> sampler_;
};

/// sup_theta { theta v - log E[e^{theta Y}] }; +infinity for v < 0.
double claim_conjugate(const ClaimModel& claims, double v);

/// Ruin time of the deterministic fluid limit: the T at which the expected
/// scaled claim total reaches x. +infinity when it never does.
double lln_ruin_time(const HawkesParams& p, const ClaimModel& claims, double x);

struct RuinSpec {
    double x = 1.0;  ///< initial surplus per unit of initial intensity
    double T = 1.0;
    ClaimModel claims = ClaimModel::poisson(1.0);

    void validate() const;
};

/// A tail exponent. `degenerate` marks the law-of-large-numbers regime where
/// the event is typical and the exponent is 0.
struct ExponentResult {
    double value = 0.0;
    bool degenerate = false;
};

/// inf over y > 0, 0 <= z <= x of H(y;T) + y conj((x - z)/y) + theta_plus z,
/// with z = 0 when theta_plus is infinite.
ExponentResult ruin_exponent(const HawkesParams& p, const RuinSpec& spec, double tol = 1e-10);

/// Exponent of the probability that an infinite-server queue with service
/// time c, fed by the Hawkes arrivals, holds at least n x customers at some
/// time in [0, T].
ExponentResult queue_loss_exponent(const HawkesParams& p, double x, double T, double c, double tol = 1e-10);

/// P(surplus n x + premium_rate t - total claims <= 0 for some t <= T) with
/// Z_0 = n, by simulation.
McEstimate mc_ruin_probability(const HawkesParams& p, const RuinSpec& spec, double n, double premium_rate,
                               std::size_t trials, std::uint64_t seed);

}  // namespace hawkes_ld
