#pragma once

#include "hawkes_ld/params.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace hawkes_ld {

/// Initial state, horizon and seed of one simulation. Z_0 is taken to equal
/// Z_{0-}: there is no jump at time zero.
struct SimSpec {
    double z0 = 0.0;
    double horizon = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
};

/// One realization on [0, horizon]. Only the event times are stored; Z and N
/// are reconstructed on demand.
class EventPath {
public:
    EventPath(HawkesParams params, double z0, double horizon, std::vector<double> event_times);

    const std::vector<double>& event_times() const noexcept { return times_; }
    const HawkesParams& params() const noexcept { return params_; }
    double z0() const noexcept { return z0_; }
    double horizon() const noexcept { return horizon_; }

    /// Right-continuous Z_t = z0 e^{-beta t} + sum_{tau_i <= t} alpha e^{-beta (t - tau_i)}.
    double z_at(double t) const;
    /// N_t, the number of events in (0, t].
    std::size_t count(double t) const;
    /// Closed-form integral of Z over [0, t].
    double z_integral(double t) const;

private:
    void check_time(double t) const;

    HawkesParams params_;
    double z0_;
    double horizon_;
    std::vector<double> times_;
};

/// Per-trial engine seed derived from (seed, trial index) so that any
/// partition of trials across threads reproduces the serial result.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index);

/// Exact thinning sampler. Between events the intensity mu + Z decays, so the
/// intensity just after the last accepted point dominates until the next
/// event. `on_event(t)` is called for each accepted point in order; returning
/// false stops the simulation early.
template <class Rng, class OnEvent>
void for_each_event(const HawkesParams& p, double z0, double horizon, Rng& rng, OnEvent&& on_event) {
    std::exponential_distribution<double> unit_exp(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = 0.0;
    double z = z0;
    while (true) {
        const double bound = p.mu() + z;
        if (bound <= 0.0) {
            return;
        }
        const double wait = unit_exp(rng) / bound;
        const double candidate = t + wait;
        if (candidate > horizon) {
            return;
        }
        z *= std::exp(-p.beta() * wait);
        t = candidate;
        if (unit(rng) * bound <= p.mu() + z) {
            z += p.alpha();
            if (!on_event(t)) {
                return;
            }
        }
    }
}

EventPath simulate(const HawkesParams& params, const SimSpec& spec);

/// Runs `trials` independent replications, trial i seeded by
/// trial_seed(seed, i), and stores `per_trial(rng)` at index i.
/// Work is split across hardware threads; the output does not depend on the
/// split.
std::vector<double> run_trials(std::size_t trials, std::uint64_t seed,
                               const std::function<double(std::mt19937_64&)>& per_trial);

/// Monte Carlo estimate with its standard error. `valid` is false when the
/// estimator overflowed or had no usable samples.
struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    bool valid = true;
};

/// log of the sample mean of exp(v_i), with delta-method standard error.
McEstimate log_mean_exp(std::span<const double> exponents);

/// Monte Carlo log E[exp(theta Z_T)]. Only meaningful for theta well below
/// the explosion boundary theta_c(T), where exp(theta Z_T) has finite variance.
McEstimate mc_log_mgf_Z(const HawkesParams& params, const SimSpec& spec, double theta, std::size_t trials);

/// Monte Carlo log E[exp(theta N_T)]; same caveats as mc_log_mgf_Z.
McEstimate mc_log_mgf_N(const HawkesParams& params, const SimSpec& spec, double theta, std::size_t trials);

/// Monte Carlo P(N_T >= min_count) with binomial standard error.
McEstimate mc_tail_probability_N(const HawkesParams& params, const SimSpec& spec, std::size_t min_count,
                                 std::size_t trials);

/// Sample mean and standard error of Z evaluated at `t` (t <= spec.horizon).
McEstimate mc_mean_Z(const HawkesParams& params, const SimSpec& spec, double t, std::size_t trials);

/// CSV dump with header `t,event_index`, one row per event.
void write_event_csv(std::ostream& out, const EventPath& path);

}  // namespace hawkes_ld
