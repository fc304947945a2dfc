#include "hawkes_ld/simulation.hpp"

#include "hawkes_ld/csv.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <thread>

namespace hawkes_ld {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void SimSpec::validate() const {
    if (!std::isfinite(z0) || z0 < 0.0) {
        throw std::invalid_argument("z0 must be finite and non-negative");
    }
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw std::invalid_argument("horizon must be finite and strictly positive");
    }
}

EventPath::EventPath(HawkesParams params, double z0, double horizon, std::vector<double> event_times)
    : params_(params), z0_(z0), horizon_(horizon), times_(std::move(event_times)) {
    SimSpec{z0, horizon, 0}.validate();
    double prev = 0.0;
    for (double t : times_) {
        if (!(t > prev) || t > horizon_) {
            throw std::invalid_argument("event times must be strictly increasing in (0, horizon]");
        }
        prev = t;
    }
}

void EventPath::check_time(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) {
        throw std::out_of_range("time outside [0, horizon]");
    }
}

double EventPath::z_at(double t) const {
    check_time(t);
    const double beta = params_.beta();
    double z = z0_ * std::exp(-beta * t);
    for (double tau : times_) {
        if (tau > t) {
            break;
        }
        z += params_.alpha() * std::exp(-beta * (t - tau));
    }
    return z;
}

std::size_t EventPath::count(double t) const {
    check_time(t);
    return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

double EventPath::z_integral(double t) const {
    check_time(t);
    const double beta = params_.beta();
    double total = -z0_ * std::expm1(-beta * t) / beta;
    for (double tau : times_) {
        if (tau > t) {
            break;
        }
        total += -params_.alpha() * std::expm1(-beta * (t - tau)) / beta;
    }
    return total;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

EventPath simulate(const HawkesParams& params, const SimSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(trial_seed(spec.seed, 0));
    std::vector<double> times;
    for_each_event(params, spec.z0, spec.horizon, rng, [&](double t) {
        times.push_back(t);
        return true;
    });
    return EventPath(params, spec.z0, spec.horizon, std::move(times));
}

std::vector<double> run_trials(std::size_t trials, std::uint64_t seed,
                               const std::function<double(std::mt19937_64&)>& per_trial) {
    std::vector<double> out(trials);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(trials / 1024, 1));
    auto work = [&](std::size_t begin, std::size_t end) {
        std::mt19937_64 rng;
        for (std::size_t i = begin; i < end; ++i) {
            rng.seed(trial_seed(seed, i));
            out[i] = per_trial(rng);
        }
    };
    if (workers == 1) {
        work(0, trials);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (trials + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(trials, begin + chunk);
            if (begin < end) {
                pool.emplace_back(work, begin, end);
            }
        }
    }
    return out;
}

McEstimate log_mean_exp(std::span<const double> exponents) {
    if (exponents.empty()) {
        return {0.0, 0.0, false};
    }
    double m = -std::numeric_limits<double>::infinity();
    for (double v : exponents) {
        if (!std::isfinite(v)) {
            return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), false};
        }
        m = std::max(m, v);
    }
    const double k = static_cast<double>(exponents.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : exponents) {
        const double w = std::exp(v - m);
        sum += w;
        sum_sq += w * w;
    }
    const double mean = sum / k;
    const double var = exponents.size() > 1 ? std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0)) : 0.0;
    return {m + std::log(mean), std::sqrt(var / k) / mean, true};
}

McEstimate mc_log_mgf_Z(const HawkesParams& params, const SimSpec& spec, double theta, std::size_t trials) {
    spec.validate();
    if (theta == 0.0) {
        return {0.0, 0.0, trials > 0};
    }
    const double beta = params.beta();
    auto exponents = run_trials(trials, spec.seed, [&](std::mt19937_64& rng) {
        double z = spec.z0 * std::exp(-beta * spec.horizon);
        for_each_event(params, spec.z0, spec.horizon, rng, [&](double t) {
            z += params.alpha() * std::exp(-beta * (spec.horizon - t));
            return true;
        });
        return theta * z;
    });
    return log_mean_exp(exponents);
}

McEstimate mc_log_mgf_N(const HawkesParams& params, const SimSpec& spec, double theta, std::size_t trials) {
    spec.validate();
    if (theta == 0.0) {
        return {0.0, 0.0, trials > 0};
    }
    auto exponents = run_trials(trials, spec.seed, [&](std::mt19937_64& rng) {
        std::size_t n = 0;
        for_each_event(params, spec.z0, spec.horizon, rng, [&](double) {
            ++n;
            return true;
        });
        return theta * static_cast<double>(n);
    });
    return log_mean_exp(exponents);
}

McEstimate mc_tail_probability_N(const HawkesParams& params, const SimSpec& spec, std::size_t min_count,
                                 std::size_t trials) {
    spec.validate();
    if (trials == 0) {
        return {0.0, 0.0, false};
    }
    auto hits = run_trials(trials, spec.seed, [&](std::mt19937_64& rng) {
        std::size_t n = 0;
        if (min_count == 0) {
            return 1.0;
        }
        bool hit = false;
        for_each_event(params, spec.z0, spec.horizon, rng, [&](double) {
            hit = ++n >= min_count;
            return !hit;
        });
        return hit ? 1.0 : 0.0;
    });
    double total = 0.0;
    for (double h : hits) {
        total += h;
    }
    const double p = total / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), true};
}

McEstimate mc_mean_Z(const HawkesParams& params, const SimSpec& spec, double t, std::size_t trials) {
    spec.validate();
    if (!(t >= 0.0 && t <= spec.horizon)) {
        throw std::out_of_range("time outside [0, horizon]");
    }
    if (trials == 0) {
        return {0.0, 0.0, false};
    }
    const double beta = params.beta();
    auto values = run_trials(trials, spec.seed, [&](std::mt19937_64& rng) {
        double z = spec.z0 * std::exp(-beta * t);
        for_each_event(params, spec.z0, t, rng, [&](double tau) {
            z += params.alpha() * std::exp(-beta * (t - tau));
            return true;
        });
        return z;
    });
    const double k = static_cast<double>(trials);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / k;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0)) : 0.0;
    return {mean, std::sqrt(var / k), true};
}

void write_event_csv(std::ostream& out, const EventPath& path) {
    out << "t,event_index\n";
    const auto& times = path.event_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        write_csv_row(out, {format_double(times[i]), std::to_string(i + 1)});
    }
}

}  // namespace hawkes_ld
