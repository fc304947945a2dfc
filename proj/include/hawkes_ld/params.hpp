#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_ld {

/// Thrown when an iterative solver exhausts its budget or a flow blows up
/// where a finite value was required.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Linear Markovian Hawkes process: kernel alpha * exp(-beta t), rate mu + z.
class HawkesParams {
public:
    HawkesParams(double alpha, double beta, double mu = 0.0);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double mu() const noexcept { return mu_; }

private:
    double alpha_;
    double beta_;
    double mu_;
};

/// Law-of-large-numbers limit of Z_t / Z_0, i.e. exp((alpha - beta) t).
double lln_z(const HawkesParams& p, double t);

/// Law-of-large-numbers limit of N_t / Z_0:
/// (exp((alpha - beta) t) - 1) / (alpha - beta), or t when alpha == beta.
double lln_n(const HawkesParams& p, double t);

/// (1 - exp(-beta T)) / beta, the rate of the "no events on [0,T]" path.
double no_event_rate(const HawkesParams& p, double T);

}  // namespace hawkes_ld
