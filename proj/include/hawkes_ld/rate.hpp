#pragma once

#include "hawkes_ld/params.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hawkes_ld {

/// Where the Legendre supremum was attained.
enum class Boundary {
    interior,     ///< stationary point theta* found by root finding
    lln_zero,     ///< x is the law-of-large-numbers value, theta* = 0
    domain_edge,  ///< x sits on the edge of the effective domain (or the left clamp was hit)
    infinite,     ///< x outside the domain; the rate is +infinity
};

std::string to_string(Boundary b);

struct LegendreResult {
    double value = 0.0;
    std::optional<double> theta_star;
    Boundary boundary = Boundary::interior;
    int iterations = 0;
};

/// J(x;T) = sup_theta { theta x - A(T;theta) }: scalar rate of Z_T/n.
LegendreResult rate_J(const HawkesParams& p, double x, double T, double tol = 1e-10);

/// H(x;T) = sup_theta { theta x - C(T;theta/alpha) + theta/alpha }: scalar rate of N_T/n.
LegendreResult rate_H(const HawkesParams& p, double x, double T, double tol = 1e-10);

enum class PathKind {
    z_path,  ///< scaled intensity g with g(0) = 1
    n_path,  ///< scaled counting path h with h(0) = 0, nondecreasing
};

/// A path sampled on a grid over [0, T]. Between grid points a Z-path is
/// treated as log-linear and an N-path as linear.
class SampledPath {
public:
    SampledPath(PathKind kind, std::vector<double> times, std::vector<double> values);

    PathKind kind() const noexcept { return kind_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double horizon() const { return times_.back(); }
    double final_value() const { return values_.back(); }

private:
    PathKind kind_;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Sample-path rate of a Z-path. Each segment is integrated in closed form
/// assuming exponential interpolation; +infinity if some segment decays faster
/// than e^{-beta t}.
double functional_I_Z(const HawkesParams& p, const SampledPath& g);

/// Sample-path rate of an N-path with piecewise-constant slope; the intensity
/// term is propagated exactly across each segment.
double functional_I_N(const HawkesParams& p, const SampledPath& h);

/// Most likely Z-path ending at x, on a uniform grid of grid_size points.
/// Throws NumericalFailure unless x lies in the interior of the domain of J.
SampledPath optimal_path_Z(const HawkesParams& p, double x, double T, std::size_t grid_size = 2048,
                           double tol = 1e-10);

/// Most likely N-path ending at x, on a uniform grid of grid_size points.
SampledPath optimal_path_N(const HawkesParams& p, double x, double T, std::size_t grid_size = 2048,
                           double tol = 1e-10);

/// CSV `t,value`.
void write_path_csv(std::ostream& out, const SampledPath& path);

/// CSV `x,rate,theta_star,boundary`; theta_star is empty when absent.
void write_rate_sweep_csv(std::ostream& out, const std::vector<double>& xs,
                          const std::vector<LegendreResult>& results);

}  // namespace hawkes_ld
