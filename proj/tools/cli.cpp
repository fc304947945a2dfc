#include "cli.hpp"

#include "hawkes_ld/applications.hpp"
#include "hawkes_ld/csv.hpp"
#include "hawkes_ld/mgf_ode.hpp"
#include "hawkes_ld/rate.hpp"
#include "hawkes_ld/regimes.hpp"
#include "hawkes_ld/simulation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

namespace hawkes_ld::cli {

namespace {

/// Thrown for argument combinations CLI11 cannot express; maps to exit 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    double alpha = 1.0;
    double beta = 1.0;
    double mu = 0.0;
    double tol = 1e-10;
    std::uint64_t seed = 42;
    std::size_t trials = 100000;
    std::string output;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) {
        throw UsageError("--steps must be at least 1");
    }
    if (b < a) {
        throw UsageError("range end is below range start");
    }
    if (n == 1 || a == b) {
        return {a};
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

/// Either the caller's stream or the file named by --output.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw UsageError("cannot open output file " + path);
            }
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

ClaimModel make_claims(const std::string& kind, double param) {
    if (kind == "poisson") {
        return ClaimModel::poisson(param);
    }
    if (kind == "deterministic") {
        return ClaimModel::deterministic(param);
    }
    return ClaimModel::exponential(param);
}

struct SweepArgs {
    double x = 0.0;
    double x_max = std::nan("");
    double horizon = 0.0;
    double horizon_max = std::nan("");
    std::size_t steps = 21;
};

/// Sweeps x when --x-max is given, T otherwise (a single row if neither).
void sweep(const SweepArgs& a, const std::string& value_name, std::ostream& out,
           const std::function<double(double, double)>& f) {
    const bool over_x = !std::isnan(a.x_max);
    if (over_x && !std::isnan(a.horizon_max)) {
        throw UsageError("give either --x-max or --horizon-max, not both");
    }
    if (over_x) {
        write_csv_row(out, {"x", value_name});
        for (double x : linspace(a.x, a.x_max, a.steps)) {
            write_csv_row(out, {format_double(x), format_double(f(x, a.horizon))});
        }
        return;
    }
    const double t_max = std::isnan(a.horizon_max) ? a.horizon : a.horizon_max;
    write_csv_row(out, {"T", value_name});
    for (double T : linspace(a.horizon, t_max, a.steps)) {
        write_csv_row(out, {format_double(T), format_double(f(a.x, T))});
    }
}

int cmd_rate(const HawkesParams& p, const Globals& g, const std::string& kind, double T, double x_min, double x_max,
             std::size_t steps, std::ostream& out, std::ostream& err) {
    const auto xs = linspace(x_min, std::isnan(x_max) ? x_min : x_max, steps);
    std::vector<LegendreResult> rows;
    int code = exit_ok;
    Sink sink(g.output, out);
    sink.get() << "x,rate,theta_star,boundary\n";
    for (double x : xs) {
        try {
            const auto r = kind == "z" ? rate_J(p, x, T, g.tol) : rate_H(p, x, T, g.tol);
            write_csv_row(sink.get(), {format_double(x), format_double(r.value),
                                       r.theta_star ? format_double(*r.theta_star) : std::string(),
                                       to_string(r.boundary)});
        } catch (const NumericalFailure& e) {
            err << "x = " << format_double(x) << ": " << e.what() << '\n';
            write_csv_row(sink.get(), {format_double(x), "nan", "", "failed"});
            code = exit_numerical;
        }
    }
    return code;
}

int cmd_path(const HawkesParams& p, const Globals& g, const std::string& kind, double T, double x,
             std::size_t grid_size, std::ostream& out, std::ostream& err) {
    const SampledPath path =
        kind == "z" ? optimal_path_Z(p, x, T, grid_size, g.tol) : optimal_path_N(p, x, T, grid_size, g.tol);
    if (std::abs(path.final_value() - x) > 1e-6) {
        err << "optimal path misses its endpoint: " << format_double(path.final_value()) << " vs "
            << format_double(x) << '\n';
        return exit_numerical;
    }
    Sink sink(g.output, out);
    write_path_csv(sink.get(), path);
    return exit_ok;
}

int cmd_validate(const HawkesParams& p, const Globals& g, double z0, double T, const std::vector<double>& thetas,
                 const std::string& process, std::ostream& out) {
    const SimSpec spec{z0, T, g.seed};
    spec.validate();
    Sink sink(g.output, out);
    write_csv_row(sink.get(), {"process", "theta", "mc_log_mgf", "mc_se", "ode_log_mgf", "z_score", "status"});
    bool all_ok = true;
    for (const std::string proc : {"z", "n"}) {
        if (process != "both" && process != proc) {
            continue;
        }
        for (double theta : thetas) {
            const double ode = proc == "z" ? log_mgf_Z(p, z0, theta, T, g.tol) : log_mgf_N(p, z0, theta, T, g.tol);
            if (!std::isfinite(ode)) {
                write_csv_row(sink.get(), {proc, format_double(theta), "", "", "inf", "", "infinite_mgf"});
                continue;
            }
            const McEstimate mc =
                proc == "z" ? mc_log_mgf_Z(p, spec, theta, g.trials) : mc_log_mgf_N(p, spec, theta, g.trials);
            std::string status = "ok";
            double z = 0.0;
            if (!mc.valid) {
                status = "mc_failed";
                all_ok = false;
            } else {
                const double diff = mc.estimate - ode;
                z = diff == 0.0 ? 0.0 : diff / mc.standard_error;
                if (!(std::abs(z) <= 4.0)) {
                    status = "mismatch";
                    all_ok = false;
                }
            }
            write_csv_row(sink.get(), {proc, format_double(theta), format_double(mc.estimate),
                                       format_double(mc.standard_error), format_double(ode), format_double(z),
                                       status});
        }
    }
    return all_ok ? exit_ok : exit_numerical;
}

void cmd_regime(const HawkesParams& p, const Globals& g, double T, double x_min, double x_max, std::size_t steps,
                std::ostream& out) {
    const RegimeClass rc = classify(p);
    Sink sink(g.output, out);
    auto& o = sink.get();
    write_csv_row(o, {"regime", "quantity", "argument", "value"});
    const std::string name = to_string(rc.classification);
    auto row = [&](const std::string& q, double arg, double v) {
        write_csv_row(o, {name, q, format_double(arg), format_double(v)});
    };
    const auto xs = linspace(x_min, x_max, steps);
    if (rc.classification == Regime::critical) {
        for (double x : xs) {
            row("rate_Z", x, critical_rate_Z(p.alpha(), x, T));
        }
        for (double x : xs) {
            row("rate_N", x, critical_rate_N(p.alpha(), x, T));
        }
        const double pole = critical_lambda_pole(p.alpha(), T);
        for (double theta : linspace(-pole, 0.95 * pole, steps)) {
            row("lambda", theta, critical_lambda(p.alpha(), theta, T));
        }
        return;
    }
    if (rc.classification == Regime::subcritical) {
        for (double x : xs) {
            row("rate", x, subcritical_rate(p, x, T));
        }
        for (double x : xs) {
            row("rate_I0", x, subcritical_rate_I0(p, x));
        }
        if (p.mu() > 0.0) {
            for (double x : xs) {
                row("rate_I1", x, subcritical_rate_I1(p, x, T));
            }
        }
    }
    if (T > 0.0 && T < 1.0) {
        const DegenerateLimits lim = degenerate_limits(p, rc, T);
        row("z_constant", T, lim.z_constant);
        row("z_exponent", T, lim.z_exponent);
        if (lim.n_constant) {
            row("n_constant", T, *lim.n_constant);
        }
        row("time_coefficient", T, lim.time_coefficient);
    }
}

/// Writes the five figure datasets into `dir`; returns the file names.
std::vector<std::string> cmd_figures(const HawkesParams& p, const Globals& g, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        const auto path = (std::filesystem::path(dir) / name).string();
        written.push_back(path);
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw UsageError("cannot write " + path);
        }
        return f;
    };
    auto panel_row = [](std::ostream& o, const char* panel, double x, double T, double v) {
        write_csv_row(o, {panel, format_double(x), format_double(T), format_double(v)});
    };
    {
        auto f = open("fig1_rate_J.csv");
        f << "panel,x,T,value\n";
        for (double x : linspace(0.5, 6.0, 56)) {
            panel_row(f, "a", x, 5.0, rate_J(p, x, 5.0, g.tol).value);
        }
        for (double T : linspace(0.25, 10.0, 40)) {
            panel_row(f, "b", 3.0, T, rate_J(p, 3.0, T, g.tol).value);
        }
    }
    {
        auto f = open("fig2_rate_H.csv");
        f << "panel,x,T,value\n";
        for (double x : linspace(0.0, 12.0, 61)) {
            panel_row(f, "a", x, 5.0, rate_H(p, x, 5.0, g.tol).value);
        }
        for (double T : linspace(0.25, 10.0, 40)) {
            panel_row(f, "b", 5.0, T, rate_H(p, 5.0, T, g.tol).value);
        }
    }
    {
        auto f = open("fig3_optimal_paths.csv");
        f << "panel,t,value\n";
        const auto gz = optimal_path_Z(p, 3.0, 5.0, 201, g.tol);
        const auto hn = optimal_path_N(p, 8.0, 5.0, 201, g.tol);
        for (std::size_t i = 0; i < gz.times().size(); ++i) {
            write_csv_row(f, {"z", format_double(gz.times()[i]), format_double(gz.values()[i])});
        }
        for (std::size_t i = 0; i < hn.times().size(); ++i) {
            write_csv_row(f, {"n", format_double(hn.times()[i]), format_double(hn.values()[i])});
        }
    }
    {
        auto f = open("fig4_ruin_exponent.csv");
        f << "panel,x,T,value\n";
        const auto claims = ClaimModel::poisson(1.0);
        for (double T : linspace(0.025, 0.5, 20)) {
            panel_row(f, "a", 0.5, T, ruin_exponent(p, {0.5, T, claims}, g.tol).value);
        }
        for (double x : linspace(0.1, 2.0, 20)) {
            panel_row(f, "b", x, 0.2, ruin_exponent(p, {x, 0.2, claims}, g.tol).value);
        }
    }
    {
        auto f = open("fig5_queue_exponent.csv");
        f << "panel,x,T,value\n";
        for (double x : linspace(0.5, 8.0, 16)) {
            panel_row(f, "a", x, 5.0, queue_loss_exponent(p, x, 5.0, 1.0, g.tol).value);
        }
        for (double T : linspace(0.5, 6.0, 12)) {
            panel_row(f, "b", 5.0, T, queue_loss_exponent(p, 5.0, T, 1.0, g.tol).value);
        }
    }
    return written;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Large-deviation rate functions, optimal paths and tail exponents for Markovian Hawkes processes "
                 "with a large initial intensity"};
    app.name(args.empty() ? "hawkes-ld" : args[0]);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_config("--config", "", "flat `key = value` file; command-line flags take precedence");
    app.allow_config_extras(false);

    Globals g;
    app.add_option("--alpha", g.alpha, "jump of the intensity per event (> 0)");
    app.add_option("--beta", g.beta, "decay rate of the intensity (> 0)");
    app.add_option("--mu", g.mu, "base intensity (>= 0)");
    app.add_option("--tol", g.tol, "ODE local error tolerance");
    app.add_option("--seed", g.seed, "Monte Carlo seed");
    app.add_option("--trials", g.trials, "Monte Carlo replications");
    app.add_option("-o,--output", g.output, "output file (directory for `figures`); stdout if empty");

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        return sub;
    };

    std::string kind = "z";
    double horizon = 5.0;
    double x_min = 1.0;
    double x_max = std::nan("");
    std::size_t steps = 101;
    std::size_t grid_size = 2048;
    double x = 3.0;

    CLI::App* rate = add("rate", "rate function of Z_T/n (kind z) or N_T/n (kind n) over an x-range");
    rate->add_option("--kind", kind, "z or n")->check(CLI::IsMember({"z", "n"}));
    rate->add_option("-T,--horizon", horizon, "horizon T");
    rate->add_option("--x-min", x_min, "first x");
    rate->add_option("--x-max", x_max, "last x (defaults to --x-min)");
    rate->add_option("--steps", steps, "number of x values");

    CLI::App* path = add("path", "most likely path of Z/n (kind z) or N/n (kind n) ending at x");
    path->add_option("--kind", kind, "z or n")->check(CLI::IsMember({"z", "n"}));
    path->add_option("-T,--horizon", horizon, "horizon T");
    path->add_option("-x,--x", x, "terminal value");
    path->add_option("--grid-size", grid_size, "number of grid points");

    SweepArgs ruin_args{0.5, std::nan(""), 0.2, std::nan(""), 21};
    std::string claims = "poisson";
    double claim_param = 1.0;
    CLI::App* ruin = add("ruin", "finite-horizon ruin exponent, swept over T (or over x with --x-max)");
    ruin->add_option("-x,--x", ruin_args.x, "initial surplus per unit of initial intensity");
    ruin->add_option("--x-max", ruin_args.x_max, "sweep x from --x to here");
    ruin->add_option("-T,--horizon", ruin_args.horizon, "horizon T");
    ruin->add_option("--horizon-max", ruin_args.horizon_max, "sweep T from --horizon to here");
    ruin->add_option("--steps", ruin_args.steps, "points in the sweep");
    ruin->add_option("--claims", claims, "claim-size law")
        ->check(CLI::IsMember({"poisson", "deterministic", "exponential"}));
    ruin->add_option("--claim-param", claim_param, "Poisson rate, fixed size, or exponential mean");

    SweepArgs queue_args{5.0, std::nan(""), 5.0, std::nan(""), 21};
    double service = 1.0;
    CLI::App* queue = add("queue", "infinite-server queue loss exponent, swept over T (or over x with --x-max)");
    queue->add_option("-x,--x", queue_args.x, "buffer level per unit of initial intensity");
    queue->add_option("--x-max", queue_args.x_max, "sweep x from --x to here");
    queue->add_option("-T,--horizon", queue_args.horizon, "horizon T");
    queue->add_option("--horizon-max", queue_args.horizon_max, "sweep T from --horizon to here");
    queue->add_option("--steps", queue_args.steps, "points in the sweep");
    queue->add_option("-c,--service", service, "deterministic service time c");

    double z0 = 1.0;
    CLI::App* simulate = add("simulate", "one exact sample path; CSV of event times");
    simulate->add_option("--z0", z0, "initial intensity excess Z_0");
    simulate->add_option("-T,--horizon", horizon, "horizon T");

    std::vector<double> thetas{0.0, 0.1, 0.2};
    std::string process = "both";
    CLI::App* validate = add("validate", "Monte Carlo log-MGF of Z_T and N_T against the ODE prediction");
    validate->add_option("--z0", z0, "initial intensity excess Z_0");
    validate->add_option("-T,--horizon", horizon, "horizon T");
    validate->add_option("--thetas", thetas, "comma-separated theta values")->delimiter(',');
    validate->add_option("--process", process, "z, n or both")->check(CLI::IsMember({"z", "n", "both"}));

    CLI::App* regime = add("regime", "closed-form rates of the regime selected by alpha vs beta");
    regime->add_option("-T,--horizon", horizon, "horizon T");
    regime->add_option("--x-min", x_min, "first x");
    regime->add_option("--x-max", x_max, "last x (defaults to --x-min)");
    regime->add_option("--steps", steps, "number of x values");

    CLI::App* figures = add("figures", "write the five figure datasets into the --output directory (default figures)");

    try {
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        const HawkesParams p(g.alpha, g.beta, g.mu);
        if (!(g.tol > 0.0)) {
            throw UsageError("--tol must be positive");
        }
        if (*rate) {
            return cmd_rate(p, g, kind, horizon, x_min, x_max, steps, out, err);
        }
        if (*path) {
            return cmd_path(p, g, kind, horizon, x, grid_size, out, err);
        }
        if (*ruin) {
            const ClaimModel model = make_claims(claims, claim_param);
            Sink sink(g.output, out);
            sweep(ruin_args, "I_tau", sink.get(),
                  [&](double xv, double T) { return ruin_exponent(p, {xv, T, model}, g.tol).value; });
            return exit_ok;
        }
        if (*queue) {
            Sink sink(g.output, out);
            sweep(queue_args, "G", sink.get(),
                  [&](double xv, double T) { return queue_loss_exponent(p, xv, T, service, g.tol).value; });
            return exit_ok;
        }
        if (*simulate) {
            const EventPath ev = hawkes_ld::simulate(p, SimSpec{z0, horizon, g.seed});
            Sink sink(g.output, out);
            write_event_csv(sink.get(), ev);
            return exit_ok;
        }
        if (*validate) {
            return cmd_validate(p, g, z0, horizon, thetas, process, out);
        }
        if (*regime) {
            cmd_regime(p, g, horizon, x_min, std::isnan(x_max) ? x_min : x_max, steps, out);
            return exit_ok;
        }
        if (*figures) {
            for (const auto& f : cmd_figures(p, g, g.output.empty() ? "figures" : g.output)) {
                out << f << '\n';
            }
            return exit_ok;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        err << "invalid argument: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_usage;
}

}  // namespace hawkes_ld::cli
