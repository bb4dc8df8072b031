#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpo/cli.hpp"

namespace {

struct Shared {
    std::optional<double> gamma;
    std::optional<double> omega_c, omega_h, T_h;
    std::optional<std::string> output;
    std::vector<std::string> tol;
    bool physical = false;
    bool timestamp = false;
};

void add_shared(CLI::App* sub, Shared& s, bool with_gamma = true)
{
    if (with_gamma) {
        sub->add_option("--gamma", s.gamma, "sqrt(omega_h / omega_c), must be > 1");
        sub->add_option("--omega-c", s.omega_c, "cold trap frequency");
        sub->add_option("--omega-h", s.omega_h, "hot trap frequency");
        sub->add_option("--T-h", s.T_h, "hot bath temperature");
    }
    sub->add_option("-o,--output", s.output, "output file, '-' for stdout (default: $QPO_OUTPUT_DIR or stdout)");
    sub->add_option("--tol", s.tol, "tolerance override name=value (repeatable)");
    sub->add_flag("--physical", s.physical, "times in units of 1/omega_h plus effective temperatures");
    sub->add_flag("--timestamp", s.timestamp, "add a generation timestamp to JSON metadata");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Minimum-time bang-bang cooling of a parametric oscillator"};
    app.require_subcommand(1);

    Shared s;
    qpo::cli::RunConfig cfg;

    auto* solve = app.add_subcommand("solve", "synthesize the minimum-time protocol (JSON)");
    add_shared(solve, s);
    solve->add_option("--n-max", cfg.n_max, "largest interior switching index searched");

    auto* simulate = app.add_subcommand("simulate", "trajectory CSV of the optimal or a given protocol");
    add_shared(simulate, s);
    simulate->add_option("--sample-dt", cfg.sample_dt, "sampling step (normalized time)");
    simulate->add_option("--protocol", cfg.protocol, "protocol JSON to simulate");
    simulate->add_option("--n-max", cfg.n_max);

    auto* sweep = app.add_subcommand("sweep", "optimal times over log-spaced gamma (CSV)");
    add_shared(sweep, s, false);
    sweep->add_option("--gamma-min", cfg.gamma_min)->capture_default_str();
    sweep->add_option("--gamma-max", cfg.gamma_max)->capture_default_str();
    sweep->add_option("--points", cfg.points)->capture_default_str();

    auto* bounds = app.add_subcommand("bounds", "asymptotic bound reports (JSON lines or CSV)");
    add_shared(bounds, s, false);
    bounds->add_option("--gamma", cfg.gammas, "gamma values (repeatable)");
    bounds->add_option("--gamma-min", cfg.gamma_min)->capture_default_str();
    bounds->add_option("--gamma-max", cfg.gamma_max)->capture_default_str();
    bounds->add_option("--points", cfg.points)->capture_default_str();
    bounds->add_flag("--csv", cfg.csv);

    auto* baseline = app.add_subcommand("baseline", "classic one-switching protocol and its endpoint");
    add_shared(baseline, s);

    auto* verify = app.add_subcommand("verify", "brute-force cross-check of the analytic times");
    add_shared(verify, s);
    verify->add_option("--n-max", cfg.n_max, "largest n checked (0..2, default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qpo::cli::exit_usage;
    }

    cfg.subcommand = *qpo::cli::parse_subcommand(app.get_subcommands().front()->get_name());
    cfg.gamma = s.gamma;
    cfg.output_path = s.output;
    cfg.physical = s.physical;
    cfg.timestamp = s.timestamp;
    if (s.omega_c || s.omega_h || s.T_h) {
        if (!(s.omega_c && s.omega_h && s.T_h)) {
            std::cerr << "usage error: --omega-c, --omega-h and --T-h go together\n";
            return qpo::cli::exit_usage;
        }
        cfg.physical_input = qpo::cli::PhysicalInput{*s.omega_c, *s.omega_h, *s.T_h};
    }
    for (const auto& kv : s.tol) {
        const auto eq = kv.find('=');
        try {
            if (eq == std::string::npos) throw std::invalid_argument(kv);
            cfg.tolerance_overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "usage error: --tol expects name=value, got '" << kv << "'\n";
            return qpo::cli::exit_usage;
        }
    }
    return qpo::cli::run(cfg, std::cout, std::cerr);
}
