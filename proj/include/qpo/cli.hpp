#pragma once

// Command runner behind the qpo executable. Argument parsing lives in the
// executable; everything here works on an already-parsed RunConfig so it can be
// driven from tests.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qpo/bounds.hpp"
#include "qpo/config.hpp"
#include "qpo/dynamics.hpp"
#include "qpo/errors.hpp"
#include "qpo/extremal.hpp"
#include "qpo/io.hpp"
#include "qpo/oracle.hpp"

namespace qpo::cli {

enum class Subcommand { Solve, Simulate, Sweep, Bounds, Baseline, Verify };

enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_usage = 2,
    exit_io = 3,
    exit_numeric = 4,
};

inline std::optional<Subcommand> parse_subcommand(std::string_view name)
{
    if (name == "solve") return Subcommand::Solve;
    if (name == "simulate") return Subcommand::Simulate;
    if (name == "sweep") return Subcommand::Sweep;
    if (name == "bounds") return Subcommand::Bounds;
    if (name == "baseline") return Subcommand::Baseline;
    if (name == "verify") return Subcommand::Verify;
    return std::nullopt;
}

inline const char* default_file_name(Subcommand c)
{
    switch (c) {
    case Subcommand::Solve: return "solve.json";
    case Subcommand::Simulate: return "trajectory.csv";
    case Subcommand::Sweep: return "sweep.csv";
    case Subcommand::Bounds: return "bounds.jsonl";
    case Subcommand::Baseline: return "baseline.json";
    case Subcommand::Verify: return "verify.txt";
    }
    return "out.txt";
}

struct PhysicalInput {
    double omega_c = 0.0;
    double omega_h = 0.0;
    double T_h = 0.0;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::Solve;
    std::optional<double> gamma;
    std::optional<PhysicalInput> physical_input;
    std::optional<std::string> output_path;  // "-" for stdout
    double sample_dt = 0.01;
    std::map<std::string, double> tolerance_overrides;

    std::optional<int> n_max;
    double gamma_min = 50.0;
    double gamma_max = 1000.0;
    int points = 20;
    std::vector<double> gammas;           // explicit list for `bounds`
    std::optional<std::string> protocol;  // protocol JSON to simulate instead of synthesizing
    bool physical = false;                // report times in units of 1/omega_h and effective temperatures
    bool csv = false;                     // `bounds` as CSV instead of JSON lines
    bool timestamp = false;               // add a generation timestamp to metadata
};

namespace detail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline PhysicalParams physical_params(const RunConfig& cfg)
{
    if (cfg.gamma.has_value() == cfg.physical_input.has_value())
        throw UsageError("give exactly one of --gamma or the triple --omega-c/--omega-h/--T-h");
    if (cfg.gamma) {
        if (!(*cfg.gamma > 1.0)) {
            std::ostringstream msg;
            msg << "need γ > 1 (got " << *cfg.gamma << ")";
            throw UsageError(msg.str());
        }
        return unit_params(*cfg.gamma);
    }
    const auto& in = *cfg.physical_input;
    PhysicalParams p;
    p.omega_c = in.omega_c;
    p.omega_h = in.omega_h;
    p.T_h = in.T_h;
    try {
        p.validate();
    } catch (const domain_error& e) {
        throw UsageError(std::string(e.what()) + "; equivalently need γ > 1");
    }
    return p;
}

inline NormalizedProblem problem(const PhysicalParams& p)
{
    try {
        return NormalizedProblem::from_physical(p);
    } catch (const domain_error& e) {
        throw UsageError(e.what());
    }
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline io::json metadata(const RunConfig& cfg, const PhysicalParams& p)
{
    io::json m = {{"gamma", p.gamma()},
                  {"omega_c", p.omega_c},
                  {"omega_h", p.omega_h},
                  {"T_h", p.T_h},
                  {"time_unit", cfg.physical ? "1/omega_h" : "normalized"}};
    if (cfg.timestamp) m["timestamp"] = utc_timestamp();
    return m;
}

// Writes to the configured path, $QPO_OUTPUT_DIR/<default name>, or `fallback`.
class Sink {
public:
    Sink(const RunConfig& cfg, std::ostream& fallback) : stream_(&fallback)
    {
        std::filesystem::path path;
        if (cfg.output_path && *cfg.output_path != "-") {
            path = *cfg.output_path;
        } else if (!cfg.output_path) {
            if (const char* dir = std::getenv("QPO_OUTPUT_DIR"); dir && *dir)
                path = std::filesystem::path(dir) / default_file_name(cfg.subcommand);
        }
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open '" + path.string() + "' for writing");
            stream_ = &file_;
            path_ = path.string();
        }
    }

    std::ostream& os() { return *stream_; }
    const std::string& path() const { return path_; }

    void close()
    {
        stream_->flush();
        if (!*stream_) throw IoError("write failed" + (path_.empty() ? std::string() : " for '" + path_ + "'"));
        if (file_.is_open()) file_.close();
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
    std::string path_;
};

inline int solve(const RunConfig& cfg, std::ostream& out)
{
    const auto p = physical_params(cfg);
    const auto prob = problem(p);
    const auto tol = Tolerances{}.with(cfg.tolerance_overrides);
    const auto syn = synthesize_optimal(prob, cfg.n_max, tol);

    io::json doc;
    doc["metadata"] = metadata(cfg, p);
    doc["protocol"] = io::to_json(syn.protocol);
    doc["optimal"] = io::to_json(syn.optimal);
    doc["endpoint_error"] = syn.endpoint_error;
    io::json table = io::json::array();
    for (const auto& c : syn.candidates) table.push_back(io::to_json(c));
    doc["candidates"] = table;
    if (cfg.physical) {
        const PhaseState end = protocol_endpoint(syn.protocol, PhaseState{1.0, 0.0});
        const ZState z = z_from_x(end, p);
        doc["physical"] = {{"total_time", syn.protocol.total_time / p.omega_h},
                           {"final_energy", energy(z, p.omega_c)},
                           {"T_c_effective", effective_temperature(energy(z, p.omega_c), p)},
                           {"T_c_target", p.T_h * p.omega_c / p.omega_h}};
    }
    Sink sink(cfg, out);
    sink.os() << doc.dump(2) << '\n';
    sink.close();
    return exit_ok;
}

inline int simulate(const RunConfig& cfg, std::ostream& out)
{
    if (!(cfg.sample_dt > 0.0)) throw UsageError("--sample-dt must be positive");
    Protocol protocol;
    PhysicalParams p;
    if (cfg.protocol) {
        std::ifstream in(*cfg.protocol);
        if (!in) throw IoError("cannot read '" + *cfg.protocol + "'");
        io::json j;
        try {
            in >> j;
        } catch (const io::json::exception& e) {
            throw UsageError(std::string("protocol file: ") + e.what());
        }
        protocol = io::protocol_from_json(j.contains("protocol") ? j.at("protocol") : j);
        p = (cfg.gamma || cfg.physical_input) ? physical_params(cfg) : unit_params(protocol.gamma);
        protocol.validate_bounds(problem(p));
    } else {
        p = physical_params(cfg);
        protocol = synthesize_optimal(problem(p), cfg.n_max, Tolerances{}.with(cfg.tolerance_overrides)).protocol;
    }
    const auto samples = simulate_protocol(protocol, PhaseState{1.0, 0.0}, cfg.sample_dt);
    Sink sink(cfg, out);
    io::write_trajectory_csv(sink.os(), samples, cfg.physical ? 1.0 / p.omega_h : 1.0);
    sink.close();
    return exit_ok;
}

inline int sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.points < 2) throw UsageError("--points must be >= 2");
    if (!(cfg.gamma_min > 1.0)) throw UsageError("need γ > 1 for --gamma-min");
    if (!(cfg.gamma_max > cfg.gamma_min)) throw UsageError("need --gamma-max > --gamma-min");
    if (cfg.gamma_max > max_supported_gamma) throw UsageError("--gamma-max above 1e3 is not supported");
    const auto pts = scaling_sweep(log_spaced_gammas(cfg.gamma_min, cfg.gamma_max, static_cast<std::size_t>(cfg.points)));
    Sink sink(cfg, out);
    io::write_sweep_csv(sink.os(), pts);
    sink.close();

    std::ostringstream summary;
    summary << std::setprecision(12) << "tau0 = " << tau0();
    try {
        summary << "  slope(N extremal) = " << fit_extremal_n(pts).slope;
    } catch (const domain_error&) {
        summary << "  slope(N extremal) = n/a";
    }
    summary << "  slope(optimal) = " << fit_optimal(pts).slope << '\n';
    err << summary.str();
    return exit_ok;
}

inline int bounds(const RunConfig& cfg, std::ostream& out)
{
    std::vector<double> gammas = cfg.gammas;
    if (cfg.gamma) gammas.push_back(*cfg.gamma);
    if (gammas.empty()) {
        if (cfg.points < 1) throw UsageError("--points must be >= 1");
        if (!(cfg.gamma_min > 1.0) || cfg.gamma_max < cfg.gamma_min) throw UsageError("need γ > 1 and gamma_min <= gamma_max");
        gammas = log_spaced_gammas(cfg.gamma_min, cfg.gamma_max, static_cast<std::size_t>(cfg.points));
    }
    for (double g : gammas) {
        if (!(g > 1.0)) throw UsageError("need γ > 1 for every gamma");
        if (g > max_supported_gamma) throw UsageError("gamma above 1e3 is not supported");
    }
    const auto reports = parallel_map(gammas, [](double g) { return bound_report(g); });
    Sink sink(cfg, out);
    if (cfg.csv) {
        io::write_bounds_csv(sink.os(), reports);
    } else {
        for (const auto& r : reports) sink.os() << io::to_json(r).dump() << '\n';
    }
    sink.close();
    return exit_ok;
}

inline int baseline(const RunConfig& cfg, std::ostream& out)
{
    const auto p = physical_params(cfg);
    const auto prob = problem(p);
    const Protocol base = salamon_protocol(1.0 / (prob.gamma() * prob.gamma()), 1.0);
    const PhaseState end = protocol_endpoint(base, PhaseState{1.0, 0.0});

    io::json doc;
    doc["metadata"] = metadata(cfg, p);
    doc["protocol"] = io::to_json(base);
    doc["endpoint"] = {{"x1", end.x1}, {"x2", end.x2}};
    doc["endpoint_error"] = std::hypot(end.x1 - prob.gamma(), end.x2);
    if (auto c = one_switching_candidate(prob)) doc["one_switching_extremal"] = io::to_json(*c);
    if (cfg.physical) {
        const ZState z = z_from_x(end, p);
        doc["physical"] = {{"total_time", base.total_time / p.omega_h},
                           {"T_c_effective", effective_temperature(energy(z, p.omega_c), p)}};
    }
    Sink sink(cfg, out);
    sink.os() << doc.dump(2) << '\n';
    sink.close();
    return exit_ok;
}

inline int verify(const RunConfig& cfg, std::ostream& out)
{
    const auto p = physical_params(cfg);
    const auto prob = problem(p);
    const int n_max = cfg.n_max.value_or(1);
    if (n_max < 0 || n_max > 2) throw UsageError("verify supports --n-max in 0..2");
    constexpr double rel = 1e-3;
    const double feasible = 1e-6;

    Sink sink(cfg, out);
    auto& os = sink.os();
    os << std::setprecision(12);
    bool all = true;
    auto report = [&](bool ok, const std::string& what) {
        all = all && ok;
        os << (ok ? "PASS " : "FAIL ") << what << '\n';
    };

    double best_brute = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max; ++n) {
        std::optional<ExtremalCandidate> analytic;
        for (SignBranch b : {SignBranch::Plus, SignBranch::Minus})
            for (const auto& c : build_candidates(n, b, prob)) {
                const double e = candidate_endpoint_error(c, prob);
                std::ostringstream what;
                what << "n=" << n << " branch " << to_string(b) << " schedule feasible (endpoint error " << e << ")";
                report(e < feasible, what.str());
                if (!analytic || c.total_time < analytic->total_time) analytic = c;
            }
        std::optional<BruteForceResult> brute;
        try {
            brute = brute_force_min_time(prob, n, feasible);
        } catch (const infeasible_error& e) {
            std::ostringstream what;
            what << "n=" << n << " brute force: " << e.what();
            report(!analytic, what.str());
            continue;
        }
        best_brute = std::min(best_brute, brute->total_time);
        std::ostringstream what;
        if (!analytic) {
            what << "n=" << n << " brute force " << brute->total_time << " found without an analytic candidate";
            report(false, what.str());
            continue;
        }
        const double a = analytic->total_time;
        what << "n=" << n << " brute force " << brute->total_time << " vs analytic " << a;
        report(std::abs(brute->total_time - a) <= rel * a, what.str() + " (agree within 1e-3)");
        report(brute->total_time >= a - rel * a, what.str() + " (no improvement on analytics)");
    }
    const auto syn = synthesize_optimal(prob, n_max, Tolerances{}.with(cfg.tolerance_overrides));
    std::ostringstream what;
    what << "min brute force " << best_brute << " vs synthesized optimum " << syn.optimal.total_time;
    report(std::abs(best_brute - syn.optimal.total_time) <= rel * syn.optimal.total_time, what.str());
    os << (all ? "verify: all checks passed" : "verify: FAILED") << '\n';
    sink.close();
    return all ? exit_ok : exit_verify_failed;
}

}  // namespace detail

/// Executes one subcommand. Returns the process exit code; diagnostics go to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        Tolerances{}.with(cfg.tolerance_overrides);
        switch (cfg.subcommand) {
        case Subcommand::Solve: return detail::solve(cfg, out);
        case Subcommand::Simulate: return detail::simulate(cfg, out);
        case Subcommand::Sweep: return detail::sweep(cfg, out, err);
        case Subcommand::Bounds: return detail::bounds(cfg, out);
        case Subcommand::Baseline: return detail::baseline(cfg, out);
        case Subcommand::Verify: return detail::verify(cfg, out);
        }
    } catch (const detail::UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const domain_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const detail::IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_usage;
}

}  // namespace qpo::cli
