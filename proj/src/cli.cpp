#include "omniport/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "omniport/meanfield.hpp"
#include "omniport/metrics.hpp"
#include "omniport/oracle.hpp"
#include "omniport/scenario.hpp"
#include "omniport/sweep.hpp"
#include "omniport/table.hpp"

namespace omniport::cli {

namespace {

struct CommonOpts {
    std::string scenario;
    std::string out;
    std::string format;
    std::string grid;
    int threads = 0;
    bool quiet = false;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_grid) {
    sub->add_option("--scenario", o.scenario, "scenario file")->required();
    sub->add_option("--out", o.out, "output file path");
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", o.threads,
                    "worker threads (1 = serial; default: OMNIPORT_THREADS "
                    "or all cores)");
    if (with_grid)
        sub->add_option("--grid", o.grid,
                        "detuning grid override, min:max:count");
    sub->add_flag("--quiet", o.quiet, "suppress progress output");
}

Execution resolve_exec(int threads_flag) {
    int t = threads_flag;
    if (t <= 0) {
        if (const char* env = std::getenv("OMNIPORT_THREADS")) t = std::atoi(env);
    }
    if (t <= 0) return Execution{true, 0};
    return Execution::with_threads(t);
}

ScenarioDocument load(const CommonOpts& o) {
    ScenarioDocument doc = load_scenario(o.scenario);
    if (!o.grid.empty()) {
        GridSpec g;
        char tail = 0;
        if (std::sscanf(o.grid.c_str(), "%lf:%lf:%ld%c", &g.min, &g.max,
                        &g.count, &tail) != 3 ||
            g.count < 1 || (g.count > 1 && !(g.max > g.min)))
            throw std::invalid_argument("--grid expects min:max:count");
        doc.grid = g;
    }
    return doc;
}

std::string filename_stem(const std::string& path) {
    const auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = name.rfind('.');
    if (dot != std::string::npos && dot > 0) name.resize(dot);
    return name;
}

// emit a result table per the output knobs; returns the path written
std::string emit(const SweepTable& table, const ScenarioDocument& doc,
                 const CommonOpts& o, const std::string& subcommand) {
    const std::string format = !o.format.empty()       ? o.format
                               : !doc.output.format.empty() ? doc.output.format
                                                            : "csv";
    std::string path = !o.out.empty() ? o.out : doc.output.path;
    if (path.empty())
        path = filename_stem(o.scenario) + "_" + subcommand + "." + format;
    write_text_file(path, format == "json" ? to_json(table, doc.hash)
                                           : to_csv(table));
    if (!o.quiet)
        std::cout << "wrote " << path << " (" << table.num_points()
                  << " rows)\n";
    return path;
}

void require_linearized(const ScenarioDocument& doc, const char* what) {
    if (doc.scenario.network.is_physical())
        throw std::invalid_argument(
            std::string(what) +
            " requires a linearized-level scenario (run meanfield first)");
}

std::vector<MetricSelector> selectors(std::initializer_list<const char*> names) {
    std::vector<MetricSelector> out;
    for (const char* n : names) out.push_back(MetricSelector::parse(n));
    return out;
}

int cmd_validate(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    ValidationReport rep = validate(doc.scenario.network);
    if (doc.sweep) {
        // surface bad knob paths now rather than at sweep time
        for (const auto& ax : doc.sweep->axes) {
            try {
                if (!doc.scenario.network.is_physical()) {
                    Scenario probe = doc.scenario;
                    apply_knob(probe, ax.knob, ax.values.front());
                } else if (ax.knob != "xi") {
                    throw std::invalid_argument(
                        "sweeps need a linearized-level scenario");
                }
            } catch (const std::invalid_argument& e) {
                rep.errors.push_back(e.what());
            }
        }
    }
    for (const auto& w : rep.warnings)
        if (!o.quiet) std::cout << "warning: " << w << "\n";
    for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
    if (!rep.ok()) return 1;
    if (!o.quiet) std::cout << "ok " << doc.hash << "\n";
    return 0;
}

int cmd_meanfield(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    if (!doc.scenario.network.is_physical())
        throw std::invalid_argument(
            "meanfield requires a physical-level scenario");
    const auto rep = validate(doc.scenario.network);
    if (!rep.ok()) {
        for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
        return 1;
    }

    const auto branches = solve_mean_fields(doc.scenario.network);
    const std::size_t n = doc.scenario.network.num_ports();

    SweepTable table;
    SweepAxis ax;
    ax.knob = "branch";
    ax.label = "branch";
    for (std::size_t b = 0; b < branches.size(); ++b)
        ax.values.push_back(static_cast<double>(b));
    table.axes.push_back(std::move(ax));
    table.columns = {"x", "stable", "re_beta", "im_beta"};
    for (std::size_t j = 1; j <= n; ++j) {
        const std::string s = std::to_string(j);
        for (const char* c : {"re_alpha", "im_alpha", "delta_eff", "G_mod",
                              "G_phase"})
            table.columns.push_back(c + s);
    }
    std::size_t stable_count = 0;
    for (const auto& br : branches) {
        stable_count += br.stable ? 1 : 0;
        table.values.push_back(br.x);
        table.values.push_back(br.stable ? 1.0 : 0.0);
        table.values.push_back(br.beta.real());
        table.values.push_back(br.beta.imag());
        for (std::size_t j = 0; j < n; ++j) {
            table.values.push_back(br.alpha[j].real());
            table.values.push_back(br.alpha[j].imag());
            table.values.push_back(br.delta_eff[j]);
            table.values.push_back(std::abs(br.G_eff[j]));
            table.values.push_back(std::arg(br.G_eff[j]));
        }
    }
    emit(table, doc, o, "meanfield");
    if (!o.quiet)
        std::cout << branches.size() << " branch"
                  << (branches.size() == 1 ? "" : "es") << " (" << stable_count
                  << " stable)\n";
    return 0;
}

int cmd_spectrum(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    require_linearized(doc, "spectrum");
    if (!doc.scenario.is_two_port())
        throw std::invalid_argument(
            "spectrum requires a from/to signal pair (use route for "
            "all-port drives)");
    const auto grid = doc.grid.values();
    const auto records = spectrum(doc.scenario, grid, resolve_exec(o.threads));
    emit(spectrum_table(records, selectors({"T_fwd", "T_bwd"})), doc, o,
         "spectrum");
    return 0;
}

int cmd_isolate(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    require_linearized(doc, "isolate");
    if (!doc.scenario.is_two_port())
        throw std::invalid_argument("isolate requires a from/to signal pair");
    const auto grid = doc.grid.values();
    const auto exec = resolve_exec(o.threads);
    const auto records = spectrum(doc.scenario, grid, exec);
    emit(spectrum_table(records, selectors({"T_fwd", "T_bwd", "I"})), doc, o,
         "isolate");
    if (!o.quiet) {
        const auto fwd = fipb_check(doc.scenario, grid, Direction::forward,
                                    1e-20, exec);
        const auto bwd = fipb_check(doc.scenario, grid, Direction::backward,
                                    1e-20, exec);
        std::cout << "forward blocked: " << (fwd.blocked ? "yes" : "no")
                  << " (max T " << format_double(fwd.max_T) << ")\n"
                  << "backward blocked: " << (bwd.blocked ? "yes" : "no")
                  << " (max T " << format_double(bwd.max_T) << ")\n";
    }
    return 0;
}

int cmd_route(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    require_linearized(doc, "route");
    if (doc.scenario.is_two_port())
        throw std::invalid_argument(
            "route requires an all-port signal list in [signals]");
    const auto grid = doc.grid.values();
    const auto exec = resolve_exec(o.threads);
    const auto records = spectrum(doc.scenario, grid, exec);

    std::vector<MetricSelector> cols;
    for (std::size_t j = 1; j <= doc.scenario.network.num_ports(); ++j)
        cols.push_back(MetricSelector::parse("S" + std::to_string(j)));
    cols.push_back(MetricSelector::parse("b_abs2"));
    emit(spectrum_table(records, cols), doc, o, "route");

    if (!o.quiet) {
        const auto rep = routing_report(doc.scenario, grid, exec);
        if (rep.cps_port >= 0)
            std::cout << "synthesis port: " << rep.cps_port + 1 << " (share "
                      << format_double(rep.cps_share) << ")\n";
        else if (rep.degenerate)
            std::cout << "synthesis port: none (no resonant output)\n";
        else
            std::cout << "synthesis port: none (best share "
                      << format_double(rep.cps_share) << ")\n";
        std::cout << "max mechanical excitation: "
                  << format_double(max_mech_excitation(doc.scenario, grid, exec))
                  << "\n";
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    const ScenarioDocument doc = load(o);
    require_linearized(doc, "sweep");
    if (!doc.sweep)
        throw std::invalid_argument("scenario has no [sweep] section");
    const auto table = run_sweep(doc.scenario, doc.sweep->axes,
                                 doc.sweep->metrics, doc.sweep->xi,
                                 resolve_exec(o.threads));
    emit(table, doc, o, "sweep");
    return 0;
}

struct OracleOpts {
    int samples = 5;
    double tol = 1e-6;
    double red_tol = 1e-3;
    TrajectorySpec traj;
};

int cmd_oracle(const CommonOpts& o, const OracleOpts& oo) {
    const ScenarioDocument doc = load(o);

    const NetworkConfig* net = &doc.scenario.network;
    NetworkConfig linearized_storage;
    if (net->is_physical()) {
        const auto branches = solve_mean_fields(*net);
        const MeanFieldBranch* pick = nullptr;
        double best = 0.0;
        for (const auto& br : branches) {
            if (!br.stable) continue;
            double off = 0.0;
            for (std::size_t j = 0; j < br.delta_eff.size(); ++j)
                if (std::abs(br.G_eff[j]) > 0.0)
                    off = std::max(off, std::abs(br.delta_eff[j] -
                                                 net->mech.omega_m));
            if (!pick || off < best) {
                pick = &br;
                best = off;
            }
        }
        if (!pick)
            throw NumericalError("oracle-check: no stable mean-field branch");
        linearized_storage = to_linearized(*pick, *net, oo.red_tol, true);
        net = &linearized_storage;
    }
    const auto& ports = net->linearized();
    const std::size_t n = ports.size();

    std::vector<double> eps(n, 0.0), phase(n, 0.0);
    if (doc.scenario.is_two_port()) {
        const auto& d = doc.scenario.two_port();
        eps[d.from] = 1.0;
        if (d.control >= 0) {
            eps[static_cast<std::size_t>(d.control)] = d.eta;
            phase[static_cast<std::size_t>(d.control)] = d.phi;
        }
    } else {
        eps = doc.scenario.routing().eps;
        phase = doc.scenario.routing().phase;
    }

    const auto grid = doc.grid.values();
    const int k = std::max(1, std::min<int>(oo.samples,
                                            static_cast<int>(grid.size())));
    SweepTable table;
    SweepAxis ax;
    ax.knob = "xi";
    ax.label = "xi";
    table.columns = {"rel_err", "drift"};

    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        const std::size_t idx =
            k == 1 ? grid.size() / 2
                   : static_cast<std::size_t>(
                         std::llround(static_cast<double>(i) *
                                      static_cast<double>(grid.size() - 1) /
                                      (k - 1)));
        const double xi = grid[idx];
        const auto est = integrate_rwa(ports, net->mech, eps, phase, xi,
                                       oo.traj);
        const auto ref = solve_response(ports, net->mech, eps, phase, xi);

        double amax = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            amax = std::max(amax, std::abs(ref.a_minus[j]));
        double err = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            err = std::max(err,
                           std::abs(est.state.a_minus[j] - ref.a_minus[j]) /
                               std::max(std::abs(ref.a_minus[j]),
                                        1e-12 * std::max(amax, 1e-300)));
        worst = std::max(worst, err);
        ax.values.push_back(xi);
        table.values.push_back(err);
        table.values.push_back(est.drift);
    }
    table.axes.push_back(std::move(ax));
    emit(table, doc, o, "oracle");
    if (!o.quiet)
        std::cout << "oracle agreement: max " << format_double(worst) << " over "
                  << k << " points (tolerance " << format_double(oo.tol)
                  << ")\n";
    if (worst > oo.tol)
        throw NumericalError("oracle-check: disagreement " +
                             format_double(worst) + " exceeds tolerance " +
                             format_double(oo.tol));
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"steady-state simulator for N-port optomechanical networks"};
    app.require_subcommand(1);

    CommonOpts common;
    OracleOpts oracle;

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check a scenario file");
    add_common(validate_cmd, common, false);

    CLI::App* meanfield_cmd = app.add_subcommand(
        "meanfield", "solve the classical working point (physical level)");
    add_common(meanfield_cmd, common, false);

    CLI::App* spectrum_cmd = app.add_subcommand(
        "spectrum", "transmission rates over the detuning grid");
    add_common(spectrum_cmd, common, true);

    CLI::App* isolate_cmd = app.add_subcommand(
        "isolate", "directional transmission and isolation ratio");
    add_common(isolate_cmd, common, true);

    CLI::App* route_cmd = app.add_subcommand(
        "route", "normalized output energies for all-port drives");
    add_common(route_cmd, common, true);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run the [sweep] section of a scenario");
    add_common(sweep_cmd, common, false);

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle-check",
        "compare the analytic response against time-domain integration");
    add_common(oracle_cmd, common, true);
    oracle_cmd->add_option("--samples", oracle.samples,
                           "grid points to cross-check");
    oracle_cmd->add_option("--tol", oracle.tol, "agreement tolerance");
    oracle_cmd->add_option("--red-tol", oracle.red_tol,
                           "red-sideband tolerance for auto-linearization");
    oracle_cmd->add_option("--duration", oracle.traj.duration,
                           "integration time (0 = auto)");
    oracle_cmd->add_option("--window", oracle.traj.window,
                           "demodulation window fraction");
    oracle_cmd->add_option("--rtol", oracle.traj.rel_tol,
                           "integrator relative tolerance");
    oracle_cmd->add_option("--atol", oracle.traj.abs_tol,
                           "integrator absolute tolerance");
    oracle_cmd->add_option("--drift-tol", oracle.traj.drift_tol,
                           "steady-state drift tolerance");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(validate_cmd)) return cmd_validate(common);
        if (app.got_subcommand(meanfield_cmd)) return cmd_meanfield(common);
        if (app.got_subcommand(spectrum_cmd)) return cmd_spectrum(common);
        if (app.got_subcommand(isolate_cmd)) return cmd_isolate(common);
        if (app.got_subcommand(route_cmd)) return cmd_route(common);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(common);
        if (app.got_subcommand(oracle_cmd)) return cmd_oracle(common, oracle);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"omniport"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace omniport::cli
