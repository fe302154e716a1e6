#include "omniport/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omniport {

namespace {

void require_two_port(const Scenario& sc) {
    const auto& ports = sc.network.linearized();
    const auto& d = sc.two_port();
    const std::size_t n = ports.size();
    if (d.from >= n || d.to >= n || d.from == d.to)
        throw std::invalid_argument("spectrum: invalid target port pair");
    if (d.control >= 0) {
        const auto c = static_cast<std::size_t>(d.control);
        if (c >= n || c == d.from || c == d.to)
            throw std::invalid_argument("spectrum: invalid control port");
    }
    if (d.eta < 0)
        throw std::invalid_argument("spectrum: eta must be non-negative");
}

void require_routing(const Scenario& sc) {
    const auto& d = sc.routing();
    const auto rep = validate(SignalSet{d.eps, d.phase}, sc.network.num_ports());
    if (!rep.ok())
        throw std::invalid_argument("spectrum: " + rep.errors.front());
}

void require_scenario(const Scenario& sc) {
    if (sc.network.is_physical())
        throw std::invalid_argument(
            "spectrum: linearized-level network required");
    if (sc.is_two_port())
        require_two_port(sc);
    else
        require_routing(sc);
}

// signal vectors for a unit probe entering `probe`, plus the control tone
void two_port_signals(const TwoPortDrive& d, std::size_t n, std::size_t probe,
                      std::vector<double>& eps, std::vector<double>& phase) {
    eps.assign(n, 0.0);
    phase.assign(n, 0.0);
    eps[probe] = 1.0;
    if (d.control >= 0) {
        eps[static_cast<std::size_t>(d.control)] = d.eta;
        phase[static_cast<std::size_t>(d.control)] = d.phi;
    }
}

SpectrumRecord evaluate_point(const Scenario& sc, double xi) {
    const auto& ports = sc.network.linearized();
    const auto& mech = sc.network.mech;
    const std::size_t n = ports.size();

    SpectrumRecord rec;
    rec.xi = xi;
    rec.S.resize(n);

    std::vector<double> eps, phase;
    if (sc.is_two_port()) {
        const auto& d = sc.two_port();
        two_port_signals(d, n, d.from, eps, phase);
        const ResponseState fwd = solve_response(ports, mech, eps, phase, xi);
        rec.T_fwd = std::norm(output_amplitude(fwd, ports, eps, phase, d.to));
        for (std::size_t j = 0; j < n; ++j)
            rec.S[j] = normalized_output_energy(fwd, ports, eps, phase, j, 1.0);
        rec.b_abs2 = std::norm(fwd.b_minus);

        two_port_signals(d, n, d.to, eps, phase);
        const ResponseState bwd = solve_response(ports, mech, eps, phase, xi);
        rec.T_bwd = std::norm(output_amplitude(bwd, ports, eps, phase, d.from));
    } else {
        const auto& d = sc.routing();
        const ResponseState st = solve_response(ports, mech, d.eps, d.phase, xi);
        double eps_ref = 0.0;
        for (double e : d.eps) eps_ref = std::max(eps_ref, e);
        for (std::size_t j = 0; j < n; ++j)
            rec.S[j] =
                normalized_output_energy(st, ports, d.eps, d.phase, j, eps_ref);
        rec.b_abs2 = std::norm(st.b_minus);
    }

    rec.isolation = rec.T_bwd < kBlockadeFloor
                        ? std::numeric_limits<double>::infinity()
                        : rec.T_fwd / rec.T_bwd;
    return rec;
}

}  // namespace

SpectrumRecord spectrum_point(const Scenario& scenario, double xi) {
    require_scenario(scenario);
    return evaluate_point(scenario, xi);
}

std::vector<SpectrumRecord> spectrum(const Scenario& scenario,
                                     std::span<const double> grid,
                                     const Execution& exec) {
    require_scenario(scenario);
    std::vector<SpectrumRecord> out(grid.size());
    for_each_index(grid.size(), exec, [&](std::size_t i) {
        out[i] = evaluate_point(scenario, grid[i]);
    });
    return out;
}

FipbResult fipb_check(const Scenario& scenario, std::span<const double> grid,
                      Direction dir, double tol, const Execution& exec) {
    if (!scenario.is_two_port())
        throw std::invalid_argument("fipb_check: two-port drive required");
    const auto records = spectrum(scenario, grid, exec);
    FipbResult res;
    res.tol = tol;
    for (const auto& r : records)
        res.max_T =
            std::max(res.max_T, dir == Direction::forward ? r.T_fwd : r.T_bwd);
    res.blocked = res.max_T <= tol;
    return res;
}

RoutingReport routing_report(const Scenario& scenario,
                             std::span<const double> grid,
                             const Execution& exec) {
    if (scenario.is_two_port())
        throw std::invalid_argument("routing_report: routing drive required");
    const auto records = spectrum(scenario, grid, exec);
    const std::size_t n = scenario.network.num_ports();

    RoutingReport rep;
    rep.xi.reserve(records.size());
    rep.share.reserve(records.size());
    for (const auto& r : records) {
        double total = 0.0;
        for (double s : r.S) total += s;
        std::vector<double> sh(n, 0.0);
        if (total > 0.0)
            for (std::size_t j = 0; j < n; ++j) sh[j] = r.S[j] / total;
        rep.xi.push_back(r.xi);
        rep.share.push_back(std::move(sh));
    }

    // synthesis is judged at the grid point nearest resonance
    std::size_t at = 0;
    for (std::size_t i = 1; i < records.size(); ++i)
        if (std::abs(records[i].xi) < std::abs(records[at].xi)) at = i;
    if (!records.empty()) {
        double total = 0.0;
        for (double s : records[at].S) total += s;
        if (total <= n * 1e-12) {
            rep.degenerate = true;
        } else {
            const auto& sh = rep.share[at];
            const auto best = std::max_element(sh.begin(), sh.end());
            rep.cps_share = *best;
            if (*best >= 1.0 - 1e-3)
                rep.cps_port = static_cast<int>(best - sh.begin());
        }
    }
    return rep;
}

double max_mech_excitation(const Scenario& scenario,
                           std::span<const double> grid,
                           const Execution& exec) {
    const auto records = spectrum(scenario, grid, exec);
    double m = 0.0;
    for (const auto& r : records) m = std::max(m, r.b_abs2);
    return m;
}

}  // namespace omniport
