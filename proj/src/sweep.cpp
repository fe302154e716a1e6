#include "omniport/sweep.hpp"

#include <cmath>
#include <charconv>

namespace omniport {

namespace {

bool parse_index(const std::string& s, std::size_t& out) {
    if (s.empty()) return false;
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return false;
    out = v;
    return true;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const std::size_t dot = path.find('.', pos);
        if (dot == std::string::npos) {
            parts.push_back(path.substr(pos));
            break;
        }
        parts.push_back(path.substr(pos, dot - pos));
        pos = dot + 1;
    }
    return parts;
}

[[noreturn]] void unknown(const std::string& path) {
    throw std::invalid_argument("unknown sweep knob '" + path + "'");
}

}  // namespace

void apply_knob(Scenario& scenario, const std::string& path, double value) {
    const auto parts = split_path(path);

    if (parts.size() == 1 && parts[0] == "xi") return;  // handled by the engine

    if (parts.size() == 2 && parts[0] == "mech") {
        if (parts[1] == "omega_m") {
            scenario.network.mech.omega_m = value;
            return;
        }
        if (parts[1] == "gamma_m") {
            scenario.network.mech.gamma_m = value;
            return;
        }
        unknown(path);
    }

    if (parts.size() == 3 && parts[0] == "ports") {
        std::size_t idx = 0;
        if (!parse_index(parts[1], idx) || idx == 0 ||
            idx > scenario.network.num_ports())
            throw std::invalid_argument("sweep knob '" + path +
                                        "': port index out of range");
        auto& port = std::get<std::vector<LinearPort>>(
            scenario.network.ports)[idx - 1];
        if (parts[2] == "G_mod") {
            port.G_mod = value;
            return;
        }
        if (parts[2] == "G_phase") {
            port.G_phase = value;
            return;
        }
        if (parts[2] == "kappa_0") {
            port.kappa_0 = value;
            return;
        }
        if (parts[2] == "kappa_ex") {
            port.kappa_ex = value;
            return;
        }
        unknown(path);
    }

    if (parts.size() == 2 && parts[0] == "signals") {
        if (!scenario.is_two_port())
            throw std::invalid_argument("sweep knob '" + path +
                                        "': scenario has no control signal");
        auto& d = std::get<TwoPortDrive>(scenario.drive);
        if (parts[1] == "eta") {
            d.eta = value;
            return;
        }
        if (parts[1] == "phi") {
            d.phi = value;
            return;
        }
        unknown(path);
    }

    unknown(path);
}

MetricSelector MetricSelector::parse(const std::string& name) {
    MetricSelector m;
    if (name == "T_fwd") {
        m.kind = Kind::T_fwd;
    } else if (name == "T_bwd") {
        m.kind = Kind::T_bwd;
    } else if (name == "I") {
        m.kind = Kind::isolation;
    } else if (name == "log10_I") {
        m.kind = Kind::log10_isolation;
    } else if (name == "b_abs2") {
        m.kind = Kind::b_abs2;
    } else if (name.size() >= 2 && name[0] == 'S') {
        std::size_t idx = 0;
        if (!parse_index(name.substr(1), idx) || idx == 0)
            throw std::invalid_argument("unknown metric '" + name + "'");
        m.kind = Kind::S;
        m.port = idx - 1;
    } else {
        throw std::invalid_argument("unknown metric '" + name + "'");
    }
    return m;
}

std::string MetricSelector::name() const {
    switch (kind) {
        case Kind::T_fwd: return "T_fwd";
        case Kind::T_bwd: return "T_bwd";
        case Kind::isolation: return "I";
        case Kind::log10_isolation: return "log10_I";
        case Kind::b_abs2: return "b_abs2";
        case Kind::S: return "S" + std::to_string(port + 1);
    }
    return {};
}

double MetricSelector::evaluate(const SpectrumRecord& rec) const {
    switch (kind) {
        case Kind::T_fwd: return rec.T_fwd;
        case Kind::T_bwd: return rec.T_bwd;
        case Kind::isolation: return rec.isolation;
        case Kind::log10_isolation: return std::log10(rec.isolation);
        case Kind::b_abs2: return rec.b_abs2;
        case Kind::S:
            if (port >= rec.S.size())
                throw std::invalid_argument("metric S" +
                                            std::to_string(port + 1) +
                                            ": port index out of range");
            return rec.S[port];
    }
    return 0.0;
}

SweepTable run_sweep(const Scenario& base, const std::vector<SweepAxis>& axes,
                     const std::vector<MetricSelector>& metrics, double xi0,
                     const Execution& exec) {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("run_sweep: one or two axes required");
    for (const auto& ax : axes) {
        if (ax.values.empty())
            throw std::invalid_argument("run_sweep: axis '" + ax.knob +
                                        "' has no values");
        for (std::size_t i = 1; i + 1 < ax.values.size(); ++i) {
            const bool up = ax.values[i] > ax.values[i - 1];
            const bool up_next = ax.values[i + 1] > ax.values[i];
            if (up != up_next || ax.values[i] == ax.values[i - 1] ||
                ax.values[i + 1] == ax.values[i])
                throw std::invalid_argument("run_sweep: axis '" + ax.knob +
                                            "' is not strictly monotone");
        }
        if (ax.values.size() == 2 && ax.values[0] == ax.values[1])
            throw std::invalid_argument("run_sweep: axis '" + ax.knob +
                                        "' is not strictly monotone");
    }
    if (metrics.empty())
        throw std::invalid_argument("run_sweep: no metrics selected");

    // fail on bad knob paths before entering the parallel region
    {
        Scenario probe = base;
        for (const auto& ax : axes) apply_knob(probe, ax.knob, ax.values[0]);
        spectrum_point(probe, xi0);
    }

    SweepTable table;
    table.axes = axes;
    for (const auto& m : metrics) table.columns.push_back(m.name());

    const std::size_t n0 = axes[0].values.size();
    const std::size_t n1 = axes.size() == 2 ? axes[1].values.size() : 1;
    table.values.resize(n0 * n1 * metrics.size());

    for_each_index(n0 * n1, exec, [&](std::size_t i) {
        const std::size_t i0 = i / n1, i1 = i % n1;
        Scenario sc = base;
        double xi = xi0;
        apply_knob(sc, axes[0].knob, axes[0].values[i0]);
        if (axes[0].knob == "xi") xi = axes[0].values[i0];
        if (axes.size() == 2) {
            apply_knob(sc, axes[1].knob, axes[1].values[i1]);
            if (axes[1].knob == "xi") xi = axes[1].values[i1];
        }
        const SpectrumRecord rec = spectrum_point(sc, xi);
        for (std::size_t m = 0; m < metrics.size(); ++m)
            table.values[i * metrics.size() + m] = metrics[m].evaluate(rec);
    });
    return table;
}

SweepTable spectrum_table(const std::vector<SpectrumRecord>& records,
                          const std::vector<MetricSelector>& metrics) {
    SweepTable table;
    SweepAxis ax;
    ax.knob = "xi";
    ax.label = "xi";
    ax.values.reserve(records.size());
    for (const auto& r : records) ax.values.push_back(r.xi);
    table.axes.push_back(std::move(ax));
    for (const auto& m : metrics) table.columns.push_back(m.name());
    table.values.reserve(records.size() * metrics.size());
    for (const auto& r : records)
        for (const auto& m : metrics) table.values.push_back(m.evaluate(r));
    return table;
}

}  // namespace omniport
