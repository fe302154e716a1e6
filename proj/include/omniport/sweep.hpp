#pragma once

#include <string>

#include "omniport/metrics.hpp"

// Parameter sweeps: re-evaluate a scenario while one or two knobs move over
// value lists. A knob is a dotted path into the scenario ("ports.3.G_mod",
// "signals.eta", "mech.gamma_m", or "xi" for the signal detuning itself).

namespace omniport {

struct SweepAxis {
    std::string knob;
    std::string label;  // column header; defaults to the last path segment
    std::vector<double> values;
};

struct MetricSelector {
    enum class Kind { T_fwd, T_bwd, isolation, log10_isolation, S, b_abs2 };
    Kind kind = Kind::T_fwd;
    std::size_t port = 0;  // only for Kind::S

    // accepts T_fwd, T_bwd, I, log10_I, b_abs2, S<k> with 1-based k
    static MetricSelector parse(const std::string& name);
    std::string name() const;
    double evaluate(const SpectrumRecord& rec) const;
};

// row-major result grid: one row per sweep point (second axis fastest),
// axis value columns first, then one column per metric
struct SweepTable {
    std::vector<SweepAxis> axes;
    std::vector<std::string> columns;  // metric column names
    std::vector<double> values;        // num_points() x columns.size()

    std::size_t num_points() const {
        std::size_t n = axes.empty() ? 0 : 1;
        for (const auto& ax : axes) n *= ax.values.size();
        return n;
    }
    double at(std::size_t point, std::size_t col) const {
        return values[point * columns.size() + col];
    }
};

// assigns `value` at `path` inside the scenario; throws std::invalid_argument
// on unknown paths or out-of-range port indices
void apply_knob(Scenario& scenario, const std::string& path, double value);

// full sweep evaluation; xi0 is the detuning used unless an axis moves "xi".
// The parallel path partitions points over threads and is bit-identical to
// the serial one.
SweepTable run_sweep(const Scenario& base, const std::vector<SweepAxis>& axes,
                     const std::vector<MetricSelector>& metrics, double xi0,
                     const Execution& exec = {});

// spectrum records reshaped into a single-axis table over "xi"
SweepTable spectrum_table(const std::vector<SpectrumRecord>& records,
                          const std::vector<MetricSelector>& metrics);

}  // namespace omniport
