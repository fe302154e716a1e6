#pragma once

#include <optional>
#include <string>

#include "omniport/metrics.hpp"
#include "omniport/sweep.hpp"
#include "omniport/table.hpp"

// Scenario files: a TOML-compatible subset (tables, arrays of tables, bare
// keys, numbers, booleans, strings, single-line arrays, # comments).
// Unknown keys are rejected with the offending line, as are missing required
// keys, so a typo cannot silently fall back to a default.

namespace omniport {

struct GridSpec {
    double min = -5.0;
    double max = 5.0;
    long count = 1001;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;           // one or two
    std::vector<MetricSelector> metrics;   // at least one
    double xi = 0.0;                       // detuning unless an axis moves xi
};

struct OutputSpec {
    std::string format = "csv";  // "csv" or "json"
    std::string path;            // empty: derived from the scenario filename
};

struct ScenarioDocument {
    Scenario scenario;
    GridSpec grid;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
    std::string hash;  // 64-bit FNV-1a over the semantic content, hex
};

ScenarioDocument parse_scenario(const std::string& text,
                                const std::string& origin = "<string>");
ScenarioDocument load_scenario(const std::string& path);

// hash of everything that affects computed numbers (network, drive, grid,
// sweep); presentation keys (labels, output) are excluded
std::string scenario_hash(const ScenarioDocument& doc);

}  // namespace omniport
