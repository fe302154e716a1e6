#pragma once

#include <span>
#include <variant>

#include "omniport/exec.hpp"
#include "omniport/model.hpp"
#include "omniport/response.hpp"

// Figures of merit evaluated over signal-detuning grids: directional
// transmission rates, the isolation ratio, the normalized output energies
// S_j, and the mechanical anti-Stokes excitation.

namespace omniport {

// backward transmission below this level counts as a perfect blockade and
// the isolation ratio is reported as infinity
inline constexpr double kBlockadeFloor = 1e-30;

// a signal bounced between two target ports, optionally with a control
// signal of relative amplitude eta and relative phase phi on a third port
struct TwoPortDrive {
    std::size_t from = 0;
    std::size_t to = 1;
    int control = -1;  // port index, or -1 for none
    double eta = 1.0;
    double phi = 0.0;
};

// every port perturbed at once (the synthesis scenario)
struct RoutingDrive {
    std::vector<double> eps;
    std::vector<double> phase;
};

struct Scenario {
    NetworkConfig network;  // linearized level
    std::variant<TwoPortDrive, RoutingDrive> drive;

    bool is_two_port() const { return drive.index() == 0; }
    const TwoPortDrive& two_port() const { return std::get<TwoPortDrive>(drive); }
    const RoutingDrive& routing() const { return std::get<RoutingDrive>(drive); }
};

struct SpectrumRecord {
    double xi = 0.0;
    double T_fwd = 0.0;       // |t_{from->to}|^2
    double T_bwd = 0.0;       // |t_{to->from}|^2
    double isolation = 0.0;   // T_fwd / T_bwd, +inf below the blockade floor
    std::vector<double> S;    // normalized output energy per port
    double b_abs2 = 0.0;      // |b_-|^2 for the forward (or routing) drive
};

SpectrumRecord spectrum_point(const Scenario& scenario, double xi);

std::vector<SpectrumRecord> spectrum(const Scenario& scenario,
                                     std::span<const double> grid,
                                     const Execution& exec = {});

enum class Direction { forward, backward };

struct FipbResult {
    bool blocked = false;  // transmission stayed at or below the tolerance
    double max_T = 0.0;    // worst transmission over the grid
    double tol = 0.0;
};

// frequency-independent perfect blockade detector for one direction
FipbResult fipb_check(const Scenario& scenario, std::span<const double> grid,
                      Direction dir, double tol = 1e-20,
                      const Execution& exec = {});

struct RoutingReport {
    std::vector<double> xi;
    std::vector<std::vector<double>> share;  // share[point][port], sums to 1
    int cps_port = -1;   // port collecting the whole resonant output, or -1
    double cps_share = 0.0;
    bool degenerate = false;  // resonant output too small to attribute
};

// output-energy shares per port; flags coherent perfect synthesis when one
// port holds at least 1 - 1e-3 of the total resonant output
RoutingReport routing_report(const Scenario& scenario,
                             std::span<const double> grid,
                             const Execution& exec = {});

// max_xi |b_-(xi)|^2 over the grid
double max_mech_excitation(const Scenario& scenario,
                           std::span<const double> grid,
                           const Execution& exec = {});

}  // namespace omniport
