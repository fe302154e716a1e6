#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Core data types for an N-port optomechanical network: N cavity modes
// coupled to one shared mechanical mode. All rates and frequencies are in
// units of a common reference rate (conventionally the linewidth of port 1).

namespace omniport {

using cplx = std::complex<double>;

// thrown when a solver fails to converge or a bracketing step finds nothing;
// the command line tool maps this to exit code 2
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MechanicalMode {
    double omega_m = 0.0;  // mechanical eigenfrequency, > 0
    double gamma_m = 0.0;  // mechanical damping rate, > 0
};

// full physical description of one cavity port, prior to any linearization
struct PhysicalPort {
    double kappa_0 = 0.0;      // intrinsic loss rate, >= 0
    double kappa_ex = 0.0;     // external (coupling) loss rate, > 0
    double g = 0.0;            // single-photon optomechanical coupling
    double eps_c = 0.0;        // control drive amplitude, >= 0
    double drive_phase = 0.0;  // control drive phase vartheta
    double delta = 0.0;        // cavity-drive detuning Delta

    double kappa() const { return kappa_0 + kappa_ex; }
};

// port after linearization about a mean-field branch: the cavity couples to
// the mechanics with effective strength G = |G| e^{i arg G}
struct LinearPort {
    double kappa_0 = 0.0;
    double kappa_ex = 0.0;
    double G_mod = 0.0;    // |G|, >= 0
    double G_phase = 0.0;  // arg G

    double kappa() const { return kappa_0 + kappa_ex; }
    cplx G() const { return std::polar(G_mod, G_phase); }
};

enum class Level { physical, linearized };

struct NetworkConfig {
    MechanicalMode mech;
    std::variant<std::vector<PhysicalPort>, std::vector<LinearPort>> ports;

    Level level() const {
        return ports.index() == 0 ? Level::physical : Level::linearized;
    }
    bool is_physical() const { return level() == Level::physical; }

    const std::vector<PhysicalPort>& physical() const {
        return std::get<std::vector<PhysicalPort>>(ports);
    }
    const std::vector<LinearPort>& linearized() const {
        return std::get<std::vector<LinearPort>>(ports);
    }

    std::size_t num_ports() const {
        return is_physical() ? physical().size() : linearized().size();
    }
    double kappa(std::size_t j) const {
        return is_physical() ? physical()[j].kappa() : linearized()[j].kappa();
    }
    double kappa_ex(std::size_t j) const {
        return is_physical() ? physical()[j].kappa_ex : linearized()[j].kappa_ex;
    }
};

// weak probe signals: one amplitude/phase pair per port, all sharing the
// common detuning xi (evaluated pointwise over a grid)
struct SignalSet {
    std::vector<double> eps;    // per-port signal amplitude, >= 0
    std::vector<double> phase;  // per-port signal phase
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

// checks structural invariants: positive rates, finite fields, at least two
// ports. Physical-level configs additionally get a resolved-sideband warning
// when omega_m is less than 10x the largest decay rate.
ValidationReport validate(const NetworkConfig& config);

// checks a signal set against a port count: sizes match, amplitudes
// non-negative and finite, at least one port driven
ValidationReport validate(const SignalSet& signals, std::size_t num_ports);

}  // namespace omniport
