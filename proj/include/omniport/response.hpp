#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "omniport/model.hpp"

// Steady-state anti-Stokes response of the linearized network. At signal
// detuning xi (from the anti-Stokes resonance) the intracavity amplitudes
// a_{j-} and the mechanical amplitude b_- obey
//
//   f_j a_{j-} = -i G_j b_-  + sqrt(kappa_ex,j) eps_j e^{i phase_j}
//   h   b_-    = -i sum_j conj(G_j) a_{j-}
//
// which is solved exactly by eliminating b_- (cost O(N), no matrix inverse).

namespace omniport {

struct Susceptibilities {
    std::vector<cplx> f;  // per-port  f_j = kappa_j/2 - i xi
    cplx h;               // mechanical h = gamma_m/2 - i xi

    static Susceptibilities at(const std::vector<LinearPort>& ports,
                               const MechanicalMode& mech, double xi);
};

struct ResponseState {
    std::vector<cplx> a_minus;  // intracavity anti-Stokes amplitudes
    cplx b_minus{};             // mechanical anti-Stokes amplitude
    double xi = 0.0;
};

// exact elimination solver; works for any port count >= 1
ResponseState solve_response(const std::vector<LinearPort>& ports,
                             const MechanicalMode& mech,
                             std::span<const double> eps,
                             std::span<const double> phase, double xi);

// independent closed-form route for exactly three ports, written as the
// explicit cofactor expressions over the common denominator
//   D = f1 f2 f3 h + f2 f3 |G1|^2 + f1 f3 |G2|^2 + f1 f2 |G3|^2
ResponseState closed_form_three_port(const std::vector<LinearPort>& ports,
                                     const MechanicalMode& mech,
                                     std::span<const double> eps,
                                     std::span<const double> phase, double xi);

// travelling output field at a port: out_j = sqrt(kappa_ex,j) a_{j-} - in_j
// with in_j = eps_j e^{i phase_j}
cplx output_amplitude(const ResponseState& state,
                      const std::vector<LinearPort>& ports,
                      std::span<const double> eps,
                      std::span<const double> phase, std::size_t port);

// S_j = |out_j / in_j|^2; for an undriven port the reference amplitude
// eps_ref is used as the denominator instead
double normalized_output_energy(const ResponseState& state,
                                const std::vector<LinearPort>& ports,
                                std::span<const double> eps,
                                std::span<const double> phase, std::size_t port,
                                double eps_ref);

// auxiliary drive present while a transmission coefficient is measured
struct ControlDrive {
    std::size_t port = 0;
    double eta = 1.0;  // amplitude relative to the probing signal
    double phi = 0.0;  // phase relative to the probing signal
};

// t_{from->to} = out_to / in_from for a unit signal at `from`, optionally
// with a control signal riding on a third port
cplx transmission_coefficient(const std::vector<LinearPort>& ports,
                              const MechanicalMode& mech, std::size_t from,
                              std::size_t to,
                              const std::optional<ControlDrive>& control,
                              double xi);

}  // namespace omniport
