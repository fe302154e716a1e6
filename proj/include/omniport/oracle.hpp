#pragma once

#include <span>

#include "omniport/meanfield.hpp"
#include "omniport/model.hpp"
#include "omniport/response.hpp"

// Independent time-domain route to the steady state: integrate the equations
// of motion until transients die out, then least-squares demodulate the
// trailing window onto the expected tones. Projections are accumulated as
// additional ODE states, so no trajectory storage is needed. The window is
// fitted twice (each half separately); the shift between the two half-window
// fits is the reported drift and gates steady-state acceptance.

namespace omniport {

struct TrajectorySpec {
    double duration = 0.0;    // total time; 0 picks 40 / slowest decay rate
    double rel_tol = 1e-10;   // integrator tolerances
    double abs_tol = 1e-12;
    double window = 0.25;     // trailing fraction used for demodulation
    double drift_tol = 1e-8;  // limit on the half-window fit shift
};

struct RwaEstimate {
    ResponseState state;  // demodulated anti-Stokes amplitudes
    double drift = 0.0;
};

// rotating-wave dynamics: each cavity couples to the mechanics through
// G_j only, driven at detuning xi. Agrees with solve_response by design.
RwaEstimate integrate_rwa(const std::vector<LinearPort>& ports,
                          const MechanicalMode& mech,
                          std::span<const double> eps,
                          std::span<const double> phase, double xi,
                          const TrajectorySpec& spec = {});

struct TwoSidebandResult {
    ResponseState anti_stokes;
    std::vector<cplx> a_plus;  // complementary-sideband cavity amplitudes
    cplx b_plus{};
    double rwa_error = 0.0;  // worst relative gap to the rotating-wave result
    double drift = 0.0;
};

// same system with the counter-rotating terms retained; they enter as
// explicit e^{+-2i omega_m t} factors, so the rotating-wave error can be
// quantified directly against solve_response
TwoSidebandResult integrate_two_sideband(const std::vector<LinearPort>& ports,
                                         const MechanicalMode& mech,
                                         std::span<const double> eps,
                                         std::span<const double> phase,
                                         double xi,
                                         const TrajectorySpec& spec = {});

enum class SettleStatus { converged, escaped, diverged };

struct NonlinearResult {
    SettleStatus status = SettleStatus::converged;
    std::vector<cplx> mean_alpha;  // fitted working point
    cplx mean_beta{};
    double mean_residual = 0.0;    // relative gap to the branch prediction
    ResponseState anti_stokes;     // fitted signal sidebands
    std::vector<cplx> a_plus;
    cplx b_plus{};
    double drift = 0.0;
};

// full nonlinear equations of motion, started on a mean-field branch with
// weak probe signals at detuning xi riding on the control drives. Flags a
// trajectory that leaves the branch (escaped) or blows up (diverged).
NonlinearResult integrate_nonlinear(const NetworkConfig& physical,
                                    const MeanFieldBranch& branch,
                                    std::span<const double> eps_s,
                                    std::span<const double> phase, double xi,
                                    const TrajectorySpec& spec = {});

}  // namespace omniport
