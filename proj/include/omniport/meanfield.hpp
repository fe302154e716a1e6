#pragma once

#include "omniport/model.hpp"

// Classical working point of the driven network. Each cavity amplitude
// alpha_j and the mechanical amplitude beta satisfy
//
//   alpha_j = 2 sqrt(kappa_ex,j) eps_c,j e^{i vartheta_j} / (kappa_j + 2i Delta'_j)
//   beta    = -2i sum_j g_j |alpha_j|^2 / (gamma_m + 2i omega_m)
//
// with Delta'_j = Delta_j + g_j (beta* + beta). Substituting the first into
// the second reduces the problem to one real root equation in
// x = beta* + beta, which is scanned and bisected; every root is a branch.

namespace omniport {

struct MeanFieldBranch {
    std::vector<cplx> alpha;        // cavity amplitudes
    cplx beta{};                    // mechanical amplitude
    std::vector<double> delta_eff;  // shifted detunings Delta'_j
    std::vector<cplx> G_eff;        // effective couplings g_j alpha_j
    double x = 0.0;                 // beta* + beta, the branch coordinate
    bool stable = false;
};

// scan resolution knobs; defaults satisfy the documented accuracy targets
struct MeanFieldKnobs {
    int scan_points = 10001;     // coarse samples over the bracketing interval
    int refine_factor = 64;      // extra subdivision inside a sign-change cell
    double interval_scale = 1.0; // stretches the a-priori root interval
};

// all self-consistent branches, sorted by x ascending, stability filled in.
// Throws NumericalError when the a-priori interval fails to bracket.
std::vector<MeanFieldBranch> solve_mean_fields(const NetworkConfig& physical,
                                               const MeanFieldKnobs& knobs = {});

// linear stability of one branch: eigenvalues of the quadrature drift matrix
// of the fluctuation equations (no rotating-wave reduction)
bool assess_stability(const MeanFieldBranch& branch,
                      const NetworkConfig& physical);

// freezes a stable branch into a linearized network. Every coupled port must
// sit on the red sideband, |Delta'_j - omega_m| <= red_tol * omega_m; ports
// with zero effective coupling are exempt when skip_uncoupled is set.
NetworkConfig to_linearized(const MeanFieldBranch& branch,
                            const NetworkConfig& physical, double red_tol,
                            bool skip_uncoupled = false);

}  // namespace omniport
