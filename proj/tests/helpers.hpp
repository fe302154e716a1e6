#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "omniport/meanfield.hpp"
#include "omniport/model.hpp"
#include "omniport/response.hpp"

// Shared builders for the test suite. The symmetric three-port network
// (equal overcoupled linewidths, two equal target couplings, one control
// coupling) is the workhorse configuration; the calibrated physical network
// is its pre-linearization counterpart with the working point arranged in
// closed form so the linearization lands on prescribed couplings.

namespace testutil {

using omniport::cplx;
using omniport::LinearPort;
using omniport::MechanicalMode;
using omniport::NetworkConfig;
using omniport::PhysicalPort;

inline MechanicalMode mech(double gamma_m = 1e-3, double omega_m = 100.0) {
    return {omega_m, gamma_m};
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

// kappa_ex = kappa = 1 on every port; target couplings G on ports 1 and 2
// (theta on port 2), control coupling Gp on port 3
inline std::vector<LinearPort> three_port(double G, double Gp, double theta) {
    std::vector<LinearPort> ports(3);
    ports[0] = {0.0, 1.0, G, 0.0};
    ports[1] = {0.0, 1.0, G, theta};
    ports[2] = {0.0, 1.0, Gp, 0.0};
    return ports;
}

inline std::vector<LinearPort> four_port(const std::vector<double>& mods,
                                         const std::vector<double>& phases) {
    std::vector<LinearPort> ports(4);
    for (std::size_t j = 0; j < 4; ++j) ports[j] = {0.0, 1.0, mods[j], phases[j]};
    return ports;
}

struct RandomNetwork {
    std::vector<LinearPort> ports;
    MechanicalMode mech;
    std::vector<double> eps;
    std::vector<double> phase;
};

inline RandomNetwork random_network(std::mt19937& rng, std::size_t n,
                                    bool with_intrinsic_loss) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    RandomNetwork net;
    net.mech = {100.0, 1e-3 + 0.2 * u01(rng)};
    net.ports.resize(n);
    net.eps.resize(n);
    net.phase.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        net.ports[j].kappa_ex = 0.5 + 1.5 * u01(rng);
        net.ports[j].kappa_0 = with_intrinsic_loss ? 0.05 + 0.45 * u01(rng) : 0.0;
        net.ports[j].G_mod = 2.0 * u01(rng);
        net.ports[j].G_phase = angle(rng);
        net.eps[j] = 2.0 * u01(rng);
        net.phase[j] = angle(rng);
    }
    net.eps[0] += 0.1;  // keep at least one port clearly driven
    return net;
}

// relative defect of the travelling-wave energy budget
//   sum |in|^2 - sum |out|^2  =  sum kappa_0 |a|^2 + gamma_m |b|^2
inline double energy_balance_gap(const std::vector<LinearPort>& ports,
                                 const MechanicalMode& mech,
                                 const std::vector<double>& eps,
                                 const std::vector<double>& phase,
                                 const omniport::ResponseState& state) {
    double in2 = 0.0, out2 = 0.0, dissipated = 0.0;
    for (std::size_t j = 0; j < ports.size(); ++j) {
        in2 += eps[j] * eps[j];
        out2 += std::norm(omniport::output_amplitude(state, ports, eps, phase, j));
        dissipated += ports[j].kappa_0 * std::norm(state.a_minus[j]);
    }
    dissipated += mech.gamma_m * std::norm(state.b_minus);
    return std::abs((in2 - out2) - dissipated) / std::max(in2 + out2, 1e-300);
}

// Physical-level network whose linearization about its working point hits
// the prescribed effective couplings exactly. With alpha_j = G_j/g_j the
// control amplitude, phase, and detuning follow in closed form:
//   eps_c,j  = |alpha_j| sqrt(kappa^2 + 4 omega_m^2) / (2 sqrt(kappa_ex))
//   vartheta_j = theta_j + atan2(2 omega_m, kappa)
//   x        = -8 omega_m sum_j g_j |alpha_j|^2 / (gamma_m^2 + 4 omega_m^2)
//   Delta_j  = omega_m - g_j x        (so Delta'_j = omega_m on the branch)
struct Calibrated {
    NetworkConfig config;
    double x_expected = 0.0;
};

inline Calibrated calibrated_physical(const std::vector<double>& g,
                                      const std::vector<double>& G_mod,
                                      const std::vector<double>& theta,
                                      double gamma_m = 1e-3,
                                      double omega_m = 100.0) {
    const double kappa = 1.0;
    Calibrated cal;
    std::vector<PhysicalPort> ports(g.size());
    double x = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double alpha_mod = G_mod[j] / g[j];
        x -= 8.0 * omega_m * g[j] * alpha_mod * alpha_mod /
             (gamma_m * gamma_m + 4.0 * omega_m * omega_m);
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double alpha_mod = G_mod[j] / g[j];
        ports[j].kappa_0 = 0.0;
        ports[j].kappa_ex = kappa;
        ports[j].g = g[j];
        ports[j].eps_c =
            alpha_mod * std::sqrt(kappa * kappa + 4.0 * omega_m * omega_m) / 2.0;
        ports[j].drive_phase = theta[j] + std::atan2(2.0 * omega_m, kappa);
        ports[j].delta = omega_m - g[j] * x;
    }
    cal.config.mech = {omega_m, gamma_m};
    cal.config.ports = ports;
    cal.x_expected = x;
    return cal;
}

// branch whose coordinate is nearest the calibrated working point
inline const omniport::MeanFieldBranch& branch_near(
    const std::vector<omniport::MeanFieldBranch>& branches, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < branches.size(); ++i)
        if (std::abs(branches[i].x - x) < std::abs(branches[best].x - x)) best = i;
    return branches[best];
}

}  // namespace testutil
