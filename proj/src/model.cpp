#include "omniport/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace omniport {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string port_prefix(std::size_t j) {
    return "port " + std::to_string(j + 1) + ": ";
}

void check_finite(ValidationReport& rep, const std::string& where,
                  const char* name, double v) {
    if (!std::isfinite(v))
        rep.errors.push_back(where + std::string(name) + " is not finite");
}

}  // namespace

ValidationReport validate(const NetworkConfig& config) {
    ValidationReport rep;
    auto err = [&](std::string m) { rep.errors.push_back(std::move(m)); };

    check_finite(rep, "mechanical mode: ", "omega_m", config.mech.omega_m);
    check_finite(rep, "mechanical mode: ", "gamma_m", config.mech.gamma_m);
    if (std::isfinite(config.mech.omega_m) && config.mech.omega_m <= 0)
        err("mechanical mode: omega_m must be positive (got " +
            fmt(config.mech.omega_m) + ")");
    if (std::isfinite(config.mech.gamma_m) && config.mech.gamma_m <= 0)
        err("mechanical mode: gamma_m must be positive (got " +
            fmt(config.mech.gamma_m) + ")");

    const std::size_t n = config.num_ports();
    if (n == 0)
        err("port list is empty");
    else if (n == 1)
        err("network has 1 port; at least 2 are required");

    auto check_common = [&](std::size_t j, double k0, double kex) {
        const std::string at = port_prefix(j);
        check_finite(rep, at, "kappa_0", k0);
        check_finite(rep, at, "kappa_ex", kex);
        if (std::isfinite(k0) && k0 < 0)
            err(at + "kappa_0 must be non-negative (got " + fmt(k0) + ")");
        if (std::isfinite(kex) && kex <= 0)
            err(at + "kappa_ex must be positive (got " + fmt(kex) + ")");
    };

    if (config.is_physical()) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& p = config.physical()[j];
            const std::string at = port_prefix(j);
            check_common(j, p.kappa_0, p.kappa_ex);
            check_finite(rep, at, "g", p.g);
            check_finite(rep, at, "eps_c", p.eps_c);
            check_finite(rep, at, "drive_phase", p.drive_phase);
            check_finite(rep, at, "delta", p.delta);
            if (std::isfinite(p.eps_c) && p.eps_c < 0)
                err(at + "eps_c must be non-negative (got " + fmt(p.eps_c) + ")");
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& p = config.linearized()[j];
            const std::string at = port_prefix(j);
            check_common(j, p.kappa_0, p.kappa_ex);
            check_finite(rep, at, "G_mod", p.G_mod);
            check_finite(rep, at, "G_phase", p.G_phase);
            if (std::isfinite(p.G_mod) && p.G_mod < 0)
                err(at + "G_mod must be non-negative (got " + fmt(p.G_mod) + ")");
        }
    }

    // the linearization and the anti-Stokes reduction both assume the
    // resolved-sideband regime; warn when the margin is thin
    if (rep.ok() && config.is_physical()) {
        double worst = config.mech.gamma_m;
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, config.kappa(j));
        const double ratio = config.mech.omega_m / worst;
        if (ratio < 10.0)
            rep.warnings.push_back("resolved-sideband ratio " + fmt(ratio) +
                                   " < 10");
    }
    return rep;
}

ValidationReport validate(const SignalSet& signals, std::size_t num_ports) {
    ValidationReport rep;
    auto err = [&](std::string m) { rep.errors.push_back(std::move(m)); };

    if (signals.eps.size() != num_ports)
        err("signal amplitude list has " + std::to_string(signals.eps.size()) +
            " entries for " + std::to_string(num_ports) + " ports");
    if (signals.phase.size() != num_ports)
        err("signal phase list has " + std::to_string(signals.phase.size()) +
            " entries for " + std::to_string(num_ports) + " ports");
    if (!rep.ok()) return rep;

    bool any_driven = false;
    for (std::size_t j = 0; j < num_ports; ++j) {
        const std::string at = port_prefix(j);
        check_finite(rep, at, "signal amplitude", signals.eps[j]);
        check_finite(rep, at, "signal phase", signals.phase[j]);
        if (std::isfinite(signals.eps[j]) && signals.eps[j] < 0)
            err(at + "signal amplitude must be non-negative (got " +
                fmt(signals.eps[j]) + ")");
        if (signals.eps[j] > 0) any_driven = true;
    }
    if (rep.ok() && !any_driven) err("no port carries a signal");
    return rep;
}

}  // namespace omniport
