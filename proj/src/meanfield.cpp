#include "omniport/meanfield.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace omniport {

namespace {

// residual of the scalar self-consistency equation in x = beta* + beta:
//   F(x) = x (gamma_m^2 + 4 omega_m^2)
//        + 8 omega_m sum_j g_j 4 kappa_ex,j eps_c,j^2 / (kappa_j^2 + 4 Delta'_j^2)
struct ScalarEquation {
    const std::vector<PhysicalPort>& ports;
    double omega_m, gamma_m;

    double lorentzian(const PhysicalPort& p, double x) const {
        const double dp = p.delta + p.g * x;
        const double k = p.kappa();
        return 4.0 * p.kappa_ex * p.eps_c * p.eps_c / (k * k + 4.0 * dp * dp);
    }

    double value(double x) const {
        double s = 0.0;
        for (const auto& p : ports) s += p.g * lorentzian(p, x);
        return x * (gamma_m * gamma_m + 4.0 * omega_m * omega_m) +
               8.0 * omega_m * s;
    }

    double derivative(double x) const {
        double s = 0.0;
        for (const auto& p : ports) {
            const double dp = p.delta + p.g * x;
            const double k = p.kappa();
            s -= p.g * p.g * lorentzian(p, x) * 8.0 * dp / (k * k + 4.0 * dp * dp);
        }
        return (gamma_m * gamma_m + 4.0 * omega_m * omega_m) + 8.0 * omega_m * s;
    }
};

double bisect(const ScalarEquation& eq, double lo, double hi) {
    double flo = eq.value(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = eq.value(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // Newton polish, kept inside the bracket
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double d = eq.derivative(x);
        if (d == 0.0) break;
        const double xn = x - eq.value(x) / d;
        if (!(xn >= lo && xn <= hi)) break;
        if (xn == x) break;
        x = xn;
    }
    return x;
}

MeanFieldBranch expand_branch(double x, const NetworkConfig& cfg) {
    const auto& ports = cfg.physical();
    MeanFieldBranch br;
    br.x = x;
    br.alpha.reserve(ports.size());
    br.delta_eff.reserve(ports.size());
    br.G_eff.reserve(ports.size());
    double coupling_sum = 0.0;
    for (const auto& p : ports) {
        const double dp = p.delta + p.g * x;
        const cplx alpha = 2.0 * std::sqrt(p.kappa_ex) * p.eps_c *
                           std::polar(1.0, p.drive_phase) /
                           cplx(p.kappa(), 2.0 * dp);
        br.alpha.push_back(alpha);
        br.delta_eff.push_back(dp);
        br.G_eff.push_back(p.g * alpha);
        coupling_sum += p.g * std::norm(alpha);
    }
    br.beta = -2.0 * cplx(0.0, 1.0) * coupling_sum /
              cplx(cfg.mech.gamma_m, 2.0 * cfg.mech.omega_m);
    return br;
}

}  // namespace

std::vector<MeanFieldBranch> solve_mean_fields(const NetworkConfig& physical,
                                               const MeanFieldKnobs& knobs) {
    if (!physical.is_physical())
        throw std::invalid_argument(
            "solve_mean_fields: physical-level config required");
    const auto& ports = physical.physical();
    if (ports.empty())
        throw std::invalid_argument("solve_mean_fields: port list is empty");
    if (physical.mech.omega_m <= 0 || physical.mech.gamma_m <= 0)
        throw std::invalid_argument(
            "solve_mean_fields: mechanical rates must be positive");

    const ScalarEquation eq{ports, physical.mech.omega_m,
                            physical.mech.gamma_m};

    // a-priori interval: |x| is bounded by twice the fully resonant radiation
    // pressure shift, so [-X, X] always brackets every root
    double peak = 0.0;
    for (const auto& p : ports) {
        const double k = p.kappa();
        peak = std::max(peak,
                        std::abs(p.g) * p.kappa_ex * p.eps_c * p.eps_c / (k * k));
    }
    const double X = 16.0 * static_cast<double>(ports.size()) * peak /
                     physical.mech.omega_m * knobs.interval_scale;

    std::vector<double> roots;
    if (X == 0.0) {
        roots.push_back(0.0);  // undriven or uncoupled: the equation is linear
    } else {
        const double lo = -X, hi = X;
        if (!(eq.value(lo) < 0.0) || !(eq.value(hi) > 0.0)) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "solve_mean_fields: no sign change over [%g, %g]; "
                          "widen interval_scale",
                          lo, hi);
            throw NumericalError(msg);
        }
        const int n = std::max(knobs.scan_points, 3);
        const double step = (hi - lo) / (n - 1);
        double xa = lo, fa = eq.value(lo);
        for (int i = 1; i < n; ++i) {
            const double xb = lo + i * step;
            const double fb = eq.value(xb);
            if (fa == 0.0) {
                roots.push_back(xa);
            } else if ((fa < 0) != (fb < 0)) {
                // subdivide the cell: close root pairs would otherwise merge
                const int m = std::max(knobs.refine_factor, 1);
                double ra = xa, fra = fa;
                for (int k = 1; k <= m; ++k) {
                    const double rb = xa + (xb - xa) * k / m;
                    const double frb = (k == m) ? fb : eq.value(rb);
                    if (fra == 0.0)
                        roots.push_back(ra);
                    else if ((fra < 0) != (frb < 0))
                        roots.push_back(bisect(eq, ra, rb));
                    ra = rb;
                    fra = frb;
                }
            }
            xa = xb;
            fa = fb;
        }
        if (fa == 0.0) roots.push_back(xa);
    }

    std::sort(roots.begin(), roots.end());
    // collapse duplicates from roots landing exactly on cell boundaries
    const double same = 1e-12 * std::max(X, 1.0);
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [same](double a, double b) {
                                return std::abs(a - b) <= same;
                            }),
                roots.end());

    std::vector<MeanFieldBranch> branches;
    branches.reserve(roots.size());
    const double fscale =
        (physical.mech.gamma_m * physical.mech.gamma_m +
         4.0 * physical.mech.omega_m * physical.mech.omega_m) *
            std::max(X, 1.0) +
        1.0;
    for (double x : roots) {
        if (std::abs(eq.value(x)) > 1e-10 * fscale)
            throw NumericalError(
                "solve_mean_fields: root polish failed to converge");
        MeanFieldBranch br = expand_branch(x, physical);
        br.stable = assess_stability(br, physical);
        branches.push_back(std::move(br));
    }
    return branches;
}

bool assess_stability(const MeanFieldBranch& branch,
                      const NetworkConfig& physical) {
    if (!physical.is_physical())
        throw std::invalid_argument(
            "assess_stability: physical-level config required");
    const auto& ports = physical.physical();
    const std::size_t n = ports.size();
    if (branch.alpha.size() != n || branch.delta_eff.size() != n)
        throw std::invalid_argument(
            "assess_stability: branch does not match the config");

    // drift matrix of the quadratures (X_a1, Y_a1, ..., X_aN, Y_aN, X_b, Y_b)
    // for the fluctuation equations with both sideband processes retained
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n + 2, 2 * n + 2);
    const std::size_t xb = 2 * n, yb = 2 * n + 1;
    for (std::size_t j = 0; j < n; ++j) {
        const double kj = ports[j].kappa();
        const double dp = branch.delta_eff[j];
        const cplx G = branch.G_eff[j];
        A(2 * j, 2 * j) = -kj / 2.0;
        A(2 * j, 2 * j + 1) = dp;
        A(2 * j, xb) = 2.0 * G.imag();
        A(2 * j + 1, 2 * j) = -dp;
        A(2 * j + 1, 2 * j + 1) = -kj / 2.0;
        A(2 * j + 1, xb) = -2.0 * G.real();
        A(yb, 2 * j) = -2.0 * G.real();
        A(yb, 2 * j + 1) = -2.0 * G.imag();
    }
    A(xb, xb) = -physical.mech.gamma_m / 2.0;
    A(xb, yb) = physical.mech.omega_m;
    A(yb, xb) = -physical.mech.omega_m;
    A(yb, yb) = -physical.mech.gamma_m / 2.0;

    const Eigen::VectorXcd ev =
        Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
    return ev.real().maxCoeff() < 0.0;
}

NetworkConfig to_linearized(const MeanFieldBranch& branch,
                            const NetworkConfig& physical, double red_tol,
                            bool skip_uncoupled) {
    if (!physical.is_physical())
        throw std::invalid_argument(
            "to_linearized: physical-level config required");
    if (!branch.stable)
        throw std::invalid_argument("to_linearized: branch is unstable");
    const auto& ports = physical.physical();
    const std::size_t n = ports.size();
    if (branch.G_eff.size() != n)
        throw std::invalid_argument(
            "to_linearized: branch does not match the config");

    const double omega_m = physical.mech.omega_m;
    std::size_t worst = n;
    double worst_off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (skip_uncoupled && std::abs(branch.G_eff[j]) == 0.0) continue;
        const double off = std::abs(branch.delta_eff[j] - omega_m);
        if (off > worst_off) {
            worst_off = off;
            worst = j;
        }
    }
    if (worst < n && worst_off > red_tol * omega_m) {
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "to_linearized: port %zu sits %g away from the red "
                      "sideband (tolerance %g)",
                      worst + 1, worst_off, red_tol * omega_m);
        throw std::invalid_argument(msg);
    }

    std::vector<LinearPort> lin;
    lin.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        lin.push_back({ports[j].kappa_0, ports[j].kappa_ex,
                       std::abs(branch.G_eff[j]),
                       std::arg(branch.G_eff[j])});
    return NetworkConfig{physical.mech, std::move(lin)};
}

}  // namespace omniport
