#include "omniport/oracle.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace omniport {

namespace {

namespace ode = boost::numeric::odeint;
using state_t = std::vector<cplx>;
constexpr cplx I{0.0, 1.0};

struct Blowup {};  // escapes the integrator when the state runs away

// ---- small dense complex solve (the tone bases hold at most a few tones) --

std::vector<cplx> solve_dense(std::vector<cplx> A, std::vector<cplx> b) {
    const std::size_t k = b.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(A[r * k + col]) > std::abs(A[piv * k + col])) piv = r;
        if (std::abs(A[piv * k + col]) == 0.0)
            throw NumericalError("demodulation: singular tone basis");
        if (piv != col) {
            for (std::size_t c = 0; c < k; ++c)
                std::swap(A[piv * k + c], A[col * k + c]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            const cplx m = A[r * k + col] / A[col * k + col];
            for (std::size_t c = col; c < k; ++c) A[r * k + c] -= m * A[col * k + c];
            b[r] -= m * b[col];
        }
    }
    std::vector<cplx> x(k);
    for (std::size_t ri = k; ri-- > 0;) {
        cplx s = b[ri];
        for (std::size_t c = ri + 1; c < k; ++c) s -= A[ri * k + c] * x[c];
        x[ri] = s / A[ri * k + ri];
    }
    return x;
}

// exact ∫_{t0}^{t1} e^{i w t} dt
cplx osc_integral(double w, double t0, double t1) {
    if (w == 0.0) return t1 - t0;
    return (std::polar(1.0, w * t1) - std::polar(1.0, w * t0)) / (I * w);
}

// least-squares fit of projections P_k = ∫ y(t) e^{-i w_k t} dt onto the
// basis e^{i w_l t} over [t0, t1]: solve Gram c = P
std::vector<cplx> fit_tones(const std::vector<double>& tones,
                            const cplx* proj, double t0, double t1) {
    const std::size_t k = tones.size();
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b2 = a + 1; b2 < k; ++b2)
            if (std::abs(tones[a] - tones[b2]) * (t1 - t0) < 1.0)
                throw NumericalError(
                    "demodulation: tones unresolved over the fit window; "
                    "increase the duration");
    std::vector<cplx> gram(k * k), rhs(proj, proj + k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b2 = 0; b2 < k; ++b2)
            gram[a * k + b2] = osc_integral(tones[b2] - tones[a], t0, t1);
    return solve_dense(std::move(gram), std::move(rhs));
}

// tone lists per physical mode; mode m contributes tones[m].size() extra
// ODE states accumulating its projections
struct DemodPlan {
    std::vector<std::vector<double>> tones;

    std::size_t extra() const {
        std::size_t q = 0;
        for (const auto& t : tones) q += t.size();
        return q;
    }
};

struct DemodOutcome {
    std::vector<std::vector<cplx>> coeff;  // full-window fit, [mode][tone]
    double drift = 0.0;
};

// integrate phys (signature void(const cplx* y, cplx* dy, double t)) from
// zero-based time over `duration`, demodulating the trailing window
template <class Phys>
DemodOutcome run_demod(Phys&& phys, state_t y, const DemodPlan& plan,
                       double duration, const TrajectorySpec& spec) {
    if (!(spec.window > 0.0 && spec.window < 1.0))
        throw std::invalid_argument(
            "trajectory window fraction must lie in (0, 1)");
    const std::size_t m = y.size();
    const double t_start = duration * (1.0 - spec.window);
    const double t_mid = duration - duration * spec.window / 2.0;
    const double dt0 = std::min(duration * 1e-4, 1e-2);

    auto stepper = ode::make_controlled(spec.abs_tol, spec.rel_tol,
                                        ode::runge_kutta_dopri5<state_t>());

    auto rhs_phys = [&](const state_t& s, state_t& ds, double t) {
        phys(s.data(), ds.data(), t);
    };
    ode::integrate_adaptive(stepper, rhs_phys, y, 0.0, t_start, dt0);

    auto rhs_aug = [&](const state_t& s, state_t& ds, double t) {
        phys(s.data(), ds.data(), t);
        std::size_t q = m;
        for (std::size_t i = 0; i < m; ++i)
            for (double w : plan.tones[i])
                ds[q++] = s[i] * std::polar(1.0, -w * t);
    };
    state_t z(m + plan.extra(), cplx{});
    std::copy(y.begin(), y.end(), z.begin());
    ode::integrate_adaptive(stepper, rhs_aug, z, t_start, t_mid, dt0);
    const state_t first_half(z.begin() + m, z.end());
    ode::integrate_adaptive(stepper, rhs_aug, z, t_mid, duration, dt0);

    DemodOutcome out;
    out.coeff.resize(m);
    double shift = 0.0, scale = 0.0;
    std::size_t q = 0;
    std::vector<cplx> second(plan.extra());
    for (std::size_t i = 0; i < plan.extra(); ++i)
        second[i] = z[m + i] - first_half[i];
    for (std::size_t i = 0; i < m; ++i) {
        const auto& tones = plan.tones[i];
        if (tones.empty()) {
            continue;
        }
        const auto c1 = fit_tones(tones, first_half.data() + q, t_start, t_mid);
        const auto c2 = fit_tones(tones, second.data() + q, t_mid, duration);
        std::vector<cplx> sum(tones.size());
        for (std::size_t k = 0; k < tones.size(); ++k)
            sum[k] = first_half[q + k] + second[q + k];
        out.coeff[i] = fit_tones(tones, sum.data(), t_start, duration);
        for (std::size_t k = 0; k < tones.size(); ++k) {
            shift = std::max(shift, std::abs(c2[k] - c1[k]));
            scale = std::max(scale, std::abs(out.coeff[i][k]));
        }
        q += tones.size();
    }
    out.drift = shift / std::max(scale, 1e-300);
    return out;
}

// slowest decay rate of the rotating-wave dynamics; sets the default horizon
double slowest_decay(const std::vector<LinearPort>& ports,
                     const MechanicalMode& mech) {
    const std::size_t n = ports.size();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        A(j, j) = -ports[j].kappa() / 2.0;
        A(j, n) = -I * ports[j].G();
        A(n, j) = -I * std::conj(ports[j].G());
    }
    A(n, n) = -mech.gamma_m / 2.0;
    const Eigen::VectorXcd ev =
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(A, false).eigenvalues();
    double r = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::min(r, -ev(i).real());
    if (!(r > 0.0))
        throw NumericalError("trajectory horizon: dynamics has no decay");
    return r;
}

double resolve_duration(const TrajectorySpec& spec, double decay) {
    if (spec.duration <= 0.0) return 40.0 / decay;
    if (spec.duration < 20.0 / decay)
        throw std::invalid_argument(
            "trajectory duration is shorter than 20 decay times");
    return spec.duration;
}

void require_signals(std::size_t n, std::span<const double> eps,
                     std::span<const double> phase) {
    if (eps.size() != n || phase.size() != n)
        throw std::invalid_argument(
            "trajectory: signal arrays must match the port count");
}

void check_drift(const DemodOutcome& out, const TrajectorySpec& spec) {
    if (out.drift > spec.drift_tol) {
        char msg[140];
        std::snprintf(msg, sizeof msg,
                      "demodulation drift %.3g exceeds %.3g; the trajectory "
                      "has not settled",
                      out.drift, spec.drift_tol);
        throw NumericalError(msg);
    }
}

}  // namespace

RwaEstimate integrate_rwa(const std::vector<LinearPort>& ports,
                          const MechanicalMode& mech,
                          std::span<const double> eps,
                          std::span<const double> phase, double xi,
                          const TrajectorySpec& spec) {
    const std::size_t n = ports.size();
    require_signals(n, eps, phase);

    std::vector<cplx> G(n), E(n);
    std::vector<double> hk(n);
    for (std::size_t j = 0; j < n; ++j) {
        G[j] = ports[j].G();
        E[j] = std::sqrt(ports[j].kappa_ex) * std::polar(eps[j], phase[j]);
        hk[j] = ports[j].kappa() / 2.0;
    }
    const double hg = mech.gamma_m / 2.0;

    auto phys = [&](const cplx* y, cplx* dy, double t) {
        const cplx drive = std::polar(1.0, -xi * t);
        cplx sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dy[j] = -hk[j] * y[j] - I * G[j] * y[n] + E[j] * drive;
            sum += std::conj(G[j]) * y[j];
        }
        dy[n] = -hg * y[n] - I * sum;
    };

    DemodPlan plan;
    plan.tones.assign(n + 1, {-xi});
    const double duration = resolve_duration(spec, slowest_decay(ports, mech));
    const auto out =
        run_demod(phys, state_t(n + 1, cplx{}), plan, duration, spec);
    check_drift(out, spec);

    RwaEstimate est;
    est.drift = out.drift;
    est.state.xi = xi;
    est.state.a_minus.resize(n);
    for (std::size_t j = 0; j < n; ++j) est.state.a_minus[j] = out.coeff[j][0];
    est.state.b_minus = out.coeff[n][0];
    return est;
}

TwoSidebandResult integrate_two_sideband(const std::vector<LinearPort>& ports,
                                         const MechanicalMode& mech,
                                         std::span<const double> eps,
                                         std::span<const double> phase,
                                         double xi,
                                         const TrajectorySpec& spec) {
    const std::size_t n = ports.size();
    require_signals(n, eps, phase);
    if (mech.omega_m <= 0)
        throw std::invalid_argument(
            "integrate_two_sideband: omega_m must be positive");

    std::vector<cplx> G(n), E(n);
    std::vector<double> hk(n);
    for (std::size_t j = 0; j < n; ++j) {
        G[j] = ports[j].G();
        E[j] = std::sqrt(ports[j].kappa_ex) * std::polar(eps[j], phase[j]);
        hk[j] = ports[j].kappa() / 2.0;
    }
    const double hg = mech.gamma_m / 2.0;
    const double w2 = 2.0 * mech.omega_m;

    // counter-rotating coupling enters through explicit e^{+-2i omega_m t}
    auto phys = [&](const cplx* y, cplx* dy, double t) {
        const cplx drive = std::polar(1.0, -xi * t);
        const cplx cr = std::polar(1.0, w2 * t);
        cplx sum = 0.0, crsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dy[j] = -hk[j] * y[j] - I * G[j] * (y[n] + std::conj(y[n]) * cr) +
                    E[j] * drive;
            sum += std::conj(G[j]) * y[j];
            crsum += G[j] * std::conj(y[j]);
        }
        dy[n] = -hg * y[n] - I * (sum + crsum * cr);
    };

    DemodPlan plan;
    plan.tones.assign(n + 1, {-xi, w2 + xi});
    const double duration = resolve_duration(spec, slowest_decay(ports, mech));
    const auto out =
        run_demod(phys, state_t(n + 1, cplx{}), plan, duration, spec);
    check_drift(out, spec);

    TwoSidebandResult res;
    res.drift = out.drift;
    res.anti_stokes.xi = xi;
    res.anti_stokes.a_minus.resize(n);
    res.a_plus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.anti_stokes.a_minus[j] = out.coeff[j][0];
        res.a_plus[j] = out.coeff[j][1];
    }
    res.anti_stokes.b_minus = out.coeff[n][0];
    res.b_plus = out.coeff[n][1];

    // gap to the rotating-wave steady state, relative per port with a guard
    // against ports whose amplitude vanishes by interference
    const ResponseState rwa = solve_response(ports, mech, eps, phase, xi);
    double amax = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        amax = std::max(amax, std::abs(rwa.a_minus[j]));
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ref = std::abs(rwa.a_minus[j]);
        const double gap = std::abs(res.anti_stokes.a_minus[j] - rwa.a_minus[j]);
        err = std::max(err, gap / std::max(ref, 1e-12 * std::max(amax, 1e-300)));
    }
    res.rwa_error = err;
    return res;
}

NonlinearResult integrate_nonlinear(const NetworkConfig& physical,
                                    const MeanFieldBranch& branch,
                                    std::span<const double> eps_s,
                                    std::span<const double> phase, double xi,
                                    const TrajectorySpec& spec) {
    if (!physical.is_physical())
        throw std::invalid_argument(
            "integrate_nonlinear: physical-level config required");
    const auto& ports = physical.physical();
    const std::size_t n = ports.size();
    require_signals(n, eps_s, phase);
    if (branch.alpha.size() != n)
        throw std::invalid_argument(
            "integrate_nonlinear: branch does not match the config");

    const double omega_m = physical.mech.omega_m;
    const double hg = physical.mech.gamma_m / 2.0;

    double scale0 = 1.0;
    for (const auto& a : branch.alpha) scale0 = std::max(scale0, std::abs(a));
    scale0 = std::max(scale0, std::abs(branch.beta));
    const double cap2 = 1e12 * scale0 * scale0;

    // per-port beat frequency of the probe against the control drive
    std::vector<double> nu(n);
    std::vector<cplx> Ec(n), Es(n);
    std::vector<double> hk(n);
    for (std::size_t j = 0; j < n; ++j) {
        nu[j] = branch.delta_eff[j] + xi;
        const double rt = std::sqrt(ports[j].kappa_ex);
        Ec[j] = rt * ports[j].eps_c * std::polar(1.0, ports[j].drive_phase);
        Es[j] = rt * std::polar(eps_s[j], phase[j]);
        hk[j] = ports[j].kappa() / 2.0;
    }

    auto phys = [&](const cplx* y, cplx* dy, double t) {
        const double disp = 2.0 * y[n].real();
        cplx sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::norm(y[j]) > cap2) throw Blowup{};
            dy[j] = -(I * (ports[j].delta + ports[j].g * disp) + hk[j]) * y[j] +
                    Ec[j] + Es[j] * std::polar(1.0, -nu[j] * t);
            sum += ports[j].g * std::norm(y[j]);
        }
        if (std::norm(y[n]) > cap2) throw Blowup{};
        dy[n] = -(I * omega_m + hg) * y[n] - I * sum;
    };

    // demodulation tones: the working point plus the probe beat, per port;
    // the mechanics carries every distinct beat frequency
    DemodPlan plan;
    plan.tones.resize(n + 1);
    std::vector<double> mech_tones{0.0};
    for (std::size_t j = 0; j < n; ++j) {
        plan.tones[j] = {0.0, -nu[j], nu[j]};
        for (double s : {-nu[j], nu[j]}) {
            bool seen = false;
            for (double w : mech_tones)
                if (std::abs(w - s) <= 1e-9 * std::max(1.0, std::abs(s)))
                    seen = true;
            if (!seen) mech_tones.push_back(s);
        }
    }
    plan.tones[n] = mech_tones;

    // the rotating-wave rates of the branch set the settling horizon
    std::vector<LinearPort> lin(n);
    for (std::size_t j = 0; j < n; ++j)
        lin[j] = {ports[j].kappa_0, ports[j].kappa_ex,
                  std::abs(branch.G_eff[j]), std::arg(branch.G_eff[j])};
    const double duration =
        resolve_duration(spec, slowest_decay(lin, physical.mech));

    state_t y0(n + 1);
    for (std::size_t j = 0; j < n; ++j) y0[j] = branch.alpha[j];
    y0[n] = branch.beta;

    NonlinearResult res;
    DemodOutcome out;
    try {
        out = run_demod(phys, std::move(y0), plan, duration, spec);
    } catch (const Blowup&) {
        res.status = SettleStatus::diverged;
        return res;
    }

    res.drift = out.drift;
    res.mean_alpha.resize(n);
    res.a_plus.resize(n);
    res.anti_stokes.xi = xi;
    res.anti_stokes.a_minus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.mean_alpha[j] = out.coeff[j][0];
        res.anti_stokes.a_minus[j] = out.coeff[j][1];
        res.a_plus[j] = out.coeff[j][2];
    }
    res.mean_beta = out.coeff[n][0];

    // mechanical sidebands sit at the beats nearest -(omega_m + xi)
    const double want = omega_m + xi;
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 1; k < mech_tones.size(); ++k) {
        if (std::abs(mech_tones[k] + want) < std::abs(mech_tones[lo] + want))
            lo = k;
        if (std::abs(mech_tones[k] - want) < std::abs(mech_tones[hi] - want))
            hi = k;
    }
    res.anti_stokes.b_minus = out.coeff[n][lo];
    res.b_plus = out.coeff[n][hi];

    double gap = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        gap = std::max(gap, std::abs(res.mean_alpha[j] - branch.alpha[j]));
    gap = std::max(gap, std::abs(res.mean_beta - branch.beta));
    res.mean_residual = gap / scale0;

    // either already far from the branch or still moving: the branch did
    // not hold, which is a status here rather than an error
    if (res.mean_residual > 1e-3 || out.drift > spec.drift_tol) {
        res.status = SettleStatus::escaped;
        return res;
    }
    res.status = SettleStatus::converged;
    return res;
}

}  // namespace omniport
