#include "omniport/response.hpp"

#include <cmath>

namespace omniport {

namespace {

constexpr cplx I{0.0, 1.0};

void require_sizes(const std::vector<LinearPort>& ports,
                   std::span<const double> eps, std::span<const double> phase) {
    if (ports.empty())
        throw std::invalid_argument("response: port list is empty");
    if (eps.size() != ports.size() || phase.size() != ports.size())
        throw std::invalid_argument(
            "response: signal arrays must match the port count");
}

// external-coupling-weighted input amplitude entering the cavity equation
cplx drive_term(const LinearPort& p, double eps, double phase) {
    return std::sqrt(p.kappa_ex) * std::polar(eps, phase);
}

}  // namespace

Susceptibilities Susceptibilities::at(const std::vector<LinearPort>& ports,
                                      const MechanicalMode& mech, double xi) {
    Susceptibilities s;
    s.f.reserve(ports.size());
    for (const auto& p : ports) s.f.emplace_back(p.kappa() / 2.0, -xi);
    s.h = cplx(mech.gamma_m / 2.0, -xi);
    return s;
}

ResponseState solve_response(const std::vector<LinearPort>& ports,
                             const MechanicalMode& mech,
                             std::span<const double> eps,
                             std::span<const double> phase, double xi) {
    require_sizes(ports, eps, phase);
    const auto s = Susceptibilities::at(ports, mech, xi);
    const std::size_t n = ports.size();

    // eliminate the cavities from the mechanical equation:
    //   (h + sum |G_j|^2 / f_j) b = -i sum conj(G_j) E_j / f_j
    cplx num = 0.0, den = s.h;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx G = ports[j].G();
        const cplx E = drive_term(ports[j], eps[j], phase[j]);
        num += std::conj(G) * E / s.f[j];
        den += ports[j].G_mod * ports[j].G_mod / s.f[j];
    }

    ResponseState st;
    st.xi = xi;
    st.b_minus = -I * num / den;
    st.a_minus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx E = drive_term(ports[j], eps[j], phase[j]);
        st.a_minus[j] = (-I * ports[j].G() * st.b_minus + E) / s.f[j];
    }
    return st;
}

ResponseState closed_form_three_port(const std::vector<LinearPort>& ports,
                                     const MechanicalMode& mech,
                                     std::span<const double> eps,
                                     std::span<const double> phase, double xi) {
    require_sizes(ports, eps, phase);
    if (ports.size() != 3)
        throw std::invalid_argument(
            "closed_form_three_port: exactly 3 ports required");

    const auto s = Susceptibilities::at(ports, mech, xi);
    const cplx f1 = s.f[0], f2 = s.f[1], f3 = s.f[2], h = s.h;
    const cplx G1 = ports[0].G(), G2 = ports[1].G(), G3 = ports[2].G();
    const double g1 = ports[0].G_mod * ports[0].G_mod;
    const double g2 = ports[1].G_mod * ports[1].G_mod;
    const double g3 = ports[2].G_mod * ports[2].G_mod;
    const cplx E1 = drive_term(ports[0], eps[0], phase[0]);
    const cplx E2 = drive_term(ports[1], eps[1], phase[1]);
    const cplx E3 = drive_term(ports[2], eps[2], phase[2]);

    const cplx D = f1 * f2 * f3 * h + f2 * f3 * g1 + f1 * f3 * g2 + f1 * f2 * g3;
    const cplx M1 = f2 * f3 * h + f3 * g2 + f2 * g3;
    const cplx M2 = f1 * f3 * h + f3 * g1 + f1 * g3;
    const cplx M3 = f1 * f2 * h + f2 * g1 + f1 * g2;

    ResponseState st;
    st.xi = xi;
    st.a_minus = {
        (M1 * E1 - f3 * G1 * std::conj(G2) * E2 - f2 * G1 * std::conj(G3) * E3) / D,
        (M2 * E2 - f3 * G2 * std::conj(G1) * E1 - f1 * G2 * std::conj(G3) * E3) / D,
        (M3 * E3 - f2 * G3 * std::conj(G1) * E1 - f1 * G3 * std::conj(G2) * E2) / D,
    };
    st.b_minus = -I *
                 (std::conj(G1) * f2 * f3 * E1 + std::conj(G2) * f1 * f3 * E2 +
                  std::conj(G3) * f1 * f2 * E3) /
                 D;
    return st;
}

cplx output_amplitude(const ResponseState& state,
                      const std::vector<LinearPort>& ports,
                      std::span<const double> eps,
                      std::span<const double> phase, std::size_t port) {
    require_sizes(ports, eps, phase);
    if (port >= ports.size())
        throw std::invalid_argument("output_amplitude: port index out of range");
    return std::sqrt(ports[port].kappa_ex) * state.a_minus[port] -
           std::polar(eps[port], phase[port]);
}

double normalized_output_energy(const ResponseState& state,
                                const std::vector<LinearPort>& ports,
                                std::span<const double> eps,
                                std::span<const double> phase, std::size_t port,
                                double eps_ref) {
    const cplx out = output_amplitude(state, ports, eps, phase, port);
    const double ref = eps[port] > 0.0 ? eps[port] : eps_ref;
    if (ref <= 0.0)
        throw std::invalid_argument(
            "normalized_output_energy: reference amplitude must be positive");
    return std::norm(out / ref);
}

cplx transmission_coefficient(const std::vector<LinearPort>& ports,
                              const MechanicalMode& mech, std::size_t from,
                              std::size_t to,
                              const std::optional<ControlDrive>& control,
                              double xi) {
    const std::size_t n = ports.size();
    if (from >= n || to >= n)
        throw std::invalid_argument(
            "transmission_coefficient: port index out of range");
    if (from == to)
        throw std::invalid_argument(
            "transmission_coefficient: source and destination coincide");

    std::vector<double> eps(n, 0.0), phase(n, 0.0);
    eps[from] = 1.0;
    if (control) {
        if (control->port >= n)
            throw std::invalid_argument(
                "transmission_coefficient: control port index out of range");
        if (control->port == from || control->port == to)
            throw std::invalid_argument(
                "transmission_coefficient: control port must be distinct");
        eps[control->port] = control->eta;
        phase[control->port] = control->phi;
    }
    const ResponseState st = solve_response(ports, mech, eps, phase, xi);
    // unit input at `from`, no input at `to`: t = out_to directly
    return output_amplitude(st, ports, eps, phase, to);
}

}  // namespace omniport
