// Times the serial reference against the OpenMP grid path on a dense 2D
// sweep and a long spectrum, and verifies the outputs are bit-identical.
// Run it directly; it prints one line per workload plus the verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "omniport/metrics.hpp"
#include "omniport/sweep.hpp"

using namespace omniport;

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch())
        .count();
}

Scenario reference_scenario() {
    Scenario sc;
    sc.network.mech = {100.0, 1e-3};
    std::vector<LinearPort> ports(3);
    ports[0] = {0.0, 1.0, 1.0, 0.0};
    ports[1] = {0.0, 1.0, 1.0, M_PI};
    ports[2] = {0.0, 1.0, 1.0, 0.0};
    sc.network.ports = ports;
    sc.drive = TwoPortDrive{0, 1, 2, 1.0, 0.0};
    return sc;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

bool identical(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        // compare bit patterns so that -0.0/0.0 or differently-rounded
        // results cannot slip through as "equal"
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int threads = 0;
    if (argc > 1) threads = std::atoi(argv[1]);
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#else
    if (threads <= 0) threads = 1;
#endif
    std::printf("comparing serial reference vs parallel path (%d threads)\n",
                threads);

    const Scenario sc = reference_scenario();
    bool all_identical = true;

    {
        std::vector<SweepAxis> axes(2);
        axes[0].knob = "ports.3.G_mod";
        axes[0].values = linspace(0.05, 2.0, 201);
        axes[1].knob = "signals.eta";
        axes[1].values = linspace(0.0, 4.0, 201);
        const auto metrics = std::vector<MetricSelector>{
            MetricSelector::parse("T_fwd"), MetricSelector::parse("T_bwd"),
            MetricSelector::parse("log10_I")};

        double t0 = now();
        const auto serial = run_sweep(sc, axes, metrics, 0.0,
                                      Execution::serial());
        double t1 = now();
        const auto parallel = run_sweep(sc, axes, metrics, 0.0,
                                        Execution::with_threads(threads));
        double t2 = now();

        const bool same = identical(serial.values, parallel.values);
        all_identical = all_identical && same;
        std::printf(
            "2d sweep %zux%zu x%zu metrics: serial %.3fs parallel %.3fs "
            "speedup %.2fx %s\n",
            axes[0].values.size(), axes[1].values.size(), metrics.size(),
            t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
            same ? "bit-identical" : "MISMATCH");
    }

    {
        const auto grid = linspace(-5.0, 5.0, 200001);
        double t0 = now();
        const auto serial = spectrum(sc, grid, Execution::serial());
        double t1 = now();
        const auto parallel = spectrum(sc, grid, Execution::with_threads(threads));
        double t2 = now();

        std::vector<double> sv, pv;
        sv.reserve(serial.size() * 3);
        for (const auto& r : serial) {
            sv.push_back(r.T_fwd);
            sv.push_back(r.T_bwd);
            sv.push_back(r.b_abs2);
        }
        for (const auto& r : parallel) {
            pv.push_back(r.T_fwd);
            pv.push_back(r.T_bwd);
            pv.push_back(r.b_abs2);
        }
        const bool same = identical(sv, pv);
        all_identical = all_identical && same;
        std::printf(
            "spectrum %zu points: serial %.3fs parallel %.3fs speedup %.2fx "
            "%s\n",
            grid.size(), t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
            same ? "bit-identical" : "MISMATCH");
    }

    if (!all_identical) {
        std::printf("FAIL: parallel output diverged from the serial reference\n");
        return 1;
    }
    std::printf("parallel output matches the serial reference\n");
    return 0;
}
