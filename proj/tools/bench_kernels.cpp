// Compares the OpenMP kernels against their serial reference implementations
// and reports speedups. The serial paths are the same ones the unit tests use
// for bitwise-equivalence checks.
#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "axel/graph.hpp"
#include "axel/kernels.hpp"
#include "axel/rng.hpp"

using namespace axel;

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int reps = 5) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        body();
        const auto t1 = clock_type::now();
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (ms < best) best = ms;
    }
    return best;
}

Matrix random_matrix(int r, int c, Rng& rng) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.normal();
    return m;
}

}  // namespace

int main() {
    Rng rng(7);
    std::printf("threads: %d\n\n", omp_get_max_threads());
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial_ms", "omp_ms", "speedup");

    for (int n : {128, 256, 512}) {
        const Matrix a = random_matrix(n, n, rng);
        const Matrix b = random_matrix(n, n, rng);
        Matrix c(n, n);
        const double ts = time_ms([&] { kernels::matmul_serial(a, b, c); });
        const double tp = time_ms([&] { kernels::matmul_omp(a, b, c); });
        std::printf("%-28s %12.3f %12.3f %8.2fx\n",
                    ("matmul " + std::to_string(n) + "^3").c_str(), ts, tp, ts / tp);
    }

    for (int n : {2000, 8000}) {
        std::vector<std::pair<int, int>> edges;
        const long long target = 8LL * n;
        for (long long e = 0; e < target; ++e) {
            const int u = rng.below_int(n);
            const int v = rng.below_int(n);
            if (u != v) edges.emplace_back(u, v);
        }
        const Graph g = Graph::from_edges(n, edges);
        const int d = 64;
        const Matrix h = random_matrix(n, d, rng);
        const Matrix pe(g.num_edges(), 1, 0.5);
        const Matrix ps(n, 1, 0.5);
        Matrix out(n, d);
        const auto run_serial = [&] {
            kernels::aggregate_forward_serial(g.n, g.offsets.data(), g.neighbors.data(),
                                              g.arc_edge.data(), h, pe.data.data(),
                                              ps.data.data(), false, out);
        };
        const auto run_omp = [&] {
            kernels::aggregate_forward_omp(g.n, g.offsets.data(), g.neighbors.data(),
                                           g.arc_edge.data(), h, pe.data.data(),
                                           ps.data.data(), false, out);
        };
        const double ts = time_ms(run_serial);
        const double tp = time_ms(run_omp);
        std::printf("%-28s %12.3f %12.3f %8.2fx\n",
                    ("aggregate n=" + std::to_string(n)).c_str(), ts, tp, ts / tp);

        Matrix dH(n, d);
        Matrix dpe(g.num_edges(), 1);
        Matrix dps(n, 1);
        const Matrix dOut = random_matrix(n, d, rng);
        const double tbs = time_ms([&] {
            dH.fill(0);
            kernels::aggregate_backward_serial(g.n, g.offsets.data(), g.neighbors.data(),
                                               g.arc_edge.data(), g.num_edges(), h,
                                               pe.data.data(), ps.data.data(), false, dOut,
                                               dH, dpe.data.data(), dps.data.data());
        });
        const double tbp = time_ms([&] {
            dH.fill(0);
            kernels::aggregate_backward_omp(g.n, g.offsets.data(), g.neighbors.data(),
                                            g.arc_edge.data(), g.num_edges(), h,
                                            pe.data.data(), ps.data.data(), false, dOut,
                                            dH, dpe.data.data(), dps.data.data());
        });
        std::printf("%-28s %12.3f %12.3f %8.2fx\n",
                    ("aggregate_bwd n=" + std::to_string(n)).c_str(), tbs, tbp, tbs / tbp);
    }
    return 0;
}
