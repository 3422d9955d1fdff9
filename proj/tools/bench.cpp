// Serial vs OpenMP throughput comparison for the batched kernels: grid
// evaluation, replica experiments and the tridiagonal eigensolver.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jacobimax/extremes.hpp"
#include "jacobimax/oracle.hpp"
#include "jacobimax/recursion.hpp"

using namespace jacobimax;

namespace {
double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double timed(F&& f) {
    const double t0 = now_ms();
    f();
    return now_ms() - t0;
}
}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 4096;
    if (argc > 1) n = std::stoull(argv[1]);
    int threads = 0;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("n = %zu, threads = %d\n", n, threads);

    const auto coeffs = sample_gbe(2.0, n, {42, 0});
    const auto net = chebyshev_net(n, 0.1);
    std::printf("grid points: %zu\n", net.points.size());

    std::vector<CharPolyResult> serial, parallel;
    const double ts = timed([&] { serial = eval_grid_serial(coeffs, net.points); });
    const double tp = timed([&] { parallel = eval_grid(coeffs, net.points); });
    double max_diff = 0;
    for (std::size_t i = 0; i < serial.size(); ++i)
        max_diff = std::max(max_diff, std::abs(serial[i].centered - parallel[i].centered));
    std::printf("eval_grid     serial %8.1f ms   parallel %8.1f ms   speedup %5.2fx   max|diff| %.3g\n",
                ts, tp, ts / tp, max_diff);

    const double te_s = timed([&] {
        for (std::uint64_t r = 0; r < 16; ++r) {
            const auto c = sample_gbe(2.0, n, {7, r});
            (void)eval_grid_serial(c, net.points);
        }
    });
    ExperimentPlan plan;
    plan.spec = EnsembleSpec::gaussian_beta(2.0);
    plan.n_values = {n};
    plan.replicas = 16;
    plan.master_seed = 7;
    const double te_p = timed([&] { (void)run_experiment(plan); });
    std::printf("experiment    serial %8.1f ms   parallel %8.1f ms   speedup %5.2fx\n", te_s, te_p,
                te_s / te_p);

    const double tei = timed([&] { (void)eigen_tridiag(coeffs); });
    std::printf("eigensolver   parallel %8.1f ms  (%zu eigenvalues)\n", tei, n);
    return 0;
}
