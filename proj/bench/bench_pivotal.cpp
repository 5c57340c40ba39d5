// Times the OpenMP kernels against their serial references and checks that
// both produce identical output.
//
//   bench_pivotal [M] [N]

#include "weibrec/gpq.hpp"
#include "weibrec/sim.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>

using namespace weibrec;

int main(int argc, char** argv) {
    const std::size_t M = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
    const std::size_t N = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 100;

    const RecordSeries r1({0.96, 4.15, 8.01, 31.75, 33.91, 36.71, 72.89});
    const RecordSeries r2({1.97, 2.58, 2.71, 25.50});

    std::printf("threads: %d\n", omp_get_max_threads());

    double t0 = omp_get_wtime();
    const auto serial = sample_pivotal_serial(r1, r2, PivotalKind::ratio, M, 7);
    double t_serial = omp_get_wtime() - t0;

    t0 = omp_get_wtime();
    const auto parallel = sample_pivotal(r1, r2, PivotalKind::ratio, M, 7);
    double t_parallel = omp_get_wtime() - t0;

    std::printf("sample_pivotal  M=%zu  serial %.3fs  parallel %.3fs  speedup %.2fx  identical=%s\n", M, t_serial,
                t_parallel, t_serial / t_parallel, serial.values == parallel.values ? "yes" : "NO");

    SimConfig cfg;
    cfg.beta1 = 1.0;
    cfg.beta2 = 2.0;
    cfg.n1 = 7;
    cfg.n2 = 7;
    cfg.M = 2000;
    cfg.N = N;
    cfg.seed = 11;

    t0 = omp_get_wtime();
    const auto cell_serial = run_cell_serial(cfg);
    t_serial = omp_get_wtime() - t0;

    t0 = omp_get_wtime();
    const auto cell_parallel = run_cell(cfg);
    t_parallel = omp_get_wtime() - t0;

    const bool same = cell_serial.coverage == cell_parallel.coverage &&
                      cell_serial.expected_length == cell_parallel.expected_length;
    std::printf("run_cell        N=%zu M=%zu  serial %.3fs  parallel %.3fs  speedup %.2fx  identical=%s\n", N, cfg.M,
                t_serial, t_parallel, t_serial / t_parallel, same ? "yes" : "NO");
    std::printf("per outer replicate: %.2f ms\n", 1e3 * t_parallel / static_cast<double>(N));
    return same && serial.values == parallel.values ? 0 : 1;
}
