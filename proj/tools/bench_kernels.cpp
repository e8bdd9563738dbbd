// Times the serial reference kernels against the OpenMP ones and checks the
// results stay bitwise identical while doing so.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "eakd/kernels.hpp"
#include "eakd/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace k = eakd::kernels;
using clock_type = std::chrono::steady_clock;

namespace {

std::vector<double> random_vec(std::size_t n, eakd::Pcg32& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

template <typename F>
double time_ms(F&& fn, int reps) {
    fn();  // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Case {
    std::size_t n, c;
};

} // namespace

int main(int argc, char** argv) {
    int threads = 0;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    if (argc > 1) threads = std::atoi(argv[1]);
    if (threads < 2) threads = 2;
    const int reps = 20;

    eakd::Pcg32 rng(12345, 99);
    const Case cases[] = {{256, 256}, {1024, 128}, {4096, 64}};

    std::printf("%-28s %10s %10s %8s %8s\n", "kernel", "serial ms", "omp ms", "speedup", "bitwise");
    bool all_equal = true;

    for (const Case& cs : cases) {
        const std::size_t n = cs.n, kk = cs.c, m = cs.c;
        const std::vector<double> a = random_vec(n * kk, rng);
        const std::vector<double> b = random_vec(kk * m, rng);
        std::vector<double> out_s(n * m), out_p(n * m);

        const double ts = time_ms([&] { k::matmul_nn_serial(a.data(), b.data(), out_s.data(), n, kk, m, false); }, reps);
        k::set_threads(threads);
        const double tp = time_ms([&] { k::matmul_nn_parallel(a.data(), b.data(), out_p.data(), n, kk, m, false); }, reps);
        k::set_threads(1);
        const bool eq = bitwise_equal(out_s, out_p);
        all_equal = all_equal && eq;
        std::printf("matmul_nn %5zux%-4zux%-8zu %10.3f %10.3f %7.2fx %8s\n",
                    n, kk, m, ts, tp, ts / tp, eq ? "yes" : "NO");
    }

    for (const Case& cs : cases) {
        const std::size_t n = cs.n * 4, c = cs.c;
        const std::vector<double> z = random_vec(n * c, rng);
        std::vector<double> out_s(n * c), out_p(n * c);

        const double ts = time_ms([&] { k::log_softmax_rows_serial(z.data(), out_s.data(), n, c, 0.25); }, reps);
        k::set_threads(threads);
        const double tp = time_ms([&] { k::log_softmax_rows_parallel(z.data(), out_p.data(), n, c, 0.25); }, reps);
        k::set_threads(1);
        const bool eq = bitwise_equal(out_s, out_p);
        all_equal = all_equal && eq;
        std::printf("log_softmax %7zux%-10zu %10.3f %10.3f %7.2fx %8s\n",
                    n, c, ts, tp, ts / tp, eq ? "yes" : "NO");
    }

    {
        const std::size_t n = 1 << 22;
        const std::vector<double> x = random_vec(n, rng);
        std::vector<double> out_s(n), out_p(n);
        const double ts = time_ms([&] { k::ew_relu_serial(x.data(), out_s.data(), n); }, reps);
        k::set_threads(threads);
        const double tp = time_ms([&] { k::ew_relu_parallel(x.data(), out_p.data(), n); }, reps);
        k::set_threads(1);
        const bool eq = bitwise_equal(out_s, out_p);
        all_equal = all_equal && eq;
        std::printf("ew_relu %-20zu %10.3f %10.3f %7.2fx %8s\n", n, ts, tp, ts / tp, eq ? "yes" : "NO");
    }

    std::printf("\nthreads: %d, reps: %d, all results bitwise identical: %s\n",
                threads, reps, all_equal ? "yes" : "NO");
    return all_equal ? 0 : 1;
}
