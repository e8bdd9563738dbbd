#include "eakd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eakd::kernels {

namespace {
std::atomic<int> g_threads{1};

inline bool parallel_enabled() {
#ifdef _OPENMP
    return g_threads.load(std::memory_order_relaxed) > 1;
#else
    return false;
#endif
}
} // namespace

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed); }
int threads() { return g_threads.load(std::memory_order_relaxed); }

#ifdef _OPENMP
#define EAKD_OMP_FOR _Pragma("omp parallel for schedule(static) num_threads(g_threads.load(std::memory_order_relaxed))")
#else
#define EAKD_OMP_FOR
#endif

// ---------------------------------------------------------------------------
// matmul family. ikj order so the inner loop walks contiguous memory; each
// output row is produced by exactly one thread with the serial inner order,
// which keeps parallel results bitwise equal to serial ones.
// ---------------------------------------------------------------------------

namespace {
inline void matmul_nn_row(const double* a, const double* b, double* out,
                          std::size_t k, std::size_t m, std::size_t i, bool accumulate) {
    double* out_row = out + i * m;
    if (!accumulate) std::fill(out_row, out_row + m, 0.0);
    const double* a_row = a + i * k;
    for (std::size_t l = 0; l < k; ++l) {
        const double a_il = a_row[l];
        const double* b_row = b + l * m;
        for (std::size_t j = 0; j < m; ++j) out_row[j] += a_il * b_row[j];
    }
}

inline void matmul_nt_row(const double* a, const double* b, double* out,
                          std::size_t k, std::size_t m, std::size_t i, bool accumulate) {
    const double* a_row = a + i * k;
    double* out_row = out + i * m;
    for (std::size_t j = 0; j < m; ++j) {
        const double* b_row = b + j * k;
        double s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += a_row[l] * b_row[l];
        out_row[j] = accumulate ? out_row[j] + s : s;
    }
}

inline void matmul_tn_row(const double* a, const double* b, double* out,
                          std::size_t n, std::size_t k, std::size_t m, std::size_t r, bool accumulate) {
    double* out_row = out + r * m;
    if (!accumulate) std::fill(out_row, out_row + m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a_ir = a[i * k + r];
        const double* b_row = b + i * m;
        for (std::size_t j = 0; j < m; ++j) out_row[j] += a_ir * b_row[j];
    }
}
} // namespace

void matmul_nn_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    for (std::size_t i = 0; i < n; ++i) matmul_nn_row(a, b, out, k, m, i, accumulate);
}

void matmul_nn_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        matmul_nn_row(a, b, out, k, m, static_cast<std::size_t>(i), accumulate);
    }
}

void matmul_nn(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    if (parallel_enabled()) matmul_nn_parallel(a, b, out, n, k, m, accumulate);
    else matmul_nn_serial(a, b, out, n, k, m, accumulate);
}

void matmul_nt_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    for (std::size_t i = 0; i < n; ++i) matmul_nt_row(a, b, out, k, m, i, accumulate);
}

void matmul_nt_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        matmul_nt_row(a, b, out, k, m, static_cast<std::size_t>(i), accumulate);
    }
}

void matmul_nt(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    if (parallel_enabled()) matmul_nt_parallel(a, b, out, n, k, m, accumulate);
    else matmul_nt_serial(a, b, out, n, k, m, accumulate);
}

void matmul_tn_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    for (std::size_t r = 0; r < k; ++r) matmul_tn_row(a, b, out, n, k, m, r, accumulate);
}

void matmul_tn_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    EAKD_OMP_FOR
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(k); ++r) {
        matmul_tn_row(a, b, out, n, k, m, static_cast<std::size_t>(r), accumulate);
    }
}

void matmul_tn(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
    if (parallel_enabled()) matmul_tn_parallel(a, b, out, n, k, m, accumulate);
    else matmul_tn_serial(a, b, out, n, k, m, accumulate);
}

// ---------------------------------------------------------------------------
// log softmax rows. All probabilities in the project flow through these, so
// raw logits are never exponentiated directly.
// ---------------------------------------------------------------------------

namespace {
inline void log_softmax_row(const double* z_row, double* out_row, std::size_t c, double inv_t) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) mx = std::max(mx, z_row[j] * inv_t);
    double se = 0.0;
    for (std::size_t j = 0; j < c; ++j) se += std::exp(z_row[j] * inv_t - mx);
    const double lse = mx + std::log(se);
    for (std::size_t j = 0; j < c; ++j) out_row[j] = z_row[j] * inv_t - lse;
}

inline void log_softmax_backward_row(const double* out_row, const double* g_row, double* grad_row,
                                     std::size_t c, double inv_t) {
    double gsum = 0.0;
    for (std::size_t j = 0; j < c; ++j) gsum += g_row[j];
    for (std::size_t j = 0; j < c; ++j) {
        grad_row[j] += (g_row[j] - std::exp(out_row[j]) * gsum) * inv_t;
    }
}

inline void log_softmax_excl_row(const double* z_row, double* out_row,
                                 std::size_t c, double inv_t, int excl) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) {
        if (static_cast<int>(j) == excl) continue;
        mx = std::max(mx, z_row[j] * inv_t);
    }
    double se = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        if (static_cast<int>(j) == excl) continue;
        se += std::exp(z_row[j] * inv_t - mx);
    }
    const double lse = mx + std::log(se);
    for (std::size_t j = 0; j < c; ++j) {
        out_row[j] = static_cast<int>(j) == excl ? 0.0 : z_row[j] * inv_t - lse;
    }
}

inline void log_softmax_excl_backward_row(const double* out_row, const double* g_row, double* grad_row,
                                          std::size_t c, double inv_t, int excl) {
    double gsum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        if (static_cast<int>(j) != excl) gsum += g_row[j];
    }
    for (std::size_t j = 0; j < c; ++j) {
        if (static_cast<int>(j) == excl) continue;
        grad_row[j] += (g_row[j] - std::exp(out_row[j]) * gsum) * inv_t;
    }
}
} // namespace

void log_softmax_rows_serial(const double* z, double* out, std::size_t n, std::size_t c, double inv_t) {
    for (std::size_t i = 0; i < n; ++i) log_softmax_row(z + i * c, out + i * c, c, inv_t);
}

void log_softmax_rows_parallel(const double* z, double* out, std::size_t n, std::size_t c, double inv_t) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        log_softmax_row(z + i * c, out + i * c, c, inv_t);
    }
}

void log_softmax_rows(const double* z, double* out, std::size_t n, std::size_t c, double inv_t) {
    if (parallel_enabled()) log_softmax_rows_parallel(z, out, n, c, inv_t);
    else log_softmax_rows_serial(z, out, n, c, inv_t);
}

void log_softmax_backward_rows_serial(const double* out, const double* g, double* grad,
                                      std::size_t n, std::size_t c, double inv_t) {
    for (std::size_t i = 0; i < n; ++i) {
        log_softmax_backward_row(out + i * c, g + i * c, grad + i * c, c, inv_t);
    }
}

void log_softmax_backward_rows_parallel(const double* out, const double* g, double* grad,
                                        std::size_t n, std::size_t c, double inv_t) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        log_softmax_backward_row(out + i * c, g + i * c, grad + i * c, c, inv_t);
    }
}

void log_softmax_backward_rows(const double* out, const double* g, double* grad,
                               std::size_t n, std::size_t c, double inv_t) {
    if (parallel_enabled()) log_softmax_backward_rows_parallel(out, g, grad, n, c, inv_t);
    else log_softmax_backward_rows_serial(out, g, grad, n, c, inv_t);
}

void log_softmax_excl_rows_serial(const double* z, double* out,
                                  std::size_t n, std::size_t c, double inv_t, const int* excl) {
    for (std::size_t i = 0; i < n; ++i) log_softmax_excl_row(z + i * c, out + i * c, c, inv_t, excl[i]);
}

void log_softmax_excl_rows_parallel(const double* z, double* out,
                                    std::size_t n, std::size_t c, double inv_t, const int* excl) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        log_softmax_excl_row(z + i * c, out + i * c, c, inv_t, excl[i]);
    }
}

void log_softmax_excl_rows(const double* z, double* out,
                           std::size_t n, std::size_t c, double inv_t, const int* excl) {
    if (parallel_enabled()) log_softmax_excl_rows_parallel(z, out, n, c, inv_t, excl);
    else log_softmax_excl_rows_serial(z, out, n, c, inv_t, excl);
}

void log_softmax_excl_backward_rows_serial(const double* out, const double* g, double* grad,
                                           std::size_t n, std::size_t c, double inv_t, const int* excl) {
    for (std::size_t i = 0; i < n; ++i) {
        log_softmax_excl_backward_row(out + i * c, g + i * c, grad + i * c, c, inv_t, excl[i]);
    }
}

void log_softmax_excl_backward_rows_parallel(const double* out, const double* g, double* grad,
                                             std::size_t n, std::size_t c, double inv_t, const int* excl) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        log_softmax_excl_backward_row(out + i * c, g + i * c, grad + i * c, c, inv_t, excl[i]);
    }
}

void log_softmax_excl_backward_rows(const double* out, const double* g, double* grad,
                                    std::size_t n, std::size_t c, double inv_t, const int* excl) {
    if (parallel_enabled()) log_softmax_excl_backward_rows_parallel(out, g, grad, n, c, inv_t, excl);
    else log_softmax_excl_backward_rows_serial(out, g, grad, n, c, inv_t, excl);
}

// ---------------------------------------------------------------------------
// elementwise maps and gradient accumulators
// ---------------------------------------------------------------------------

#define EAKD_EW_IMPL(name, expr)                                                          \
    void name##_serial(const double* a, const double* b, double* out, std::size_t n) {    \
        for (std::size_t i = 0; i < n; ++i) out[i] = (expr);                              \
    }                                                                                     \
    void name##_parallel(const double* a, const double* b, double* out, std::size_t n) {  \
        EAKD_OMP_FOR                                                                      \
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) out[i] = (expr);  \
    }                                                                                     \
    void name(const double* a, const double* b, double* out, std::size_t n) {             \
        if (parallel_enabled()) name##_parallel(a, b, out, n);                            \
        else name##_serial(a, b, out, n);                                                 \
    }

EAKD_EW_IMPL(ew_add, a[i] + b[i])
EAKD_EW_IMPL(ew_mul, a[i] * b[i])
#undef EAKD_EW_IMPL

void ew_scale_serial(const double* a, double s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}
void ew_scale_parallel(const double* a, double s, double* out, std::size_t n) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) out[i] = a[i] * s;
}
void ew_scale(const double* a, double s, double* out, std::size_t n) {
    if (parallel_enabled()) ew_scale_parallel(a, s, out, n);
    else ew_scale_serial(a, s, out, n);
}

#define EAKD_MAP_IMPL(name, expr)                                                         \
    void name##_serial(const double* a, double* out, std::size_t n) {                     \
        for (std::size_t i = 0; i < n; ++i) out[i] = (expr);                              \
    }                                                                                     \
    void name##_parallel(const double* a, double* out, std::size_t n) {                   \
        EAKD_OMP_FOR                                                                      \
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) out[i] = (expr);  \
    }                                                                                     \
    void name(const double* a, double* out, std::size_t n) {                              \
        if (parallel_enabled()) name##_parallel(a, out, n);                               \
        else name##_serial(a, out, n);                                                    \
    }

EAKD_MAP_IMPL(ew_relu, a[i] > 0.0 ? a[i] : 0.0)
EAKD_MAP_IMPL(ew_exp, std::exp(a[i]))
EAKD_MAP_IMPL(ew_log, std::log(a[i]))
#undef EAKD_MAP_IMPL

void acc_mul_serial(const double* g, const double* b, double* grad, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) grad[i] += g[i] * b[i];
}
void acc_mul_parallel(const double* g, const double* b, double* grad, std::size_t n) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) grad[i] += g[i] * b[i];
}
void acc_mul(const double* g, const double* b, double* grad, std::size_t n) {
    if (parallel_enabled()) acc_mul_parallel(g, b, grad, n);
    else acc_mul_serial(g, b, grad, n);
}

void acc_scale_serial(const double* g, double s, double* grad, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) grad[i] += g[i] * s;
}
void acc_scale_parallel(const double* g, double s, double* grad, std::size_t n) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) grad[i] += g[i] * s;
}
void acc_scale(const double* g, double s, double* grad, std::size_t n) {
    if (parallel_enabled()) acc_scale_parallel(g, s, grad, n);
    else acc_scale_serial(g, s, grad, n);
}

void acc_relu_serial(const double* x, const double* g, double* grad, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) grad[i] += x[i] > 0.0 ? g[i] : 0.0;
}
void acc_relu_parallel(const double* x, const double* g, double* grad, std::size_t n) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) grad[i] += x[i] > 0.0 ? g[i] : 0.0;
}
void acc_relu(const double* x, const double* g, double* grad, std::size_t n) {
    if (parallel_enabled()) acc_relu_parallel(x, g, grad, n);
    else acc_relu_serial(x, g, grad, n);
}

void acc_div_serial(const double* g, const double* x, double* grad, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) grad[i] += g[i] / x[i];
}
void acc_div_parallel(const double* g, const double* x, double* grad, std::size_t n) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) grad[i] += g[i] / x[i];
}
void acc_div(const double* g, const double* x, double* grad, std::size_t n) {
    if (parallel_enabled()) acc_div_parallel(g, x, grad, n);
    else acc_div_serial(g, x, grad, n);
}

void sum_rows_serial(const double* a, double* out, std::size_t n, std::size_t c) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = a + i * c;
        for (std::size_t j = 0; j < c; ++j) s += row[j];
        out[i] = s;
    }
}
void sum_rows_parallel(const double* a, double* out, std::size_t n, std::size_t c) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        double s = 0.0;
        const double* row = a + static_cast<std::size_t>(i) * c;
        for (std::size_t j = 0; j < c; ++j) s += row[j];
        out[i] = s;
    }
}
void sum_rows(const double* a, double* out, std::size_t n, std::size_t c) {
    if (parallel_enabled()) sum_rows_parallel(a, out, n, c);
    else sum_rows_serial(a, out, n, c);
}

void acc_row_broadcast_serial(const double* g, double* grad, std::size_t n, std::size_t c) {
    for (std::size_t i = 0; i < n; ++i) {
        double* row = grad + i * c;
        for (std::size_t j = 0; j < c; ++j) row[j] += g[i];
    }
}
void acc_row_broadcast_parallel(const double* g, double* grad, std::size_t n, std::size_t c) {
    EAKD_OMP_FOR
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        double* row = grad + static_cast<std::size_t>(i) * c;
        for (std::size_t j = 0; j < c; ++j) row[j] += g[i];
    }
}
void acc_row_broadcast(const double* g, double* grad, std::size_t n, std::size_t c) {
    if (parallel_enabled()) acc_row_broadcast_parallel(g, grad, n, c);
    else acc_row_broadcast_serial(g, grad, n, c);
}

#undef EAKD_OMP_FOR

} // namespace eakd::kernels
