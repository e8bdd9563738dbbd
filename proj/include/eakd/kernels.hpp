#pragma once

#include <cstddef>
#include <cstdint>

// Dense kernels behind the tensor engine. Every kernel has a serial
// reference implementation and an OpenMP row-parallel one; the unsuffixed
// entry points dispatch on the configured thread count.
//
// Parallelization is always over independent output rows/elements with the
// same inner loop as the serial code, so results are bitwise identical for
// any thread count. tests/test_kernels.cpp asserts this.

namespace eakd::kernels {

// Global thread count used by the dispatchers. 1 = serial (default).
void set_threads(int n);
int threads();

// out[n x m] = a[n x k] * b[k x m]; accumulate adds into out instead.
void matmul_nn_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_nn_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_nn(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate = false);

// out[n x m] = a[n x k] * b[m x k]^T
void matmul_nt_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_nt_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_nt(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate = false);

// out[k x m] = a[n x k]^T * b[n x m]
void matmul_tn_serial(const double* a, const double* b, double* out,
                      std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_tn_parallel(const double* a, const double* b, double* out,
                        std::size_t n, std::size_t k, std::size_t m, bool accumulate);
void matmul_tn(const double* a, const double* b, double* out,
               std::size_t n, std::size_t k, std::size_t m, bool accumulate = false);

// Row-wise log softmax of z/T: out[r,:] = z[r,:]*inv_t - logsumexp(z[r,:]*inv_t).
void log_softmax_rows_serial(const double* z, double* out,
                             std::size_t n, std::size_t c, double inv_t);
void log_softmax_rows_parallel(const double* z, double* out,
                               std::size_t n, std::size_t c, double inv_t);
void log_softmax_rows(const double* z, double* out,
                      std::size_t n, std::size_t c, double inv_t);

// grad += (g - exp(out) * rowsum(g)) * inv_t, given out = log_softmax_rows(z).
void log_softmax_backward_rows_serial(const double* out, const double* g, double* grad,
                                      std::size_t n, std::size_t c, double inv_t);
void log_softmax_backward_rows_parallel(const double* out, const double* g, double* grad,
                                        std::size_t n, std::size_t c, double inv_t);
void log_softmax_backward_rows(const double* out, const double* g, double* grad,
                               std::size_t n, std::size_t c, double inv_t);

// Log softmax over each row with one excluded column: out[r,j] for j != excl[r]
// is the log of the distribution renormalized over the remaining classes;
// out[r,excl[r]] = 0 and carries no gradient.
void log_softmax_excl_rows_serial(const double* z, double* out,
                                  std::size_t n, std::size_t c, double inv_t, const int* excl);
void log_softmax_excl_rows_parallel(const double* z, double* out,
                                    std::size_t n, std::size_t c, double inv_t, const int* excl);
void log_softmax_excl_rows(const double* z, double* out,
                           std::size_t n, std::size_t c, double inv_t, const int* excl);

void log_softmax_excl_backward_rows_serial(const double* out, const double* g, double* grad,
                                           std::size_t n, std::size_t c, double inv_t, const int* excl);
void log_softmax_excl_backward_rows_parallel(const double* out, const double* g, double* grad,
                                             std::size_t n, std::size_t c, double inv_t, const int* excl);
void log_softmax_excl_backward_rows(const double* out, const double* g, double* grad,
                                    std::size_t n, std::size_t c, double inv_t, const int* excl);

// Elementwise maps.
void ew_add_serial(const double* a, const double* b, double* out, std::size_t n);
void ew_add_parallel(const double* a, const double* b, double* out, std::size_t n);
void ew_add(const double* a, const double* b, double* out, std::size_t n);

void ew_mul_serial(const double* a, const double* b, double* out, std::size_t n);
void ew_mul_parallel(const double* a, const double* b, double* out, std::size_t n);
void ew_mul(const double* a, const double* b, double* out, std::size_t n);

void ew_scale_serial(const double* a, double s, double* out, std::size_t n);
void ew_scale_parallel(const double* a, double s, double* out, std::size_t n);
void ew_scale(const double* a, double s, double* out, std::size_t n);

void ew_relu_serial(const double* a, double* out, std::size_t n);
void ew_relu_parallel(const double* a, double* out, std::size_t n);
void ew_relu(const double* a, double* out, std::size_t n);

void ew_exp_serial(const double* a, double* out, std::size_t n);
void ew_exp_parallel(const double* a, double* out, std::size_t n);
void ew_exp(const double* a, double* out, std::size_t n);

void ew_log_serial(const double* a, double* out, std::size_t n);
void ew_log_parallel(const double* a, double* out, std::size_t n);
void ew_log(const double* a, double* out, std::size_t n);

// Gradient accumulators: grad += g * <factor>.
void acc_mul_serial(const double* g, const double* b, double* grad, std::size_t n);
void acc_mul_parallel(const double* g, const double* b, double* grad, std::size_t n);
void acc_mul(const double* g, const double* b, double* grad, std::size_t n);

void acc_scale_serial(const double* g, double s, double* grad, std::size_t n);
void acc_scale_parallel(const double* g, double s, double* grad, std::size_t n);
void acc_scale(const double* g, double s, double* grad, std::size_t n);

void acc_relu_serial(const double* x, const double* g, double* grad, std::size_t n);
void acc_relu_parallel(const double* x, const double* g, double* grad, std::size_t n);
void acc_relu(const double* x, const double* g, double* grad, std::size_t n);

void acc_div_serial(const double* g, const double* x, double* grad, std::size_t n);
void acc_div_parallel(const double* g, const double* x, double* grad, std::size_t n);
void acc_div(const double* g, const double* x, double* grad, std::size_t n);

// Row reductions: out[r] = sum of row r.
void sum_rows_serial(const double* a, double* out, std::size_t n, std::size_t c);
void sum_rows_parallel(const double* a, double* out, std::size_t n, std::size_t c);
void sum_rows(const double* a, double* out, std::size_t n, std::size_t c);

// grad[r, :] += g[r], the adjoint of sum_rows.
void acc_row_broadcast_serial(const double* g, double* grad, std::size_t n, std::size_t c);
void acc_row_broadcast_parallel(const double* g, double* grad, std::size_t n, std::size_t c);
void acc_row_broadcast(const double* g, double* grad, std::size_t n, std::size_t c);

} // namespace eakd::kernels
