#pragma once

// Shared helpers for the test suites: random tensors, tolerance checks, and
// independent long-double oracles for the softmax/entropy/KL formulas. The
// oracles deliberately avoid the library's kernels: they exponentiate via a
// plain max-shifted loop in extended precision.

#include <cmath>
#include <cstdint>
#include <vector>

#include "eakd/rng.hpp"
#include "eakd/tensor.hpp"

namespace testutil {

inline eakd::Tensor random_tensor(std::vector<std::size_t> shape, eakd::Pcg32& rng,
                                  double lo = -2.0, double hi = 2.0) {
    eakd::Tensor t(std::move(shape));
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

inline double rel_err(double a, double b, double floor = 1e-8) {
    const double denom = std::max(std::max(std::fabs(a), std::fabs(b)), floor);
    return std::fabs(a - b) / denom;
}

// ---------------------------------------------------------------------------
// long-double oracles
// ---------------------------------------------------------------------------

inline std::vector<long double> softmax_ld(const std::vector<double>& logits, double temperature) {
    std::vector<long double> p(logits.size());
    long double mx = -1e4900L;
    for (double z : logits) mx = std::max(mx, static_cast<long double>(z) / temperature);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = expl(static_cast<long double>(logits[i]) / temperature - mx);
        sum += p[i];
    }
    for (long double& v : p) v /= sum;
    return p;
}

inline std::vector<long double> log_softmax_ld(const std::vector<double>& logits, double temperature) {
    long double mx = -1e4900L;
    for (double z : logits) mx = std::max(mx, static_cast<long double>(z) / temperature);
    long double sum = 0.0L;
    for (double z : logits) sum += expl(static_cast<long double>(z) / temperature - mx);
    const long double lse = mx + logl(sum);
    std::vector<long double> lp(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        lp[i] = static_cast<long double>(logits[i]) / temperature - lse;
    }
    return lp;
}

inline long double entropy_ld(const std::vector<double>& logits, double temperature) {
    const std::vector<long double> p = softmax_ld(logits, temperature);
    long double h = 0.0L;
    for (long double v : p) {
        if (v > 0.0L) h -= v * logl(v);
    }
    return h;
}

// KL(teacher(T) || student(T)) * T^2 for one sample.
inline long double kld_ld(const std::vector<double>& teacher, const std::vector<double>& student,
                          double temperature) {
    const std::vector<long double> pt = softmax_ld(teacher, temperature);
    const std::vector<long double> ps = softmax_ld(student, temperature);
    long double kl = 0.0L;
    for (std::size_t i = 0; i < pt.size(); ++i) {
        if (pt[i] > 0.0L) kl += pt[i] * (logl(pt[i]) - logl(ps[i]));
    }
    return kl * static_cast<long double>(temperature) * static_cast<long double>(temperature);
}

// Brute-force decoupled loss built from the decomposition definition: the
// binary target/non-target KL plus the KL over explicitly renormalized
// non-target distributions.
inline long double dkd_ld(const std::vector<double>& teacher, const std::vector<double>& student,
                          int target, double alpha, double beta, double temperature) {
    const std::vector<long double> pt = softmax_ld(teacher, temperature);
    const std::vector<long double> ps = softmax_ld(student, temperature);
    const std::size_t t = static_cast<std::size_t>(target);

    const long double bt = pt[t], bs = ps[t];
    long double tckd = 0.0L;
    if (bt > 0.0L) tckd += bt * (logl(bt) - logl(bs));
    if (bt < 1.0L) tckd += (1.0L - bt) * (logl(1.0L - bt) - logl(1.0L - bs));

    long double nckd = 0.0L;
    if (bt < 1.0L) {
        for (std::size_t i = 0; i < pt.size(); ++i) {
            if (i == t) continue;
            const long double qt = pt[i] / (1.0L - bt);
            const long double qs = ps[i] / (1.0L - bs);
            if (qt > 0.0L) nckd += qt * (logl(qt) - logl(qs));
        }
    }
    const long double t2 = static_cast<long double>(temperature) * static_cast<long double>(temperature);
    return (alpha * tckd + beta * nckd) * t2;
}

// ---------------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------------

// Central finite-difference gradient of a scalar function of one flat
// parameter vector.
template <typename F>
std::vector<double> fd_gradient(std::vector<double> params, F&& eval, double step = 1e-5) {
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + step;
        const double hi = eval(params);
        params[i] = orig - step;
        const double lo = eval(params);
        params[i] = orig;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

// Gradient-check pass criterion: relative error <= rel_tol with an absolute
// escape hatch for gradients at the finite-difference noise floor.
inline bool grad_close(double autodiff, double fd, double rel_tol = 1e-4, double abs_tol = 1e-7) {
    const double diff = std::fabs(autodiff - fd);
    if (diff <= abs_tol) return true;
    return diff <= rel_tol * std::max(std::fabs(autodiff), std::fabs(fd));
}

} // namespace testutil
