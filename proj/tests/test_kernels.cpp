#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "eakd/kernels.hpp"
#include "eakd/rng.hpp"

namespace k = eakd::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, eakd::Pcg32& rng, double lo = -3.0, double hi = 3.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct ThreadGuard {
    ~ThreadGuard() { k::set_threads(1); }
};

} // namespace

TEST_CASE("matmul variants: parallel output is bitwise equal to serial") {
    ThreadGuard guard;
    eakd::Pcg32 rng(100, 1);
    for (int threads : {2, 4}) {
        for (auto [n, kk, m] : {std::tuple<std::size_t, std::size_t, std::size_t>{7, 13, 5},
                                {64, 32, 17},
                                {1, 9, 1},
                                {33, 1, 29}}) {
            const std::vector<double> a = random_vec(n * kk, rng);
            const std::vector<double> b_nn = random_vec(kk * m, rng);
            const std::vector<double> b_nt = random_vec(m * kk, rng);
            const std::vector<double> b_tn = random_vec(n * m, rng);
            std::vector<double> s(n * m), p(n * m);

            k::matmul_nn_serial(a.data(), b_nn.data(), s.data(), n, kk, m, false);
            k::set_threads(threads);
            k::matmul_nn_parallel(a.data(), b_nn.data(), p.data(), n, kk, m, false);
            k::set_threads(1);
            CHECK(bitwise_equal(s, p));

            s.assign(n * m, 0.5);
            p.assign(n * m, 0.5);
            k::matmul_nt_serial(a.data(), b_nt.data(), s.data(), n, kk, m, true);
            k::set_threads(threads);
            k::matmul_nt_parallel(a.data(), b_nt.data(), p.data(), n, kk, m, true);
            k::set_threads(1);
            CHECK(bitwise_equal(s, p));

            std::vector<double> st(kk * m), pt(kk * m);
            k::matmul_tn_serial(a.data(), b_tn.data(), st.data(), n, kk, m, false);
            k::set_threads(threads);
            k::matmul_tn_parallel(a.data(), b_tn.data(), pt.data(), n, kk, m, false);
            k::set_threads(1);
            CHECK(bitwise_equal(st, pt));
        }
    }
}

TEST_CASE("dispatcher honors the configured thread count") {
    ThreadGuard guard;
    eakd::Pcg32 rng(7, 2);
    const std::size_t n = 31, kk = 17, m = 23;
    const std::vector<double> a = random_vec(n * kk, rng);
    const std::vector<double> b = random_vec(kk * m, rng);
    std::vector<double> serial(n * m), dispatched(n * m);
    k::matmul_nn_serial(a.data(), b.data(), serial.data(), n, kk, m, false);
    k::set_threads(3);
    CHECK(k::threads() == 3);
    k::matmul_nn(a.data(), b.data(), dispatched.data(), n, kk, m, false);
    k::set_threads(1);
    CHECK(bitwise_equal(serial, dispatched));
}

TEST_CASE("row softmax kernels: parallel bitwise equals serial") {
    ThreadGuard guard;
    eakd::Pcg32 rng(200, 3);
    const std::size_t n = 57, c = 19;
    const std::vector<double> z = random_vec(n * c, rng, -30.0, 30.0);
    const std::vector<double> g = random_vec(n * c, rng);
    std::vector<int> excl(n);
    for (std::size_t i = 0; i < n; ++i) excl[i] = static_cast<int>(rng.next_below(c));

    for (double inv_t : {1.0, 0.25, 2.0}) {
        std::vector<double> s(n * c), p(n * c);
        k::log_softmax_rows_serial(z.data(), s.data(), n, c, inv_t);
        k::set_threads(2);
        k::log_softmax_rows_parallel(z.data(), p.data(), n, c, inv_t);
        k::set_threads(1);
        CHECK(bitwise_equal(s, p));

        std::vector<double> gs(n * c, 0.125), gp(n * c, 0.125);
        k::log_softmax_backward_rows_serial(s.data(), g.data(), gs.data(), n, c, inv_t);
        k::set_threads(2);
        k::log_softmax_backward_rows_parallel(p.data(), g.data(), gp.data(), n, c, inv_t);
        k::set_threads(1);
        CHECK(bitwise_equal(gs, gp));

        k::log_softmax_excl_rows_serial(z.data(), s.data(), n, c, inv_t, excl.data());
        k::set_threads(2);
        k::log_softmax_excl_rows_parallel(z.data(), p.data(), n, c, inv_t, excl.data());
        k::set_threads(1);
        CHECK(bitwise_equal(s, p));

        gs.assign(n * c, 0.0);
        gp.assign(n * c, 0.0);
        k::log_softmax_excl_backward_rows_serial(s.data(), g.data(), gs.data(), n, c, inv_t, excl.data());
        k::set_threads(2);
        k::log_softmax_excl_backward_rows_parallel(p.data(), g.data(), gp.data(), n, c, inv_t, excl.data());
        k::set_threads(1);
        CHECK(bitwise_equal(gs, gp));
    }
}

TEST_CASE("elementwise and reduction kernels: parallel bitwise equals serial") {
    ThreadGuard guard;
    eakd::Pcg32 rng(300, 4);
    const std::size_t n = 4097;
    const std::vector<double> a = random_vec(n, rng);
    const std::vector<double> b = random_vec(n, rng, 0.1, 3.0);
    std::vector<double> s(n), p(n);

    k::ew_add_serial(a.data(), b.data(), s.data(), n);
    k::set_threads(2);
    k::ew_add_parallel(a.data(), b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    k::ew_mul_serial(a.data(), b.data(), s.data(), n);
    k::set_threads(2);
    k::ew_mul_parallel(a.data(), b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    k::ew_relu_serial(a.data(), s.data(), n);
    k::set_threads(2);
    k::ew_relu_parallel(a.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    k::ew_exp_serial(a.data(), s.data(), n);
    k::set_threads(2);
    k::ew_exp_parallel(a.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    k::ew_log_serial(b.data(), s.data(), n);
    k::set_threads(2);
    k::ew_log_parallel(b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    s.assign(n, 0.25);
    p.assign(n, 0.25);
    k::acc_mul_serial(a.data(), b.data(), s.data(), n);
    k::set_threads(2);
    k::acc_mul_parallel(a.data(), b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    s.assign(n, -1.0);
    p.assign(n, -1.0);
    k::acc_relu_serial(a.data(), b.data(), s.data(), n);
    k::set_threads(2);
    k::acc_relu_parallel(a.data(), b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    s.assign(n, 0.0);
    p.assign(n, 0.0);
    k::acc_div_serial(a.data(), b.data(), s.data(), n);
    k::set_threads(2);
    k::acc_div_parallel(a.data(), b.data(), p.data(), n);
    k::set_threads(1);
    CHECK(bitwise_equal(s, p));

    const std::size_t rows = 61, cols = 67;
    std::vector<double> m = random_vec(rows * cols, rng);
    std::vector<double> rs(rows), rp(rows);
    k::sum_rows_serial(m.data(), rs.data(), rows, cols);
    k::set_threads(2);
    k::sum_rows_parallel(m.data(), rp.data(), rows, cols);
    k::set_threads(1);
    CHECK(bitwise_equal(rs, rp));

    std::vector<double> bs(rows * cols, 0.0), bp(rows * cols, 0.0);
    k::acc_row_broadcast_serial(rs.data(), bs.data(), rows, cols);
    k::set_threads(2);
    k::acc_row_broadcast_parallel(rp.data(), bp.data(), rows, cols);
    k::set_threads(1);
    CHECK(bitwise_equal(bs, bp));
}
