#include "doctest.h"
#include "test_util.hpp"
#include "tnk/linalg.hpp"
#include "tnk/tensor_train.hpp"

#include <cmath>

using namespace tnk;

namespace {
constexpr double kTight = 1e-12;

Tensor tt_vector_dense(const TT& t) { return vectorize(tt_reconstruct(t)); }
}  // namespace

TEST_CASE("tt_svd: exact decomposition and rank-1 tensors") {
    Tensor t = random_tensor({3, 4, 2, 3}, 1);
    TT tt = tt_svd(t);
    CHECK(max_abs_diff(tt_reconstruct(tt), t) < 1e-10);
    CHECK(tt.sites() == 4);
    CHECK(tt.dims() == std::vector<std::size_t>{3, 4, 2, 3});

    Tensor r1 = outer(outer(random_tensor({4}, 2), random_tensor({3}, 3)), random_tensor({5}, 4));
    TT tt1 = tt_svd(r1);
    CHECK(tt1.ranks() == std::vector<std::size_t>{1, 1});
    CHECK(max_abs_diff(tt_reconstruct(tt1), r1) < 1e-10);
}

TEST_CASE("tt_svd: planted ranks are recovered") {
    TT planted = tt_random({4, 4, 4, 4}, {2, 3, 2}, 5);
    Tensor dense = tt_reconstruct(planted);
    TT fit = tt_svd(dense);
    CHECK(fit.ranks() == std::vector<std::size_t>{2, 3, 2});
    CHECK(max_abs_diff(tt_reconstruct(fit), dense) < 1e-9);
}

TEST_CASE("tt_svd: ranks equal prefix matricization ranks") {
    Tensor t = tt_reconstruct(tt_random({3, 3, 3, 3}, {2, 4, 2}, 6));
    TT fit = tt_svd(t);
    std::vector<std::size_t> ranks = fit.ranks();
    for (std::size_t k = 1; k <= 3; ++k) {
        std::vector<std::size_t> prefix;
        for (std::size_t m = 1; m <= k; ++m) prefix.push_back(m);
        CHECK(ranks[k - 1] == numerical_rank(matricize(t, ModeSet(prefix, 4))));
    }
}

TEST_CASE("tt_svd: rank caps and tolerance") {
    Tensor t = random_tensor({4, 4, 4}, 7);
    TT capped = tt_svd(t, TTSvdOptions{.rank_caps = std::vector<std::size_t>{2, 2}});
    CHECK(capped.ranks() == std::vector<std::size_t>{2, 2});

    TT loose = tt_svd(t, TTSvdOptions{.tol = 0.5});
    const double err = frobenius_norm(sub(tt_reconstruct(loose), t));
    CHECK(err <= 0.5 * frobenius_norm(t) + 1e-12);
}

TEST_CASE("tt_entry matches tt_reconstruct everywhere") {
    TT t = tt_random({2, 3, 2, 3}, {2, 2, 2}, 8);
    Tensor dense = tt_reconstruct(t);
    for (std::size_t flat = 0; flat < dense.size(); ++flat) {
        const std::vector<std::size_t> idx = dense.unravel(flat);
        CHECK(std::abs(tt_entry(t, idx) - dense.values()[flat]) < kTight);
    }

    TT single = tt_svd(random_tensor({5}, 9));
    CHECK(single.sites() == 1);
    Tensor back = tt_reconstruct(single);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(tt_entry(single, {i}) - back.at({i})) < kTight);
}

TEST_CASE("tt_canonicalize: orthogonality pattern and norm at the center") {
    TT t = tt_random({3, 3, 3, 3}, {3, 3, 3}, 10);
    Tensor dense = tt_reconstruct(t);
    for (std::size_t j = 1; j <= 4; ++j) {
        TT c = tt_canonicalize(t, j);
        REQUIRE(c.center.has_value());
        CHECK(*c.center == j);
        for (std::size_t k = 1; k < j; ++k) CHECK(core_left_orthogonal(c.cores[k - 1]));
        for (std::size_t k = j + 1; k <= 4; ++k) CHECK(core_right_orthogonal(c.cores[k - 1]));
        CHECK(max_abs_diff(tt_reconstruct(c), dense) < 1e-9);
        CHECK(std::abs(frobenius_norm(c.cores[j - 1]) - frobenius_norm(dense)) < 1e-9);
    }
    // idempotent
    TT c2 = tt_canonicalize(tt_canonicalize(t, 2), 2);
    CHECK(max_abs_diff(tt_reconstruct(c2), dense) < 1e-9);
    CHECK(std::abs(frobenius_norm(c2.cores[1]) - frobenius_norm(dense)) < 1e-9);
}

TEST_CASE("tt_als_fit: exact fit at the true ranks within 3 sweeps") {
    TT planted = tt_random({3, 3, 3}, {2, 2}, 11);
    Tensor t = tt_reconstruct(planted);
    TTAlsResult res = tt_als_fit(t, {2, 2}, 3, 0);
    REQUIRE(!res.loss_trace.empty());
    CHECK(res.loss_trace.back() <= 1e-8);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i)
        CHECK(res.loss_trace[i] <= res.loss_trace[i - 1] + 1e-12);
    CHECK(std::pow(frobenius_norm(sub(tt_reconstruct(res.tt), t)), 2) <= 1e-8);
}

TEST_CASE("tt_als_fit: full ranks reproduce any tensor") {
    Tensor t = random_tensor({3, 4, 3}, 12);
    TTAlsResult res = tt_als_fit(t, {3, 3}, 3, 1);
    CHECK(std::pow(frobenius_norm(sub(tt_reconstruct(res.tt), t)), 2) <= 1e-10);
}

TEST_CASE("tt_round: removes the rank inflation of tt_add(a, a)") {
    TT a = tt_random({3, 3, 3, 3}, {2, 2, 2}, 13);
    TT doubled = tt_add(a, a);
    CHECK(doubled.ranks() == std::vector<std::size_t>{4, 4, 4});
    TT rounded = tt_round(doubled);
    CHECK(rounded.ranks() == std::vector<std::size_t>{2, 2, 2});
    CHECK(max_abs_diff(tt_reconstruct(rounded), scale(tt_reconstruct(a), 2.0)) < 1e-9);
}

TEST_CASE("tt_round: agrees with tt_svd of the dense reconstruction") {
    TT a = tt_add(tt_random({3, 3, 3}, {2, 2}, 14), tt_random({3, 3, 3}, {1, 2}, 15));
    TTSvdOptions opts{.rank_caps = std::vector<std::size_t>{2, 2}};
    TT via_round = tt_round(a, opts);
    TT via_dense = tt_svd(tt_reconstruct(a), opts);
    CHECK(via_round.ranks() == via_dense.ranks());
    CHECK(max_abs_diff(tt_reconstruct(via_round), tt_reconstruct(via_dense)) < 1e-9);
}

TEST_CASE("tt arithmetic matches dense arithmetic") {
    TT a = tt_random({2, 3, 2}, {2, 2}, 16);
    TT b = tt_random({2, 3, 2}, {3, 2}, 17);
    Tensor da = tt_reconstruct(a), db = tt_reconstruct(b);

    CHECK(max_abs_diff(tt_reconstruct(tt_add(a, b)), add(da, db)) < 1e-10);
    CHECK(max_abs_diff(tt_reconstruct(tt_scale(a, -2.5)), scale(da, -2.5)) < 1e-10);
    CHECK(max_abs_diff(tt_reconstruct(tt_hadamard(a, b)), hadamard(da, db)) < 1e-10);

    CHECK(tt_add(a, b).ranks() == std::vector<std::size_t>{5, 4});
    CHECK(tt_hadamard(a, b).ranks() == std::vector<std::size_t>{6, 4});

    CHECK(std::abs(tt_inner(a, b) - inner(da, db)) < 1e-10);
    CHECK(std::abs(tt_norm(a) - frobenius_norm(da)) < 1e-10);
    double sum = 0.0;
    for (double v : da.values()) sum += v;
    CHECK(std::abs(tt_sum_entries(a) - sum) < 1e-10);
}

TEST_CASE("tt_inner: peak intermediate stays polynomial in the ranks") {
    const std::size_t d = 4, R = 3;
    TT a = tt_random({d, d, d, d, d}, {R, R, R, R}, 18);
    TT b = tt_random({d, d, d, d, d}, {R, R, R, R}, 19);
    TTInnerStats st;
    tt_inner(a, b, &st);
    CHECK(st.peak_intermediate <= R * R * d);
    CHECK(st.peak_intermediate < d * d * d * d * d);
}

TEST_CASE("mpo_from_dense: identity factors into rank-1 cores") {
    MPO m = mpo_from_dense(identity_matrix(4), {2, 2}, {2, 2});
    CHECK(m.ranks() == std::vector<std::size_t>{1});
    CHECK(max_abs_diff(mpo_reconstruct(m), identity_matrix(4)) < 1e-10);
}

TEST_CASE("mpo_from_dense: round trip on a random matrix") {
    Tensor a = random_tensor({6, 6}, 20);
    MPO m = mpo_from_dense(a, {2, 3}, {3, 2});
    CHECK(max_abs_diff(mpo_reconstruct(m), a) < 1e-10);
    CHECK(m.row_dims() == std::vector<std::size_t>{2, 3});
    CHECK(m.col_dims() == std::vector<std::size_t>{3, 2});
}

TEST_CASE("mpo_from_dense: kronecker products have rank-1 bonds") {
    Tensor a = random_tensor({2, 3}, 21), b = random_tensor({3, 2}, 22);
    MPO m = mpo_from_dense(kronecker(a, b), {2, 3}, {3, 2});
    CHECK(m.ranks() == std::vector<std::size_t>{1});
}

TEST_CASE("mpo_matvec: identity operator, dense oracle, rank law") {
    TT v = tt_random({2, 2, 2}, {2, 2}, 23);
    MPO eye = mpo_from_dense(identity_matrix(8), {2, 2, 2}, {2, 2, 2});
    TT iv = mpo_matvec(eye, v);
    CHECK(max_abs_diff(tt_reconstruct(iv), tt_reconstruct(v)) < 1e-10);

    MPO w = mpo_random({3, 2, 3}, {2, 2, 2}, {2, 3}, 24);
    TT wv = mpo_matvec(w, v);
    Tensor dense_w = mpo_reconstruct(w);
    Tensor dense_v = tt_vector_dense(v);
    Tensor oracle = mode_n_vector_product(dense_w, dense_v, 2);
    CHECK(max_abs_diff(vectorize(tt_reconstruct(wv)), oracle) < 1e-10);

    std::vector<std::size_t> rw = w.ranks(), rv = v.ranks(), ro = wv.ranks();
    REQUIRE(ro.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) CHECK(ro[k] == rw[k] * rv[k]);

    // matvec then round equals the dense product decomposed
    TT rounded = tt_round(wv);
    CHECK(max_abs_diff(vectorize(tt_reconstruct(rounded)), oracle) < 1e-9);
}

TEST_CASE("validate rejects malformed trains") {
    TT bad;
    bad.cores.push_back(random_tensor({1, 3, 2}, 25));
    bad.cores.push_back(random_tensor({3, 3, 1}, 26));  // bond mismatch 2 vs 3
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    TT open;
    open.cores.push_back(random_tensor({2, 3, 1}, 27));  // boundary rank != 1
    CHECK_THROWS_AS(open.validate(), std::invalid_argument);

    MPO mbad;
    mbad.cores.push_back(random_tensor({1, 2, 2, 2}, 28));
    mbad.cores.push_back(random_tensor({3, 2, 2, 1}, 29));
    CHECK_THROWS_AS(mbad.validate(), std::invalid_argument);
}
