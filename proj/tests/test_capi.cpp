#include "doctest.h"
#include "tnk.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace {

tnk_tensor* make(const std::vector<size_t>& shape, const std::vector<double>& values) {
    tnk_tensor* t = nullptr;
    REQUIRE(tnk_tensor_create(shape.data(), shape.size(), values.data(), &t) == TNK_OK);
    return t;
}

}  // namespace

TEST_CASE("tensor lifecycle and accessors") {
    tnk_tensor* t = make({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(tnk_tensor_order(t) == 2);
    CHECK(tnk_tensor_dim(t, 0) == 2);
    CHECK(tnk_tensor_dim(t, 1) == 3);
    CHECK(tnk_tensor_size(t) == 6);
    CHECK(tnk_tensor_data(t)[4] == 5.0);
    CHECK(std::abs(tnk_tensor_norm(t) - std::sqrt(91.0)) < 1e-12);

    tnk_tensor* u = make({2, 3}, {1, 2, 3, 4, 5, 7});
    CHECK(tnk_tensor_max_abs_diff(t, u) == 1.0);
    tnk_tensor_free(u);
    tnk_tensor_free(t);
}

TEST_CASE("error paths set status and message") {
    tnk_tensor* out = nullptr;
    const size_t shape[] = {2, 2};
    const double vals[] = {1, 2, 3};  // deliberately short: 3 values for 4 slots
    // mismatch is detected from explicit sizes, not the array, so pass wrong counts
    CHECK(tnk_tensor_create(nullptr, 2, vals, &out) == TNK_ERR_INVALID);
    CHECK(std::strlen(tnk_last_error()) > 0);
    CHECK(out == nullptr);

    CHECK(tnk_tensor_read("/nonexistent/path.ten", &out) == TNK_ERR_DATA);
    CHECK(out == nullptr);

    tnk_network* g = nullptr;
    CHECK(tnk_network_parse("A[i,j] ->", &g) == TNK_ERR_DATA);
    CHECK(g == nullptr);
    CHECK(std::string(tnk_last_error()).find("parse") != std::string::npos);
    (void)shape;
}

TEST_CASE("matricize through the C surface") {
    tnk_tensor* t = make({2, 2, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
    const size_t rows[] = {1};
    tnk_tensor* m = nullptr;
    REQUIRE(tnk_matricize(t, rows, 1, &m) == TNK_OK);
    CHECK(tnk_tensor_order(m) == 2);
    CHECK(tnk_tensor_dim(m, 0) == 2);
    CHECK(tnk_tensor_dim(m, 1) == 4);
    CHECK(tnk_tensor_data(m)[5] == 5.0);
    tnk_tensor_free(m);

    const size_t bad_rows[] = {3, 1};  // not ascending
    CHECK(tnk_matricize(t, bad_rows, 2, &m) == TNK_ERR_INVALID);
    tnk_tensor_free(t);
}

TEST_CASE("network parse, format, contract, rank bound") {
    tnk_network* g = nullptr;
    REQUIRE(tnk_network_parse("A[i,j]  B[j,k] -> [i,k]", &g) == TNK_OK);

    char* text = nullptr;
    REQUIRE(tnk_network_format(g, &text) == TNK_OK);
    CHECK(std::string(text) == "A[i,j] B[j,k] -> [i,k]\n");
    tnk_string_free(text);

    tnk_tensor* a = make({2, 3}, {1, 0, 2, 0, 1, 1});
    tnk_tensor* b = make({3, 2}, {1, 1, 0, 1, 1, 0});
    const char* names[] = {"A", "B"};
    const tnk_tensor* tensors[] = {a, b};
    tnk_tensor* out = nullptr;
    REQUIRE(tnk_contract(g, names, tensors, 2, &out) == TNK_OK);
    // A B = [[3,1],[1,1]]
    CHECK(tnk_tensor_data(out)[0] == 3.0);
    CHECK(tnk_tensor_data(out)[1] == 1.0);
    CHECK(tnk_tensor_data(out)[3] == 1.0);
    tnk_tensor_free(out);

    const char* rows[] = {"i"};
    uint64_t bound = 0;
    int degenerate = -1;
    REQUIRE(tnk_rank_bound(g, names, tensors, 2, rows, 1, &bound, &degenerate) == TNK_OK);
    CHECK(bound == 3);
    CHECK(degenerate == 0);

    // missing binding is a data error
    tnk_tensor* out2 = nullptr;
    CHECK(tnk_contract(g, names, tensors, 1, &out2) == TNK_ERR_INVALID);

    tnk_tensor_free(b);
    tnk_tensor_free(a);
    tnk_network_free(g);
}

TEST_CASE("jacobians through the C surface") {
    tnk_network* g = nullptr;
    REQUIRE(tnk_network_parse("A[i,j] x[j] -> [i]", &g) == TNK_OK);
    tnk_tensor* a = make({2, 2}, {1, 2, 3, 4});
    tnk_tensor* x = make({2}, {1, -1});
    const char* names[] = {"A", "x"};
    const tnk_tensor* tensors[] = {a, x};

    tnk_tensor* j = nullptr;
    REQUIRE(tnk_jacobian(g, names, tensors, 2, "x", &j) == TNK_OK);
    CHECK(tnk_tensor_max_abs_diff(j, a) < 1e-12);

    tnk_tensor* fd = nullptr;
    REQUIRE(tnk_finite_diff_jacobian(g, names, tensors, 2, "x", 1e-5, &fd) == TNK_OK);
    CHECK(tnk_tensor_max_abs_diff(fd, j) < 1e-8);

    tnk_tensor* bad = nullptr;
    CHECK(tnk_jacobian(g, names, tensors, 2, "Z", &bad) == TNK_ERR_INVALID);

    tnk_tensor_free(fd);
    tnk_tensor_free(j);
    tnk_tensor_free(x);
    tnk_tensor_free(a);
    tnk_network_free(g);
}

TEST_CASE("cp fit and hosvd through the C surface") {
    // rank-1 tensor: outer(u, v) with u = (1,2), v = (1,1,1)
    tnk_tensor* t = make({2, 3}, {1, 1, 1, 2, 2, 2});
    tnk_tensor* factors[2] = {nullptr, nullptr};
    double loss = -1.0;
    size_t iters = 0;
    int converged = 0;
    REQUIRE(tnk_cp_fit(t, 1, 2000, 1e-14, 0, factors, &loss, &iters, &converged) == TNK_OK);
    CHECK(loss < 1e-6);
    CHECK(iters > 0);
    tnk_tensor_free(factors[0]);
    tnk_tensor_free(factors[1]);

    tnk_tensor* core = nullptr;
    tnk_tensor* ufactors[2] = {nullptr, nullptr};
    REQUIRE(tnk_hosvd(t, nullptr, 1e-10, &core, ufactors) == TNK_OK);
    CHECK(tnk_tensor_order(core) == 2);
    CHECK(tnk_tensor_dim(core, 0) == 1);  // rank-1 input
    CHECK(tnk_tensor_dim(core, 1) == 1);
    tnk_tensor_free(core);
    tnk_tensor_free(ufactors[0]);
    tnk_tensor_free(ufactors[1]);
    tnk_tensor_free(t);
}

TEST_CASE("tensor train round trip through the C surface") {
    std::vector<double> vals(8);
    for (size_t i = 0; i < 8; ++i) vals[i] = static_cast<double>(i + 1);
    tnk_tensor* t = make({2, 2, 2}, vals);

    tnk_tt* tt = nullptr;
    REQUIRE(tnk_tt_svd(t, 0.0, nullptr, &tt) == TNK_OK);
    CHECK(tnk_tt_sites(tt) == 3);

    tnk_tensor* back = nullptr;
    REQUIRE(tnk_tt_reconstruct(tt, &back) == TNK_OK);
    CHECK(tnk_tensor_max_abs_diff(back, t) < 1e-10);
    tnk_tensor_free(back);

    tnk_tensor* core = nullptr;
    REQUIRE(tnk_tt_core(tt, 1, &core) == TNK_OK);
    CHECK(tnk_tensor_order(core) == 3);
    CHECK(tnk_tensor_dim(core, 0) == 1);
    tnk_tensor_free(core);
    CHECK(tnk_tt_core(tt, 9, &core) == TNK_ERR_INVALID);

    const char* path = "/tmp/tnk_capi_test.tt";
    REQUIRE(tnk_tt_write(path, tt) == TNK_OK);
    tnk_tt* tt2 = nullptr;
    REQUIRE(tnk_tt_read(path, &tt2) == TNK_OK);
    CHECK(tnk_tt_sites(tt2) == 3);
    tnk_tensor* back2 = nullptr;
    REQUIRE(tnk_tt_reconstruct(tt2, &back2) == TNK_OK);
    CHECK(tnk_tensor_max_abs_diff(back2, t) < 1e-10);
    tnk_tensor_free(back2);
    tnk_tt_free(tt2);

    // rounding with caps
    tnk_tt* rounded = nullptr;
    const size_t caps[] = {1, 1};
    REQUIRE(tnk_tt_round(tt, 0.0, caps, &rounded) == TNK_OK);
    tnk_tensor* rcore = nullptr;
    REQUIRE(tnk_tt_core(rounded, 2, &rcore) == TNK_OK);
    CHECK(tnk_tensor_dim(rcore, 0) == 1);
    CHECK(tnk_tensor_dim(rcore, 2) == 1);
    tnk_tensor_free(rcore);
    tnk_tt_free(rounded);

    // ALS at full ranks reproduces the tensor
    tnk_tt* als = nullptr;
    double final_loss = -1.0;
    const size_t ranks[] = {2, 2};
    REQUIRE(tnk_tt_als(t, ranks, 3, 0, &als, &final_loss) == TNK_OK);
    CHECK(final_loss < 1e-10);
    tnk_tt_free(als);

    tnk_tt_free(tt);
    tnk_tensor_free(t);
}

TEST_CASE("mpo io and matvec through the C surface") {
    // write a 1-site identity MPO by hand
    const char* path = "/tmp/tnk_capi_test.mpo";
    {
        FILE* f = fopen(path, "w");
        REQUIRE(f != nullptr);
        fputs("MPO 1\n1\nCORE 1 1 2 2 1\n1 0 0 1\n", f);
        fclose(f);
    }
    tnk_mpo* m = nullptr;
    REQUIRE(tnk_mpo_read(path, &m) == TNK_OK);
    CHECK(tnk_mpo_sites(m) == 1);

    tnk_tensor* core = nullptr;
    REQUIRE(tnk_mpo_core(m, 1, &core) == TNK_OK);
    CHECK(tnk_tensor_order(core) == 4);
    tnk_tensor_free(core);

    tnk_tensor* v = make({2}, {0.5, -1.5});
    tnk_tt* vt = nullptr;
    REQUIRE(tnk_tt_svd(v, 0.0, nullptr, &vt) == TNK_OK);
    tnk_tt* out = nullptr;
    REQUIRE(tnk_mpo_matvec(m, vt, &out) == TNK_OK);
    tnk_tensor* dense = nullptr;
    REQUIRE(tnk_tt_reconstruct(out, &dense) == TNK_OK);
    CHECK(tnk_tensor_max_abs_diff(dense, v) < 1e-12);

    const char* path2 = "/tmp/tnk_capi_test2.mpo";
    REQUIRE(tnk_mpo_write(path2, m) == TNK_OK);
    tnk_mpo* m2 = nullptr;
    REQUIRE(tnk_mpo_read(path2, &m2) == TNK_OK);
    CHECK(tnk_mpo_sites(m2) == 1);
    tnk_mpo_free(m2);

    tnk_tensor_free(dense);
    tnk_tt_free(out);
    tnk_tt_free(vt);
    tnk_tensor_free(v);
    tnk_mpo_free(m);
}

TEST_CASE("probability and born machine through the C surface") {
    tnk_tensor* p = make({2, 2}, {0.1, 0.2, 0.3, 0.4});
    const size_t keep[] = {2};
    tnk_tensor* m = nullptr;
    REQUIRE(tnk_prob_marginal(p, keep, 1, &m) == TNK_OK);
    CHECK(std::abs(tnk_tensor_data(m)[0] - 0.4) < 1e-12);
    CHECK(std::abs(tnk_tensor_data(m)[1] - 0.6) < 1e-12);
    tnk_tensor_free(m);

    const size_t modes[] = {1};
    const size_t values[] = {1};
    tnk_tensor* c = nullptr;
    REQUIRE(tnk_prob_conditional(p, modes, values, 1, &c) == TNK_OK);
    CHECK(std::abs(tnk_tensor_data(c)[0] - 3.0 / 7.0) < 1e-12);
    tnk_tensor_free(c);

    // not a distribution
    tnk_tensor* bad = make({2}, {0.5, 0.6});
    tnk_tensor* out = nullptr;
    CHECK(tnk_prob_marginal(bad, keep, 0, &out) == TNK_ERR_INVALID);
    tnk_tensor_free(bad);
    tnk_tensor_free(p);

    // born machine over a 2-site train
    tnk_tensor* amp = make({2, 2}, {1, 0, 0, 1});
    tnk_tt* tt = nullptr;
    REQUIRE(tnk_tt_svd(amp, 0.0, nullptr, &tt) == TNK_OK);
    double zeta = 0.0;
    REQUIRE(tnk_born_normalizer(tt, &zeta) == TNK_OK);
    CHECK(std::abs(zeta - 2.0) < 1e-12);

    const size_t keep1[] = {1};
    tnk_tensor* bm = nullptr;
    REQUIRE(tnk_born_marginal(tt, keep1, 1, &bm) == TNK_OK);
    CHECK(std::abs(tnk_tensor_data(bm)[0] - 0.5) < 1e-12);
    CHECK(std::abs(tnk_tensor_data(bm)[1] - 0.5) < 1e-12);
    tnk_tensor_free(bm);
    tnk_tt_free(tt);
    tnk_tensor_free(amp);
}

TEST_CASE("rand verify through the C surface") {
    const size_t dims[] = {3, 2, 2};
    tnk_tensor* est = nullptr;
    tnk_tensor* ana = nullptr;
    tnk_tensor* se = nullptr;
    double max_z = -1.0;
    REQUIRE(tnk_rand_verify("prod_norm", dims, 3, nullptr, nullptr, 5000, 0, &est, &ana, &se,
                            &max_z) == TNK_OK);
    CHECK(tnk_tensor_order(ana) == 0);
    CHECK(tnk_tensor_data(ana)[0] == 12.0);
    CHECK(max_z < 5.0);
    tnk_tensor_free(est);
    tnk_tensor_free(ana);
    tnk_tensor_free(se);

    CHECK(tnk_rand_verify("nope", dims, 3, nullptr, nullptr, 100, 0, &est, &ana, &se, &max_z) ==
          TNK_ERR_INVALID);
}
