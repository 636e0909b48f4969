#include "doctest.h"
#include "test_util.hpp"
#include "tnk/prob.hpp"

#include <cmath>
#include <string>

using namespace tnk;

namespace {

constexpr double kTight = 1e-12;

Tensor abs_normalized(const std::vector<std::size_t>& shape, std::uint64_t seed) {
    Tensor t = random_tensor(shape, seed);
    double mass = 0.0;
    for (double& v : t.mutable_values()) {
        v = std::abs(v) + 0.01;
        mass += v;
    }
    for (double& v : t.mutable_values()) v /= mass;
    return t;
}

}  // namespace

TEST_CASE("prob_validate: accepts distributions, rejects bad mass and signs") {
    Tensor uniform({2, 3}, std::vector<double>(6, 1.0 / 6.0));
    CHECK_NOTHROW(prob_validate(uniform));

    Tensor off = uniform;
    off.mutable_values()[0] += 1e-6;
    CHECK_THROWS_AS(prob_validate(off), std::invalid_argument);

    Tensor neg({2, 2}, {0.5, 0.6, -0.1, 0.0});
    try {
        prob_validate(neg);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        // the offending position (0-based multi-index (1,0)) must be named
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }

    CHECK_NOTHROW(prob_validate(Tensor::scalar(1.0)));
}

TEST_CASE("marginal: sums out the dropped modes") {
    ProbTensor p = prob_validate(Tensor({2, 2}, {0.1, 0.2, 0.3, 0.4}));
    ProbTensor m2 = marginal(p, ModeSet({2}, 2));
    CHECK(std::abs(m2.t.at({0}) - 0.4) < kTight);
    CHECK(std::abs(m2.t.at({1}) - 0.6) < kTight);
    ProbTensor m1 = marginal(p, ModeSet({1}, 2));
    CHECK(std::abs(m1.t.at({0}) - 0.3) < kTight);
    CHECK(std::abs(m1.t.at({1}) - 0.7) < kTight);

    // keeping everything is the identity
    ProbTensor all = marginal(p, ModeSet({1, 2}, 2));
    CHECK(max_abs_diff(all.t, p.t) == 0.0);
}

TEST_CASE("marginal of a product distribution recovers the factors") {
    Tensor pa = abs_normalized({3}, 1), pb = abs_normalized({4}, 2);
    ProbTensor joint = prob_validate(outer(pa, pb));
    CHECK(max_abs_diff(marginal(joint, ModeSet({1}, 2)).t, pa) < kTight);
    CHECK(max_abs_diff(marginal(joint, ModeSet({2}, 2)).t, pb) < kTight);
}

TEST_CASE("marginal: brute-force oracle on an order-4 distribution") {
    Tensor t = abs_normalized({2, 3, 2, 2}, 3);
    ProbTensor p = prob_validate(t);
    ProbTensor m = marginal(p, ModeSet({2, 4}, 4));
    REQUIRE(m.t.shape() == std::vector<std::size_t>{3, 2});
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < 2; ++l) {
            double s = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t k = 0; k < 2; ++k) s += t.at({i, j, k, l});
            CHECK(std::abs(m.t.at({j, l}) - s) < kTight);
        }
}

TEST_CASE("conditional: renormalized slices and point masses") {
    ProbTensor p = prob_validate(Tensor({2, 2}, {0.1, 0.3, 0.15, 0.45}));
    ProbTensor c = conditional(p, {{1, 0}});  // condition on first mode = 0
    CHECK(std::abs(c.t.at({0}) - 0.25) < kTight);
    CHECK(std::abs(c.t.at({1}) - 0.75) < kTight);

    // conditioning on everything yields the scalar 1
    ProbTensor full = conditional(p, {{1, 1}, {2, 0}});
    CHECK(full.t.order() == 0);
    CHECK(std::abs(full.t.values()[0] - 1.0) < kTight);

    // zero-probability event is an error
    ProbTensor z = prob_validate(Tensor({2, 2}, {0.5, 0.5, 0.0, 0.0}));
    CHECK_THROWS_AS(conditional(z, {{1, 1}}), std::invalid_argument);

    // chain rule: p(x2 | x1) * p(x1) == joint
    ProbTensor m1 = marginal(p, ModeSet({1}, 2));
    for (std::size_t i = 0; i < 2; ++i) {
        ProbTensor ci = conditional(p, {{1, i}});
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(ci.t.at({j}) * m1.t.at({i}) - p.t.at({i, j})) < kTight);
    }
}

TEST_CASE("conditional on an independent mode leaves the rest unchanged") {
    Tensor pa = abs_normalized({3}, 4), pb = abs_normalized({2}, 5);
    ProbTensor joint = prob_validate(outer(pa, pb));
    ProbTensor c = conditional(joint, {{2, 1}});
    CHECK(max_abs_diff(c.t, pa) < kTight);
}

TEST_CASE("born_normalizer: closed forms and the dense oracle") {
    // constant cores: every entry of the 3-site tensor equals c^3, so
    // zeta = d^3 c^6
    const double c = 0.7;
    const std::size_t d = 2;
    TT constant;
    for (int k = 0; k < 3; ++k) constant.cores.push_back(Tensor({1, d, 1}, {c, c}));
    BornMachine bm{constant, std::nullopt};
    CHECK(std::abs(born_normalizer(bm) - d * d * d * std::pow(c, 6)) < kTight);

    TT t = tt_random({3, 2, 3, 2}, {2, 3, 2}, 6);
    BornMachine b2{t, std::nullopt};
    Tensor dense = tt_reconstruct(t);
    CHECK(std::abs(born_normalizer(b2) - inner(dense, dense)) < 1e-10);

    // canonical form: zeta equals the squared norm of the center core
    TT canon = tt_canonicalize(t, 2);
    BornMachine b3{canon, std::nullopt};
    const double zeta = born_normalizer(b3);
    CHECK(std::abs(zeta - std::pow(frobenius_norm(canon.cores[1]), 2)) < 1e-10);
}

TEST_CASE("born_prob: squared entries over zeta, sums to one") {
    TT t = tt_random({2, 3, 2}, {2, 2}, 7);
    BornMachine b{t, std::nullopt};
    Tensor dense = tt_reconstruct(t);
    const double zeta = inner(dense, dense);
    double total = 0.0;
    for (std::size_t flat = 0; flat < dense.size(); ++flat) {
        const std::vector<std::size_t> idx = dense.unravel(flat);
        const double p = born_prob(b, idx);
        CHECK(std::abs(p - dense.values()[flat] * dense.values()[flat] / zeta) < 1e-12);
        total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("born_marginal: matches the dense brute force") {
    TT t = tt_random({3, 3, 3, 3}, {2, 2, 2}, 8);
    BornMachine b{t, std::nullopt};
    Tensor dense = tt_reconstruct(t);
    Tensor sq = hadamard(dense, dense);
    ProbTensor full = prob_validate(scale(sq, 1.0 / inner(dense, dense)));

    for (const std::vector<std::size_t>& keep :
         {std::vector<std::size_t>{2}, std::vector<std::size_t>{2, 3},
          std::vector<std::size_t>{1, 4}, std::vector<std::size_t>{1, 2, 3, 4}}) {
        Tensor m = born_marginal(b, ModeSet(keep, 4));
        Tensor oracle = marginal(full, ModeSet(keep, 4)).t;
        CHECK(max_abs_diff(m, oracle) < 1e-10);
    }
}

TEST_CASE("born_marginal: invariant under gauge changes") {
    TT t = tt_random({2, 3, 2}, {2, 2}, 9);
    BornMachine raw{t, std::nullopt};
    BornMachine gauged{tt_canonicalize(t, 3), std::nullopt};
    for (std::size_t mode = 1; mode <= 3; ++mode) {
        Tensor a = born_marginal(raw, ModeSet({mode}, 3));
        Tensor b = born_marginal(gauged, ModeSet({mode}, 3));
        CHECK(max_abs_diff(a, b) < 1e-10);
    }
}

TEST_CASE("born machine: zeta is cached after the first evaluation") {
    TT t = tt_random({2, 2}, {2}, 10);
    BornMachine b{t, std::nullopt};
    CHECK_FALSE(b.zeta.has_value());
    born_normalizer(b);
    CHECK(b.zeta.has_value());
    const double stored = *b.zeta;
    CHECK(born_normalizer(b) == stored);
}

TEST_CASE("born machine: zero train is rejected") {
    TT zero;
    zero.cores.push_back(Tensor::zeros({1, 2, 1}));
    BornMachine b{zero, std::nullopt};
    CHECK_THROWS(born_prob(b, {0}));
}
