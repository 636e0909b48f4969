#include "tnk/random_tn.hpp"

#include "tnk/linalg.hpp"
#include "tnk/rng.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

Tensor gaussian_keyed(const std::vector<std::size_t>& shape, std::uint64_t seed,
                      std::uint64_t sample, std::uint64_t node) {
    Tensor t = Tensor::zeros(shape);
    for (std::size_t e = 0; e < t.size(); ++e)
        t.mutable_values()[e] = rng::normal(rng::key(seed, sample, node, e));
    return t;
}

/// Binary-counter pairwise summation: element i of the result is the sum of
/// element i over all added vectors, combined in a fixed tree order so the
/// floating-point result does not depend on batching.
class PairwiseAcc {
public:
    void add(std::vector<double> v) {
        for (std::size_t lvl = 0;; ++lvl) {
            if (lvl == levels_.size()) {
                levels_.push_back(std::move(v));
                occupied_.push_back(true);
                return;
            }
            if (!occupied_[lvl]) {
                levels_[lvl] = std::move(v);
                occupied_[lvl] = true;
                return;
            }
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += levels_[lvl][i];
            occupied_[lvl] = false;
        }
    }

    std::vector<double> total(std::size_t n) const {
        std::vector<double> out(n, 0.0);
        for (std::size_t lvl = 0; lvl < levels_.size(); ++lvl)
            if (occupied_[lvl])
                for (std::size_t i = 0; i < n; ++i) out[i] += levels_[lvl][i];
        return out;
    }

private:
    std::vector<std::vector<double>> levels_;
    std::vector<bool> occupied_;
};

}  // namespace

void RandomSpec::validate() const {
    std::set<std::string> random_names;
    for (const auto& [name, shape] : random_nodes)
        if (!random_names.insert(name).second) fail("random node listed twice: " + name);
    for (const TNNode& n : graph.nodes) {
        const bool r = random_names.count(n.name) > 0;
        const bool f = fixed.count(n.name) > 0;
        if (r && f) fail("node classified as both random and fixed: " + n.name);
        if (!r && !f) fail("node not classified: " + n.name);
    }
}

Tensor gaussian_tensor(const std::vector<std::size_t>& shape, std::uint64_t seed) {
    return gaussian_keyed(shape, seed, 0, 0);
}

IdentityReport mc_expectation(const RandomSpec& spec, std::size_t samples, std::uint64_t seed) {
    spec.validate();
    if (samples < 2) fail("mc_expectation needs at least two samples");

    PairwiseAcc sums, squares;
    std::vector<std::size_t> out_shape;
    for (std::size_t s = 0; s < samples; ++s) {
        Bindings b = spec.fixed;
        for (std::size_t ni = 0; ni < spec.random_nodes.size(); ++ni)
            b.emplace(spec.random_nodes[ni].first,
                      gaussian_keyed(spec.random_nodes[ni].second, seed, s, ni + 1));
        Tensor t = contract(spec.graph, b);
        if (s == 0) out_shape = t.shape();
        std::vector<double> sq = t.values();
        for (double& v : sq) v *= v;
        sums.add(t.values());
        squares.add(std::move(sq));
    }

    Tensor mean = Tensor::zeros(out_shape);
    Tensor se = Tensor::zeros(out_shape);
    const std::vector<double> sum = sums.total(mean.size());
    const std::vector<double> sum_sq = squares.total(mean.size());
    const double n = static_cast<double>(samples);
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double m = sum[i] / n;
        mean.mutable_values()[i] = m;
        const double var = std::max(0.0, (sum_sq[i] - n * m * m) / (n - 1.0));
        se.mutable_values()[i] = std::sqrt(var / n);
    }

    IdentityReport rep;
    rep.estimate = std::move(mean);
    rep.std_error = std::move(se);
    rep.samples = samples;
    rep.seed = seed;
    return rep;
}

namespace {

void want_dims(const IdentityParams& p, std::size_t k, const std::string& identity) {
    if (p.dims.size() != k)
        fail(identity + " expects " + std::to_string(k) + " dimension parameters");
    for (std::size_t d : p.dims)
        if (d < 1) fail(identity + " dimensions must be >= 1");
}

double kd(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

Tensor isserlis_sigma(const IdentityParams& p) {
    if (!p.sigma) fail("isserlis4 needs a covariance matrix");
    const Tensor& s = *p.sigma;
    if (s.order() != 2 || s.dim(0) != s.dim(1)) fail("isserlis4 covariance must be square");
    return s;
}

}  // namespace

Tensor analytic_expectation(const std::string& identity, const IdentityParams& p) {
    if (identity == "gram_mean") {
        want_dims(p, 2, identity);
        return scale(identity_matrix(p.dims[1]), static_cast<double>(p.dims[0]));
    }
    if (identity == "outer_pair") {
        want_dims(p, 2, identity);
        const std::size_t m = p.dims[0], n = p.dims[1];
        Tensor out = Tensor::zeros({m, n, m, n});
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < n; ++b)
                out.mutable_values()[((a * n + b) * m + a) * n + b] = 1.0;
        return out;
    }
    if (identity == "frob_mean") {
        if (p.dims.empty()) fail("frob_mean needs a nonempty shape");
        double prod = 1.0;
        for (std::size_t d : p.dims) prod *= static_cast<double>(d);
        return Tensor::scalar(prod);
    }
    if (identity == "prod_norm") {
        want_dims(p, 3, identity);
        return Tensor::scalar(static_cast<double>(p.dims[0] * p.dims[1] * p.dims[2]));
    }
    if (identity == "isserlis4") {
        const Tensor s = isserlis_sigma(p);
        const std::size_t n = s.dim(0);
        Tensor out = Tensor::zeros({n, n, n, n});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        out.mutable_values()[((i * n + j) * n + k) * n + l] =
                            s.at({i, j}) * s.at({k, l}) + s.at({i, k}) * s.at({j, l}) +
                            s.at({i, l}) * s.at({j, k});
        return out;
    }
    if (identity == "gram_outer2") {
        want_dims(p, 2, identity);
        const double m = static_cast<double>(p.dims[0]);
        const std::size_t n = p.dims[1];
        Tensor out = Tensor::zeros({n, n, n, n});
        for (std::size_t i1 = 0; i1 < n; ++i1)
            for (std::size_t i2 = 0; i2 < n; ++i2)
                for (std::size_t i3 = 0; i3 < n; ++i3)
                    for (std::size_t i4 = 0; i4 < n; ++i4)
                        out.mutable_values()[((i1 * n + i2) * n + i3) * n + i4] =
                            m * m * kd(i1, i2) * kd(i3, i4) + m * kd(i1, i3) * kd(i2, i4) +
                            m * kd(i1, i4) * kd(i2, i3);
        return out;
    }
    if (identity == "ab_outer2") {
        want_dims(p, 3, identity);
        const std::size_t m = p.dims[0], pp = p.dims[2];
        const double n = static_cast<double>(p.dims[1]);
        Tensor out = Tensor::zeros({m, pp, m, pp});
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < pp; ++j)
                out.mutable_values()[((i * pp + j) * m + i) * pp + j] = n;
        return out;
    }
    if (identity == "trace_quartic") {
        want_dims(p, 1, identity);
        if (!p.x || p.x->order() != 2) fail("trace_quartic needs a deterministic matrix");
        const double n = static_cast<double>(p.dims[0]);
        const double f2 = frobenius_norm(*p.x) * frobenius_norm(*p.x);
        const Tensor gram = matmul(transpose(*p.x), *p.x);
        double tr2 = 0.0;
        const Tensor g2 = matmul(gram, gram);
        for (std::size_t i = 0; i < g2.dim(0); ++i) tr2 += g2.at({i, i});
        return Tensor::scalar(n * n * f2 * f2 + 2.0 * n * tr2);
    }
    if (identity == "chain_example") {
        want_dims(p, 8, identity);
        double prod = 1.0;
        for (std::size_t d : p.dims) prod *= static_cast<double>(d);
        return Tensor::scalar(prod);
    }
    fail("unknown identity: " + identity);
}

RandomSpec identity_network(const std::string& identity, const IdentityParams& p) {
    RandomSpec spec;
    if (identity == "gram_mean") {
        want_dims(p, 2, identity);
        spec.graph = parse_network("A[k,i] A[k,j] -> [i,j]");
        spec.random_nodes.push_back({"A", {p.dims[0], p.dims[1]}});
        return spec;
    }
    if (identity == "outer_pair") {
        want_dims(p, 2, identity);
        spec.graph = parse_network("A[a,b] A[c,d] -> [a,b,c,d]");
        spec.random_nodes.push_back({"A", {p.dims[0], p.dims[1]}});
        return spec;
    }
    if (identity == "frob_mean") {
        if (p.dims.empty()) fail("frob_mean needs a nonempty shape");
        std::ostringstream os;
        for (int rep = 0; rep < 2; ++rep) {
            os << (rep ? " T[" : "T[");
            for (std::size_t k = 0; k < p.dims.size(); ++k)
                os << (k ? "," : "") << "l" << (k + 1);
            os << "]";
        }
        os << " -> []";
        spec.graph = parse_network(os.str());
        spec.random_nodes.push_back({"T", p.dims});
        return spec;
    }
    if (identity == "prod_norm") {
        want_dims(p, 3, identity);
        spec.graph = parse_network("A[i,k] B[k,j] A[i,l] B[l,j] -> []");
        spec.random_nodes.push_back({"A", {p.dims[0], p.dims[2]}});
        spec.random_nodes.push_back({"B", {p.dims[2], p.dims[1]}});
        return spec;
    }
    if (identity == "isserlis4") {
        const Tensor s = isserlis_sigma(p);
        spec.graph = parse_network(
            "S[i1,p1] g[p1] S[i2,p2] g[p2] S[i3,p3] g[p3] S[i4,p4] g[p4] -> [i1,i2,i3,i4]");
        spec.random_nodes.push_back({"g", {s.dim(0)}});
        spec.fixed.emplace("S", sqrt_psd(s));
        return spec;
    }
    if (identity == "gram_outer2") {
        want_dims(p, 2, identity);
        spec.graph = parse_network("A[k1,i1] A[k1,i2] A[k2,i3] A[k2,i4] -> [i1,i2,i3,i4]");
        spec.random_nodes.push_back({"A", {p.dims[0], p.dims[1]}});
        return spec;
    }
    if (identity == "ab_outer2") {
        want_dims(p, 3, identity);
        spec.graph = parse_network("A[i1,k1] B[k1,j1] A[i2,k2] B[k2,j2] -> [i1,j1,i2,j2]");
        spec.random_nodes.push_back({"A", {p.dims[0], p.dims[1]}});
        spec.random_nodes.push_back({"B", {p.dims[1], p.dims[2]}});
        return spec;
    }
    if (identity == "trace_quartic") {
        want_dims(p, 1, identity);
        if (!p.x || p.x->order() != 2) fail("trace_quartic needs a deterministic matrix");
        spec.graph = parse_network(
            "X[i1,p1] A[p1,j1] X[i1,q1] A[q1,j1] "
            "X[i2,p2] A[p2,j2] X[i2,q2] A[q2,j2] -> []");
        spec.random_nodes.push_back({"A", {p.x->dim(1), p.dims[0]}});
        spec.fixed.emplace("X", *p.x);
        return spec;
    }
    if (identity == "chain_example") {
        want_dims(p, 8, identity);
        const std::size_t m1 = p.dims[0], m2 = p.dims[1], m3 = p.dims[2];
        const std::size_t r1 = p.dims[3], r2 = p.dims[4];
        const std::size_t d1 = p.dims[5], d2 = p.dims[6], d3 = p.dims[7];
        spec.graph = parse_network(
            "A[m1,d1,r1] B[m2,r1,d2,r2] C[m3,r2,d3] G[d1,d2,d3] "
            "A[m1,e1,s1] B[m2,s1,e2,s2] C[m3,s2,e3] G[e1,e2,e3] -> []");
        spec.random_nodes.push_back({"A", {m1, d1, r1}});
        spec.random_nodes.push_back({"B", {m2, r1, d2, r2}});
        spec.random_nodes.push_back({"C", {m3, r2, d3}});
        spec.random_nodes.push_back({"G", {d1, d2, d3}});
        return spec;
    }
    fail("unknown identity: " + identity);
}

IdentityReport verify_identity(const std::string& identity, const IdentityParams& p,
                               std::size_t samples, std::uint64_t seed) {
    IdentityReport rep = mc_expectation(identity_network(identity, p), samples, seed);
    rep.analytic = analytic_expectation(identity, p);
    if (!rep.estimate.same_shape(rep.analytic))
        throw std::logic_error("identity catalog shape mismatch for " + identity);
    double max_z = 0.0;
    for (std::size_t i = 0; i < rep.estimate.size(); ++i) {
        const double diff = rep.estimate.values()[i] - rep.analytic.values()[i];
        const double se = rep.std_error.values()[i];
        double z = 0.0;
        if (se > 0.0)
            z = std::abs(diff) / se;
        else if (diff != 0.0)
            z = std::numeric_limits<double>::infinity();
        max_z = std::max(max_z, z);
    }
    rep.max_abs_z = max_z;
    return rep;
}

}  // namespace tnk
