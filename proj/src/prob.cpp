#include "tnk/prob.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr double kMassTol = 1e-10;

std::string index_string(const std::vector<std::size_t>& idx) {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
    os << ")";
    return os.str();
}

}  // namespace

ProbTensor prob_validate(const Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.values()[i] < 0.0)
            fail("probability tensor has a negative entry at " + index_string(t.unravel(i)));
    double sum = 0.0;
    for (double v : t.values()) sum += v;
    if (std::abs(sum - 1.0) > kMassTol)
        fail("probability tensor mass deviates from one: sum = " + std::to_string(sum));
    return ProbTensor{t};
}

ProbTensor marginal(const ProbTensor& p, const ModeSet& keep) {
    const std::size_t n = p.t.order();
    const ModeSet ks(keep.modes(), n);  // revalidate against this tensor's order
    if (ks.modes().empty()) fail("marginal needs at least one kept mode");

    std::vector<std::size_t> out_shape;
    for (std::size_t m : ks.modes()) out_shape.push_back(p.t.dim(m - 1));
    Tensor out = Tensor::zeros(out_shape);

    for (std::size_t flat = 0; flat < p.t.size(); ++flat) {
        const std::vector<std::size_t> idx = p.t.unravel(flat);
        std::size_t pos = 0;
        for (std::size_t k = 0; k < ks.modes().size(); ++k)
            pos = pos * out_shape[k] + idx[ks.modes()[k] - 1];
        out.mutable_values()[pos] += p.t.values()[flat];
    }
    return prob_validate(out);
}

ProbTensor conditional(const ProbTensor& p, const std::map<std::size_t, std::size_t>& given) {
    const std::size_t n = p.t.order();
    for (const auto& [mode, value] : given) {
        if (mode < 1 || mode > n) fail("conditional: mode out of range");
        if (value >= p.t.dim(mode - 1)) fail("conditional: index out of range for mode");
    }

    std::vector<std::size_t> free_modes, out_shape;
    for (std::size_t m = 1; m <= n; ++m)
        if (!given.count(m)) {
            free_modes.push_back(m);
            out_shape.push_back(p.t.dim(m - 1));
        }

    Tensor out = Tensor::zeros(out_shape);
    double total = 0.0;
    for (std::size_t flat = 0; flat < p.t.size(); ++flat) {
        const std::vector<std::size_t> idx = p.t.unravel(flat);
        bool match = true;
        for (const auto& [mode, value] : given)
            if (idx[mode - 1] != value) {
                match = false;
                break;
            }
        if (!match) continue;
        std::size_t pos = 0;
        for (std::size_t k = 0; k < free_modes.size(); ++k)
            pos = pos * out_shape[k] + idx[free_modes[k] - 1];
        out.mutable_values()[pos] += p.t.values()[flat];
        total += p.t.values()[flat];
    }
    if (total <= 0.0) fail("conditional: conditioning event has zero probability");
    return prob_validate(scale(out, 1.0 / total));
}

namespace {

// row (length R^2) times the site transfer restricted to physical index i;
// transfer[(r1 r2), (c1 c2)] = G[r1,i,c1] G[r2,i,c2].
std::vector<double> apply_site(const std::vector<double>& row, const Tensor& g, std::size_t i) {
    const std::size_t r = g.dim(0), d = g.dim(1), rp = g.dim(2);
    std::vector<double> out(rp * rp, 0.0);
    for (std::size_t r1 = 0; r1 < r; ++r1)
        for (std::size_t c1 = 0; c1 < rp; ++c1) {
            const double a = g.values()[(r1 * d + i) * rp + c1];
            if (a == 0.0) continue;
            for (std::size_t r2 = 0; r2 < r; ++r2) {
                const double w = a * row[r1 * r + r2];
                if (w == 0.0) continue;
                for (std::size_t c2 = 0; c2 < rp; ++c2)
                    out[c1 * rp + c2] += w * g.values()[(r2 * d + i) * rp + c2];
            }
        }
    return out;
}

std::vector<double> apply_site_summed(const std::vector<double>& row, const Tensor& g) {
    const std::size_t rp = g.dim(2);
    std::vector<double> out(rp * rp, 0.0);
    for (std::size_t i = 0; i < g.dim(1); ++i) {
        std::vector<double> part = apply_site(row, g, i);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += part[k];
    }
    return out;
}

}  // namespace

double born_normalizer(const BornMachine& b) {
    if (b.zeta) return *b.zeta;
    b.tt.validate();
    std::vector<double> v{1.0};
    for (const Tensor& g : b.tt.cores) v = apply_site_summed(v, g);
    b.zeta = v[0];
    return v[0];
}

double born_prob(const BornMachine& b, const std::vector<std::size_t>& idx) {
    const double zeta = born_normalizer(b);
    if (!(zeta > 0.0)) throw std::runtime_error("born_prob: normalizer is not positive");
    const double a = tt_entry(b.tt, idx);
    return a * a / zeta;
}

Tensor born_marginal(const BornMachine& b, const ModeSet& keep) {
    b.tt.validate();
    const std::vector<std::size_t> dims = b.tt.dims();
    const ModeSet ks(keep.modes(), dims.size());
    if (ks.modes().empty()) fail("born_marginal needs at least one kept mode");

    double cells = 1.0;
    std::vector<std::size_t> out_shape;
    for (std::size_t m : ks.modes()) {
        out_shape.push_back(dims[m - 1]);
        cells *= static_cast<double>(dims[m - 1]);
    }
    if (cells > 1e6) fail("born_marginal: kept modes exceed the materialization cap");

    const double zeta = born_normalizer(b);
    if (!(zeta > 0.0)) throw std::runtime_error("born_marginal: normalizer is not positive");

    // One row per assignment of the kept indices seen so far, in row-major
    // (earlier kept mode slower) order.
    std::vector<std::vector<double>> state{{1.0}};
    for (std::size_t s = 1; s <= dims.size(); ++s) {
        const Tensor& g = b.tt.cores[s - 1];
        if (ks.contains(s)) {
            std::vector<std::vector<double>> next;
            next.reserve(state.size() * g.dim(1));
            for (const std::vector<double>& row : state)
                for (std::size_t i = 0; i < g.dim(1); ++i) next.push_back(apply_site(row, g, i));
            state = std::move(next);
        } else {
            for (std::vector<double>& row : state) row = apply_site_summed(row, g);
        }
    }

    Tensor out = Tensor::zeros(out_shape);
    for (std::size_t j = 0; j < state.size(); ++j) {
        double v = state[j][0] / zeta;
        if (v < 0.0 && v > -1e-12) v = 0.0;  // exact zeros may round just below zero
        out.mutable_values()[j] = v;
    }
    return prob_validate(out).t;
}

}  // namespace tnk
