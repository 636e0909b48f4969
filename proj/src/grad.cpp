#include "tnk/grad.hpp"

#include <set>
#include <stdexcept>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

JacobianNetwork jacobian_wrt_node(const TNGraph& g, const std::string& name) {
    std::vector<std::size_t> occ;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i].name == name) occ.push_back(i);
    if (occ.empty()) fail("jacobian: unknown tensor name: " + name);
    const std::size_t arity = g.nodes[occ.front()].legs.size();

    // Wiring node / port names must not collide with anything in the graph.
    std::set<std::string> used;
    for (const TNNode& n : g.nodes) {
        used.insert(n.name);
        used.insert(n.legs.begin(), n.legs.end());
    }
    used.insert(g.output.begin(), g.output.end());
    std::string prefix = "_";
    auto clashes = [&]() {
        for (std::size_t j = 1; j <= arity; ++j)
            if (used.count(prefix + "d" + std::to_string(j)) ||
                used.count(prefix + "p" + std::to_string(j)))
                return true;
        return false;
    };
    while (clashes()) prefix += "_";

    JacobianNetwork jn;
    jn.wrt = name;
    for (std::size_t j = 1; j <= arity; ++j) {
        jn.wire_names.push_back(prefix + "d" + std::to_string(j));
        jn.port_labels.push_back(prefix + "p" + std::to_string(j));
    }

    for (std::size_t o : occ) {
        TNGraph s;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            if (i != o) s.nodes.push_back(g.nodes[i]);
        // Each removed leg keeps its label on a wiring node, so edges to the
        // rest of the network (including hyperedges and self-edges) survive;
        // the fresh port label becomes the appended output.
        for (std::size_t j = 0; j < arity; ++j)
            s.nodes.push_back(TNNode{jn.wire_names[j], {g.nodes[o].legs[j], jn.port_labels[j]}});
        s.output = g.output;
        s.output.insert(s.output.end(), jn.port_labels.begin(), jn.port_labels.end());
        jn.summands.push_back(std::move(s));
    }
    return jn;
}

Tensor jacobian_contract(const JacobianNetwork& jn, const Bindings& bindings) {
    auto it = bindings.find(jn.wrt);
    if (it == bindings.end()) fail("jacobian_contract: missing binding for " + jn.wrt);
    const Tensor& w = it->second;
    if (w.order() != jn.port_labels.size())
        fail("jacobian_contract: binding order does not match the network arity of " + jn.wrt);

    Bindings ext = bindings;
    for (std::size_t j = 0; j < jn.wire_names.size(); ++j)
        ext.emplace(jn.wire_names[j], identity_matrix(w.dim(j)));

    Tensor sum;
    bool first = true;
    for (const TNGraph& s : jn.summands) {
        Tensor t = s.nodes.empty() ? Tensor::scalar(1.0) : contract(s, ext);
        sum = first ? std::move(t) : add(sum, t);
        first = false;
    }
    return sum;
}

Tensor loss_gradient(const TNGraph& g, const Bindings& bindings, const std::string& name) {
    if (!g.output.empty()) fail("loss_gradient requires a network with scalar output");
    return jacobian_contract(jacobian_wrt_node(g, name), bindings);
}

Tensor finite_diff_jacobian(const TNGraph& g, const Bindings& bindings, const std::string& name,
                            double step) {
    if (step <= 0.0) fail("finite_diff_jacobian step must be positive");
    auto it = bindings.find(name);
    if (it == bindings.end()) fail("finite_diff_jacobian: missing binding for " + name);
    const Tensor base = it->second;

    Tensor probe = contract(g, bindings);
    std::vector<std::size_t> shape = probe.shape();
    shape.insert(shape.end(), base.shape().begin(), base.shape().end());
    Tensor out = Tensor::zeros(shape);

    const std::size_t m = base.size();
    Bindings b = bindings;
    for (std::size_t e = 0; e < m; ++e) {
        Tensor plus = base;
        plus.mutable_values()[e] += step;
        b.at(name) = plus;
        Tensor fp = contract(g, b);
        Tensor minus = base;
        minus.mutable_values()[e] -= step;
        b.at(name) = minus;
        Tensor fm = contract(g, b);
        for (std::size_t r = 0; r < fp.size(); ++r)
            out.mutable_values()[r * m + e] = (fp.values()[r] - fm.values()[r]) / (2.0 * step);
    }
    return out;
}

namespace {

Tensor one_vector() { return Tensor({1}, {1.0}); }

std::string num(std::size_t k) { return std::to_string(k); }

Tensor layer_grad_impl(const MPO& w, const std::vector<TNNode>& x_nodes, const Bindings& x_bind,
                       const Tensor& upstream, std::size_t k) {
    w.validate();
    const std::size_t n = w.sites();
    if (k < 1 || k > n) fail("mpo_layer_grad: core index out of range");
    if (upstream.shape() != w.row_dims())
        fail("mpo_layer_grad: upstream gradient shape must match the operator row dims");

    TNGraph g;
    Bindings b = x_bind;

    std::vector<std::string> u_legs;
    for (std::size_t s = 1; s <= n; ++s) u_legs.push_back("i" + num(s));
    g.nodes.push_back(TNNode{"U", u_legs});
    b.emplace("U", upstream);

    for (std::size_t s = 1; s <= n; ++s) {
        g.nodes.push_back(
            TNNode{"W" + num(s), {"r" + num(s - 1), "i" + num(s), "j" + num(s), "r" + num(s)}});
        b.emplace("W" + num(s), w.cores[s - 1]);
    }
    g.nodes.push_back(TNNode{"bl", {"r0"}});
    g.nodes.push_back(TNNode{"br", {"r" + num(n)}});
    b.emplace("bl", one_vector());
    b.emplace("br", one_vector());

    for (const TNNode& node : x_nodes) g.nodes.push_back(node);

    Tensor grad = loss_gradient(g, b, "W" + num(k));  // (R_{k-1}, I_k, J_k, R_k)
    return permute(grad, {1, 2, 4, 3});
}

}  // namespace

Tensor mpo_layer_grad(const MPO& w, const TT& x, const Tensor& upstream, std::size_t k) {
    x.validate();
    if (x.dims() != w.col_dims())
        fail("mpo_layer_grad: input dims must match the operator column dims");
    std::vector<TNNode> nodes;
    Bindings b;
    for (std::size_t s = 1; s <= x.sites(); ++s) {
        nodes.push_back(TNNode{"X" + num(s), {"s" + num(s - 1), "j" + num(s), "s" + num(s)}});
        b.emplace("X" + num(s), x.cores[s - 1]);
    }
    nodes.push_back(TNNode{"cl", {"s0"}});
    nodes.push_back(TNNode{"cr", {"s" + num(x.sites())}});
    b.emplace("cl", one_vector());
    b.emplace("cr", one_vector());
    return layer_grad_impl(w, nodes, b, upstream, k);
}

Tensor mpo_layer_grad(const MPO& w, const Tensor& x, const Tensor& upstream, std::size_t k) {
    if (x.shape() != w.col_dims())
        fail("mpo_layer_grad: input shape must match the operator column dims");
    std::vector<std::string> legs;
    for (std::size_t s = 1; s <= w.sites(); ++s) legs.push_back("j" + num(s));
    std::vector<TNNode> nodes{TNNode{"X", legs}};
    Bindings b;
    b.emplace("X", x);
    return layer_grad_impl(w, nodes, b, upstream, k);
}

}  // namespace tnk
