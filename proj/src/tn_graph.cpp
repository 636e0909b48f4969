#include "tnk/tn_graph.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <unordered_map>

namespace tnk {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t col)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + msg),
      line_(line),
      col_(col) {}

namespace {

struct Scanner {
    const std::string& text;
    std::size_t pos = 0, line = 1, col = 1;

    explicit Scanner(const std::string& t) : text(t) {}

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < text.size()) {
            if (std::isspace(static_cast<unsigned char>(text[pos]))) {
                advance();
            } else if (text[pos] == '#') {
                while (pos < text.size() && text[pos] != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }

    std::string identifier() {
        skip_ws();
        if (pos >= text.size() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
            fail("expected identifier");
        std::string out;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            out += peek();
            advance();
        }
        return out;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    std::vector<std::string> label_list() {
        expect('[');
        std::vector<std::string> labels;
        if (!accept(']')) {
            labels.push_back(identifier());
            while (accept(',')) labels.push_back(identifier());
            expect(']');
        }
        return labels;
    }
};

}  // namespace

TNGraph parse_network(const std::string& text) {
    Scanner s(text);
    TNGraph g;
    std::unordered_map<std::string, std::size_t> arity;
    bool saw_arrow = false;
    while (!s.eof()) {
        s.skip_ws();
        if (s.peek() == '-') {
            s.advance();
            s.expect('>');
            g.output = s.label_list();
            saw_arrow = true;
            if (!s.eof()) s.fail("trailing input after output list");
            break;
        }
        std::string name = s.identifier();
        std::vector<std::string> legs = s.label_list();
        auto it = arity.find(name);
        if (it != arity.end() && it->second != legs.size())
            s.fail("tensor '" + name + "' reused with a different leg count");
        arity.emplace(name, legs.size());
        g.nodes.push_back(TNNode{std::move(name), std::move(legs)});
    }
    if (!saw_arrow) s.fail("missing '-> [...]' output list");
    if (g.nodes.empty()) s.fail("network has no tensors");

    std::set<std::string> outs;
    std::set<std::string> all_labels;
    for (const auto& n : g.nodes)
        for (const auto& l : n.legs) all_labels.insert(l);
    for (const auto& l : g.output) {
        if (!outs.insert(l).second) throw ParseError("duplicate output label '" + l + "'", 1, 1);
        if (!all_labels.count(l))
            throw ParseError("output label '" + l + "' not present in any tensor", 1, 1);
    }
    return g;
}

namespace {

[[noreturn]] void data_fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

BoundNetwork bind_network(const TNGraph& g, const Bindings& bindings) {
    BoundNetwork net;

    struct Port {
        int node;   // index into net.nodes (original nodes only at this point)
        int slot;   // leg position on that node
    };
    std::map<std::string, std::vector<Port>> ports;
    std::map<std::string, std::size_t> label_dim;

    for (std::size_t ni = 0; ni < g.nodes.size(); ++ni) {
        const TNNode& n = g.nodes[ni];
        auto it = bindings.find(n.name);
        if (it == bindings.end()) data_fail("no binding for tensor '" + n.name + "'");
        const Tensor& t = it->second;
        if (t.order() != n.legs.size())
            data_fail("tensor '" + n.name + "' has order " + std::to_string(t.order()) +
                      " but " + std::to_string(n.legs.size()) + " legs in the network");
        for (std::size_t k = 0; k < n.legs.size(); ++k) {
            const std::string& l = n.legs[k];
            auto [dit, inserted] = label_dim.emplace(l, t.dim(k));
            if (!inserted && dit->second != t.dim(k))
                data_fail("label '" + l + "' used with inconsistent dimensions");
            ports[l].push_back(Port{static_cast<int>(ni), static_cast<int>(k)});
        }
        net.nodes.push_back(BoundNode{t, std::vector<int>(n.legs.size(), -1), static_cast<int>(ni)});
    }

    std::set<std::string> out_set(g.output.begin(), g.output.end());
    std::map<std::string, int> output_leg_id;

    auto new_leg = [&](const std::string& label, std::size_t dim) {
        int id = static_cast<int>(net.leg_dim.size());
        net.leg_dim.push_back(dim);
        net.leg_label.push_back(label);
        return id;
    };

    for (auto& [label, plist] : ports) {
        const bool is_out = out_set.count(label) != 0;
        const std::size_t total_ports = plist.size() + (is_out ? 1 : 0);
        const std::size_t d = label_dim[label];
        if (total_ports == 1) data_fail("label '" + label + "' occurs once and is not an output");
        if (total_ports == 2) {
            int id = new_leg(label, d);
            for (const Port& p : plist) net.nodes[p.node].legs[p.slot] = id;
            if (is_out) output_leg_id[label] = id;
        } else {
            // hyperedge: insert a copy-tensor node with one leg per port
            BoundNode copy{copy_tensor(total_ports, d), {}, -1};
            for (const Port& p : plist) {
                int id = new_leg(label, d);
                net.nodes[p.node].legs[p.slot] = id;
                copy.legs.push_back(id);
            }
            if (is_out) {
                int id = new_leg(label, d);
                copy.legs.push_back(id);
                output_leg_id[label] = id;
            }
            net.nodes.push_back(std::move(copy));
        }
    }

    for (const auto& l : g.output) net.output.push_back(output_leg_id.at(l));
    return net;
}

BoundNode resolve_self_edges(const BoundNode& n) {
    BoundNode cur = n;
    for (;;) {
        bool traced = false;
        for (std::size_t a = 0; a < cur.legs.size() && !traced; ++a)
            for (std::size_t b = a + 1; b < cur.legs.size() && !traced; ++b)
                if (cur.legs[a] == cur.legs[b]) {
                    cur.tensor = partial_trace(cur.tensor, a + 1, b + 1);
                    std::vector<int> legs;
                    for (std::size_t k = 0; k < cur.legs.size(); ++k)
                        if (k != a && k != b) legs.push_back(cur.legs[k]);
                    cur.legs = std::move(legs);
                    traced = true;
                }
        if (!traced) return cur;
    }
}

BoundNode merge_nodes(const BoundNode& a, const BoundNode& b) {
    std::vector<int> shared;
    for (int l : a.legs)
        if (std::find(b.legs.begin(), b.legs.end(), l) != b.legs.end()) shared.push_back(l);
    std::sort(shared.begin(), shared.end());

    auto split_perm = [&](const BoundNode& n, bool shared_last) {
        std::vector<std::size_t> perm;
        std::vector<int> free_legs;
        std::vector<std::size_t> free_pos, shared_pos(shared.size());
        for (std::size_t k = 0; k < n.legs.size(); ++k) {
            auto it = std::find(shared.begin(), shared.end(), n.legs[k]);
            if (it == shared.end()) {
                free_pos.push_back(k + 1);
                free_legs.push_back(n.legs[k]);
            } else {
                shared_pos[static_cast<std::size_t>(it - shared.begin())] = k + 1;
            }
        }
        if (shared_last) {
            perm = free_pos;
            perm.insert(perm.end(), shared_pos.begin(), shared_pos.end());
        } else {
            perm = shared_pos;
            perm.insert(perm.end(), free_pos.begin(), free_pos.end());
        }
        return std::pair{perm, free_legs};
    };

    auto [pa, a_free] = split_perm(a, true);
    auto [pb, b_free] = split_perm(b, false);

    std::size_t shared_dim = 1;
    for (int l : shared) {
        auto it = std::find(a.legs.begin(), a.legs.end(), l);
        shared_dim *= a.tensor.dim(static_cast<std::size_t>(it - a.legs.begin()));
    }

    Tensor am = reshape(permute(a.tensor, pa), {a.tensor.size() / shared_dim, shared_dim});
    Tensor bm = reshape(permute(b.tensor, pb), {shared_dim, b.tensor.size() / shared_dim});
    Tensor prod = matmul(am, bm);

    std::vector<std::size_t> out_shape;
    std::vector<int> out_legs;
    auto push_dims = [&](const BoundNode& n, const std::vector<int>& free_legs) {
        for (int l : free_legs) {
            auto it = std::find(n.legs.begin(), n.legs.end(), l);
            out_shape.push_back(n.tensor.dim(static_cast<std::size_t>(it - n.legs.begin())));
            out_legs.push_back(l);
        }
    };
    push_dims(a, a_free);
    push_dims(b, b_free);
    return BoundNode{reshape(prod, out_shape), out_legs, std::min(a.origin, b.origin)};
}

namespace {

std::size_t merged_size(const BoundNode& a, const BoundNode& b,
                        const std::vector<std::size_t>& leg_dim) {
    std::size_t size = 1;
    for (std::size_t k = 0; k < a.legs.size(); ++k)
        if (std::find(b.legs.begin(), b.legs.end(), a.legs[k]) == b.legs.end())
            size *= leg_dim[a.legs[k]];
    for (std::size_t k = 0; k < b.legs.size(); ++k)
        if (std::find(a.legs.begin(), a.legs.end(), b.legs[k]) == a.legs.end())
            size *= leg_dim[b.legs[k]];
    return size;
}

}  // namespace

std::vector<MergeStep> contraction_order(const BoundNetwork& net) {
    std::vector<MergeStep> plan;
    // simulate on leg lists only
    std::vector<std::vector<int>> legs;
    for (const auto& n : net.nodes) {
        // self-edges disappear before planning
        std::vector<int> l;
        for (int x : resolve_self_edges(BoundNode{n.tensor, n.legs, n.origin}).legs) l.push_back(x);
        legs.push_back(std::move(l));
    }
    std::vector<bool> alive(net.nodes.size(), true);
    std::size_t remaining = net.nodes.size();
    while (remaining > 1) {
        std::size_t best_a = 0, best_b = 0;
        std::size_t best_size = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < legs.size(); ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < legs.size(); ++j) {
                if (!alive[j]) continue;
                std::size_t size = 1;
                for (int l : legs[i])
                    if (std::find(legs[j].begin(), legs[j].end(), l) == legs[j].end())
                        size *= net.leg_dim[l];
                for (int l : legs[j])
                    if (std::find(legs[i].begin(), legs[i].end(), l) == legs[i].end())
                        size *= net.leg_dim[l];
                if (size < best_size) {
                    best_size = size;
                    best_a = i;
                    best_b = j;
                }
            }
        }
        plan.push_back(MergeStep{best_a, best_b});
        std::vector<int> merged;
        for (int l : legs[best_a])
            if (std::find(legs[best_b].begin(), legs[best_b].end(), l) == legs[best_b].end())
                merged.push_back(l);
        for (int l : legs[best_b])
            if (std::find(legs[best_a].begin(), legs[best_a].end(), l) == legs[best_a].end())
                merged.push_back(l);
        legs[best_a] = std::move(merged);
        alive[best_b] = false;
        --remaining;
    }
    return plan;
}

Tensor contract_network(const BoundNetwork& net, ContractionStats* stats) {
    ContractionStats local;
    ContractionStats& st = stats ? *stats : local;

    std::vector<BoundNode> nodes;
    for (const auto& n : net.nodes) {
        nodes.push_back(resolve_self_edges(n));
        st.peak_intermediate = std::max(st.peak_intermediate, nodes.back().tensor.size());
    }

    std::vector<MergeStep> plan = contraction_order(net);
    std::vector<bool> alive(nodes.size(), true);
    for (const MergeStep& step : plan) {
        nodes[step.a] = merge_nodes(nodes[step.a], nodes[step.b]);
        alive[step.b] = false;
        st.peak_intermediate = std::max(st.peak_intermediate, nodes[step.a].tensor.size());
    }

    std::size_t root = 0;
    while (!alive[root]) ++root;
    BoundNode& result = nodes[root];

    if (result.legs.size() != net.output.size()) data_fail("internal: dangling non-output legs");
    std::vector<std::size_t> perm;
    for (int out : net.output) {
        auto it = std::find(result.legs.begin(), result.legs.end(), out);
        if (it == result.legs.end()) data_fail("internal: output leg missing from result");
        perm.push_back(static_cast<std::size_t>(it - result.legs.begin()) + 1);
    }
    return permute(result.tensor, perm);
}

Tensor contract(const TNGraph& g, const Bindings& bindings, ContractionStats* stats) {
    return contract_network(bind_network(g, bindings), stats);
}

CutBoundResult rank_bound(const BoundNetwork& net, const std::vector<std::string>& row_labels) {
    const std::size_t n = net.nodes.size();
    if (n > 20) data_fail("rank_bound supports at most 20 nodes");

    std::set<std::string> rows(row_labels.begin(), row_labels.end());
    for (const auto& l : rows) {
        bool found = false;
        for (int id : net.output)
            if (net.leg_label[id] == l) found = true;
        if (!found) data_fail("row label '" + l + "' is not an output label");
    }

    // which node carries each output leg, and which side it is forced to
    std::vector<int> forced(n, -1);  // -1 free, 0 row side, 1 column side
    bool impossible = false;
    std::size_t prod_rows = 1, prod_cols = 1;
    for (int id : net.output) {
        const int side = rows.count(net.leg_label[id]) ? 0 : 1;
        (side == 0 ? prod_rows : prod_cols) *= net.leg_dim[id];
        for (std::size_t ni = 0; ni < n; ++ni)
            if (std::find(net.nodes[ni].legs.begin(), net.nodes[ni].legs.end(), id) !=
                net.nodes[ni].legs.end()) {
                if (forced[ni] == -1) forced[ni] = side;
                else if (forced[ni] != side) impossible = true;
            }
    }

    CutBoundResult res;
    if (impossible) {
        res.bound = std::min(prod_rows, prod_cols);
        res.witness.assign(n, 0);
        res.degenerate = true;
        return res;
    }

    // gather internal edges: leg id -> the two nodes carrying it
    struct Edge {
        std::size_t u, v, dim;
    };
    std::vector<Edge> edges;
    for (std::size_t id = 0; id < net.leg_dim.size(); ++id) {
        if (std::find(net.output.begin(), net.output.end(), static_cast<int>(id)) != net.output.end())
            continue;
        std::vector<std::size_t> holders;
        for (std::size_t ni = 0; ni < n; ++ni)
            for (int l : net.nodes[ni].legs)
                if (l == static_cast<int>(id)) holders.push_back(ni);
        if (holders.size() == 2 && holders[0] != holders[1])
            edges.push_back(Edge{holders[0], holders[1], net.leg_dim[id]});
        // self-edges (both holders equal) never cross a cut
    }

    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool valid = true;
        for (std::size_t ni = 0; ni < n && valid; ++ni) {
            const int side = (mask >> ni) & 1u;  // 0 = row side
            if (forced[ni] != -1 && forced[ni] != side) valid = false;
        }
        if (!valid) continue;
        std::size_t w = 1;
        for (const Edge& e : edges)
            if (((mask >> e.u) & 1u) != ((mask >> e.v) & 1u)) w *= e.dim;
        if (w < best) {
            best = w;
            best_mask = mask;
        }
    }

    res.bound = best;
    res.witness.resize(n);
    for (std::size_t ni = 0; ni < n; ++ni) res.witness[ni] = (best_mask >> ni) & 1u ? 1 : 0;
    return res;
}

CutBoundResult rank_bound(const TNGraph& g, const Bindings& bindings,
                          const std::vector<std::string>& row_labels) {
    return rank_bound(bind_network(g, bindings), row_labels);
}

}  // namespace tnk
