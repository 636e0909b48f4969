#ifndef TNK_TN_GRAPH_HPP
#define TNK_TN_GRAPH_HPP

#include "tnk/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace tnk {

/// One tensor occurrence in a network. The same name may appear on several
/// nodes; all occurrences share one binding.
struct TNNode {
    std::string name;
    std::vector<std::string> legs;
};

/// Tensor network skeleton: nodes in appearance order plus the ordered list
/// of dangling (output) labels. Edges are implied by shared labels; a label
/// carried by three or more ports denotes a hyperedge and is lowered to an
/// explicit copy-tensor node at bind time.
struct TNGraph {
    std::vector<TNNode> nodes;
    std::vector<std::string> output;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t col);
    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    std::size_t line_, col_;
};

/// Grammar: `Name[l1,l2,...]` terms separated by whitespace, then
/// `-> [out1,...]`. `#` starts a line comment.
TNGraph parse_network(const std::string& text);

using Bindings = std::map<std::string, Tensor>;

/// Bound, lowered network. Hyperedges have been replaced by copy-tensor
/// nodes, so every leg id occurs exactly twice across node legs and the
/// output list.
struct BoundNode {
    Tensor tensor;
    std::vector<int> legs;
    int origin;  // index into TNGraph::nodes, or -1 for an inserted copy node
};

struct BoundNetwork {
    std::vector<BoundNode> nodes;
    std::vector<int> output;
    std::vector<std::size_t> leg_dim;       // indexed by leg id
    std::vector<std::string> leg_label;     // original label, for diagnostics
};

BoundNetwork bind_network(const TNGraph& g, const Bindings& bindings);

struct ContractionStats {
    std::size_t peak_intermediate = 0;  // largest tensor materialized
};

struct MergeStep {
    std::size_t a, b;  // node ids merged; the result keeps id a
};

/// Greedy plan: repeatedly merge the pair whose result has minimal total
/// size; ties broken by smallest (id, id). Deterministic.
std::vector<MergeStep> contraction_order(const BoundNetwork& net);

Tensor contract_network(const BoundNetwork& net, ContractionStats* stats = nullptr);
Tensor contract(const TNGraph& g, const Bindings& bindings, ContractionStats* stats = nullptr);

/// Contracts two bound nodes over their shared legs (outer product if none).
BoundNode merge_nodes(const BoundNode& a, const BoundNode& b);

/// Sums out repeated leg ids within one node (self-edges).
BoundNode resolve_self_edges(const BoundNode& n);

struct CutBoundResult {
    std::size_t bound = 0;
    std::vector<int> witness;  // side (0 = row side) per lowered node
    bool degenerate = false;   // no bipartition separates the two leg sets
};

/// Cut-based upper bound on rank(matricize(contract(g), I)): minimum over
/// node bipartitions separating the I output legs from the rest of the
/// product of crossing edge dimensions. Exhaustive search, node count <= 20.
CutBoundResult rank_bound(const BoundNetwork& net, const std::vector<std::string>& row_labels);
CutBoundResult rank_bound(const TNGraph& g, const Bindings& bindings,
                          const std::vector<std::string>& row_labels);

}  // namespace tnk

#endif
