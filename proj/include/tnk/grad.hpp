#ifndef TNK_GRAD_HPP
#define TNK_GRAD_HPP

#include "tnk/tensor_train.hpp"
#include "tnk/tn_graph.hpp"

#include <string>
#include <vector>

namespace tnk {

/// Derivative of a network with respect to one tensor name, kept in network
/// form: one summand per occurrence of the name. In each summand the
/// occurrence is removed and its modes are exposed as fresh output labels
/// (appended after the original outputs, in mode order), wired to the rest
/// of the network through order-2 copy nodes bound to identity matrices.
struct JacobianNetwork {
    std::string wrt;
    std::vector<TNGraph> summands;
    std::vector<std::string> wire_names;   // per-mode copy-node names, shared by all summands
    std::vector<std::string> port_labels;  // appended output labels, in mode order
};

JacobianNetwork jacobian_wrt_node(const TNGraph& g, const std::string& name);

/// Contracts every summand and sums them. `bindings` must bind every original
/// name including `wrt` (its shape sizes the wiring identities). The result
/// has the original output modes first, then the named tensor's modes.
Tensor jacobian_contract(const JacobianNetwork& jn, const Bindings& bindings);

/// d(scalar network)/d(named tensor), summed over occurrences.
Tensor loss_gradient(const TNGraph& g, const Bindings& bindings, const std::string& name);

/// Central differences, entry by entry; layout matches jacobian_contract
/// (output modes first, then the named tensor's modes).
Tensor finite_diff_jacobian(const TNGraph& g, const Bindings& bindings, const std::string& name,
                            double step = 1e-5);

/// Gradient of <upstream, W x> with respect to MPO core k (1-based): the
/// backward pass of a TT-format linear layer. Modes are ordered
/// (R_{k-1}, I_k, R_k, J_k).
Tensor mpo_layer_grad(const MPO& w, const TT& x, const Tensor& upstream, std::size_t k);
Tensor mpo_layer_grad(const MPO& w, const Tensor& x, const Tensor& upstream, std::size_t k);

}  // namespace tnk

#endif
