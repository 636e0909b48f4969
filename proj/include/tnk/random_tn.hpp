#ifndef TNK_RANDOM_TN_HPP
#define TNK_RANDOM_TN_HPP

#include "tnk/tn_graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tnk {

/// A network whose nodes are split into i.i.d. standard-normal tensors
/// (repeated occurrences of one name share one sample) and fixed bindings.
struct RandomSpec {
    TNGraph graph;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> random_nodes;  // name, shape
    Bindings fixed;

    /// Every name in the graph must be classified exactly once.
    void validate() const;
};

struct IdentityReport {
    Tensor estimate;
    Tensor analytic;
    Tensor std_error;
    double max_abs_z = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Deterministic N(0,1) tensor; entry e is a pure function of (seed, e).
Tensor gaussian_tensor(const std::vector<std::size_t>& shape, std::uint64_t seed);

/// Monte-Carlo mean and standard error of the contracted network over
/// independent joint samples of the random nodes. Entry streams are keyed by
/// (seed, sample, node, entry); the reduction is a pairwise tree by sample
/// index, so results are bit-identical regardless of evaluation order.
IdentityReport mc_expectation(const RandomSpec& spec, std::size_t samples, std::uint64_t seed);

/// Parameters for the closed-form identity catalog. `dims` is per identity:
///   gram_mean(m,n)  outer_pair(m,n)  frob_mean(shape...)  prod_norm(m,n,r)
///   gram_outer2(m,n)  ab_outer2(m,n,p)  trace_quartic(n; x = X)
///   chain_example(m1,m2,m3,r1,r2,d1,d2,d3)  isserlis4(sigma = Σ)
struct IdentityParams {
    std::vector<std::size_t> dims;
    std::optional<Tensor> sigma;  // isserlis4 covariance (symmetric PSD)
    std::optional<Tensor> x;      // trace_quartic deterministic matrix
};

/// Closed-form expectation of the identity's defining network.
Tensor analytic_expectation(const std::string& identity, const IdentityParams& p);

/// The defining network of a catalog identity.
RandomSpec identity_network(const std::string& identity, const IdentityParams& p);

/// Runs mc_expectation on the defining network and compares against the
/// closed form, reporting the largest per-entry |z| score.
IdentityReport verify_identity(const std::string& identity, const IdentityParams& p,
                               std::size_t samples, std::uint64_t seed);

}  // namespace tnk

#endif
