#ifndef TNK_TENSOR_TRAIN_HPP
#define TNK_TENSOR_TRAIN_HPP

#include "tnk/tensor.hpp"

#include <optional>
#include <vector>

namespace tnk {

/// Tensor train: order-3 cores R_{n-1} x d_n x R_n with boundary ranks 1.
/// `center`, when set, is the 1-based orthogonality center: cores left of it
/// are left-orthogonal and cores right of it are right-orthogonal.
struct TT {
    std::vector<Tensor> cores;
    std::optional<std::size_t> center;

    std::size_t sites() const { return cores.size(); }
    std::vector<std::size_t> dims() const;
    /// Internal bond dimensions R_1..R_{N-1}.
    std::vector<std::size_t> ranks() const;
    void validate() const;
};

struct TTSvdOptions {
    std::optional<std::vector<std::size_t>> rank_caps;  // R_1..R_{N-1}
    double tol = 0.0;  // relative reconstruction error target
};

/// Successive-SVD decomposition; with tol = 0 and no caps the ranks equal
/// the numerical ranks of the prefix matricizations. The per-step truncation
/// budget is tol * ||T|| / sqrt(N-1).
TT tt_svd(const Tensor& t, const TTSvdOptions& opts = {});

Tensor tt_reconstruct(const TT& t);
double tt_entry(const TT& t, const std::vector<std::size_t>& idx);

/// Left-orthogonality test for core n (1-based): columns of the (R d) x R'
/// unfolding orthonormal. Right-orthogonality: rows of R x (d R') unfolding.
bool core_left_orthogonal(const Tensor& core, double tol = 1e-10);
bool core_right_orthogonal(const Tensor& core, double tol = 1e-10);

/// QR sweeps establishing canonical form with respect to core j.
TT tt_canonicalize(const TT& t, std::size_t j);

struct TTAlsResult {
    TT tt;
    std::vector<double> loss_trace;  // squared loss after each core update
};

/// Single-site TT-ALS: left-to-right then right-to-left half-sweeps; each
/// update is the orthogonal projection onto the fixed environment.
TTAlsResult tt_als_fit(const Tensor& t, const std::vector<std::size_t>& ranks,
                       std::size_t sweeps, std::uint64_t seed);

/// Rank reduction: right-to-left QR orthogonalization followed by a
/// left-to-right truncated-SVD sweep; equivalent to TT-SVD of the dense
/// reconstruction.
TT tt_round(const TT& t, const TTSvdOptions& opts = {});

TT tt_add(const TT& a, const TT& b);
TT tt_scale(const TT& a, double c);
TT tt_hadamard(const TT& a, const TT& b);

struct TTInnerStats {
    std::size_t peak_intermediate = 0;
};

/// Zipper-order inner product; peak intermediate is O(R^2 d).
double tt_inner(const TT& a, const TT& b, TTInnerStats* stats = nullptr);
double tt_norm(const TT& a);
double tt_sum_entries(const TT& a);

/// Random TT with the given physical dims and internal ranks, entries
/// uniform(-1,1) from the seed.
TT tt_random(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ranks,
             std::uint64_t seed);

/// Matrix product operator: order-4 cores R_{n-1} x I_n x J_n x R_n.
struct MPO {
    std::vector<Tensor> cores;

    std::size_t sites() const { return cores.size(); }
    std::vector<std::size_t> row_dims() const;
    std::vector<std::size_t> col_dims() const;
    std::vector<std::size_t> ranks() const;
    void validate() const;
};

/// Decomposes a matrix of shape (prod row_dims) x (prod col_dims) into an
/// MPO by grouping (i_k, j_k) per site (row index slower) and running TT-SVD.
MPO mpo_from_dense(const Tensor& m, const std::vector<std::size_t>& row_dims,
                   const std::vector<std::size_t>& col_dims, double tol = 0.0);

Tensor mpo_reconstruct(const MPO& m);

/// TT-format matrix-vector product; output ranks are products R_k S_k.
TT mpo_matvec(const MPO& m, const TT& v);

MPO mpo_random(const std::vector<std::size_t>& row_dims, const std::vector<std::size_t>& col_dims,
               const std::vector<std::size_t>& ranks, std::uint64_t seed);

}  // namespace tnk

#endif
