#ifndef TNK_DECOMP_HPP
#define TNK_DECOMP_HPP

#include "tnk/tensor.hpp"

#include <optional>
#include <vector>

namespace tnk {

/// CP model: N factor matrices d_n x R sharing the column count R.
struct CPForm {
    std::vector<Tensor> factors;

    std::size_t rank() const;
    std::size_t order() const { return factors.size(); }
    void validate() const;
};

Tensor cp_reconstruct(const CPForm& c);

/// Mode-n unfolding of the reconstruction without materializing it:
/// A_n (A_1 ⊙ ... skip n ... ⊙ A_N)^T.
Tensor cp_unfold(const CPForm& c, std::size_t n);

struct CPFitOptions {
    std::size_t max_iters = 5000;
    double tol = 1e-10;          // relative loss change stopping criterion
    double initial_step = 0.1;   // backtracking start
    std::uint64_t seed = 0;
};

struct CPFitResult {
    CPForm form;
    std::vector<double> loss_trace;  // squared Frobenius loss per accepted step
    bool converged = false;
    std::size_t iters = 0;
};

/// Gradient descent on ||T - [[G_1..G_N]]||_F^2 with Armijo backtracking.
/// Factors initialized i.i.d. uniform(-1,1) from the seed.
CPFitResult cp_fit_gd(const Tensor& t, std::size_t rank, const CPFitOptions& opts = {});

/// Gradient of the CP reconstruction loss with respect to each factor.
std::vector<Tensor> cp_loss_gradient(const Tensor& t, const CPForm& c);

/// Tucker model: core R_1 x ... x R_N plus factor matrices d_n x R_n.
struct TuckerForm {
    Tensor core;
    std::vector<Tensor> factors;
    std::vector<bool> orthogonal;             // per-factor flag
    std::vector<double> discarded_sigma_sq;   // per-mode truncated singular mass (HOSVD only)

    void validate() const;
};

struct HosvdOptions {
    std::optional<std::vector<std::size_t>> rank_caps;  // per-mode
    double tol = 0.0;  // relative singular value cutoff per mode
};

/// Higher-order SVD: factor n = leading left singular vectors of the mode-n
/// matricization, core = T x_1 U_1^T ... x_N U_N^T.
TuckerForm hosvd(const Tensor& t, const HosvdOptions& opts = {});

Tensor tucker_reconstruct(const TuckerForm& t);

std::vector<std::size_t> multilinear_rank(const Tensor& t);

/// QR-orthogonalizes every factor, absorbing the R parts into the core.
TuckerForm tucker_orthogonalize(const TuckerForm& t);

}  // namespace tnk

#endif
