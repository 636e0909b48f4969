#ifndef TNK_LINALG_HPP
#define TNK_LINALG_HPP

#include "tnk/tensor.hpp"

namespace tnk {

/// Relative singular value threshold used for numerical rank everywhere:
/// sigma_i counts iff sigma_i > kRankTol * sigma_1.
inline constexpr double kRankTol = 1e-12;

struct SvdResult {
    Tensor u;                     // m x r
    std::vector<double> sigma;    // r values, descending
    Tensor vt;                    // r x n
};

/// Thin SVD with a deterministic sign convention: each left singular vector
/// is scaled so its largest-magnitude entry (lowest index on ties) is
/// positive. Returned rank is min(m, n); use truncate helpers below.
SvdResult svd(const Tensor& a);

struct QrResult {
    Tensor q;  // m x r, orthonormal columns
    Tensor r;  // r x n
};

/// Thin QR; r = min(m, n). Deterministic sign: diagonal of R nonnegative.
QrResult qr(const Tensor& a);

std::size_t numerical_rank(const std::vector<double>& sigma, double rel_tol = kRankTol);
std::size_t numerical_rank(const Tensor& a, double rel_tol = kRankTol);

/// Symmetric PSD square root via eigendecomposition.
Tensor sqrt_psd(const Tensor& a);

}  // namespace tnk

#endif
