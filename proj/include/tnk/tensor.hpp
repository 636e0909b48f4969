#ifndef TNK_TENSOR_HPP
#define TNK_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnk {

/// Dense N-way array of doubles in lexicographic (row-major) layout:
/// the last index varies fastest. Order 0 is a scalar holding one value.
/// Tensors are immutable value types once constructed; all operations
/// below are pure functions returning new tensors.
class Tensor {
public:
    Tensor() : shape_{}, values_{0.0} {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor scalar(double v);
    static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values) {
        return Tensor(std::move(shape), std::move(values));
    }

    std::size_t order() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t dim(std::size_t k) const { return shape_.at(k); }
    std::size_t size() const { return values_.size(); }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    /// Flat offset of a 0-based multi-index.
    std::size_t offset(std::span<const std::size_t> idx) const;

    double at(std::span<const std::size_t> idx) const { return values_[offset(idx)]; }
    double at(std::initializer_list<std::size_t> idx) const {
        return at(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    double& at_ref(std::span<const std::size_t> idx) { return values_[offset(idx)]; }

    /// Inverse of offset(): recovers the multi-index of a flat position.
    std::vector<std::size_t> unravel(std::size_t flat) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

using ModeList = std::vector<std::size_t>;

/// Strictly ascending list of 1-based mode indices, validated against an order.
class ModeSet {
public:
    ModeSet(std::vector<std::size_t> modes, std::size_t order);
    const std::vector<std::size_t>& modes() const { return modes_; }
    bool contains(std::size_t mode) const;

private:
    std::vector<std::size_t> modes_;
};

std::size_t product(std::span<const std::size_t> dims);

// --- elementwise / plumbing ---
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor hadamard(const Tensor& a, const Tensor& b);

// --- index-level algebra ---
/// perm is 1-based: out index position k reads input mode perm[k-1].
Tensor permute(const Tensor& t, const std::vector<std::size_t>& perm);
Tensor reshape(const Tensor& t, std::vector<std::size_t> new_shape);

/// Rows indexed lexicographically by the modes in I (ascending), columns by
/// the remaining modes (ascending).
Tensor matricize(const Tensor& t, const ModeSet& row_modes);
Tensor vectorize(const Tensor& t);

/// Contracts matrix m (shape out_dim x t.shape[n-1]) along mode n (1-based).
Tensor mode_n_matrix_product(const Tensor& t, const Tensor& m, std::size_t n);
/// Contracts vector v along mode n; the mode is dropped.
Tensor mode_n_vector_product(const Tensor& t, const Tensor& v, std::size_t n);

double inner(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& t);
Tensor outer(const Tensor& a, const Tensor& b);

/// Sums out two equal-dimension modes (1-based). Full trace when order 2.
Tensor partial_trace(const Tensor& t, std::size_t m1, std::size_t m2);

Tensor kronecker(const Tensor& a, const Tensor& b);
Tensor khatri_rao(const Tensor& a, const Tensor& b);

/// Generalized Kronecker delta: 1 iff all indices coincide.
Tensor copy_tensor(std::size_t order, std::size_t dim);

Tensor diag_embed(const Tensor& v);
Tensor diag_extract(const Tensor& a);

/// Evaluates the multilinear form T x_1 x ... x_N x. With homogeneous=false
/// all modes of T must equal x.size()+1 and a constant 1 is appended to x.
double poly_eval(const Tensor& t, const Tensor& x, bool homogeneous = true);

/// Fixes mode n (1-based) at index i, dropping the mode.
Tensor fix_mode(const Tensor& t, std::size_t n, std::size_t i);
/// Mode-n fiber: every index fixed except mode n.
Tensor fiber(const Tensor& t, std::size_t n, const std::vector<std::size_t>& fixed);
/// Slice with modes n1 < n2 free, everything else fixed.
Tensor slice(const Tensor& t, std::size_t n1, std::size_t n2, const std::vector<std::size_t>& fixed);

Tensor transpose(const Tensor& a);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor identity_matrix(std::size_t n);

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace tnk

#endif
