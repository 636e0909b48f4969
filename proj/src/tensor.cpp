#include "tnk/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_mode(std::size_t n, std::size_t order) {
    if (n < 1 || n > order)
        fail("mode " + std::to_string(n) + " out of range for order " + std::to_string(order));
}

}  // namespace

std::size_t product(std::span<const std::size_t> dims) {
    std::size_t p = 1;
    for (auto d : dims) p *= d;
    return p;
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    for (auto d : shape_)
        if (d == 0) fail("tensor dimensions must be positive");
    if (values_.size() != product(shape_))
        fail("value count " + std::to_string(values_.size()) + " does not match shape product " +
             std::to_string(product(shape_)));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    std::size_t n = product(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

std::size_t Tensor::offset(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size()) fail("index arity does not match tensor order");
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        if (idx[k] >= shape_[k]) fail("index out of range");
        off = off * shape_[k] + idx[k];
    }
    return off;
}

std::vector<std::size_t> Tensor::unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t k = shape_.size(); k-- > 0;) {
        idx[k] = flat % shape_[k];
        flat /= shape_[k];
    }
    return idx;
}

ModeSet::ModeSet(std::vector<std::size_t> modes, std::size_t order) : modes_(std::move(modes)) {
    if (modes_.empty()) fail("mode set must be nonempty");
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        check_mode(modes_[k], order);
        if (k > 0 && modes_[k] <= modes_[k - 1]) fail("mode set must be strictly ascending");
    }
}

bool ModeSet::contains(std::size_t mode) const {
    return std::binary_search(modes_.begin(), modes_.end(), mode);
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) fail("shape mismatch in add");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] + b.values()[i];
    return Tensor::from_values(a.shape(), std::move(v));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) fail("shape mismatch in sub");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] - b.values()[i];
    return Tensor::from_values(a.shape(), std::move(v));
}

Tensor scale(const Tensor& a, double c) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a.values()[i];
    return Tensor::from_values(a.shape(), std::move(v));
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) fail("shape mismatch in hadamard");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] * b.values()[i];
    return Tensor::from_values(a.shape(), std::move(v));
}

Tensor permute(const Tensor& t, const std::vector<std::size_t>& perm) {
    const std::size_t n = t.order();
    if (perm.size() != n) fail("permutation length does not match tensor order");
    std::vector<bool> seen(n, false);
    for (auto p : perm) {
        check_mode(p, n);
        if (seen[p - 1]) fail("repeated mode in permutation");
        seen[p - 1] = true;
    }
    std::vector<std::size_t> new_shape(n);
    for (std::size_t k = 0; k < n; ++k) new_shape[k] = t.dim(perm[k] - 1);

    // strides of the input, addressed through perm
    std::vector<std::size_t> in_strides(n, 1);
    for (std::size_t k = n; k-- > 1;) in_strides[k - 1] = in_strides[k] * t.dim(k);

    Tensor out = Tensor::zeros(new_shape);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t src = 0;
        for (std::size_t k = 0; k < n; ++k) src += idx[k] * in_strides[perm[k] - 1];
        out.mutable_values()[flat] = t.values()[src];
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < new_shape[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

Tensor reshape(const Tensor& t, std::vector<std::size_t> new_shape) {
    if (product(new_shape) != t.size()) fail("reshape changes element count");
    return Tensor::from_values(std::move(new_shape), t.values());
}

Tensor matricize(const Tensor& t, const ModeSet& row_modes) {
    const std::size_t n = t.order();
    if (n == 0) fail("cannot matricize a scalar");
    std::vector<std::size_t> perm;
    perm.reserve(n);
    for (auto m : row_modes.modes()) perm.push_back(m);
    for (std::size_t m = 1; m <= n; ++m)
        if (!row_modes.contains(m)) perm.push_back(m);
    Tensor p = permute(t, perm);
    std::size_t rows = 1;
    for (auto m : row_modes.modes()) rows *= t.dim(m - 1);
    return reshape(p, {rows, t.size() / rows});
}

Tensor vectorize(const Tensor& t) { return reshape(t, {t.size()}); }

Tensor mode_n_matrix_product(const Tensor& t, const Tensor& m, std::size_t n) {
    check_mode(n, t.order());
    if (m.order() != 2) fail("mode-n product requires an order-2 tensor");
    if (m.dim(1) != t.dim(n - 1)) fail("dimension mismatch in mode-n matrix product");
    Tensor unfolded = matricize(t, ModeSet({n}, t.order()));
    Tensor prod = matmul(m, unfolded);
    // fold back: result has mode n replaced by m rows
    std::vector<std::size_t> folded_shape{m.dim(0)};
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != n) folded_shape.push_back(t.dim(k - 1));
    Tensor folded = reshape(prod, folded_shape);
    // inverse of the (n, rest...) permutation
    std::vector<std::size_t> inv(t.order());
    std::size_t pos = 1;
    inv[n - 1] = 1;
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != n) inv[k - 1] = ++pos;
    return permute(folded, inv);
}

Tensor mode_n_vector_product(const Tensor& t, const Tensor& v, std::size_t n) {
    check_mode(n, t.order());
    if (v.order() != 1) fail("mode-n vector product requires an order-1 tensor");
    if (v.dim(0) != t.dim(n - 1)) fail("dimension mismatch in mode-n vector product");
    std::vector<std::size_t> out_shape;
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != n) out_shape.push_back(t.dim(k - 1));
    Tensor out = Tensor::zeros(out_shape);

    std::vector<std::size_t> strides(t.order(), 1);
    for (std::size_t k = t.order(); k-- > 1;) strides[k - 1] = strides[k] * t.dim(k);

    std::vector<std::size_t> idx(out_shape.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t base = 0, pos = 0;
        for (std::size_t k = 0; k < t.order(); ++k) {
            if (k + 1 == n) continue;
            base += idx[pos++] * strides[k];
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < v.dim(0); ++i)
            sum += t.values()[base + i * strides[n - 1]] * v.values()[i];
        out.mutable_values()[flat] = sum;
        for (std::size_t k = out_shape.size(); k-- > 0;) {
            if (++idx[k] < out_shape[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

double inner(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) fail("shape mismatch in inner product");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.values()[i] * b.values()[i];
    return sum;
}

double frobenius_norm(const Tensor& t) { return std::sqrt(inner(t, t)); }

Tensor outer(const Tensor& a, const Tensor& b) {
    std::vector<std::size_t> shape = a.shape();
    shape.insert(shape.end(), b.shape().begin(), b.shape().end());
    std::vector<double> v;
    v.reserve(a.size() * b.size());
    for (double x : a.values())
        for (double y : b.values()) v.push_back(x * y);
    return Tensor::from_values(std::move(shape), std::move(v));
}

Tensor partial_trace(const Tensor& t, std::size_t m1, std::size_t m2) {
    check_mode(m1, t.order());
    check_mode(m2, t.order());
    if (m1 == m2) fail("partial trace modes must differ");
    if (m1 > m2) std::swap(m1, m2);
    if (t.dim(m1 - 1) != t.dim(m2 - 1)) fail("traced modes must have equal dimension");

    std::vector<std::size_t> out_shape;
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != m1 && k != m2) out_shape.push_back(t.dim(k - 1));
    Tensor out = Tensor::zeros(out_shape);

    std::vector<std::size_t> strides(t.order(), 1);
    for (std::size_t k = t.order(); k-- > 1;) strides[k - 1] = strides[k] * t.dim(k);

    std::vector<std::size_t> idx(out_shape.size(), 0);
    const std::size_t d = t.dim(m1 - 1);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t base = 0, pos = 0;
        for (std::size_t k = 0; k < t.order(); ++k) {
            if (k + 1 == m1 || k + 1 == m2) continue;
            base += idx[pos++] * strides[k];
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            sum += t.values()[base + i * (strides[m1 - 1] + strides[m2 - 1])];
        out.mutable_values()[flat] = sum;
        for (std::size_t k = out_shape.size(); k-- > 0;) {
            if (++idx[k] < out_shape[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

Tensor kronecker(const Tensor& a, const Tensor& b) {
    if (a.order() != b.order()) fail("kronecker requires tensors of equal order");
    const std::size_t n = a.order();
    std::vector<std::size_t> shape(n);
    for (std::size_t k = 0; k < n; ++k) shape[k] = a.dim(k) * b.dim(k);
    Tensor out = Tensor::zeros(shape);
    std::vector<std::size_t> ia(n, 0);
    for (std::size_t fa = 0; fa < a.size(); ++fa) {
        std::vector<std::size_t> ib(n, 0);
        for (std::size_t fb = 0; fb < b.size(); ++fb) {
            std::size_t off = 0;
            for (std::size_t k = 0; k < n; ++k) off = off * shape[k] + (ia[k] * b.dim(k) + ib[k]);
            out.mutable_values()[off] = a.values()[fa] * b.values()[fb];
            for (std::size_t k = n; k-- > 0;) {
                if (++ib[k] < b.dim(k)) break;
                ib[k] = 0;
            }
        }
        for (std::size_t k = n; k-- > 0;) {
            if (++ia[k] < a.dim(k)) break;
            ia[k] = 0;
        }
    }
    return out;
}

Tensor khatri_rao(const Tensor& a, const Tensor& b) {
    if (a.order() != 2 || b.order() != 2) fail("khatri-rao requires matrices");
    if (a.dim(1) != b.dim(1)) fail("khatri-rao requires equal column counts");
    const std::size_t r = a.dim(1);
    Tensor out = Tensor::zeros({a.dim(0) * b.dim(0), r});
    for (std::size_t i = 0; i < a.dim(0); ++i)
        for (std::size_t j = 0; j < b.dim(0); ++j)
            for (std::size_t c = 0; c < r; ++c)
                out.mutable_values()[(i * b.dim(0) + j) * r + c] =
                    a.values()[i * r + c] * b.values()[j * r + c];
    return out;
}

Tensor copy_tensor(std::size_t order, std::size_t dim) {
    if (order < 1 || dim < 1) fail("copy tensor requires order >= 1 and dim >= 1");
    Tensor out = Tensor::zeros(std::vector<std::size_t>(order, dim));
    std::size_t stride = 0;
    for (std::size_t k = 0, s = 1; k < order; ++k, s *= dim) stride += s;
    // stride = 1 + d + d^2 + ... ; diagonal entries sit at i * stride
    for (std::size_t i = 0; i < dim; ++i) out.mutable_values()[i * stride] = 1.0;
    return out;
}

Tensor diag_embed(const Tensor& v) {
    if (v.order() != 1) fail("diag_embed requires a vector");
    const std::size_t n = v.dim(0);
    Tensor out = Tensor::zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) out.mutable_values()[i * n + i] = v.values()[i];
    return out;
}

Tensor diag_extract(const Tensor& a) {
    if (a.order() != 2 || a.dim(0) != a.dim(1)) fail("diag_extract requires a square matrix");
    const std::size_t n = a.dim(0);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a.values()[i * n + i];
    return Tensor::from_values({n}, std::move(v));
}

double poly_eval(const Tensor& t, const Tensor& x, bool homogeneous) {
    if (x.order() != 1) fail("poly_eval requires a vector input");
    if (t.order() == 0) return t.values()[0];
    const std::size_t d0 = t.dim(0);
    for (std::size_t k = 0; k < t.order(); ++k)
        if (t.dim(k) != d0) fail("poly_eval requires a cubical tensor");
    Tensor xv = x;
    if (!homogeneous) {
        if (x.dim(0) + 1 != d0) fail("non-homogeneous poly_eval needs modes of size x.length+1");
        std::vector<double> v = x.values();
        v.push_back(1.0);
        xv = Tensor::from_values({d0}, std::move(v));
    } else if (x.dim(0) != d0) {
        fail("poly_eval input length does not match tensor dimension");
    }
    Tensor acc = t;
    while (acc.order() > 0) acc = mode_n_vector_product(acc, xv, acc.order());
    return acc.values()[0];
}

Tensor fix_mode(const Tensor& t, std::size_t n, std::size_t i) {
    check_mode(n, t.order());
    if (i >= t.dim(n - 1)) fail("index out of range in fix_mode");
    Tensor v = Tensor::zeros({t.dim(n - 1)});
    v.mutable_values()[i] = 1.0;
    return mode_n_vector_product(t, v, n);
}

Tensor fiber(const Tensor& t, std::size_t n, const std::vector<std::size_t>& fixed) {
    check_mode(n, t.order());
    if (fixed.size() != t.order() - 1) fail("fiber requires one fixed index per other mode");
    Tensor cur = t;
    // fix from the highest mode down so earlier mode numbers stay valid
    std::vector<std::pair<std::size_t, std::size_t>> fixes;
    std::size_t pos = 0;
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != n) fixes.emplace_back(k, fixed[pos++]);
    for (auto it = fixes.rbegin(); it != fixes.rend(); ++it) cur = fix_mode(cur, it->first, it->second);
    return cur;
}

Tensor slice(const Tensor& t, std::size_t n1, std::size_t n2, const std::vector<std::size_t>& fixed) {
    check_mode(n1, t.order());
    check_mode(n2, t.order());
    if (n1 >= n2) fail("slice requires n1 < n2");
    if (fixed.size() != t.order() - 2) fail("slice requires one fixed index per other mode");
    std::vector<std::pair<std::size_t, std::size_t>> fixes;
    std::size_t pos = 0;
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != n1 && k != n2) fixes.emplace_back(k, fixed[pos++]);
    Tensor cur = t;
    for (auto it = fixes.rbegin(); it != fixes.rend(); ++it) cur = fix_mode(cur, it->first, it->second);
    return cur;
}

Tensor transpose(const Tensor& a) {
    if (a.order() != 2) fail("transpose requires a matrix");
    return permute(a, {2, 1});
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.order() != 2 || b.order() != 2) fail("matmul requires matrices");
    if (a.dim(1) != b.dim(0)) fail("inner dimension mismatch in matmul");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor out = Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            const double av = a.values()[i * k + l];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
                out.mutable_values()[i * n + j] += av * b.values()[l * n + j];
        }
    return out;
}

Tensor identity_matrix(std::size_t n) { return copy_tensor(2, n); }

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) fail("shape mismatch in max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace tnk
