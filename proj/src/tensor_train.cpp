#include "tnk/tensor_train.hpp"

#include "tnk/linalg.hpp"
#include "tnk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

Tensor left_unfold(const Tensor& core) {
    return reshape(core, {core.dim(0) * core.dim(1), core.dim(2)});
}

Tensor right_unfold(const Tensor& core) {
    return reshape(core, {core.dim(0), core.dim(1) * core.dim(2)});
}

// Truncation rank given singular values, caps and an absolute budget delta:
// drop a maximal tail whose squared sum stays <= delta^2.
std::size_t truncation_rank(const std::vector<double>& sigma, std::size_t cap, double delta) {
    std::size_t keep = numerical_rank(sigma);
    if (delta > 0.0) {
        double tail = 0.0;
        while (keep > 1) {
            const double s = sigma[keep - 1];
            if (tail + s * s > delta * delta) break;
            tail += s * s;
            --keep;
        }
    }
    keep = std::min(keep, cap);
    return std::max<std::size_t>(keep, 1);
}

Tensor truncate_cols(const Tensor& m, std::size_t keep) {
    Tensor out = Tensor::zeros({m.dim(0), keep});
    for (std::size_t i = 0; i < m.dim(0); ++i)
        for (std::size_t j = 0; j < keep; ++j)
            out.mutable_values()[i * keep + j] = m.values()[i * m.dim(1) + j];
    return out;
}

Tensor truncate_rows(const Tensor& m, std::size_t keep) {
    Tensor out = Tensor::zeros({keep, m.dim(1)});
    for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t j = 0; j < m.dim(1); ++j)
            out.mutable_values()[i * m.dim(1) + j] = m.values()[i * m.dim(1) + j];
    return out;
}

Tensor diag_times(const std::vector<double>& d, const Tensor& m, std::size_t keep) {
    // diag(d[0..keep)) * first keep rows of m
    Tensor out = Tensor::zeros({keep, m.dim(1)});
    for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t j = 0; j < m.dim(1); ++j)
            out.mutable_values()[i * m.dim(1) + j] = d[i] * m.values()[i * m.dim(1) + j];
    return out;
}

}  // namespace

std::vector<std::size_t> TT::dims() const {
    std::vector<std::size_t> d;
    for (const Tensor& c : cores) d.push_back(c.dim(1));
    return d;
}

std::vector<std::size_t> TT::ranks() const {
    std::vector<std::size_t> r;
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) r.push_back(cores[k].dim(2));
    return r;
}

void TT::validate() const {
    if (cores.empty()) fail("TT has no cores");
    if (cores.front().dim(0) != 1 || cores.back().dim(2) != 1) fail("TT boundary ranks must be 1");
    for (const Tensor& c : cores)
        if (c.order() != 3) fail("TT cores must be order 3");
    for (std::size_t k = 0; k + 1 < cores.size(); ++k)
        if (cores[k].dim(2) != cores[k + 1].dim(0)) fail("TT adjacent ranks disagree");
    if (center) {
        if (*center < 1 || *center > cores.size()) fail("TT center out of range");
        for (std::size_t k = 1; k < *center; ++k)
            if (!core_left_orthogonal(cores[k - 1])) fail("core left of center not left-orthogonal");
        for (std::size_t k = *center + 1; k <= cores.size(); ++k)
            if (!core_right_orthogonal(cores[k - 1]))
                fail("core right of center not right-orthogonal");
    }
}

TT tt_svd(const Tensor& t, const TTSvdOptions& opts) {
    const std::size_t n = std::max<std::size_t>(t.order(), 1);
    if (opts.rank_caps && opts.rank_caps->size() + 1 != n)
        fail("tt_svd expects one rank cap per internal bond");

    TT out;
    if (t.order() == 0) {
        out.cores.push_back(reshape(t, {1, 1, 1}));
        out.center = 1;
        return out;
    }
    if (t.order() == 1) {
        out.cores.push_back(reshape(t, {1, t.dim(0), 1}));
        out.center = 1;
        return out;
    }

    const double delta = opts.tol > 0.0
                             ? opts.tol * frobenius_norm(t) / std::sqrt(static_cast<double>(n - 1))
                             : 0.0;

    std::size_t r_prev = 1;
    Tensor rest = reshape(t, {t.size()});
    std::vector<std::size_t> remaining(t.shape().begin(), t.shape().end());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t d = remaining.front();
        const std::size_t cols = rest.size() / (r_prev * d);
        SvdResult s = svd(reshape(rest, {r_prev * d, cols}));
        const std::size_t cap =
            opts.rank_caps ? (*opts.rank_caps)[k] : std::numeric_limits<std::size_t>::max();
        const std::size_t keep = truncation_rank(s.sigma, cap, delta);

        out.cores.push_back(reshape(truncate_cols(s.u, keep), {r_prev, d, keep}));
        rest = diag_times(s.sigma, s.vt, keep);
        remaining.erase(remaining.begin());
        r_prev = keep;
    }
    out.cores.push_back(reshape(rest, {r_prev, remaining.front(), 1}));
    out.center = n;
    return out;
}

double tt_entry(const TT& t, const std::vector<std::size_t>& idx) {
    if (idx.size() != t.sites()) fail("tt_entry index arity mismatch");
    std::vector<double> row{1.0};
    for (std::size_t k = 0; k < t.sites(); ++k) {
        const Tensor& c = t.cores[k];
        if (idx[k] >= c.dim(1)) fail("tt_entry index out of range");
        std::vector<double> next(c.dim(2), 0.0);
        for (std::size_t r = 0; r < c.dim(0); ++r) {
            const double x = row[r];
            if (x == 0.0) continue;
            const std::size_t base = (r * c.dim(1) + idx[k]) * c.dim(2);
            for (std::size_t s = 0; s < c.dim(2); ++s) next[s] += x * c.values()[base + s];
        }
        row = std::move(next);
    }
    return row[0];
}

Tensor tt_reconstruct(const TT& t) {
    t.validate();
    // fold cores left to right: acc has shape (d_1...d_k) x R_k
    Tensor acc = reshape(t.cores.front(), {t.cores.front().dim(1), t.cores.front().dim(2)});
    for (std::size_t k = 1; k < t.sites(); ++k) {
        const Tensor& c = t.cores[k];
        Tensor prod = matmul(acc, right_unfold(c));  // D x (d_k R_k)
        acc = reshape(prod, {prod.dim(0) * c.dim(1), c.dim(2)});
    }
    std::vector<std::size_t> shape = t.dims();
    return reshape(acc, shape);
}

bool core_left_orthogonal(const Tensor& core, double tol) {
    Tensor u = left_unfold(core);
    Tensor g = matmul(transpose(u), u);
    return max_abs_diff(g, identity_matrix(core.dim(2))) <= tol;
}

bool core_right_orthogonal(const Tensor& core, double tol) {
    Tensor v = right_unfold(core);
    Tensor g = matmul(v, transpose(v));
    return max_abs_diff(g, identity_matrix(core.dim(0))) <= tol;
}

namespace {

// Left-orthogonalize core k, pushing the R factor into core k+1.
void push_right(TT& t, std::size_t k) {
    QrResult f = qr(left_unfold(t.cores[k]));
    const std::size_t r = f.q.dim(1);
    t.cores[k] = reshape(f.q, {t.cores[k].dim(0), t.cores[k].dim(1), r});
    t.cores[k + 1] = reshape(matmul(f.r, right_unfold(t.cores[k + 1])),
                             {r, t.cores[k + 1].dim(1), t.cores[k + 1].dim(2)});
}

// Right-orthogonalize core k, pushing the factor into core k-1.
void push_left(TT& t, std::size_t k) {
    QrResult f = qr(transpose(right_unfold(t.cores[k])));
    const std::size_t r = f.q.dim(1);
    t.cores[k] = reshape(transpose(f.q), {r, t.cores[k].dim(1), t.cores[k].dim(2)});
    Tensor prev = left_unfold(t.cores[k - 1]);
    t.cores[k - 1] = reshape(matmul(prev, transpose(f.r)),
                             {t.cores[k - 1].dim(0), t.cores[k - 1].dim(1), r});
}

}  // namespace

TT tt_canonicalize(const TT& t, std::size_t j) {
    if (j < 1 || j > t.sites()) fail("tt_canonicalize center out of range");
    TT out = t;
    out.center.reset();
    for (std::size_t k = 0; k + 1 < j; ++k) push_right(out, k);
    for (std::size_t k = t.sites() - 1; k + 1 > j; --k) push_left(out, k);
    out.center = j;
    return out;
}

TTAlsResult tt_als_fit(const Tensor& t, const std::vector<std::size_t>& ranks,
                       std::size_t sweeps, std::uint64_t seed) {
    const std::size_t n = t.order();
    if (n < 2) fail("tt_als_fit requires order >= 2");
    if (ranks.size() + 1 != n) fail("tt_als_fit expects one rank per internal bond");

    std::vector<std::size_t> dims(t.shape().begin(), t.shape().end());
    // clip requested ranks to the representable maximum for these dims
    std::vector<std::size_t> r(ranks);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t left = 1, right = 1;
        for (std::size_t i = 0; i <= k; ++i) left *= dims[i];
        for (std::size_t i = k + 1; i < n; ++i) right *= dims[i];
        r[k] = std::min({r[k], left, right});
    }

    TT cur = tt_random(dims, r, seed);
    cur = tt_canonicalize(cur, 1);

    const double t_norm_sq = inner(t, t);
    TTAlsResult res;

    // dense environments: left[k] is (d_1..d_k) x R_k, right[k] is R_k x (d_{k+1}..d_N)
    auto left_env = [&](const TT& tt, std::size_t upto) {
        Tensor acc = identity_matrix(1);
        for (std::size_t k = 0; k < upto; ++k) {
            const Tensor& c = tt.cores[k];
            Tensor prod = matmul(acc, right_unfold(c));
            acc = reshape(prod, {prod.dim(0) * c.dim(1), c.dim(2)});
        }
        return acc;
    };
    auto right_env = [&](const TT& tt, std::size_t from) {
        Tensor acc = identity_matrix(1);
        for (std::size_t k = tt.sites(); k-- > from;) {
            const Tensor& c = tt.cores[k];
            Tensor prod = matmul(left_unfold(c), acc);  // (R d) x D
            prod = reshape(prod, {c.dim(0), c.dim(1) * acc.dim(1)});
            acc = prod;
        }
        return acc;
    };

    auto update_core = [&](TT& tt, std::size_t k) {
        // optimal core: contract T with the orthonormal environments
        Tensor lmat = left_env(tt, k);                 // Dl x Rl
        Tensor rmat = right_env(tt, k + 1);            // Rr x Dr
        const std::size_t dl = lmat.dim(0), rl = lmat.dim(1);
        const std::size_t rr = rmat.dim(0), dr = rmat.dim(1);
        const std::size_t d = dims[k];
        Tensor t3 = reshape(t, {dl, d, dr});
        // core[rl, i, rr] = sum_{a,b} L[a,rl] T[a,i,b] R[rr,b]
        Tensor tl = matmul(transpose(lmat), reshape(t3, {dl, d * dr}));        // Rl x (d Dr)
        Tensor tlr = matmul(reshape(tl, {rl * d, dr}), transpose(rmat));       // (Rl d) x Rr
        Tensor core = reshape(tlr, {rl, d, rr});
        tt.cores[k] = core;
        // projection optimality: loss = ||T||^2 - ||core||^2
        res.loss_trace.push_back(std::max(0.0, t_norm_sq - inner(core, core)));
    };

    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t k = 0; k + 1 < n; ++k) {  // left-to-right half-sweep
            update_core(cur, k);
            push_right(cur, k);
        }
        for (std::size_t k = n - 1; k > 0; --k) {  // right-to-left half-sweep
            update_core(cur, k);
            push_left(cur, k);
        }
    }
    update_core(cur, 0);
    cur.center = 1;
    res.tt = std::move(cur);
    return res;
}

TT tt_round(const TT& t, const TTSvdOptions& opts) {
    t.validate();
    if (opts.rank_caps && opts.rank_caps->size() + 1 != t.sites())
        fail("tt_round expects one rank cap per internal bond");
    if (t.sites() == 1) {
        TT out = t;
        out.center = 1;
        return out;
    }

    TT work = tt_canonicalize(t, 1);  // all cores right of 1 right-orthogonal
    const double norm = std::abs(frobenius_norm(work.cores.front()));
    const double delta =
        opts.tol > 0.0 ? opts.tol * norm / std::sqrt(static_cast<double>(t.sites() - 1)) : 0.0;

    work.center.reset();
    for (std::size_t k = 0; k + 1 < work.sites(); ++k) {
        SvdResult s = svd(left_unfold(work.cores[k]));
        const std::size_t cap =
            opts.rank_caps ? (*opts.rank_caps)[k] : std::numeric_limits<std::size_t>::max();
        const std::size_t keep = truncation_rank(s.sigma, cap, delta);
        work.cores[k] =
            reshape(truncate_cols(s.u, keep), {work.cores[k].dim(0), work.cores[k].dim(1), keep});
        Tensor sv = diag_times(s.sigma, s.vt, keep);
        work.cores[k + 1] = reshape(matmul(sv, right_unfold(work.cores[k + 1])),
                                    {keep, work.cores[k + 1].dim(1), work.cores[k + 1].dim(2)});
    }
    work.center = work.sites();
    return work;
}

TT tt_add(const TT& a, const TT& b) {
    a.validate();
    b.validate();
    if (a.dims() != b.dims()) fail("tt_add requires matching physical dims");
    const std::size_t n = a.sites();
    if (n == 1) {
        TT out;
        out.cores.push_back(add(a.cores[0], b.cores[0]));
        return out;
    }
    TT out;
    for (std::size_t k = 0; k < n; ++k) {
        const Tensor& ca = a.cores[k];
        const Tensor& cb = b.cores[k];
        const std::size_t ra0 = ca.dim(0), ra1 = ca.dim(2);
        const std::size_t rb0 = cb.dim(0), rb1 = cb.dim(2);
        const std::size_t d = ca.dim(1);
        if (k == 0) {
            Tensor c = Tensor::zeros({1, d, ra1 + rb1});
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t s = 0; s < ra1; ++s)
                    c.mutable_values()[i * (ra1 + rb1) + s] = ca.values()[i * ra1 + s];
                for (std::size_t s = 0; s < rb1; ++s)
                    c.mutable_values()[i * (ra1 + rb1) + ra1 + s] = cb.values()[i * rb1 + s];
            }
            out.cores.push_back(std::move(c));
        } else if (k + 1 == n) {
            Tensor c = Tensor::zeros({ra0 + rb0, d, 1});
            for (std::size_t r = 0; r < ra0; ++r)
                for (std::size_t i = 0; i < d; ++i)
                    c.mutable_values()[(r * d + i)] = ca.values()[r * d + i];
            for (std::size_t r = 0; r < rb0; ++r)
                for (std::size_t i = 0; i < d; ++i)
                    c.mutable_values()[((ra0 + r) * d + i)] = cb.values()[r * d + i];
            out.cores.push_back(std::move(c));
        } else {
            Tensor c = Tensor::zeros({ra0 + rb0, d, ra1 + rb1});
            auto put = [&](const Tensor& src, std::size_t roff, std::size_t soff) {
                for (std::size_t r = 0; r < src.dim(0); ++r)
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t s = 0; s < src.dim(2); ++s)
                            c.mutable_values()[((r + roff) * d + i) * (ra1 + rb1) + s + soff] =
                                src.values()[(r * d + i) * src.dim(2) + s];
            };
            put(ca, 0, 0);
            put(cb, ra0, ra1);
            out.cores.push_back(std::move(c));
        }
    }
    return out;
}

TT tt_scale(const TT& a, double c) {
    TT out = a;
    out.cores.front() = scale(out.cores.front(), c);
    out.center.reset();
    if (a.center && *a.center == 1) out.center = 1;
    return out;
}

TT tt_hadamard(const TT& a, const TT& b) {
    a.validate();
    b.validate();
    if (a.dims() != b.dims()) fail("tt_hadamard requires matching physical dims");
    TT out;
    for (std::size_t k = 0; k < a.sites(); ++k) {
        const Tensor& ca = a.cores[k];
        const Tensor& cb = b.cores[k];
        const std::size_t d = ca.dim(1);
        Tensor c = Tensor::zeros({ca.dim(0) * cb.dim(0), d, ca.dim(2) * cb.dim(2)});
        for (std::size_t ra = 0; ra < ca.dim(0); ++ra)
            for (std::size_t rb = 0; rb < cb.dim(0); ++rb)
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t sa = 0; sa < ca.dim(2); ++sa)
                        for (std::size_t sb = 0; sb < cb.dim(2); ++sb)
                            c.mutable_values()[((ra * cb.dim(0) + rb) * d + i) *
                                                   (ca.dim(2) * cb.dim(2)) +
                                               sa * cb.dim(2) + sb] =
                                ca.values()[(ra * d + i) * ca.dim(2) + sa] *
                                cb.values()[(rb * d + i) * cb.dim(2) + sb];
        out.cores.push_back(std::move(c));
    }
    return out;
}

double tt_inner(const TT& a, const TT& b, TTInnerStats* stats) {
    a.validate();
    b.validate();
    if (a.dims() != b.dims()) fail("tt_inner requires matching physical dims");
    TTInnerStats local;
    TTInnerStats& st = stats ? *stats : local;

    // zipper sweep: carry an Ra x Rb boundary matrix, absorb one site of a
    // then the matching site of b; intermediates stay within O(R^2 d)
    Tensor env = identity_matrix(1);  // Ra_k x Rb_k
    for (std::size_t k = 0; k < a.sites(); ++k) {
        const Tensor& ca = a.cores[k];
        const Tensor& cb = b.cores[k];
        // step 1: X[(i, sa), rb] = sum_ra ca[ra, i, sa] env[ra, rb]
        Tensor am = reshape(ca, {ca.dim(0), ca.dim(1) * ca.dim(2)});
        Tensor x = matmul(transpose(am), env);  // (d Sa) x Rb
        st.peak_intermediate = std::max(st.peak_intermediate, x.size());
        // step 2: env'[sa, sb] = sum_{i, rb} X[(i, sa), rb] cb[rb, i, sb]
        Tensor x3 = reshape(x, {ca.dim(1), ca.dim(2), cb.dim(0)});
        Tensor next = Tensor::zeros({ca.dim(2), cb.dim(2)});
        for (std::size_t i = 0; i < ca.dim(1); ++i)
            for (std::size_t sa = 0; sa < ca.dim(2); ++sa)
                for (std::size_t rb = 0; rb < cb.dim(0); ++rb) {
                    const double xv = x3.values()[(i * ca.dim(2) + sa) * cb.dim(0) + rb];
                    if (xv == 0.0) continue;
                    for (std::size_t sb = 0; sb < cb.dim(2); ++sb)
                        next.mutable_values()[sa * cb.dim(2) + sb] +=
                            xv * cb.values()[(rb * cb.dim(1) + i) * cb.dim(2) + sb];
                }
        env = std::move(next);
        st.peak_intermediate = std::max(st.peak_intermediate, env.size());
    }
    return env.values()[0];
}

double tt_norm(const TT& a) { return std::sqrt(std::max(0.0, tt_inner(a, a))); }

double tt_sum_entries(const TT& a) {
    a.validate();
    std::vector<double> row{1.0};
    for (const Tensor& c : a.cores) {
        std::vector<double> next(c.dim(2), 0.0);
        for (std::size_t r = 0; r < c.dim(0); ++r)
            for (std::size_t i = 0; i < c.dim(1); ++i)
                for (std::size_t s = 0; s < c.dim(2); ++s)
                    next[s] += row[r] * c.values()[(r * c.dim(1) + i) * c.dim(2) + s];
        row = std::move(next);
    }
    return row[0];
}

TT tt_random(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ranks,
             std::uint64_t seed) {
    if (dims.empty()) fail("tt_random requires at least one site");
    if (ranks.size() + 1 != dims.size()) fail("tt_random expects one rank per internal bond");
    TT out;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::size_t r0 = k == 0 ? 1 : ranks[k - 1];
        const std::size_t r1 = k + 1 == dims.size() ? 1 : ranks[k];
        Tensor c = Tensor::zeros({r0, dims[k], r1});
        for (std::size_t i = 0; i < c.size(); ++i)
            c.mutable_values()[i] = rng::uniform_pm1(rng::key(seed, 0x5454, k, i));
        out.cores.push_back(std::move(c));
    }
    return out;
}

std::vector<std::size_t> MPO::row_dims() const {
    std::vector<std::size_t> d;
    for (const Tensor& c : cores) d.push_back(c.dim(1));
    return d;
}

std::vector<std::size_t> MPO::col_dims() const {
    std::vector<std::size_t> d;
    for (const Tensor& c : cores) d.push_back(c.dim(2));
    return d;
}

std::vector<std::size_t> MPO::ranks() const {
    std::vector<std::size_t> r;
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) r.push_back(cores[k].dim(3));
    return r;
}

void MPO::validate() const {
    if (cores.empty()) fail("MPO has no cores");
    if (cores.front().dim(0) != 1 || cores.back().dim(3) != 1) fail("MPO boundary ranks must be 1");
    for (const Tensor& c : cores)
        if (c.order() != 4) fail("MPO cores must be order 4");
    for (std::size_t k = 0; k + 1 < cores.size(); ++k)
        if (cores[k].dim(3) != cores[k + 1].dim(0)) fail("MPO adjacent ranks disagree");
}

MPO mpo_from_dense(const Tensor& m, const std::vector<std::size_t>& row_dims,
                   const std::vector<std::size_t>& col_dims, double tol) {
    if (m.order() != 2) fail("mpo_from_dense requires a matrix");
    if (row_dims.size() != col_dims.size()) fail("row/col dim factorizations must match in length");
    if (product(row_dims) != m.dim(0) || product(col_dims) != m.dim(1))
        fail("dim factorization does not match matrix shape");
    const std::size_t n = row_dims.size();

    // reshape to (i_1..i_N, j_1..j_N), interleave to (i_1, j_1, ..., i_N, j_N)
    std::vector<std::size_t> shape(row_dims);
    shape.insert(shape.end(), col_dims.begin(), col_dims.end());
    Tensor t = reshape(m, shape);
    std::vector<std::size_t> perm;
    for (std::size_t k = 0; k < n; ++k) {
        perm.push_back(k + 1);
        perm.push_back(n + k + 1);
    }
    t = permute(t, perm);
    // group each (i_k, j_k) pair, row index slower
    std::vector<std::size_t> grouped(n);
    for (std::size_t k = 0; k < n; ++k) grouped[k] = row_dims[k] * col_dims[k];
    t = reshape(t, grouped);

    TT train = tt_svd(t, TTSvdOptions{std::nullopt, tol});
    MPO out;
    for (std::size_t k = 0; k < n; ++k) {
        const Tensor& c = train.cores[k];
        out.cores.push_back(reshape(c, {c.dim(0), row_dims[k], col_dims[k], c.dim(2)}));
    }
    return out;
}

Tensor mpo_reconstruct(const MPO& m) {
    m.validate();
    const std::size_t n = m.sites();
    TT train;
    for (const Tensor& c : m.cores)
        train.cores.push_back(reshape(c, {c.dim(0), c.dim(1) * c.dim(2), c.dim(3)}));
    Tensor t = tt_reconstruct(train);  // modes (i_1 j_1), ..., (i_N j_N)
    std::vector<std::size_t> split;
    for (std::size_t k = 0; k < n; ++k) {
        split.push_back(m.cores[k].dim(1));
        split.push_back(m.cores[k].dim(2));
    }
    t = reshape(t, split);
    std::vector<std::size_t> perm;
    for (std::size_t k = 0; k < n; ++k) perm.push_back(2 * k + 1);
    for (std::size_t k = 0; k < n; ++k) perm.push_back(2 * k + 2);
    t = permute(t, perm);
    return reshape(t, {product(m.row_dims()), product(m.col_dims())});
}

TT mpo_matvec(const MPO& m, const TT& v) {
    m.validate();
    v.validate();
    if (m.col_dims() != v.dims()) fail("mpo_matvec dimension mismatch");
    TT out;
    for (std::size_t k = 0; k < m.sites(); ++k) {
        const Tensor& w = m.cores[k];  // r0 x I x J x r1
        const Tensor& x = v.cores[k];  // s0 x J x s1
        const std::size_t r0 = w.dim(0), di = w.dim(1), dj = w.dim(2), r1 = w.dim(3);
        const std::size_t s0 = x.dim(0), s1 = x.dim(2);
        Tensor c = Tensor::zeros({r0 * s0, di, r1 * s1});
        for (std::size_t a = 0; a < r0; ++a)
            for (std::size_t b = 0; b < s0; ++b)
                for (std::size_t i = 0; i < di; ++i)
                    for (std::size_t j = 0; j < dj; ++j) {
                        for (std::size_t ar = 0; ar < r1; ++ar) {
                            const double wval = w.values()[((a * di + i) * dj + j) * r1 + ar];
                            if (wval == 0.0) continue;
                            for (std::size_t br = 0; br < s1; ++br)
                                c.mutable_values()[((a * s0 + b) * di + i) * (r1 * s1) +
                                                   ar * s1 + br] +=
                                    wval * x.values()[(b * dj + j) * s1 + br];
                        }
                    }
        out.cores.push_back(std::move(c));
    }
    return out;
}

MPO mpo_random(const std::vector<std::size_t>& row_dims, const std::vector<std::size_t>& col_dims,
               const std::vector<std::size_t>& ranks, std::uint64_t seed) {
    if (row_dims.size() != col_dims.size() || ranks.size() + 1 != row_dims.size())
        fail("mpo_random shape arguments inconsistent");
    MPO out;
    for (std::size_t k = 0; k < row_dims.size(); ++k) {
        const std::size_t r0 = k == 0 ? 1 : ranks[k - 1];
        const std::size_t r1 = k + 1 == row_dims.size() ? 1 : ranks[k];
        Tensor c = Tensor::zeros({r0, row_dims[k], col_dims[k], r1});
        for (std::size_t i = 0; i < c.size(); ++i)
            c.mutable_values()[i] = rng::uniform_pm1(rng::key(seed, 0x4d50, k, i));
        out.cores.push_back(std::move(c));
    }
    return out;
}

}  // namespace tnk
