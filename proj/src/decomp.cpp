#include "tnk/decomp.hpp"

#include "tnk/linalg.hpp"
#include "tnk/rng.hpp"

#include <cmath>

namespace tnk {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::size_t CPForm::rank() const {
    if (factors.empty()) fail("CP form has no factors");
    return factors.front().dim(1);
}

void CPForm::validate() const {
    if (factors.empty()) fail("CP form has no factors");
    const std::size_t r = factors.front().dim(1);
    for (const Tensor& f : factors) {
        if (f.order() != 2) fail("CP factors must be matrices");
        if (f.dim(1) != r) fail("CP factors must share the column count");
    }
    if (r < 1) fail("CP rank must be >= 1");
}

Tensor cp_reconstruct(const CPForm& c) {
    c.validate();
    const std::size_t n = c.order(), r = c.rank();
    std::vector<std::size_t> shape(n);
    for (std::size_t k = 0; k < n; ++k) shape[k] = c.factors[k].dim(0);
    Tensor out = Tensor::zeros(shape);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        double sum = 0.0;
        for (std::size_t col = 0; col < r; ++col) {
            double prod = 1.0;
            for (std::size_t k = 0; k < n; ++k) prod *= c.factors[k].values()[idx[k] * r + col];
            sum += prod;
        }
        out.mutable_values()[flat] = sum;
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < shape[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

namespace {

// Khatri-Rao of all factors except mode n, ascending mode order.
Tensor kr_skip(const CPForm& c, std::size_t n) {
    Tensor acc = Tensor::scalar(0.0);
    bool first = true;
    for (std::size_t k = 1; k <= c.order(); ++k) {
        if (k == n) continue;
        const Tensor& f = c.factors[k - 1];
        if (first) {
            acc = f;
            first = false;
        } else {
            acc = khatri_rao(acc, f);
        }
    }
    if (first) fail("cp_unfold needs at least two modes");
    return acc;
}

}  // namespace

Tensor cp_unfold(const CPForm& c, std::size_t n) {
    c.validate();
    if (n < 1 || n > c.order()) fail("cp_unfold mode out of range");
    return matmul(c.factors[n - 1], transpose(kr_skip(c, n)));
}

std::vector<Tensor> cp_loss_gradient(const Tensor& t, const CPForm& c) {
    Tensor diff = sub(cp_reconstruct(c), t);  // d(loss)/d(recon) = 2 * diff
    std::vector<Tensor> grads;
    for (std::size_t n = 1; n <= c.order(); ++n) {
        Tensor unfolded = matricize(diff, ModeSet({n}, t.order()));
        grads.push_back(scale(matmul(unfolded, kr_skip(c, n)), 2.0));
    }
    return grads;
}

CPFitResult cp_fit_gd(const Tensor& t, std::size_t rank, const CPFitOptions& opts) {
    if (rank < 1) fail("CP rank must be >= 1");
    if (t.order() < 2) fail("cp_fit_gd requires order >= 2");

    CPForm cur;
    for (std::size_t k = 0; k < t.order(); ++k) {
        Tensor f = Tensor::zeros({t.dim(k), rank});
        for (std::size_t i = 0; i < f.size(); ++i)
            f.mutable_values()[i] = rng::uniform_pm1(rng::key(opts.seed, 0x4350, k, i));
        cur.factors.push_back(std::move(f));
    }

    auto loss_of = [&](const CPForm& c) {
        Tensor d = sub(cp_reconstruct(c), t);
        return inner(d, d);
    };

    CPFitResult res;
    double loss = loss_of(cur);
    res.loss_trace.push_back(loss);

    constexpr double armijo_c = 1e-4;
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        std::vector<Tensor> grads = cp_loss_gradient(t, cur);
        double grad_sq = 0.0;
        for (const Tensor& g : grads) grad_sq += inner(g, g);
        if (grad_sq == 0.0) {
            res.converged = true;
            break;
        }

        double step = opts.initial_step;
        CPForm trial;
        double trial_loss = loss;
        bool accepted = false;
        while (step > 1e-16) {
            trial.factors.clear();
            for (std::size_t k = 0; k < cur.factors.size(); ++k)
                trial.factors.push_back(sub(cur.factors[k], scale(grads[k], step)));
            trial_loss = loss_of(trial);
            if (trial_loss <= loss - armijo_c * step * grad_sq) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // gradient no longer a descent direction at fp precision

        cur = std::move(trial);
        res.iters = iter + 1;
        const double rel_change = (loss - trial_loss) / std::max(loss, 1e-300);
        loss = trial_loss;
        res.loss_trace.push_back(loss);
        if (rel_change < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.form = std::move(cur);
    return res;
}

void TuckerForm::validate() const {
    if (core.order() != factors.size()) fail("Tucker core order must match factor count");
    for (std::size_t k = 0; k < factors.size(); ++k) {
        if (factors[k].order() != 2) fail("Tucker factors must be matrices");
        if (factors[k].dim(1) != core.dim(k))
            fail("Tucker factor column count must match core dimension");
    }
}

TuckerForm hosvd(const Tensor& t, const HosvdOptions& opts) {
    const std::size_t n = t.order();
    if (opts.rank_caps && opts.rank_caps->size() != n)
        fail("hosvd rank caps must give one cap per mode");

    TuckerForm out;
    out.core = t;
    for (std::size_t mode = 1; mode <= n; ++mode) {
        SvdResult s = svd(matricize(t, ModeSet({mode}, n)));
        std::size_t keep = numerical_rank(s.sigma);
        if (opts.tol > 0.0)
            keep = std::min(keep, numerical_rank(s.sigma, opts.tol));
        if (opts.rank_caps) {
            const std::size_t cap = (*opts.rank_caps)[mode - 1];
            if (cap < 1) fail("hosvd rank cap must be >= 1");
            keep = std::min(keep, cap);
        }
        keep = std::max<std::size_t>(keep, 1);

        double lost = 0.0;
        for (std::size_t i = keep; i < s.sigma.size(); ++i) lost += s.sigma[i] * s.sigma[i];
        out.discarded_sigma_sq.push_back(lost);

        Tensor u = Tensor::zeros({t.dim(mode - 1), keep});
        for (std::size_t i = 0; i < u.dim(0); ++i)
            for (std::size_t j = 0; j < keep; ++j)
                u.mutable_values()[i * keep + j] = s.u.values()[i * s.u.dim(1) + j];
        out.factors.push_back(std::move(u));
        out.orthogonal.push_back(true);
    }
    for (std::size_t mode = 1; mode <= n; ++mode)
        out.core = mode_n_matrix_product(out.core, transpose(out.factors[mode - 1]), mode);
    return out;
}

Tensor tucker_reconstruct(const TuckerForm& t) {
    t.validate();
    Tensor out = t.core;
    for (std::size_t mode = 1; mode <= t.factors.size(); ++mode)
        out = mode_n_matrix_product(out, t.factors[mode - 1], mode);
    return out;
}

std::vector<std::size_t> multilinear_rank(const Tensor& t) {
    std::vector<std::size_t> ranks;
    for (std::size_t mode = 1; mode <= t.order(); ++mode)
        ranks.push_back(numerical_rank(matricize(t, ModeSet({mode}, t.order()))));
    return ranks;
}

TuckerForm tucker_orthogonalize(const TuckerForm& t) {
    t.validate();
    TuckerForm out;
    out.core = t.core;
    for (std::size_t mode = 1; mode <= t.factors.size(); ++mode) {
        QrResult f = qr(t.factors[mode - 1]);
        out.factors.push_back(f.q);
        out.orthogonal.push_back(true);
        out.core = mode_n_matrix_product(out.core, f.r, mode);
    }
    return out;
}

}  // namespace tnk
