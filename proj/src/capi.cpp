#include "tnk.h"

#include "tnk/decomp.hpp"
#include "tnk/grad.hpp"
#include "tnk/io.hpp"
#include "tnk/prob.hpp"
#include "tnk/random_tn.hpp"
#include "tnk/tensor.hpp"
#include "tnk/tensor_train.hpp"
#include "tnk/tn_graph.hpp"

#include <cstring>
#include <map>
#include <string>

struct tnk_tensor {
    tnk::Tensor v;
};
struct tnk_tt {
    tnk::TT v;
};
struct tnk_mpo {
    tnk::MPO v;
};
struct tnk_network {
    tnk::TNGraph v;
};

namespace {

thread_local std::string g_error;

template <typename F>
tnk_status guard(F&& f) {
    try {
        f();
        g_error.clear();
        return TNK_OK;
    } catch (const tnk::IoError& e) {
        g_error = e.what();
        return TNK_ERR_DATA;
    } catch (const tnk::ParseError& e) {
        g_error = e.what();
        return TNK_ERR_DATA;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return TNK_ERR_INVALID;
    } catch (const std::exception& e) {
        g_error = e.what();
        return TNK_ERR_NUMERIC;
    }
}

tnk::Bindings make_bindings(const char* const* names, const tnk_tensor* const* tensors,
                            size_t n) {
    if (n > 0 && (!names || !tensors)) throw std::invalid_argument("null binding arrays");
    tnk::Bindings b;
    for (size_t i = 0; i < n; ++i) {
        if (!names[i] || !tensors[i]) throw std::invalid_argument("null binding entry");
        if (!b.emplace(names[i], tensors[i]->v).second)
            throw std::invalid_argument(std::string("duplicate binding: ") + names[i]);
    }
    return b;
}

std::vector<std::size_t> make_sizes(const size_t* data, size_t n, const char* what) {
    if (n > 0 && !data) throw std::invalid_argument(std::string("null array: ") + what);
    return std::vector<std::size_t>(data, data + n);
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

tnk_tensor* wrap(tnk::Tensor t) { return new tnk_tensor{std::move(t)}; }

}  // namespace

extern "C" {

const char* tnk_last_error(void) { return g_error.c_str(); }

tnk_status tnk_tensor_create(const size_t* shape, size_t order, const double* values,
                             tnk_tensor** out) {
    return guard([&] {
        require(out && (order == 0 || shape) && values, "tnk_tensor_create: null argument");
        std::vector<std::size_t> s(shape, shape + order);
        std::size_t n = tnk::product(s);
        *out = wrap(tnk::Tensor(std::move(s), std::vector<double>(values, values + n)));
    });
}

void tnk_tensor_free(tnk_tensor* t) { delete t; }
size_t tnk_tensor_order(const tnk_tensor* t) { return t->v.order(); }
size_t tnk_tensor_dim(const tnk_tensor* t, size_t k) { return t->v.dim(k); }
size_t tnk_tensor_size(const tnk_tensor* t) { return t->v.size(); }
const double* tnk_tensor_data(const tnk_tensor* t) { return t->v.values().data(); }
double tnk_tensor_max_abs_diff(const tnk_tensor* a, const tnk_tensor* b) {
    return tnk::max_abs_diff(a->v, b->v);
}
double tnk_tensor_norm(const tnk_tensor* t) { return tnk::frobenius_norm(t->v); }

tnk_status tnk_tensor_read(const char* path, tnk_tensor** out) {
    return guard([&] {
        require(path && out, "tnk_tensor_read: null argument");
        *out = wrap(tnk::read_tensor_file(path));
    });
}

tnk_status tnk_tensor_write(const char* path, const tnk_tensor* t) {
    return guard([&] {
        require(path && t, "tnk_tensor_write: null argument");
        tnk::write_tensor_file(path, t->v);
    });
}

tnk_status tnk_matricize(const tnk_tensor* t, const size_t* row_modes, size_t n_modes,
                         tnk_tensor** out) {
    return guard([&] {
        require(t && out, "tnk_matricize: null argument");
        tnk::ModeSet rows(make_sizes(row_modes, n_modes, "row modes"), t->v.order());
        *out = wrap(tnk::matricize(t->v, rows));
    });
}

tnk_status tnk_network_parse(const char* text, tnk_network** out) {
    return guard([&] {
        require(text && out, "tnk_network_parse: null argument");
        *out = new tnk_network{tnk::parse_network(text)};
    });
}

tnk_status tnk_network_read(const char* path, tnk_network** out) {
    return guard([&] {
        require(path && out, "tnk_network_read: null argument");
        *out = new tnk_network{tnk::read_network_file(path)};
    });
}

void tnk_network_free(tnk_network* g) { delete g; }

tnk_status tnk_network_format(const tnk_network* g, char** out) {
    return guard([&] {
        require(g && out, "tnk_network_format: null argument");
        const std::string s = tnk::format_network(g->v);
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
    });
}

void tnk_string_free(char* s) { delete[] s; }

tnk_status tnk_contract(const tnk_network* g, const char* const* names,
                        const tnk_tensor* const* tensors, size_t n_bindings, tnk_tensor** out) {
    return guard([&] {
        require(g && out, "tnk_contract: null argument");
        *out = wrap(tnk::contract(g->v, make_bindings(names, tensors, n_bindings)));
    });
}

tnk_status tnk_rank_bound(const tnk_network* g, const char* const* names,
                          const tnk_tensor* const* tensors, size_t n_bindings,
                          const char* const* row_labels, size_t n_labels, uint64_t* out_bound,
                          int* out_degenerate) {
    return guard([&] {
        require(g && out_bound, "tnk_rank_bound: null argument");
        require(n_labels == 0 || row_labels, "tnk_rank_bound: null label array");
        std::vector<std::string> labels;
        for (size_t i = 0; i < n_labels; ++i) {
            require(row_labels[i] != nullptr, "tnk_rank_bound: null label");
            labels.push_back(row_labels[i]);
        }
        tnk::CutBoundResult r =
            tnk::rank_bound(g->v, make_bindings(names, tensors, n_bindings), labels);
        *out_bound = r.bound;
        if (out_degenerate) *out_degenerate = r.degenerate ? 1 : 0;
    });
}

tnk_status tnk_jacobian(const tnk_network* g, const char* const* names,
                        const tnk_tensor* const* tensors, size_t n_bindings, const char* wrt,
                        tnk_tensor** out) {
    return guard([&] {
        require(g && wrt && out, "tnk_jacobian: null argument");
        *out = wrap(tnk::jacobian_contract(tnk::jacobian_wrt_node(g->v, wrt),
                                           make_bindings(names, tensors, n_bindings)));
    });
}

tnk_status tnk_finite_diff_jacobian(const tnk_network* g, const char* const* names,
                                    const tnk_tensor* const* tensors, size_t n_bindings,
                                    const char* wrt, double step, tnk_tensor** out) {
    return guard([&] {
        require(g && wrt && out, "tnk_finite_diff_jacobian: null argument");
        *out = wrap(tnk::finite_diff_jacobian(g->v, make_bindings(names, tensors, n_bindings),
                                              wrt, step));
    });
}

tnk_status tnk_cp_fit(const tnk_tensor* t, size_t rank, size_t max_iters, double tol,
                      uint64_t seed, tnk_tensor** factors, double* out_loss, size_t* out_iters,
                      int* out_converged) {
    return guard([&] {
        require(t && factors, "tnk_cp_fit: null argument");
        tnk::CPFitOptions opts;
        opts.max_iters = max_iters;
        opts.tol = tol;
        opts.seed = seed;
        tnk::CPFitResult r = tnk::cp_fit_gd(t->v, rank, opts);
        for (std::size_t k = 0; k < r.form.factors.size(); ++k)
            factors[k] = wrap(r.form.factors[k]);
        if (out_loss) *out_loss = r.loss_trace.back();
        if (out_iters) *out_iters = r.iters;
        if (out_converged) *out_converged = r.converged ? 1 : 0;
    });
}

tnk_status tnk_hosvd(const tnk_tensor* t, const size_t* rank_caps, double tol,
                     tnk_tensor** out_core, tnk_tensor** factors) {
    return guard([&] {
        require(t && out_core && factors, "tnk_hosvd: null argument");
        tnk::HosvdOptions opts;
        opts.tol = tol;
        if (rank_caps) opts.rank_caps = make_sizes(rank_caps, t->v.order(), "rank caps");
        tnk::TuckerForm f = tnk::hosvd(t->v, opts);
        for (std::size_t k = 0; k < f.factors.size(); ++k) factors[k] = wrap(f.factors[k]);
        *out_core = wrap(std::move(f.core));
    });
}

tnk_status tnk_tt_svd(const tnk_tensor* t, double tol, const size_t* rank_caps, tnk_tt** out) {
    return guard([&] {
        require(t && out, "tnk_tt_svd: null argument");
        tnk::TTSvdOptions opts;
        opts.tol = tol;
        if (rank_caps && t->v.order() > 1)
            opts.rank_caps = make_sizes(rank_caps, t->v.order() - 1, "rank caps");
        *out = new tnk_tt{tnk::tt_svd(t->v, opts)};
    });
}

tnk_status tnk_tt_round(const tnk_tt* t, double tol, const size_t* rank_caps, tnk_tt** out) {
    return guard([&] {
        require(t && out, "tnk_tt_round: null argument");
        tnk::TTSvdOptions opts;
        opts.tol = tol;
        if (rank_caps && t->v.sites() > 1)
            opts.rank_caps = make_sizes(rank_caps, t->v.sites() - 1, "rank caps");
        *out = new tnk_tt{tnk::tt_round(t->v, opts)};
    });
}

tnk_status tnk_tt_als(const tnk_tensor* t, const size_t* ranks, size_t sweeps, uint64_t seed,
                      tnk_tt** out, double* out_final_loss) {
    return guard([&] {
        require(t && out, "tnk_tt_als: null argument");
        std::vector<std::size_t> r =
            t->v.order() > 1 ? make_sizes(ranks, t->v.order() - 1, "ranks")
                             : std::vector<std::size_t>{};
        tnk::TTAlsResult res = tnk::tt_als_fit(t->v, r, sweeps, seed);
        if (out_final_loss) *out_final_loss = res.loss_trace.back();
        *out = new tnk_tt{std::move(res.tt)};
    });
}

tnk_status tnk_tt_reconstruct(const tnk_tt* t, tnk_tensor** out) {
    return guard([&] {
        require(t && out, "tnk_tt_reconstruct: null argument");
        *out = wrap(tnk::tt_reconstruct(t->v));
    });
}

size_t tnk_tt_sites(const tnk_tt* t) { return t->v.sites(); }

tnk_status tnk_tt_core(const tnk_tt* t, size_t k, tnk_tensor** out) {
    return guard([&] {
        require(t && out, "tnk_tt_core: null argument");
        require(k >= 1 && k <= t->v.sites(), "tnk_tt_core: site out of range");
        *out = wrap(t->v.cores[k - 1]);
    });
}

tnk_status tnk_tt_read(const char* path, tnk_tt** out) {
    return guard([&] {
        require(path && out, "tnk_tt_read: null argument");
        *out = new tnk_tt{tnk::read_tt_file(path)};
    });
}

tnk_status tnk_tt_write(const char* path, const tnk_tt* t) {
    return guard([&] {
        require(path && t, "tnk_tt_write: null argument");
        tnk::write_tt_file(path, t->v);
    });
}

void tnk_tt_free(tnk_tt* t) { delete t; }

size_t tnk_mpo_sites(const tnk_mpo* m) { return m->v.sites(); }

tnk_status tnk_mpo_core(const tnk_mpo* m, size_t k, tnk_tensor** out) {
    return guard([&] {
        require(m && out, "tnk_mpo_core: null argument");
        require(k >= 1 && k <= m->v.sites(), "tnk_mpo_core: site out of range");
        *out = wrap(m->v.cores[k - 1]);
    });
}

tnk_status tnk_mpo_matvec(const tnk_mpo* m, const tnk_tt* v, tnk_tt** out) {
    return guard([&] {
        require(m && v && out, "tnk_mpo_matvec: null argument");
        *out = new tnk_tt{tnk::mpo_matvec(m->v, v->v)};
    });
}

tnk_status tnk_mpo_read(const char* path, tnk_mpo** out) {
    return guard([&] {
        require(path && out, "tnk_mpo_read: null argument");
        *out = new tnk_mpo{tnk::read_mpo_file(path)};
    });
}

tnk_status tnk_mpo_write(const char* path, const tnk_mpo* m) {
    return guard([&] {
        require(path && m, "tnk_mpo_write: null argument");
        tnk::write_mpo_file(path, m->v);
    });
}

void tnk_mpo_free(tnk_mpo* m) { delete m; }

tnk_status tnk_prob_marginal(const tnk_tensor* p, const size_t* keep, size_t n_keep,
                             tnk_tensor** out) {
    return guard([&] {
        require(p && out, "tnk_prob_marginal: null argument");
        tnk::ProbTensor pt = tnk::prob_validate(p->v);
        tnk::ModeSet ks(make_sizes(keep, n_keep, "kept modes"), p->v.order());
        *out = wrap(tnk::marginal(pt, ks).t);
    });
}

tnk_status tnk_prob_conditional(const tnk_tensor* p, const size_t* modes, const size_t* values,
                                size_t n_given, tnk_tensor** out) {
    return guard([&] {
        require(p && out, "tnk_prob_conditional: null argument");
        require(n_given == 0 || (modes && values), "tnk_prob_conditional: null assignment");
        std::map<std::size_t, std::size_t> given;
        for (size_t i = 0; i < n_given; ++i)
            if (!given.emplace(modes[i], values[i]).second)
                throw std::invalid_argument("tnk_prob_conditional: mode assigned twice");
        *out = wrap(tnk::conditional(tnk::prob_validate(p->v), given).t);
    });
}

tnk_status tnk_born_normalizer(const tnk_tt* t, double* out) {
    return guard([&] {
        require(t && out, "tnk_born_normalizer: null argument");
        tnk::BornMachine b{t->v, std::nullopt};
        *out = tnk::born_normalizer(b);
    });
}

tnk_status tnk_born_marginal(const tnk_tt* t, const size_t* keep, size_t n_keep,
                             tnk_tensor** out) {
    return guard([&] {
        require(t && out, "tnk_born_marginal: null argument");
        tnk::BornMachine b{t->v, std::nullopt};
        tnk::ModeSet ks(make_sizes(keep, n_keep, "kept modes"), t->v.sites());
        *out = wrap(tnk::born_marginal(b, ks));
    });
}

tnk_status tnk_rand_verify(const char* identity, const size_t* dims, size_t n_dims,
                           const tnk_tensor* sigma, const tnk_tensor* x, size_t samples,
                           uint64_t seed, tnk_tensor** out_estimate, tnk_tensor** out_analytic,
                           tnk_tensor** out_std_error, double* out_max_abs_z) {
    return guard([&] {
        require(identity != nullptr, "tnk_rand_verify: null identity");
        tnk::IdentityParams p;
        p.dims = make_sizes(dims, n_dims, "dims");
        if (sigma) p.sigma = sigma->v;
        if (x) p.x = x->v;
        tnk::IdentityReport r = tnk::verify_identity(identity, p, samples, seed);
        if (out_estimate) *out_estimate = wrap(std::move(r.estimate));
        if (out_analytic) *out_analytic = wrap(std::move(r.analytic));
        if (out_std_error) *out_std_error = wrap(std::move(r.std_error));
        if (out_max_abs_z) *out_max_abs_z = r.max_abs_z;
    });
}

}  // extern "C"
