/* C interface to the tensor-network toolkit. All functions returning
 * tnk_status set a thread-local message retrievable via tnk_last_error()
 * on failure; out-parameters are written only on TNK_OK. Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching *_free function. */
#ifndef TNK_H
#define TNK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    TNK_OK = 0,
    TNK_ERR_INVALID = 1, /* bad arguments */
    TNK_ERR_DATA = 2,    /* malformed files or inconsistent inputs */
    TNK_ERR_NUMERIC = 3  /* numerical failure */
} tnk_status;

typedef struct tnk_tensor tnk_tensor;
typedef struct tnk_tt tnk_tt;
typedef struct tnk_mpo tnk_mpo;
typedef struct tnk_network tnk_network;

const char* tnk_last_error(void);

/* ---- dense tensors ---- */
tnk_status tnk_tensor_create(const size_t* shape, size_t order, const double* values,
                             tnk_tensor** out);
void tnk_tensor_free(tnk_tensor* t);
size_t tnk_tensor_order(const tnk_tensor* t);
size_t tnk_tensor_dim(const tnk_tensor* t, size_t k);
size_t tnk_tensor_size(const tnk_tensor* t);
const double* tnk_tensor_data(const tnk_tensor* t);
double tnk_tensor_max_abs_diff(const tnk_tensor* a, const tnk_tensor* b);
double tnk_tensor_norm(const tnk_tensor* t);

tnk_status tnk_tensor_read(const char* path, tnk_tensor** out);
tnk_status tnk_tensor_write(const char* path, const tnk_tensor* t);

/* row_modes are 1-based and strictly ascending */
tnk_status tnk_matricize(const tnk_tensor* t, const size_t* row_modes, size_t n_modes,
                         tnk_tensor** out);

/* ---- networks ---- */
tnk_status tnk_network_parse(const char* text, tnk_network** out);
tnk_status tnk_network_read(const char* path, tnk_network** out);
void tnk_network_free(tnk_network* g);
/* canonical single-line rendering; free with tnk_string_free */
tnk_status tnk_network_format(const tnk_network* g, char** out);
void tnk_string_free(char* s);

tnk_status tnk_contract(const tnk_network* g, const char* const* names,
                        const tnk_tensor* const* tensors, size_t n_bindings, tnk_tensor** out);
tnk_status tnk_rank_bound(const tnk_network* g, const char* const* names,
                          const tnk_tensor* const* tensors, size_t n_bindings,
                          const char* const* row_labels, size_t n_labels, uint64_t* out_bound,
                          int* out_degenerate);

/* ---- gradients ---- */
tnk_status tnk_jacobian(const tnk_network* g, const char* const* names,
                        const tnk_tensor* const* tensors, size_t n_bindings, const char* wrt,
                        tnk_tensor** out);
tnk_status tnk_finite_diff_jacobian(const tnk_network* g, const char* const* names,
                                    const tnk_tensor* const* tensors, size_t n_bindings,
                                    const char* wrt, double step, tnk_tensor** out);

/* ---- decompositions ---- */
/* factors must point to tnk_tensor_order(t) slots */
tnk_status tnk_cp_fit(const tnk_tensor* t, size_t rank, size_t max_iters, double tol,
                      uint64_t seed, tnk_tensor** factors, double* out_loss, size_t* out_iters,
                      int* out_converged);
tnk_status tnk_hosvd(const tnk_tensor* t, const size_t* rank_caps /* nullable, per mode */,
                     double tol, tnk_tensor** out_core, tnk_tensor** factors);

/* ---- tensor trains ---- */
tnk_status tnk_tt_svd(const tnk_tensor* t, double tol,
                      const size_t* rank_caps /* nullable, order-1 entries */, tnk_tt** out);
tnk_status tnk_tt_round(const tnk_tt* t, double tol, const size_t* rank_caps /* nullable */,
                        tnk_tt** out);
tnk_status tnk_tt_als(const tnk_tensor* t, const size_t* ranks /* order-1 entries */,
                      size_t sweeps, uint64_t seed, tnk_tt** out, double* out_final_loss);
tnk_status tnk_tt_reconstruct(const tnk_tt* t, tnk_tensor** out);
size_t tnk_tt_sites(const tnk_tt* t);
tnk_status tnk_tt_core(const tnk_tt* t, size_t k /* 1-based */, tnk_tensor** out);
tnk_status tnk_tt_read(const char* path, tnk_tt** out);
tnk_status tnk_tt_write(const char* path, const tnk_tt* t);
void tnk_tt_free(tnk_tt* t);

/* ---- matrix product operators ---- */
size_t tnk_mpo_sites(const tnk_mpo* m);
tnk_status tnk_mpo_core(const tnk_mpo* m, size_t k /* 1-based */, tnk_tensor** out);
tnk_status tnk_mpo_matvec(const tnk_mpo* m, const tnk_tt* v, tnk_tt** out);
tnk_status tnk_mpo_read(const char* path, tnk_mpo** out);
tnk_status tnk_mpo_write(const char* path, const tnk_mpo* m);
void tnk_mpo_free(tnk_mpo* m);

/* ---- probability ---- */
tnk_status tnk_prob_marginal(const tnk_tensor* p, const size_t* keep /* 1-based */, size_t n_keep,
                             tnk_tensor** out);
tnk_status tnk_prob_conditional(const tnk_tensor* p, const size_t* modes /* 1-based */,
                                const size_t* values /* 0-based */, size_t n_given,
                                tnk_tensor** out);
tnk_status tnk_born_normalizer(const tnk_tt* t, double* out);
tnk_status tnk_born_marginal(const tnk_tt* t, const size_t* keep /* 1-based */, size_t n_keep,
                             tnk_tensor** out);

/* ---- random-network expectation identities ---- */
tnk_status tnk_rand_verify(const char* identity, const size_t* dims, size_t n_dims,
                           const tnk_tensor* sigma /* nullable */,
                           const tnk_tensor* x /* nullable */, size_t samples, uint64_t seed,
                           tnk_tensor** out_estimate, tnk_tensor** out_analytic,
                           tnk_tensor** out_std_error, double* out_max_abs_z);

#ifdef __cplusplus
}
#endif

#endif
