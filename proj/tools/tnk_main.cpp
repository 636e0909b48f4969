// Command-line front end; talks to the toolkit exclusively through the
// C interface in tnk.h. Exit codes: 0 success, 1 usage, 2 bad input data,
// 3 numerical failure.
#include "tnk.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

int lib_fail(tnk_status s) {
    std::fprintf(stderr, "error: %s\n", tnk_last_error());
    return s == TNK_ERR_NUMERIC ? 3 : 2;
}

std::vector<size_t> parse_size_list(const std::string& text, const std::string& flag) {
    std::vector<size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string tok = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(static_cast<size_t>(v));
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "expected a comma-separated list of integers");
        }
        pos = comma + 1;
    }
    return out;
}

void print_tensor(const tnk_tensor* t, std::FILE* f) {
    std::fprintf(f, "TEN 1\n");
    for (size_t k = 0; k < tnk_tensor_order(t); ++k)
        std::fprintf(f, "%s%zu", k ? " " : "", tnk_tensor_dim(t, k));
    std::fprintf(f, "\n");
    const size_t n = tnk_tensor_size(t);
    const double* v = tnk_tensor_data(t);
    for (size_t i = 0; i < n; ++i)
        std::fprintf(f, "%.17g%c", v[i], ((i + 1) % 8 == 0 || i + 1 == n) ? '\n' : ' ');
}

// Writes to the path when given, otherwise prints to stdout. Consumes t.
int emit_tensor(tnk_tensor* t, const std::string& path) {
    if (path.empty()) {
        print_tensor(t, stdout);
        tnk_tensor_free(t);
        return 0;
    }
    const tnk_status s = tnk_tensor_write(path.c_str(), t);
    tnk_tensor_free(t);
    return s == TNK_OK ? 0 : lib_fail(s);
}

struct BindingSet {
    std::vector<std::string> names;
    std::vector<tnk_tensor*> tensors;

    ~BindingSet() {
        for (tnk_tensor* t : tensors) tnk_tensor_free(t);
    }
    std::vector<const char*> name_ptrs() const {
        std::vector<const char*> p;
        for (const std::string& n : names) p.push_back(n.c_str());
        return p;
    }
    std::vector<const tnk_tensor*> tensor_ptrs() const {
        return {tensors.begin(), tensors.end()};
    }
};

// Each spec is NAME=FILE.ten.
int load_bindings(const std::vector<std::string>& specs, BindingSet& out) {
    for (const std::string& spec : specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "error: --bind expects NAME=FILE, got `%s`\n", spec.c_str());
            return 1;
        }
        tnk_tensor* t = nullptr;
        const tnk_status s = tnk_tensor_read(spec.substr(eq + 1).c_str(), &t);
        if (s != TNK_OK) return lib_fail(s);
        out.names.push_back(spec.substr(0, eq));
        out.tensors.push_back(t);
    }
    return 0;
}

struct NetworkHandle {
    tnk_network* g = nullptr;
    ~NetworkHandle() { tnk_network_free(g); }
};
struct TTHandle {
    tnk_tt* t = nullptr;
    ~TTHandle() { tnk_tt_free(t); }
};
struct MpoHandle {
    tnk_mpo* m = nullptr;
    ~MpoHandle() { tnk_mpo_free(m); }
};

void print_tt_ranks(const tnk_tt* t) {
    std::printf("ranks=");
    const size_t n = tnk_tt_sites(t);
    for (size_t k = 1; k < n; ++k) {
        tnk_tensor* core = nullptr;
        if (tnk_tt_core(t, k, &core) != TNK_OK) break;
        std::printf("%s%zu", k > 1 ? "," : "", tnk_tensor_dim(core, 2));
        tnk_tensor_free(core);
    }
    std::printf("\n");
}

double max_abs(const tnk_tensor* t) {
    double m = 0.0;
    const double* v = tnk_tensor_data(t);
    for (size_t i = 0; i < tnk_tensor_size(t); ++i)
        if (std::abs(v[i]) > m) m = std::abs(v[i]);
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor-network toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // --- contract ---
    struct {
        std::string net, out;
        std::vector<std::string> binds;
    } c_contract;
    {
        CLI::App* cmd = app.add_subcommand("contract", "contract a network to a dense tensor");
        cmd->add_option("network", c_contract.net, "network file (.tn)")->required();
        cmd->add_option("--bind", c_contract.binds, "tensor binding NAME=FILE.ten");
        cmd->add_option("-o,--output", c_contract.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            NetworkHandle net;
            tnk_status s = tnk_network_read(c_contract.net.c_str(), &net.g);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            BindingSet b;
            if ((rc = load_bindings(c_contract.binds, b)) != 0) return;
            tnk_tensor* out = nullptr;
            s = tnk_contract(net.g, b.name_ptrs().data(), b.tensor_ptrs().data(),
                             b.names.size(), &out);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_contract.out);
        });
    }

    // --- rank-bound ---
    struct {
        std::string net, rows;
        std::vector<std::string> binds;
    } c_rb;
    {
        CLI::App* cmd = app.add_subcommand("rank-bound", "cut-based matricization rank bound");
        cmd->add_option("network", c_rb.net, "network file (.tn)")->required();
        cmd->add_option("--bind", c_rb.binds, "tensor binding NAME=FILE.ten");
        cmd->add_option("--rows", c_rb.rows, "comma-separated row output labels")->required();
        cmd->callback([&] {
            NetworkHandle net;
            tnk_status s = tnk_network_read(c_rb.net.c_str(), &net.g);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            BindingSet b;
            if ((rc = load_bindings(c_rb.binds, b)) != 0) return;
            std::vector<std::string> labels;
            std::size_t pos = 0;
            while (pos <= c_rb.rows.size()) {
                std::size_t comma = c_rb.rows.find(',', pos);
                if (comma == std::string::npos) comma = c_rb.rows.size();
                labels.push_back(c_rb.rows.substr(pos, comma - pos));
                pos = comma + 1;
            }
            std::vector<const char*> lptr;
            for (const std::string& l : labels) lptr.push_back(l.c_str());
            uint64_t bound = 0;
            int degenerate = 0;
            s = tnk_rank_bound(net.g, b.name_ptrs().data(), b.tensor_ptrs().data(),
                               b.names.size(), lptr.data(), lptr.size(), &bound, &degenerate);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::printf("bound=%llu\n", static_cast<unsigned long long>(bound));
            std::printf("degenerate=%d\n", degenerate);
        });
    }

    // --- matricize ---
    struct {
        std::string in, rows, out;
    } c_mat;
    {
        CLI::App* cmd = app.add_subcommand("matricize", "unfold a tensor into a matrix");
        cmd->add_option("tensor", c_mat.in, "input tensor file")->required();
        cmd->add_option("--rows", c_mat.rows, "row modes, 1-based ascending, e.g. 1,3")
            ->required();
        cmd->add_option("-o,--output", c_mat.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            const std::vector<size_t> rows = parse_size_list(c_mat.rows, "--rows");
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_mat.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* out = nullptr;
            s = tnk_matricize(t, rows.data(), rows.size(), &out);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_mat.out);
        });
    }

    // --- cp-fit ---
    struct {
        std::string in, prefix;
        size_t rank = 1, max_iters = 5000;
        double tol = 1e-10;
        uint64_t seed = 0;
    } c_cp;
    {
        CLI::App* cmd = app.add_subcommand("cp-fit", "gradient-descent CP factorization");
        cmd->add_option("tensor", c_cp.in, "input tensor file")->required();
        cmd->add_option("--rank", c_cp.rank, "CP rank")->required();
        cmd->add_option("--max-iters", c_cp.max_iters, "iteration cap");
        cmd->add_option("--tol", c_cp.tol, "relative loss-change stop");
        cmd->add_option("--seed", c_cp.seed, "init seed");
        cmd->add_option("--out-prefix", c_cp.prefix, "write factor k to PREFIXk.ten")
            ->required();
        cmd->callback([&] {
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_cp.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::vector<tnk_tensor*> factors(tnk_tensor_order(t), nullptr);
            double loss = 0.0;
            size_t iters = 0;
            int converged = 0;
            s = tnk_cp_fit(t, c_cp.rank, c_cp.max_iters, c_cp.tol, c_cp.seed, factors.data(),
                           &loss, &iters, &converged);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            for (size_t k = 0; k < factors.size() && rc == 0; ++k)
                rc = emit_tensor(factors[k], c_cp.prefix + std::to_string(k + 1) + ".ten");
            if (rc != 0) return;
            std::printf("loss=%.17g\n", loss);
            std::printf("iters=%zu\n", iters);
            std::printf("converged=%d\n", converged);
        });
    }

    // --- hosvd ---
    struct {
        std::string in, caps, prefix;
        double tol = 0.0;
    } c_ho;
    {
        CLI::App* cmd = app.add_subcommand("hosvd", "higher-order SVD (Tucker)");
        cmd->add_option("tensor", c_ho.in, "input tensor file")->required();
        cmd->add_option("--caps", c_ho.caps, "per-mode rank caps, e.g. 2,3,2");
        cmd->add_option("--tol", c_ho.tol, "relative singular-value cutoff");
        cmd->add_option("--out-prefix", c_ho.prefix,
                        "write PREFIXcore.ten and factor k to PREFIXk.ten")
            ->required();
        cmd->callback([&] {
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_ho.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::vector<size_t> caps;
            if (!c_ho.caps.empty()) {
                caps = parse_size_list(c_ho.caps, "--caps");
                if (caps.size() != tnk_tensor_order(t)) {
                    tnk_tensor_free(t);
                    std::fprintf(stderr, "error: --caps needs one entry per mode\n");
                    rc = 2;
                    return;
                }
            }
            std::vector<tnk_tensor*> factors(tnk_tensor_order(t), nullptr);
            tnk_tensor* core = nullptr;
            s = tnk_hosvd(t, caps.empty() ? nullptr : caps.data(), c_ho.tol, &core,
                          factors.data());
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::printf("core-shape=");
            for (size_t k = 0; k < tnk_tensor_order(core); ++k)
                std::printf("%s%zu", k ? "," : "", tnk_tensor_dim(core, k));
            std::printf("\n");
            rc = emit_tensor(core, c_ho.prefix + "core.ten");
            for (size_t k = 0; k < factors.size() && rc == 0; ++k)
                rc = emit_tensor(factors[k], c_ho.prefix + std::to_string(k + 1) + ".ten");
        });
    }

    // --- tt-svd ---
    struct {
        std::string in, caps, out;
        double tol = 0.0;
    } c_ttsvd;
    {
        CLI::App* cmd = app.add_subcommand("tt-svd", "tensor-train decomposition");
        cmd->add_option("tensor", c_ttsvd.in, "input tensor file")->required();
        cmd->add_option("--tol", c_ttsvd.tol, "relative reconstruction error target");
        cmd->add_option("--caps", c_ttsvd.caps, "internal rank caps, e.g. 2,3,2");
        cmd->add_option("-o,--output", c_ttsvd.out, "output .tt file")->required();
        cmd->callback([&] {
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_ttsvd.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::vector<size_t> caps;
            if (!c_ttsvd.caps.empty()) {
                caps = parse_size_list(c_ttsvd.caps, "--caps");
                if (tnk_tensor_order(t) > 0 && caps.size() != tnk_tensor_order(t) - 1) {
                    tnk_tensor_free(t);
                    std::fprintf(stderr, "error: --caps needs order-1 entries\n");
                    rc = 2;
                    return;
                }
            }
            TTHandle tt;
            s = tnk_tt_svd(t, c_ttsvd.tol, caps.empty() ? nullptr : caps.data(), &tt.t);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            s = tnk_tt_write(c_ttsvd.out.c_str(), tt.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            print_tt_ranks(tt.t);
        });
    }

    // --- tt-round ---
    struct {
        std::string in, caps, out;
        double tol = 0.0;
    } c_ttr;
    {
        CLI::App* cmd = app.add_subcommand("tt-round", "tensor-train rank reduction");
        cmd->add_option("tt", c_ttr.in, "input .tt file")->required();
        cmd->add_option("--tol", c_ttr.tol, "relative error budget");
        cmd->add_option("--caps", c_ttr.caps, "internal rank caps");
        cmd->add_option("-o,--output", c_ttr.out, "output .tt file")->required();
        cmd->callback([&] {
            TTHandle in;
            tnk_status s = tnk_tt_read(c_ttr.in.c_str(), &in.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::vector<size_t> caps;
            if (!c_ttr.caps.empty()) {
                caps = parse_size_list(c_ttr.caps, "--caps");
                if (caps.size() != tnk_tt_sites(in.t) - 1) {
                    std::fprintf(stderr, "error: --caps needs sites-1 entries\n");
                    rc = 2;
                    return;
                }
            }
            TTHandle out;
            s = tnk_tt_round(in.t, c_ttr.tol, caps.empty() ? nullptr : caps.data(), &out.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            s = tnk_tt_write(c_ttr.out.c_str(), out.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            print_tt_ranks(out.t);
        });
    }

    // --- tt-als ---
    struct {
        std::string in, ranks, out;
        size_t sweeps = 5;
        uint64_t seed = 0;
    } c_als;
    {
        CLI::App* cmd = app.add_subcommand("tt-als", "single-site alternating least squares");
        cmd->add_option("tensor", c_als.in, "target tensor file")->required();
        cmd->add_option("--ranks", c_als.ranks, "internal ranks, e.g. 2,3,2")->required();
        cmd->add_option("--sweeps", c_als.sweeps, "full sweeps");
        cmd->add_option("--seed", c_als.seed, "init seed");
        cmd->add_option("-o,--output", c_als.out, "output .tt file")->required();
        cmd->callback([&] {
            const std::vector<size_t> ranks = parse_size_list(c_als.ranks, "--ranks");
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_als.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            if (tnk_tensor_order(t) > 0 && ranks.size() != tnk_tensor_order(t) - 1) {
                tnk_tensor_free(t);
                std::fprintf(stderr, "error: --ranks needs order-1 entries\n");
                rc = 2;
                return;
            }
            TTHandle out;
            double loss = 0.0;
            s = tnk_tt_als(t, ranks.data(), c_als.sweeps, c_als.seed, &out.t, &loss);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            s = tnk_tt_write(c_als.out.c_str(), out.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::printf("loss=%.17g\n", loss);
        });
    }

    // --- tt-reconstruct ---
    struct {
        std::string in, out;
    } c_ttrec;
    {
        CLI::App* cmd = app.add_subcommand("tt-reconstruct", "materialize a tensor train");
        cmd->add_option("tt", c_ttrec.in, "input .tt file")->required();
        cmd->add_option("-o,--output", c_ttrec.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            TTHandle in;
            tnk_status s = tnk_tt_read(c_ttrec.in.c_str(), &in.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* out = nullptr;
            s = tnk_tt_reconstruct(in.t, &out);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_ttrec.out);
        });
    }

    // --- mpo-matvec ---
    struct {
        std::string mpo, vec, out;
    } c_mv;
    {
        CLI::App* cmd = app.add_subcommand("mpo-matvec", "apply an MPO to a tensor train");
        cmd->add_option("mpo", c_mv.mpo, "input .mpo file")->required();
        cmd->add_option("tt", c_mv.vec, "input .tt file")->required();
        cmd->add_option("-o,--output", c_mv.out, "output .tt file")->required();
        cmd->callback([&] {
            MpoHandle m;
            tnk_status s = tnk_mpo_read(c_mv.mpo.c_str(), &m.m);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            TTHandle v;
            s = tnk_tt_read(c_mv.vec.c_str(), &v.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            TTHandle out;
            s = tnk_mpo_matvec(m.m, v.t, &out.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            s = tnk_tt_write(c_mv.out.c_str(), out.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            print_tt_ranks(out.t);
        });
    }

    // --- gradcheck ---
    struct {
        std::string net, wrt;
        std::vector<std::string> binds;
        double step = 1e-5, tol = 1e-5;
    } c_gc;
    {
        CLI::App* cmd =
            app.add_subcommand("gradcheck", "node-removal Jacobian vs central differences");
        cmd->add_option("network", c_gc.net, "network file (.tn)")->required();
        cmd->add_option("--bind", c_gc.binds, "tensor binding NAME=FILE.ten");
        cmd->add_option("--wrt", c_gc.wrt, "differentiated tensor name")->required();
        cmd->add_option("--step", c_gc.step, "finite-difference step");
        cmd->add_option("--tol", c_gc.tol, "max allowed relative error");
        cmd->callback([&] {
            NetworkHandle net;
            tnk_status s = tnk_network_read(c_gc.net.c_str(), &net.g);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            BindingSet b;
            if ((rc = load_bindings(c_gc.binds, b)) != 0) return;
            tnk_tensor* jac = nullptr;
            s = tnk_jacobian(net.g, b.name_ptrs().data(), b.tensor_ptrs().data(),
                             b.names.size(), c_gc.wrt.c_str(), &jac);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* fd = nullptr;
            s = tnk_finite_diff_jacobian(net.g, b.name_ptrs().data(), b.tensor_ptrs().data(),
                                         b.names.size(), c_gc.wrt.c_str(), c_gc.step, &fd);
            if (s != TNK_OK) {
                tnk_tensor_free(jac);
                rc = lib_fail(s);
                return;
            }
            const double diff = tnk_tensor_max_abs_diff(jac, fd);
            const double scale = max_abs(fd);
            const double rel = scale > 0.0 ? diff / scale : diff;
            tnk_tensor_free(jac);
            tnk_tensor_free(fd);
            std::printf("max_rel_err=%.17g\n", rel);
            if (rel > c_gc.tol) {
                std::fprintf(stderr, "error: gradient check failed: %.3g > %.3g\n", rel,
                             c_gc.tol);
                rc = 3;
            }
        });
    }

    // --- prob-marginal ---
    struct {
        std::string in, keep, out;
    } c_pm;
    {
        CLI::App* cmd = app.add_subcommand("prob-marginal", "marginal of a probability tensor");
        cmd->add_option("tensor", c_pm.in, "input probability tensor file")->required();
        cmd->add_option("--keep", c_pm.keep, "kept modes, 1-based ascending")->required();
        cmd->add_option("-o,--output", c_pm.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            const std::vector<size_t> keep = parse_size_list(c_pm.keep, "--keep");
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_pm.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* out = nullptr;
            s = tnk_prob_marginal(t, keep.data(), keep.size(), &out);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_pm.out);
        });
    }

    // --- prob-conditional ---
    struct {
        std::string in, given, out;
    } c_pc;
    {
        CLI::App* cmd =
            app.add_subcommand("prob-conditional", "condition a probability tensor");
        cmd->add_option("tensor", c_pc.in, "input probability tensor file")->required();
        cmd->add_option("--given", c_pc.given, "assignment list MODE=INDEX, e.g. 2=0,3=1")
            ->required();
        cmd->add_option("-o,--output", c_pc.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            std::vector<size_t> modes, values;
            std::size_t pos = 0;
            while (pos <= c_pc.given.size()) {
                std::size_t comma = c_pc.given.find(',', pos);
                if (comma == std::string::npos) comma = c_pc.given.size();
                const std::string tok = c_pc.given.substr(pos, comma - pos);
                const std::size_t eq = tok.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--given", "expected MODE=INDEX pairs");
                try {
                    modes.push_back(std::stoull(tok.substr(0, eq)));
                    values.push_back(std::stoull(tok.substr(eq + 1)));
                } catch (const std::exception&) {
                    throw CLI::ValidationError("--given", "expected MODE=INDEX pairs");
                }
                pos = comma + 1;
            }
            tnk_tensor* t = nullptr;
            tnk_status s = tnk_tensor_read(c_pc.in.c_str(), &t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* out = nullptr;
            s = tnk_prob_conditional(t, modes.data(), values.data(), modes.size(), &out);
            tnk_tensor_free(t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_pc.out);
        });
    }

    // --- born-normalize ---
    struct {
        std::string in;
    } c_bn;
    {
        CLI::App* cmd = app.add_subcommand("born-normalize", "Born-machine normalizer");
        cmd->add_option("tt", c_bn.in, "amplitude .tt file")->required();
        cmd->callback([&] {
            TTHandle in;
            tnk_status s = tnk_tt_read(c_bn.in.c_str(), &in.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            double zeta = 0.0;
            s = tnk_born_normalizer(in.t, &zeta);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            std::printf("zeta=%.17g\n", zeta);
        });
    }

    // --- born-marginal ---
    struct {
        std::string in, keep, out;
    } c_bm;
    {
        CLI::App* cmd = app.add_subcommand("born-marginal", "Born-machine marginal");
        cmd->add_option("tt", c_bm.in, "amplitude .tt file")->required();
        cmd->add_option("--keep", c_bm.keep, "kept modes, 1-based ascending")->required();
        cmd->add_option("-o,--output", c_bm.out, "output tensor file (default stdout)");
        cmd->callback([&] {
            const std::vector<size_t> keep = parse_size_list(c_bm.keep, "--keep");
            TTHandle in;
            tnk_status s = tnk_tt_read(c_bm.in.c_str(), &in.t);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* out = nullptr;
            s = tnk_born_marginal(in.t, keep.data(), keep.size(), &out);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            rc = emit_tensor(out, c_bm.out);
        });
    }

    // --- rand-verify ---
    struct {
        std::string identity, dims, sigma, x;
        size_t samples = 200000;
        uint64_t seed = 0;
        double zmax = 5.0;
    } c_rv;
    {
        CLI::App* cmd =
            app.add_subcommand("rand-verify", "Monte-Carlo check of a closed-form identity");
        cmd->add_option("identity", c_rv.identity,
                        "catalog name (gram-mean, outer-pair, frob-mean, prod-norm, isserlis4, "
                        "gram-outer2, ab-outer2, trace-quartic, chain-example)")
            ->required();
        cmd->add_option("--dims", c_rv.dims, "identity dimension parameters");
        cmd->add_option("--sigma", c_rv.sigma, "covariance tensor file (isserlis4)");
        cmd->add_option("--x", c_rv.x, "deterministic matrix file (trace-quartic)");
        cmd->add_option("--samples", c_rv.samples, "Monte-Carlo samples");
        cmd->add_option("--seed", c_rv.seed, "sampling seed");
        cmd->add_option("--zmax", c_rv.zmax, "max allowed |z| score");
        cmd->callback([&] {
            std::string id = c_rv.identity;
            for (char& ch : id)
                if (ch == '-') ch = '_';
            std::vector<size_t> dims;
            if (!c_rv.dims.empty()) dims = parse_size_list(c_rv.dims, "--dims");
            tnk_tensor* sigma = nullptr;
            tnk_tensor* x = nullptr;
            tnk_status s = TNK_OK;
            if (!c_rv.sigma.empty() && (s = tnk_tensor_read(c_rv.sigma.c_str(), &sigma))) {
                rc = lib_fail(s);
                return;
            }
            if (!c_rv.x.empty() && (s = tnk_tensor_read(c_rv.x.c_str(), &x))) {
                tnk_tensor_free(sigma);
                rc = lib_fail(s);
                return;
            }
            tnk_tensor* est = nullptr;
            tnk_tensor* ana = nullptr;
            tnk_tensor* se = nullptr;
            double max_z = 0.0;
            s = tnk_rand_verify(id.c_str(), dims.data(), dims.size(), sigma, x, c_rv.samples,
                                c_rv.seed, &est, &ana, &se, &max_z);
            tnk_tensor_free(sigma);
            tnk_tensor_free(x);
            if (s != TNK_OK) {
                rc = lib_fail(s);
                return;
            }
            if (tnk_tensor_order(est) == 0) {
                std::printf("estimate=%.17g\n", tnk_tensor_data(est)[0]);
                std::printf("analytic=%.17g\n", tnk_tensor_data(ana)[0]);
                std::printf("stderr=%.17g\n", tnk_tensor_data(se)[0]);
            }
            std::printf("samples=%zu\n", c_rv.samples);
            std::printf("max_z=%.17g\n", max_z);
            tnk_tensor_free(est);
            tnk_tensor_free(ana);
            tnk_tensor_free(se);
            if (max_z > c_rv.zmax) {
                std::fprintf(stderr, "error: identity check failed: max|z| %.3g > %.3g\n",
                             max_z, c_rv.zmax);
                rc = 3;
            }
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return rc;
}
