#ifndef TNK_PROB_HPP
#define TNK_PROB_HPP

#include "tnk/tensor.hpp"
#include "tnk/tensor_train.hpp"

#include <map>
#include <optional>

namespace tnk {

/// Dense probability tensor: entries >= 0 and summing to one within 1e-10.
struct ProbTensor {
    Tensor t;
};

/// Validates and wraps; rejects a negative entry (reporting its index) or a
/// total-mass deviation above 1e-10.
ProbTensor prob_validate(const Tensor& t);

/// Sums out the modes not in `keep` (1-based, nonempty).
ProbTensor marginal(const ProbTensor& p, const ModeSet& keep);

/// Conditions on a partial assignment {mode (1-based) -> index (0-based)}:
/// slice, then renormalize by the event probability. Conditioning on every
/// mode yields the scalar point mass 1.0.
ProbTensor conditional(const ProbTensor& p, const std::map<std::size_t, std::size_t>& given);

/// TT of unnormalized square-root amplitudes; P(idx) = tt_entry(idx)^2 / zeta
/// with the normalizer computed lazily and cached (cores are immutable).
struct BornMachine {
    TT tt;
    mutable std::optional<double> zeta;
};

/// Normalizer zeta = sum over all indices of the squared entries, computed by
/// the doubled-network transfer contraction (left to right, never
/// materializing the dense tensor).
double born_normalizer(const BornMachine& b);

double born_prob(const BornMachine& b, const std::vector<std::size_t>& idx);

/// Marginal distribution over the kept modes: marginalized sites contribute
/// R^2 x R'^2 transfer matrices, kept sites leave the physical index open.
/// Requires prod(kept dims) <= 1e6.
Tensor born_marginal(const BornMachine& b, const ModeSet& keep);

}  // namespace tnk

#endif
