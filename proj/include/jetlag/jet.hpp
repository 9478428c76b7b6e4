#pragma once

#include <vector>

#include "jetlag/expr.hpp"
#include "jetlag/signature.hpp"

namespace jetlag {

/// How a total derivative treats symbols it cannot resolve inside the jet
/// coordinates themselves.
///   Prolongation: u^a_I differentiates to the higher jet u^a_{I i}; momenta
///     are rejected. Used on densities living on a jet prolongation.
///   Formal: u^a_I and p_a^{I,i} differentiate to opaque first-derivative
///     symbols du/dp. Used when writing first-order field equations.
enum class DerivMode { Prolongation, Formal };

long long binomial(int n, int k);

/// Number of distinct symmetric multi-indices of exactly this order over n
/// coordinates.
long long multi_index_count(int n, int order);

/// Distinct multi-indices of exactly `order`, ascending lexicographic.
std::vector<MultiIndex> multi_indices_of_order(int n, int order);

/// Distinct multi-indices of order 0..max_order, sorted by order then
/// lexicographic. The first entry is always the empty index.
std::vector<MultiIndex> enumerate_multi_indices(int n, int max_order);

/// All (J, j) with append(J, j) == K, ascending in j: one pair per distinct
/// value of K. The empty index has no decompositions. This is where all
/// combinatorial multiplicity of symmetric indices lives.
std::vector<std::pair<MultiIndex, int>> decompositions(const MultiIndex& K);

/// Total derivative D_i. A negative max_order means sig.k + 2. In
/// Prolongation mode, producing a jet beyond max_order throws instead of
/// silently growing the space.
Expr total_derivative(const Expr& e, int i, const BundleSignature& sig,
                      DerivMode mode, int max_order = -1);

/// D_I as the composition of D_i over the entries of I.
Expr iterated_total_derivative(const Expr& e, const MultiIndex& I,
                               const BundleSignature& sig, DerivMode mode,
                               int max_order = -1);

/// Checks that e is a density on the order-k jet space of sig: jet symbols
/// only, all indices in range. Throws ExprError otherwise.
void validate_density(const Expr& e, const BundleSignature& sig);

}  // namespace jetlag
