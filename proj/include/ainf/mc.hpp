#pragma once

#include "ainf/novikov.hpp"
#include "ainf/structure.hpp"

#include <map>

namespace ainf {

/* Element of the ambient space with Novikov scalar coefficients. */
using NovVec = std::map<int, NovElem>;

bool novvec_is_zero(const NovVec& v);
NovVec novvec_truncate(const NovVec& v, const Energy& e_max);
void novvec_add(NovVec& acc, int idx, const Energy& e, const Rational& c);

/* Degree-1 element with every coefficient in the maximal ideal. Throws on
 * wrong degree or an energy-0 coefficient. */
void validate_candidate(const GradedBasis& space, const NovVec& b);

/* The curvature sum of b, truncated modulo T^{e_max}; b is a bounding
 * cochain exactly when the result is zero. */
NovVec mc_residual(const GappedStructure& m, const NovVec& b, const TruncParams& trunc);

/* The deformed structure: operations with b inserted in all positions.
 * deform(m, 0) returns m unchanged. */
GappedStructure deform(const GappedStructure& m, const NovVec& b, const TruncParams& trunc);

/* Whether c exhibits a gauge equivalence from b0 to b1:
 * b1 - b0 = sum m_{k0+k1+1}(b0^k0, c, b1^k1) modulo T^{e_max}. */
bool check_gauge(const GappedStructure& m, const NovVec& b0, const NovVec& b1,
                 const NovVec& c, const TruncParams& trunc);

struct FloerReport {
    struct Row {
        int degree;
        int dim;
        int rank_out; /* rank of the deformed differential out of this degree */
        int hf_rank;
    };
    std::vector<Row> rows;
    /* Ranks are certified modulo T^{precision}: the window bound minus the
     * valuations of the pivots consumed by the elimination. */
    Energy precision;
    bool differential_zero = false;
};

/* Per-degree rank of the cohomology of the deformed differential, by
 * elimination over the truncated ring with minimal-valuation pivoting.
 * Requires mc_residual(m, b) = 0. */
FloerReport floer_rank(const GappedStructure& m, const NovVec& b, const TruncParams& trunc);

} // namespace ainf
