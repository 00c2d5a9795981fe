#pragma once

#include "ainf/graded.hpp"
#include "ainf/structure.hpp"

#include <memory>
#include <optional>

namespace ainf {

/* Deformation retraction of the degree-(1,0) differential of a structure
 * onto its cohomology: p∘d = 0, d∘i = 0, p∘i = Id,
 * d∘h + h∘d = i∘p - Id, all exact. */
struct RetractionData {
    std::shared_ptr<GradedBasis> reduced; /* the cohomology space */
    LinearMap include;                    /* reduced -> total, degree 0 */
    LinearMap project;                    /* total -> reduced, degree 0 */
    LinearMap homotopy;                   /* total -> total, degree -1 */
    std::vector<DegreeRank> ranks;
    std::optional<LinearMap> induced_involution; /* on reduced, if equivariant */
};

/* Retraction data derived from the linear differential of m by exact
 * linear algebra, with complements chosen greedily in basis order. When an
 * involution commuting with the structure's differential is supplied, the
 * retraction additionally commutes with it. */
RetractionData derive_retraction(const GappedStructure& m, const LinearMap* cbar = nullptr);

struct MinimalModel {
    std::shared_ptr<GradedBasis> reduced;
    GappedStructure structure; /* weakly minimal, on the reduced space */
    GappedStructure inclusion; /* pre-homomorphism reduced -> total */
};

/* Weakly minimal model and inclusion quasi-isomorphism via the recursive
 * tree sum over the retraction, memoized per slot. Postconditions are
 * verified exactly: the output passes the structure relations, the
 * inclusion is a homomorphism and a quasi-isomorphism. */
MinimalModel build_minimal_model(const GappedStructure& m, const RetractionData& r,
                                 const TruncParams& trunc);

} // namespace ainf
