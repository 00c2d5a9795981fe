#pragma once

#include "ainf/hochschild.hpp"
#include "ainf/structure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ainf {

struct AntisymValidation {
    bool underlying_is_wedge = false;
    bool self_dual = false;
    bool involution_is_parity = false;
    bool flat = false;
    bool minimal = false;
    std::string first_failure; /* empty when everything passes */

    bool ok() const
    {
        return underlying_is_wedge && self_dual && involution_is_parity && flat && minimal;
    }
};

/* Checks that a weakly minimal structure is anti-symmetric: its binary
 * product is the wedge product of the ambient free algebra, it is
 * self-dual for the involution, and the involution is the parity map.
 * Flatness and minimality are asserted as consequences.
 * Throws if m is not weakly minimal. */
AntisymValidation validate_antisymmetric(const GappedStructure& m, const FreeGCA& gca,
                                         const LinearMap& cbar);

/* The operations at the lowest level above two, as Hochschild cochains of
 * the underlying algebra, each certified closed. Empty when none exist. */
std::vector<std::pair<SlotKey, Cochain>> obstruction_classes(const GappedStructure& m,
                                                             const FreeGCA& gca,
                                                             const TruncParams& trunc);

struct ObstructionStep {
    GappedStructure diffeo;    /* linear part Id, entries one level down */
    GappedStructure pulled;    /* pullback; strictly larger obstruction level */
};

/* One gauge step: primitives of the obstruction classes, symmetrized when
 * requested, assembled into a formal diffeomorphism whose pullback kills
 * the current level while fixing the binary operation. */
ObstructionStep obstruction_step(const GappedStructure& m, const FreeGCA& gca,
                                 const LinearMap& cbar, const TruncParams& trunc,
                                 bool symmetrize = true);

struct GaugeIteration {
    int index = 0;
    Rational level_before;                 /* nu at entry */
    std::vector<SlotKey> killed;           /* slots solved this round */
    std::optional<Rational> level_after;   /* nullopt = infinity */
};

struct FormalityResult {
    GappedStructure gauge;     /* homomorphism (C, final) -> (C, input) */
    GappedStructure final_structure;
    std::vector<GaugeIteration> log;
};

/* Iterated gauge steps until no operation with arity+energy above two
 * remains in the window. */
FormalityResult formality_run(const GappedStructure& m, const FreeGCA& gca,
                              const LinearMap& cbar, const TruncParams& trunc,
                              bool symmetrize = true);

struct ScrambleProfile {
    int entries = 4;
    int max_arity = 3;
    /* energies are drawn from multiples of step up to e_max */
    Rational step = Rational(1, 2);
};

struct Scramble {
    GappedStructure diffeo;    /* self-dual, linear part Id */
    GappedStructure structure; /* pullback of the wedge structure */
};

/* Seeded random self-dual formal diffeomorphism with identity linear part. */
GappedStructure random_self_dual_diffeo(const FreeGCA& gca, std::uint64_t seed,
                                        const ScrambleProfile& profile,
                                        const TruncParams& trunc);

/* Deterministic test instance: the wedge structure pulled back by a random
 * self-dual diffeomorphism. The output is flat, minimal, self-dual and
 * anti-symmetric by construction. */
Scramble scramble(const FreeGCA& gca, std::uint64_t seed, const ScrambleProfile& profile,
                  const TruncParams& trunc);

} // namespace ainf
