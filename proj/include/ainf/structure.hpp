#pragma once

#include "ainf/graded.hpp"
#include "ainf/novikov.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace ainf {

/* A structure (operations m_{k,beta}, degree 2-k) or a pre-homomorphism
 * candidate / formal diffeomorphism (operations f_{k,beta}, degree 1-k). */
enum class Role { structure, prehom };

/* Basis tuple packed into 64 bits: arity in the top byte, one basis index
 * per byte below, first input most significant. Numeric order of keys of a
 * fixed arity is lexicographic order of tuples. */
using TupleKey = std::uint64_t;

constexpr int kMaxArity = 7;
constexpr int kMaxDim = 256;

inline TupleKey pack_tuple(std::span<const int> idx)
{
    TupleKey key = static_cast<TupleKey>(idx.size()) << 56;
    for (std::size_t i = 0; i < idx.size(); ++i)
        key |= static_cast<TupleKey>(static_cast<unsigned>(idx[i]) & 0xff)
               << (8 * (idx.size() - 1 - i));
    return key;
}

inline TupleKey pack_tuple(std::initializer_list<int> idx)
{
    return pack_tuple(std::span<const int>(idx.begin(), idx.size()));
}

inline int tuple_arity(TupleKey key) { return static_cast<int>(key >> 56); }

inline std::vector<int> unpack_tuple(TupleKey key)
{
    int k = tuple_arity(key);
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        idx[static_cast<std::size_t>(i)] = static_cast<int>((key >> (8 * (k - 1 - i))) & 0xff);
    return idx;
}

struct SlotKey {
    int arity = 0;
    Energy energy;

    friend bool operator<(const SlotKey& a, const SlotKey& b)
    {
        if (a.arity != b.arity)
            return a.arity < b.arity;
        return a.energy < b.energy;
    }
    friend bool operator==(const SlotKey& a, const SlotKey& b)
    {
        return a.arity == b.arity && a.energy == b.energy;
    }
};

using SlotTable = std::map<TupleKey, SparseVec>;

struct GappedStructure {
    const GradedBasis* src = nullptr;
    const GradedBasis* dst = nullptr;
    Role role = Role::structure;
    std::map<SlotKey, SlotTable> slots;

    static GappedStructure empty_structure(const GradedBasis& space)
    {
        GappedStructure s;
        s.src = s.dst = &space;
        s.role = Role::structure;
        return s;
    }
    static GappedStructure empty_prehom(const GradedBasis& from, const GradedBasis& to)
    {
        GappedStructure s;
        s.src = &from;
        s.dst = &to;
        s.role = Role::prehom;
        return s;
    }
    /* The identity formal diffeomorphism. */
    static GappedStructure identity(const GradedBasis& space);
    /* Strict pre-homomorphism with the given degree-0 linear part. */
    static GappedStructure strict(const LinearMap& f1);
    /* The structure whose only operation is the signed wedge product
     * (alpha_1, alpha_2) -> (-1)^{|alpha_1|} alpha_1 ^ alpha_2. */
    static GappedStructure canonical_wedge(const FreeGCA& gca);

    int degree_shift(int arity) const
    {
        return role == Role::structure ? 2 - arity : 1 - arity;
    }

    const SparseVec* entry(int arity, const Energy& energy, TupleKey t) const;
    void set_entry(int arity, const Energy& energy, TupleKey t, SparseVec v);
    void drop_empty();

    /* Multilinear evaluation of one slot on element arguments. */
    SparseVec eval_slot(const SlotKey& slot, std::span<const SparseVec> args) const;
    /* Slot evaluated on a basis tuple with one element argument spliced in
     * at `pos` (replacing nothing; the tuple provides the other inputs). */
    SparseVec eval_slot_spliced(const SlotKey& slot, std::span<const int> prefix,
                                const SparseVec& inserted, std::span<const int> suffix) const;

    /* Linear part at a given energy as a matrix; zero map when absent. */
    LinearMap linear_part(const Energy& energy) const;

    /* Degree homogeneity, window bounds, absence of the (0,0) slot. */
    void validate(const TruncParams& trunc) const;

    friend bool operator==(const GappedStructure& a, const GappedStructure& b)
    {
        return a.src == b.src && a.dst == b.dst && a.role == b.role && a.slots == b.slots;
    }
};

struct SlotWitness {
    SlotKey slot;
    TupleKey tuple = 0;
};

/* Gapped A-infinity relation checker over the window: output arities up to
 * k_max - 1 and energies up to e_max. Returns the violated slots, one
 * witness tuple each; empty means the relations hold exactly. */
std::vector<SlotWitness> check_ainf(const GappedStructure& m, const TruncParams& trunc);

/* Input reversal with the sign (-1)^{spe(tau;alpha)+k+1}. */
GappedStructure opposite(const GappedStructure& s);

/* Checks m_{k,b}(c(a_1),...,c(a_k)) = (-1)^{spe(tau;a)+k+1} c(m_{k,b}(a_k,...,a_1))
 * on every stored slot and basis tuple. Throws if c is not an involution. */
std::optional<SlotWitness> check_self_dual(const GappedStructure& m, const LinearMap& cbar);

/* Pre-homomorphism self-duality relative to involutions on both sides. */
std::optional<SlotWitness> check_self_dual_prehom(const GappedStructure& f,
                                                  const LinearMap& c_src,
                                                  const LinearMap& c_dst);

/* Gapped composition of pre-homomorphisms, truncated to the window. */
GappedStructure compose(const GappedStructure& g, const GappedStructure& f,
                        const TruncParams& trunc);

/* Both sides of the gapped homomorphism relation compared on every basis
 * tuple with output arity < k_max and energy <= e_max. */
std::optional<SlotWitness> check_homomorphism(const GappedStructure& f,
                                              const GappedStructure& mC,
                                              const GappedStructure& mD,
                                              const TruncParams& trunc);

/* Group inverse of a formal diffeomorphism within the window.
 * Throws if f has arity-0 entries or a singular linear part. */
GappedStructure invert_diffeo(const GappedStructure& f, const TruncParams& trunc);

/* Pull-back structure: the unique structure making f a homomorphism from
 * (C, f*m) to (C, m) within the window. */
GappedStructure pullback(const GappedStructure& f, const GappedStructure& m,
                         const TruncParams& trunc);

struct NuReport {
    /* min over nonzero slots of arity+energy above the role threshold;
     * nullopt encodes infinity (no such slot). */
    std::optional<Rational> value;
    std::optional<SlotKey> witness;
};

NuReport nu(const GappedStructure& s);

/* Minimal positive energy carried by the linear part; nullopt = infinity. */
std::optional<Energy> kappa(const GappedStructure& f);

struct ProductTable {
    const GradedBasis* space = nullptr;
    /* table[a * dim + b] = class product of basis elements a, b */
    std::vector<SparseVec> table;

    const SparseVec& at(int a, int b) const
    {
        return table[static_cast<std::size_t>(a) * static_cast<std::size_t>(space->dim()) +
                     static_cast<std::size_t>(b)];
    }
    SparseVec multiply(const SparseVec& x, const SparseVec& y) const;
};

/* Multiplication table [a1] o [a2] = (-1)^{|a1|} m_{2,0}(a1,a2) of a weakly
 * minimal structure; associativity is verified exactly. */
ProductTable underlying_product(const GappedStructure& m);

/* Whether the linear part of f induces an isomorphism on cohomology.
 * Throws if f_{1,0} is not a map of complexes. */
bool is_quasi_iso(const GappedStructure& f, const GappedStructure& mC,
                  const GappedStructure& mD);

} // namespace ainf
