#pragma once

#include "ainf/graded.hpp"
#include "ainf/structure.hpp"

#include <map>
#include <optional>

namespace ainf {

/* Multilinear map A[1]^{otimes k} -> A of homogeneous degree on the
 * monomial basis of the free graded-commutative algebra. The stored degree
 * is the degree of the map out of the shifted tensor power, so the value
 * on a tuple t lives in degree  degree + sum |t_i| - k. */
struct Cochain {
    const FreeGCA* algebra = nullptr;
    int arity = 0;
    int degree = 0;
    std::map<TupleKey, SparseVec> values;

    static Cochain zero(const FreeGCA& a, int arity, int degree)
    {
        Cochain c;
        c.algebra = &a;
        c.arity = arity;
        c.degree = a.space().reduce_degree(degree);
        return c;
    }

    int value_degree(std::span<const int> idx) const
    {
        long long d = degree;
        for (int i : idx)
            d += algebra->space().degree(i) - 1;
        return algebra->space().reduce_degree(d);
    }

    const SparseVec* value(TupleKey t) const
    {
        auto it = values.find(t);
        return it == values.end() ? nullptr : &it->second;
    }
    void add_value(TupleKey t, const SparseVec& v)
    {
        if (v.is_zero())
            return;
        auto [it, fresh] = values.emplace(t, v);
        if (!fresh) {
            it->second += v;
            if (it->second.is_zero())
                values.erase(it);
        }
    }
    bool is_zero() const { return values.empty(); }
    Cochain scaled(const Rational& c) const;
    friend Cochain operator+(const Cochain& a, const Cochain& b);
    Cochain operator-() const { return scaled(Rational(-1)); }
    friend bool operator==(const Cochain& a, const Cochain& b)
    {
        return a.algebra == b.algebra && a.arity == b.arity && a.degree == b.degree &&
               a.values == b.values;
    }

    /* homogeneity and index bounds */
    void validate() const;
};

/* The Hochschild coboundary: arity k+1, degree +1, with the product of the
 * ambient free graded-commutative algebra. */
Cochain coboundary(const Cochain& eta);

/* Input reversal with the sign (-1)^{spe(tau;a)+k+1}, valued in the
 * opposite algebra; for graded-commutative algebras both products agree,
 * so the result lives on the same algebra. */
Cochain transpose_cochain(const Cochain& eta);

/* h^* eta = h^{-1} o eta o h^{otimes k}; h must be an invertible algebra
 * map of degree 0. */
Cochain pullback_cochain(const LinearMap& h, const Cochain& eta);

/* Value of the anti-symmetrized evaluation map on strictly increasing
 * generator words; defined on closed cochains. */
struct HKRValue {
    const FreeGCA* algebra = nullptr;
    int arity = 0;
    /* keyed by tuples of generator indices, strictly increasing */
    std::map<TupleKey, SparseVec> values;

    bool is_zero() const { return values.empty(); }
};

HKRValue hkr_evaluate(const Cochain& eta);

/* First generator tuple violating
 * eta(v_1,...,v_k) = -(-1)^{spe(tau;v)} eta(v_k,...,v_1); nullopt = pass. */
std::optional<TupleKey> antisymmetry_witness(const Cochain& eta);

inline bool is_antisymmetric(const Cochain& eta) { return !antisymmetry_witness(eta); }

/* Some eta with coboundary(eta) = zeta, by exact elimination on the
 * degree-pruned coefficient system; deterministic representative (free
 * coordinates zero). Requires zeta closed; nullopt when zeta is not exact. */
std::optional<Cochain> solve_primitive(const Cochain& zeta);

/* Spot-check of the bar-resolution translation on `samples` random basis
 * inputs: the cochain differential agrees with the induced differential on
 * module homomorphisms from the bar resolution. */
bool verify_bar_translation(const Cochain& eta, int samples, std::uint64_t seed);

/* One operation of a structure viewed as a Hochschild cochain of the
 * underlying algebra (degree 2 for structures, 1 for pre-homomorphisms). */
Cochain cochain_from_slot(const GappedStructure& s, const FreeGCA& algebra,
                          const SlotKey& slot);

} // namespace ainf
