#pragma once

#include "ainf/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ainf {

/* Finite graded vector space over the rationals with an ordered basis.
 * modulus N is a nonnegative even integer; N = 0 means integer grading. */
struct GradedBasis {
    int modulus = 0;
    std::vector<std::string> names;
    std::vector<int> degrees;

    int dim() const { return static_cast<int>(names.size()); }

    int reduce_degree(long long d) const
    {
        if (modulus == 0)
            return static_cast<int>(d);
        long long r = d % modulus;
        if (r < 0)
            r += modulus;
        return static_cast<int>(r);
    }

    int degree(int idx) const { return degrees[static_cast<std::size_t>(idx)]; }
    bool same_space(const GradedBasis& other) const { return this == &other; }
};

/* Sparse rational vector on a GradedBasis, indices strictly increasing,
 * no zero coefficients. */
class SparseVec {
public:
    using Term = std::pair<int, Rational>;

    SparseVec() = default;
    static SparseVec unit(int idx, Rational c = Rational(1))
    {
        SparseVec v;
        if (!c.is_zero())
            v.terms_.emplace_back(idx, std::move(c));
        return v;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coeff(int idx) const
    {
        for (const auto& t : terms_)
            if (t.first == idx)
                return t.second;
        return Rational(0);
    }

    void add_term(int idx, const Rational& c)
    {
        if (c.is_zero())
            return;
        auto it = terms_.begin();
        while (it != terms_.end() && it->first < idx)
            ++it;
        if (it != terms_.end() && it->first == idx) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        } else {
            terms_.insert(it, {idx, c});
        }
    }

    void add_scaled(const SparseVec& other, const Rational& c)
    {
        if (c.is_zero())
            return;
        for (const auto& t : other.terms_)
            add_term(t.first, t.second * c);
    }

    SparseVec& operator+=(const SparseVec& o)
    {
        add_scaled(o, Rational(1));
        return *this;
    }
    SparseVec& operator-=(const SparseVec& o)
    {
        add_scaled(o, Rational(-1));
        return *this;
    }
    friend SparseVec operator+(SparseVec a, const SparseVec& b)
    {
        a += b;
        return a;
    }
    friend SparseVec operator-(SparseVec a, const SparseVec& b)
    {
        a -= b;
        return a;
    }
    SparseVec operator-() const
    {
        SparseVec r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }
    SparseVec scaled(const Rational& c) const
    {
        SparseVec r;
        if (c.is_zero())
            return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_)
            t.second *= c;
        return r;
    }

    friend bool operator==(const SparseVec& a, const SparseVec& b)
    {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const SparseVec& a, const SparseVec& b) { return !(a == b); }

    /* Degree of a homogeneous vector; nullopt for 0 or mixed degrees. */
    std::optional<int> homogeneous_degree(const GradedBasis& space) const
    {
        if (terms_.empty())
            return std::nullopt;
        int d = space.degree(terms_.front().first);
        for (const auto& t : terms_)
            if (space.degree(t.first) != d)
                return std::nullopt;
        return d;
    }

private:
    std::vector<Term> terms_;
};

/* Sign (-1)^{sum over inversions of sigma of (|a_{s(i)}|+1)(|a_{s(j)}|+1)}
 * picked up when the list a_1..a_k is rearranged to a_{s(1)}..a_{s(k)},
 * with degrees weighted through the shift by one.
 * perm[i] = s(i+1)-1 (0-based images); degrees are of the original list. */
int shifted_koszul_sign(std::span<const int> perm, std::span<const int> degrees);

/* Same sign for the full reversal of a k-list, times (-1)^{k+1}: the
 * prefactor of the opposite structure / transpose conventions. */
int reversal_op_sign(std::span<const int> degrees);

/* Linear map between based graded spaces of pure degree shift, stored
 * column-wise (image of each source basis vector). */
struct LinearMap {
    const GradedBasis* src = nullptr;
    const GradedBasis* dst = nullptr;
    int deg_shift = 0;
    std::vector<SparseVec> cols;

    static LinearMap zero(const GradedBasis& s, const GradedBasis& d, int shift)
    {
        LinearMap m;
        m.src = &s;
        m.dst = &d;
        m.deg_shift = shift;
        m.cols.assign(static_cast<std::size_t>(s.dim()), SparseVec());
        return m;
    }
    static LinearMap identity(const GradedBasis& s)
    {
        LinearMap m = zero(s, s, 0);
        for (int j = 0; j < s.dim(); ++j)
            m.cols[static_cast<std::size_t>(j)] = SparseVec::unit(j);
        return m;
    }

    const SparseVec& column(int j) const { return cols[static_cast<std::size_t>(j)]; }

    SparseVec apply(const SparseVec& v) const
    {
        SparseVec r;
        for (const auto& t : v.terms())
            r.add_scaled(column(t.first), t.second);
        return r;
    }

    /* this ∘ other */
    LinearMap compose(const LinearMap& other) const;

    bool is_zero() const
    {
        for (const auto& c : cols)
            if (!c.is_zero())
                return false;
        return true;
    }
    bool is_identity() const;
    bool is_involution() const;

    /* Exact degree-shift validation against the spaces. */
    void validate() const;

    friend bool operator==(const LinearMap& a, const LinearMap& b)
    {
        return a.src == b.src && a.dst == b.dst && a.deg_shift == b.deg_shift &&
               a.cols == b.cols;
    }
};

/* Incremental row-echelon elimination over the rationals. Rows are
 * processed in insertion order and each reduced row pivots on its first
 * surviving column, so results are deterministic. */
class RowEchelonSolver {
public:
    explicit RowEchelonSolver(int ncols) : ncols_(ncols) {}

    void add_row(SparseVec row, Rational rhs);
    bool inconsistent() const { return inconsistent_; }
    int rank() const { return static_cast<int>(pivots_.size()); }
    /* Back substitution with free coordinates set to zero; nullopt when
     * the accumulated system is inconsistent. */
    std::optional<std::vector<Rational>> solve() const;

private:
    int ncols_ = 0;
    std::map<int, SparseVec> pivots_;
    std::map<int, Rational> pivot_rhs_;
    bool inconsistent_ = false;
};

/* Exact Gaussian elimination over the rationals with deterministic
 * first-nonzero pivoting in declared basis order.
 * Returns some x with A x = y, or nullopt when none exists. */
std::optional<SparseVec> linear_solve(const LinearMap& a, const SparseVec& y);

/* Inverse of a square invertible map; nullopt when singular. */
std::optional<LinearMap> linear_inverse(const LinearMap& a);

int matrix_rank(const LinearMap& a);

/* Deformation-retraction data of a squared-zero degree-one differential:
 * a chosen basis of cohomology together with inclusion, projection and
 * homotopy satisfying p∘d = 0, d∘i = 0, p∘i = Id, d∘h + h∘d = i∘p - Id. */
struct DegreeRank {
    int degree;
    int kernel;
    int image;      /* rank of d out of this degree */
    int cohomology;
};

struct CohomologySplit {
    /* heap-owned so the maps' space pointers survive moves and copies */
    std::shared_ptr<GradedBasis> h_space;
    LinearMap include;   /* H -> C, degree 0 */
    LinearMap project;   /* C -> H, degree 0 */
    LinearMap homotopy;  /* C -> C, degree -1 */
    std::vector<DegreeRank> ranks;
    /* Involution induced on H when an equivariant split was requested. */
    std::optional<LinearMap> induced_involution;
};

/* Splitting data for d with d∘d = 0 and degree +1. When an involution
 * commuting with d is supplied, all three maps are chosen to commute with
 * it (projections averaged; valid in characteristic zero). Throws if
 * d∘d != 0, d is not degree +1, or the involution fails its contract. */
CohomologySplit cohomology(const LinearMap& d, const LinearMap* involution = nullptr);

/* The free graded-commutative algebra on odd-degree generators.
 * Basis monomials are subsets of generators encoded as bitmasks; the
 * bitmask doubles as the basis index, so dim = 2^n. */
class FreeGCA {
public:
    FreeGCA(std::vector<std::string> gen_names, std::vector<int> gen_degrees, int modulus);

    const GradedBasis& space() const { return basis_; }
    int gen_count() const { return static_cast<int>(gen_names_.size()); }
    const std::vector<std::string>& gen_names() const { return gen_names_; }
    int gen_degree(int g) const { return gen_degrees_[static_cast<std::size_t>(g)]; }

    /* Wedge of two basis monomials: zero on a repeated generator, else
     * the merged monomial with the transposition sign of odd generators. */
    struct WedgeTerm {
        bool zero;
        int mono;
        int sign;
    };
    WedgeTerm wedge(int a, int b) const;

    SparseVec multiply(const SparseVec& x, const SparseVec& y) const;

    /* Involution induced by -Id on the generators: (-1)^{word length}. */
    LinearMap parity_involution() const;
    SparseVec parity_apply(const SparseVec& x) const;

    int word_length(int mono) const { return __builtin_popcount(static_cast<unsigned>(mono)); }

    std::string mono_name(int mono) const;
    std::optional<int> parse_mono(std::string_view text) const;

private:
    std::vector<std::string> gen_names_;
    std::vector<int> gen_degrees_;
    GradedBasis basis_;
};

} // namespace ainf
