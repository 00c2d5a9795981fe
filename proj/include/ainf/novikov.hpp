#pragma once

#include "ainf/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ainf {

/* Nonnegative rational exponent of the formal variable T. */
using Energy = Rational;

/* Truncation window: all scalar arithmetic is modulo T^{e_max}, structure
 * tables keep arities <= k_max and energy labels <= e_max. */
struct TruncParams {
    Energy e_max;
    int k_max = 3;

    TruncParams() = default;
    TruncParams(Energy e, int k) : e_max(std::move(e)), k_max(k)
    {
        if (!(e_max > Rational(0)))
            throw std::invalid_argument("truncation energy must be positive");
        if (k_max < 3)
            throw std::invalid_argument("truncation arity must be at least 3");
    }
};

/* Element of the Novikov field truncated at a global energy cap: a finite
 * sum of c*T^e terms with strictly increasing energies e >= 0 and nonzero
 * rational coefficients c. */
class NovElem {
public:
    using Term = std::pair<Energy, Rational>;

    NovElem() = default;
    explicit NovElem(Rational constant)
    {
        if (!constant.is_zero())
            terms_.emplace_back(Rational(0), std::move(constant));
    }
    static NovElem monomial(Energy e, Rational c)
    {
        if (e < Rational(0))
            throw std::invalid_argument("negative Novikov energy");
        NovElem x;
        if (!c.is_zero())
            x.terms_.emplace_back(std::move(e), std::move(c));
        return x;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /* Minimal energy; nullopt for the zero element (norm 0). */
    std::optional<Energy> valuation() const
    {
        if (terms_.empty())
            return std::nullopt;
        return terms_.front().first;
    }
    bool in_ring() const { return true; }
    bool in_maximal_ideal() const
    {
        auto v = valuation();
        return !v || *v > Rational(0);
    }

    void add_term(const Energy& e, const Rational& c);
    NovElem& operator+=(const NovElem& b);
    friend NovElem operator+(NovElem a, const NovElem& b)
    {
        a += b;
        return a;
    }
    NovElem operator-() const
    {
        NovElem r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }
    friend NovElem operator-(const NovElem& a, const NovElem& b) { return a + (-b); }

    NovElem scaled(const Rational& c) const
    {
        NovElem r;
        if (c.is_zero())
            return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_)
            t.second *= c;
        return r;
    }

    friend bool operator==(const NovElem& a, const NovElem& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const NovElem& a, const NovElem& b) { return !(a == b); }

    /* Drop all terms of energy >= e_max (arithmetic modulo T^{e_max}). */
    NovElem truncated(const Energy& e_max) const
    {
        NovElem r;
        for (const auto& t : terms_)
            if (t.first < e_max)
                r.terms_.push_back(t);
        return r;
    }

    std::string str() const;

private:
    std::vector<Term> terms_;
};

inline void NovElem::add_term(const Energy& e, const Rational& c)
{
    if (c.is_zero())
        return;
    if (e < Rational(0))
        throw std::invalid_argument("negative Novikov energy");
    auto it = terms_.begin();
    while (it != terms_.end() && it->first < e)
        ++it;
    if (it != terms_.end() && it->first == e) {
        it->second += c;
        if (it->second.is_zero())
            terms_.erase(it);
    } else {
        terms_.insert(it, {e, c});
    }
}

inline NovElem& NovElem::operator+=(const NovElem& b)
{
    for (const auto& t : b.terms())
        add_term(t.first, t.second);
    return *this;
}

inline NovElem nov_add(const NovElem& a, const NovElem& b) { return a + b; }

inline NovElem nov_mul(const NovElem& a, const NovElem& b, const TruncParams& trunc)
{
    NovElem r;
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            Energy e = ta.first + tb.first;
            if (e < trunc.e_max)
                r.add_term(e, ta.second * tb.second);
        }
    return r;
}

/* The non-Archimedean norm reported through its exact exponent: nullopt
 * encodes "norm 0" (the zero element), otherwise norm = exp(-E_min). */
struct NovNorm {
    std::optional<Energy> e_min;
    bool in_ring;
    bool in_maximal_ideal;
};

inline NovNorm nov_norm(const NovElem& a)
{
    NovNorm n;
    n.e_min = a.valuation();
    n.in_ring = true;
    n.in_maximal_ideal = a.in_maximal_ideal();
    return n;
}

/* "c*T^{p/q}" terms joined by " + "; energy-zero terms print as the bare
 * coefficient; braces only around non-integer exponents. */
inline std::string NovElem::str() const
{
    if (terms_.empty())
        return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i)
            s += " + ";
        const auto& [e, c] = terms_[i];
        if (e.is_zero()) {
            s += c.str();
        } else {
            s += c.str() + "*T^";
            s += e.is_integer() ? e.str() : "{" + e.str() + "}";
        }
    }
    return s;
}

} // namespace ainf
