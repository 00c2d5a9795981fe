#include "ainf/hochschild.hpp"

#include "ainf/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace ainf {

namespace {

template <class F>
void for_each_tuple(int arity, int dim, F&& fn)
{
    std::vector<int> t(static_cast<std::size_t>(arity), 0);
    if (arity == 0) {
        fn(std::span<const int>(t.data(), 0));
        return;
    }
    while (true) {
        fn(std::span<const int>(t.data(), t.size()));
        int i = arity - 1;
        while (i >= 0 && ++t[static_cast<std::size_t>(i)] == dim) {
            t[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0)
            break;
    }
}

int parity_of(const GradedBasis& space, int idx) { return space.degree(idx) & 1; }

SparseVec eval_cochain(const Cochain& eta, std::span<const SparseVec> args)
{
    SparseVec out;
    if (static_cast<int>(args.size()) != eta.arity)
        return out;
    std::vector<int> idx(args.size());
    auto rec = [&](auto&& self, std::size_t pos, const Rational& coeff) -> void {
        if (pos == args.size()) {
            const SparseVec* v = eta.value(pack_tuple(idx));
            if (v)
                out.add_scaled(*v, coeff);
            return;
        }
        for (const auto& t : args[pos].terms()) {
            idx[pos] = t.first;
            self(self, pos + 1, coeff * t.second);
        }
    };
    rec(rec, 0, Rational(1));
    return out;
}

} // namespace

Cochain Cochain::scaled(const Rational& c) const
{
    Cochain r = zero(*algebra, arity, degree);
    if (c.is_zero())
        return r;
    for (const auto& [t, v] : values)
        r.values.emplace(t, v.scaled(c));
    return r;
}

Cochain operator+(const Cochain& a, const Cochain& b)
{
    if (a.algebra != b.algebra || a.arity != b.arity || a.degree != b.degree)
        throw std::invalid_argument("adding incompatible cochains");
    Cochain r = a;
    for (const auto& [t, v] : b.values)
        r.add_value(t, v);
    return r;
}

void Cochain::validate() const
{
    const GradedBasis& space = algebra->space();
    for (const auto& [key, v] : values) {
        if (tuple_arity(key) != arity)
            throw std::invalid_argument("cochain entry has wrong arity");
        auto idx = unpack_tuple(key);
        for (int i : idx)
            if (i < 0 || i >= space.dim())
                throw std::invalid_argument("cochain entry index out of range");
        if (v.is_zero())
            continue;
        auto vd = v.homogeneous_degree(space);
        if (!vd || *vd != value_degree(idx))
            throw std::invalid_argument("cochain entry violates homogeneity");
    }
}

Cochain coboundary(const Cochain& eta)
{
    const FreeGCA& gca = *eta.algebra;
    const GradedBasis& space = gca.space();
    int k = eta.arity;
    int p_eta = eta.degree & 1;
    Cochain out = Cochain::zero(gca, k + 1, eta.degree + 1);

    std::vector<int> t2(static_cast<std::size_t>(k) + 1);
    for (const auto& [key, v] : eta.values) {
        auto t = unpack_tuple(key);

        /* left multiplication term */
        for (int m0 = 0; m0 < space.dim(); ++m0) {
            SparseVec prod = gca.multiply(SparseVec::unit(m0), v);
            if (prod.is_zero())
                continue;
            int exp = p_eta * (parity_of(space, m0) + 1) + 1;
            t2[0] = m0;
            std::copy(t.begin(), t.end(), t2.begin() + 1);
            out.add_value(pack_tuple(t2), exp & 1 ? -prod : prod);
        }

        /* splitting terms: every ordered factorization of each input */
        for (int i = 1; i <= k; ++i) {
            int mono = t[static_cast<std::size_t>(i - 1)];
            for (int a = mono;; a = (a - 1) & mono) {
                int b = mono & ~a;
                FreeGCA::WedgeTerm w = gca.wedge(a, b);
                /* a and b are disjoint, so only the sign matters */
                std::copy(t.begin(), t.begin() + (i - 1), t2.begin());
                t2[static_cast<std::size_t>(i - 1)] = a;
                t2[static_cast<std::size_t>(i)] = b;
                std::copy(t.begin() + i, t.end(), t2.begin() + i + 1);
                int exp = p_eta + 1;
                for (int j = 1; j <= i; ++j)
                    exp += parity_of(space, t2[static_cast<std::size_t>(j - 1)]) + 1;
                int sign = (exp & 1 ? -1 : 1) * w.sign;
                out.add_value(pack_tuple(t2), sign < 0 ? -v : v);
                if (a == 0)
                    break;
            }
        }

        /* right multiplication term */
        for (int mk = 0; mk < space.dim(); ++mk) {
            SparseVec prod = gca.multiply(v, SparseVec::unit(mk));
            if (prod.is_zero())
                continue;
            int exp = p_eta;
            for (int j : t)
                exp += parity_of(space, j) + 1;
            std::copy(t.begin(), t.end(), t2.begin());
            t2[static_cast<std::size_t>(k)] = mk;
            out.add_value(pack_tuple(t2), exp & 1 ? -prod : prod);
        }
    }
    return out;
}

Cochain transpose_cochain(const Cochain& eta)
{
    const GradedBasis& space = eta.algebra->space();
    Cochain out = Cochain::zero(*eta.algebra, eta.arity, eta.degree);
    for (const auto& [key, v] : eta.values) {
        auto t = unpack_tuple(key);
        std::vector<int> rid(t.rbegin(), t.rend());
        std::vector<int> degs;
        degs.reserve(t.size());
        for (int i : t)
            degs.push_back(space.degree(i));
        int sign = reversal_op_sign(degs);
        out.add_value(pack_tuple(rid), sign < 0 ? -v : v);
    }
    return out;
}

Cochain pullback_cochain(const LinearMap& h, const Cochain& eta)
{
    const FreeGCA& gca = *eta.algebra;
    const GradedBasis& space = gca.space();
    if (h.src != &space || h.dst != &space || h.deg_shift != 0)
        throw std::invalid_argument("pullback requires a degree-0 endomorphism of the algebra");
    auto hinv = linear_inverse(h);
    if (!hinv)
        throw std::invalid_argument("pullback requires an invertible map");
    for (int a = 0; a < space.dim(); ++a)
        for (int b = 0; b < space.dim(); ++b) {
            FreeGCA::WedgeTerm w = gca.wedge(a, b);
            SparseVec lhs = gca.multiply(h.column(a), h.column(b));
            SparseVec rhs;
            if (!w.zero)
                rhs = h.column(w.mono).scaled(Rational(w.sign));
            if (lhs != rhs)
                throw std::invalid_argument("pullback requires an algebra map");
        }

    Cochain out = Cochain::zero(gca, eta.arity, eta.degree);
    for_each_tuple(eta.arity, space.dim(), [&](std::span<const int> t) {
        std::vector<SparseVec> args;
        args.reserve(t.size());
        for (int i : t)
            args.push_back(h.column(i));
        SparseVec val = eval_cochain(eta, args);
        if (!val.is_zero())
            out.add_value(pack_tuple(t), hinv->apply(val));
    });
    return out;
}

HKRValue hkr_evaluate(const Cochain& eta)
{
    if (!coboundary(eta).is_zero())
        throw std::invalid_argument("evaluation map is defined on closed cochains");
    const FreeGCA& gca = *eta.algebra;
    int n = gca.gen_count();
    int k = eta.arity;

    HKRValue out;
    out.algebra = &gca;
    out.arity = k;

    std::vector<int> gens(static_cast<std::size_t>(k));
    auto emit = [&](std::span<const int> chosen) {
        std::vector<int> degs;
        degs.reserve(chosen.size());
        for (int g : chosen)
            degs.push_back(gca.gen_degree(g));
        std::vector<int> perm(chosen.size());
        for (std::size_t i = 0; i < perm.size(); ++i)
            perm[i] = static_cast<int>(i);
        SparseVec total;
        std::vector<int> arg(chosen.size());
        do {
            for (std::size_t i = 0; i < perm.size(); ++i)
                arg[i] = 1 << chosen[static_cast<std::size_t>(perm[i])];
            const SparseVec* v = eta.value(pack_tuple(arg));
            if (!v)
                continue;
            int sign = shifted_koszul_sign(perm, degs);
            if (sign < 0)
                total -= *v;
            else
                total += *v;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!total.is_zero()) {
            std::vector<int> key(chosen.begin(), chosen.end());
            out.values.emplace(pack_tuple(key), std::move(total));
        }
    };

    /* strictly increasing generator words of length k */
    auto rec = [&](auto&& self, int pos, int next) -> void {
        if (pos == k) {
            emit(std::span<const int>(gens.data(), gens.size()));
            return;
        }
        for (int g = next; g < n; ++g) {
            gens[static_cast<std::size_t>(pos)] = g;
            self(self, pos + 1, g + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

std::optional<TupleKey> antisymmetry_witness(const Cochain& eta)
{
    const FreeGCA& gca = *eta.algebra;
    const GradedBasis& space = gca.space();
    int n = gca.gen_count();
    int k = eta.arity;
    std::optional<TupleKey> witness;
    for_each_tuple(k, n, [&](std::span<const int> gs) {
        if (witness)
            return;
        std::vector<int> arg(gs.size()), rev(gs.size()), degs(gs.size());
        for (std::size_t i = 0; i < gs.size(); ++i) {
            arg[i] = 1 << gs[i];
            rev[gs.size() - 1 - i] = arg[i];
            degs[i] = space.degree(arg[i]);
        }
        long long spe = 0;
        for (std::size_t i = 0; i < degs.size(); ++i)
            for (std::size_t j = i + 1; j < degs.size(); ++j)
                spe += static_cast<long long>(degs[i] + 1) * (degs[j] + 1);
        const SparseVec* lhs = eta.value(pack_tuple(arg));
        const SparseVec* rhs = eta.value(pack_tuple(rev));
        SparseVec sum;
        if (lhs)
            sum += *lhs;
        if (rhs) {
            if (spe % 2)
                sum -= *rhs;
            else
                sum += *rhs;
        }
        if (!sum.is_zero())
            witness = pack_tuple(arg);
    });
    return witness;
}

std::optional<Cochain> solve_primitive(const Cochain& zeta)
{
    const FreeGCA& gca = *zeta.algebra;
    const GradedBasis& space = gca.space();
    if (gca.gen_count() > 3 || zeta.arity > 6)
        throw std::invalid_argument("primitive solver is capped at 3 generators, arity 6");
    if (zeta.arity < 1)
        throw std::invalid_argument("primitive solver needs arity at least 1");
    if (!coboundary(zeta).is_zero())
        throw std::invalid_argument("input cochain is not closed");

    int k = zeta.arity;
    int eta_degree = space.reduce_degree(static_cast<long long>(zeta.degree) - 1);
    Cochain eta = Cochain::zero(gca, k - 1, eta_degree);

    /* monomials per degree, in index order */
    std::map<int, std::vector<int>> by_degree;
    for (int i = 0; i < space.dim(); ++i)
        by_degree[space.degree(i)].push_back(i);

    /* unknown layout: (input tuple, allowed output monomial) */
    std::map<TupleKey, std::pair<int, const std::vector<int>*>> layout;
    int ncols = 0;
    for_each_tuple(k - 1, space.dim(), [&](std::span<const int> t) {
        auto it = by_degree.find(eta.value_degree(t));
        if (it == by_degree.end())
            return;
        layout.emplace(pack_tuple(t), std::make_pair(ncols, &it->second));
        ncols += static_cast<int>(it->second.size());
    });

    auto col_of = [&](TupleKey t, int mono) -> int {
        auto it = layout.find(t);
        if (it == layout.end())
            return -1;
        const auto& monos = *it->second.second;
        for (std::size_t i = 0; i < monos.size(); ++i)
            if (monos[i] == mono)
                return it->second.first + static_cast<int>(i);
        return -1;
    };

    RowEchelonSolver solver(ncols);
    int p_eta = eta_degree & 1;

    for_each_tuple(k, space.dim(), [&](std::span<const int> s) {
        int out_deg = zeta.value_degree(s);
        auto bit = by_degree.find(out_deg);
        if (bit == by_degree.end())
            return;
        const SparseVec* rhs_vec = zeta.value(pack_tuple(s));
        /* row per output coordinate */
        for (int nu : bit->second) {
            SparseVec row;

            /* alpha_1 * eta(alpha_2..alpha_k) */
            {
                std::vector<int> sub(s.begin() + 1, s.end());
                int exp = p_eta * (parity_of(space, s[0]) + 1) + 1;
                auto it = layout.find(pack_tuple(sub));
                if (it != layout.end())
                    for (int mu : *it->second.second) {
                        FreeGCA::WedgeTerm w = gca.wedge(s[0], mu);
                        if (w.zero || w.mono != nu)
                            continue;
                        int sign = (exp & 1 ? -1 : 1) * w.sign;
                        row.add_term(col_of(pack_tuple(sub), mu), Rational(sign));
                    }
            }

            /* merged-argument terms */
            for (int i = 1; i <= k - 1; ++i) {
                FreeGCA::WedgeTerm w =
                    gca.wedge(s[static_cast<std::size_t>(i - 1)], s[static_cast<std::size_t>(i)]);
                if (w.zero)
                    continue;
                std::vector<int> merged;
                merged.reserve(static_cast<std::size_t>(k) - 1);
                for (int j = 0; j < k; ++j) {
                    if (j == i)
                        continue;
                    merged.push_back(j == i - 1 ? w.mono : s[static_cast<std::size_t>(j)]);
                }
                int c = col_of(pack_tuple(merged), nu);
                if (c < 0)
                    continue;
                int exp = p_eta + 1;
                for (int j = 1; j <= i; ++j)
                    exp += parity_of(space, s[static_cast<std::size_t>(j - 1)]) + 1;
                int sign = (exp & 1 ? -1 : 1) * w.sign;
                row.add_term(c, Rational(sign));
            }

            /* eta(alpha_1..alpha_{k-1}) * alpha_k */
            {
                std::vector<int> sub(s.begin(), s.end() - 1);
                int exp = p_eta;
                for (int j = 0; j < k - 1; ++j)
                    exp += parity_of(space, s[static_cast<std::size_t>(j)]) + 1;
                auto it = layout.find(pack_tuple(sub));
                if (it != layout.end())
                    for (int mu : *it->second.second) {
                        FreeGCA::WedgeTerm w = gca.wedge(mu, s[static_cast<std::size_t>(k - 1)]);
                        if (w.zero || w.mono != nu)
                            continue;
                        int sign = (exp & 1 ? -1 : 1) * w.sign;
                        row.add_term(col_of(pack_tuple(sub), mu), Rational(sign));
                    }
            }

            solver.add_row(std::move(row), rhs_vec ? rhs_vec->coeff(nu) : Rational(0));
        }
    });

    auto x = solver.solve();
    if (!x)
        return std::nullopt;
    for (const auto& [t, slot] : layout) {
        SparseVec v;
        const auto& monos = *slot.second;
        for (std::size_t i = 0; i < monos.size(); ++i)
            v.add_term(monos[i], (*x)[static_cast<std::size_t>(slot.first) + i]);
        if (!v.is_zero())
            eta.values.emplace(t, std::move(v));
    }
    if (!(coboundary(eta) == zeta))
        throw std::logic_error("primitive solver produced an invalid primitive");
    return eta;
}

bool verify_bar_translation(const Cochain& eta, int samples, std::uint64_t seed)
{
    const FreeGCA& gca = *eta.algebra;
    const GradedBasis& space = gca.space();
    int k = eta.arity;
    Cochain beta = coboundary(eta);
    Rng rng(seed);

    auto tilde = [&](const Cochain& c, std::span<const SparseVec> full) -> SparseVec {
        /* (x_0, mid..., x_last) -> (-1)^{|x_0||c|} x_0 * c(mid) * x_last,
         * extended multilinearly in x_0 and x_last */
        SparseVec mid = eval_cochain(c, full.subspan(1, full.size() - 2));
        SparseVec out;
        for (const auto& t0 : full.front().terms()) {
            int sgn = (space.degree(t0.first) & 1) & (c.degree & 1);
            SparseVec left = gca.multiply(SparseVec::unit(t0.first), mid);
            SparseVec prod = gca.multiply(left, full.back());
            out.add_scaled(prod, sgn ? -t0.second : t0.second);
        }
        return out;
    };

    for (int trial = 0; trial < samples; ++trial) {
        int m = k + 1; /* middle arity of the target bar component */
        std::vector<int> idx(static_cast<std::size_t>(m) + 2);
        for (auto& i : idx)
            i = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.dim())));

        std::vector<SparseVec> full;
        full.reserve(idx.size());
        for (int i : idx)
            full.push_back(SparseVec::unit(i));

        SparseVec lhs = tilde(beta, full);

        /* (-1)^{|eta|+1} eta~ of the bar differential of the sample */
        SparseVec rhs;
        auto add_merge = [&](int i, int sign_exp) {
            FreeGCA::WedgeTerm w = gca.wedge(idx[static_cast<std::size_t>(i)],
                                             idx[static_cast<std::size_t>(i) + 1]);
            if (w.zero)
                return;
            std::vector<SparseVec> merged;
            merged.reserve(idx.size() - 1);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                if (static_cast<int>(j) == i + 1)
                    continue;
                merged.push_back(static_cast<int>(j) == i
                                     ? SparseVec::unit(w.mono, Rational(w.sign))
                                     : full[j]);
            }
            SparseVec v = tilde(eta, merged);
            rhs.add_scaled(v, Rational(sign_exp & 1 ? -1 : 1));
        };
        for (int i = 0; i <= m - 1; ++i) {
            int exp = i;
            for (int j = 0; j <= i; ++j)
                exp += space.degree(idx[static_cast<std::size_t>(j)]);
            add_merge(i, exp);
        }
        {
            int exp = m - 1;
            for (int j = 0; j <= m - 1; ++j)
                exp += space.degree(idx[static_cast<std::size_t>(j)]);
            add_merge(m, exp + 1); /* subtracted term */
        }
        rhs = rhs.scaled(Rational((eta.degree + 1) & 1 ? -1 : 1));

        if (lhs != rhs)
            return false;
    }
    return true;
}

Cochain cochain_from_slot(const GappedStructure& s, const FreeGCA& algebra, const SlotKey& slot)
{
    if (s.src != &algebra.space())
        throw std::invalid_argument("structure does not live on the given algebra");
    Cochain c = Cochain::zero(algebra, slot.arity, s.role == Role::structure ? 2 : 1);
    auto sit = s.slots.find(slot);
    if (sit != s.slots.end())
        c.values = sit->second;
    c.validate();
    return c;
}

} // namespace ainf
