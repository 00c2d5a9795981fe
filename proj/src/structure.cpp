#include "ainf/structure.hpp"

#include <algorithm>
#include <set>
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

std::vector<SparseVec> unit_args(std::span<const int> t)
{
    std::vector<SparseVec> args;
    args.reserve(t.size());
    for (int i : t)
        args.push_back(SparseVec::unit(i));
    return args;
}

std::vector<int> degrees_of(const GradedBasis& space, std::span<const int> t)
{
    std::vector<int> d;
    d.reserve(t.size());
    for (int i : t)
        d.push_back(space.degree(i));
    return d;
}

/* parity of sum_{j=1}^{count}(|a_j|+1) over the first `count` inputs */
int prefix_shift_parity(const GradedBasis& space, std::span<const int> t, int count)
{
    int s = 0;
    for (int j = 0; j < count; ++j)
        s += space.degree(t[static_cast<std::size_t>(j)]) + 1;
    return s & 1;
}

/* Enumerates every decomposition of `inputs` into an ordered sequence of
 * blocks: arity-r blocks are f-slots of arity r >= 1 evaluated on the next
 * r inputs, arity-0 blocks are constant entries of f inserted anywhere.
 * Calls cb(blocks, consumed_energy) once per complete sequence. */
template <class CB>
void split_rec(const GappedStructure& f, std::span<const SparseVec> inputs, std::size_t pos,
               const Energy& budget, Energy consumed, std::vector<SparseVec>& blocks, CB&& cb)
{
    if (pos == inputs.size())
        cb(std::span<const SparseVec>(blocks.data(), blocks.size()), consumed);
    for (const auto& [slot, table] : f.slots) {
        if (slot.arity == 0) {
            if (slot.energy > budget)
                continue;
            auto it = table.find(pack_tuple({}));
            if (it == table.end())
                continue;
            blocks.push_back(it->second);
            split_rec(f, inputs, pos, budget - slot.energy, consumed + slot.energy, blocks,
                      cb);
            blocks.pop_back();
        } else {
            if (pos + static_cast<std::size_t>(slot.arity) > inputs.size() ||
                slot.energy > budget)
                continue;
            SparseVec val = f.eval_slot(
                slot, inputs.subspan(pos, static_cast<std::size_t>(slot.arity)));
            if (val.is_zero())
                continue;
            blocks.push_back(std::move(val));
            split_rec(f, inputs, pos + static_cast<std::size_t>(slot.arity),
                      budget - slot.energy, consumed + slot.energy, blocks, cb);
            blocks.pop_back();
        }
    }
}

template <class CB>
void enumerate_splits(const GappedStructure& f, std::span<const SparseVec> inputs,
                      const Energy& budget, CB&& cb)
{
    std::vector<SparseVec> blocks;
    split_rec(f, inputs, 0, budget, Energy(0), blocks, cb);
}

/* Additive closure, up to e_max, of the energy labels of f. */
std::vector<Energy> energy_closure(const GappedStructure& f, const Energy& e_max)
{
    std::set<Rational> gens, out;
    for (const auto& [slot, table] : f.slots)
        if (slot.energy > Rational(0) && !table.empty())
            gens.insert(slot.energy);
    out.insert(Rational(0));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Rational> cur(out.begin(), out.end());
        for (const Rational& a : cur)
            for (const Rational& g : gens) {
                Rational s = a + g;
                if (s <= e_max && out.insert(s).second)
                    grew = true;
            }
    }
    return {out.begin(), out.end()};
}

/* Energy expansion of the inverse of the linear part of f. */
std::map<Rational, LinearMap> inverse_linear_series(const GappedStructure& f,
                                                    const TruncParams& trunc)
{
    LinearMap f10 = f.linear_part(Energy(0));
    auto inv0 = linear_inverse(f10);
    if (!inv0)
        throw std::invalid_argument("formal diffeomorphism has singular linear part");

    std::vector<std::pair<Energy, LinearMap>> high;
    for (const auto& [slot, table] : f.slots)
        if (slot.arity == 1 && slot.energy > Rational(0) && !table.empty())
            high.emplace_back(slot.energy, f.linear_part(slot.energy));

    std::map<Rational, LinearMap> series;
    series.emplace(Rational(0), *inv0);
    for (const Energy& beta : energy_closure(f, trunc.e_max)) {
        if (beta.is_zero() || series.count(beta))
            continue;
        LinearMap acc = LinearMap::zero(*f.src, *f.src, 0);
        bool nonzero = false;
        for (const auto& [gamma, f1g] : high) {
            Rational rest = beta - gamma;
            auto it = series.find(rest);
            if (it == series.end())
                continue;
            LinearMap term = it->second.compose(f1g);
            for (std::size_t j = 0; j < acc.cols.size(); ++j)
                acc.cols[j] -= term.cols[j];
            nonzero = true;
        }
        if (nonzero) {
            LinearMap a = acc.compose(*inv0);
            if (!a.is_zero())
                series.emplace(beta, std::move(a));
        }
    }
    return series;
}

void require_diffeo(const GappedStructure& f)
{
    if (f.role != Role::prehom)
        throw std::invalid_argument("expected a pre-homomorphism");
    if (f.src != f.dst)
        throw std::invalid_argument("formal diffeomorphisms are endomorphisms");
    for (const auto& [slot, table] : f.slots)
        if (slot.arity == 0 && !table.empty())
            throw std::invalid_argument("formal diffeomorphism must have no constant term");
}

} // namespace

GappedStructure GappedStructure::identity(const GradedBasis& space)
{
    GappedStructure s = empty_prehom(space, space);
    SlotTable table;
    for (int j = 0; j < space.dim(); ++j) {
        int idx[1] = {j};
        table.emplace(pack_tuple(idx), SparseVec::unit(j));
    }
    s.slots.emplace(SlotKey{1, Energy(0)}, std::move(table));
    return s;
}

GappedStructure GappedStructure::strict(const LinearMap& f1)
{
    GappedStructure s = empty_prehom(*f1.src, *f1.dst);
    if (f1.deg_shift != 0)
        throw std::invalid_argument("strict pre-homomorphism must have degree 0");
    SlotTable table;
    for (int j = 0; j < f1.src->dim(); ++j) {
        if (f1.column(j).is_zero())
            continue;
        int idx[1] = {j};
        table.emplace(pack_tuple(idx), f1.column(j));
    }
    if (!table.empty())
        s.slots.emplace(SlotKey{1, Energy(0)}, std::move(table));
    return s;
}

GappedStructure GappedStructure::canonical_wedge(const FreeGCA& gca)
{
    const GradedBasis& space = gca.space();
    GappedStructure s = empty_structure(space);
    SlotTable table;
    for (int a = 0; a < space.dim(); ++a)
        for (int b = 0; b < space.dim(); ++b) {
            FreeGCA::WedgeTerm w = gca.wedge(a, b);
            if (w.zero)
                continue;
            int sign = w.sign;
            if (space.degree(a) % 2)
                sign = -sign;
            int idx[2] = {a, b};
            table.emplace(pack_tuple(idx), SparseVec::unit(w.mono, Rational(sign)));
        }
    s.slots.emplace(SlotKey{2, Energy(0)}, std::move(table));
    return s;
}

const SparseVec* GappedStructure::entry(int arity, const Energy& energy, TupleKey t) const
{
    auto sit = slots.find(SlotKey{arity, energy});
    if (sit == slots.end())
        return nullptr;
    auto it = sit->second.find(t);
    return it == sit->second.end() ? nullptr : &it->second;
}

void GappedStructure::set_entry(int arity, const Energy& energy, TupleKey t, SparseVec v)
{
    SlotKey key{arity, energy};
    if (v.is_zero()) {
        auto sit = slots.find(key);
        if (sit != slots.end()) {
            sit->second.erase(t);
            if (sit->second.empty())
                slots.erase(sit);
        }
        return;
    }
    slots[key][t] = std::move(v);
}

void GappedStructure::drop_empty()
{
    for (auto sit = slots.begin(); sit != slots.end();) {
        for (auto it = sit->second.begin(); it != sit->second.end();)
            it = it->second.is_zero() ? sit->second.erase(it) : std::next(it);
        sit = sit->second.empty() ? slots.erase(sit) : std::next(sit);
    }
}

SparseVec GappedStructure::eval_slot(const SlotKey& slot, std::span<const SparseVec> args) const
{
    auto sit = slots.find(slot);
    SparseVec out;
    if (sit == slots.end() || static_cast<int>(args.size()) != slot.arity)
        return out;
    const SlotTable& table = sit->second;

    std::vector<int> idx(args.size());
    auto rec = [&](auto&& self, std::size_t pos, const Rational& coeff) -> void {
        if (pos == args.size()) {
            auto it = table.find(pack_tuple(idx));
            if (it != table.end())
                out.add_scaled(it->second, coeff);
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

SparseVec GappedStructure::eval_slot_spliced(const SlotKey& slot, std::span<const int> prefix,
                                             const SparseVec& inserted,
                                             std::span<const int> suffix) const
{
    auto sit = slots.find(slot);
    SparseVec out;
    if (sit == slots.end())
        return out;
    const SlotTable& table = sit->second;
    std::vector<int> idx(prefix.size() + 1 + suffix.size());
    std::copy(prefix.begin(), prefix.end(), idx.begin());
    std::copy(suffix.begin(), suffix.end(), idx.begin() + static_cast<long>(prefix.size()) + 1);
    for (const auto& t : inserted.terms()) {
        idx[prefix.size()] = t.first;
        auto it = table.find(pack_tuple(idx));
        if (it != table.end())
            out.add_scaled(it->second, t.second);
    }
    return out;
}

LinearMap GappedStructure::linear_part(const Energy& energy) const
{
    LinearMap m = LinearMap::zero(*src, *dst, degree_shift(1));
    auto sit = slots.find(SlotKey{1, energy});
    if (sit != slots.end())
        for (const auto& [key, val] : sit->second)
            m.cols[static_cast<std::size_t>(unpack_tuple(key)[0])] = val;
    return m;
}

void GappedStructure::validate(const TruncParams& trunc) const
{
    if (!src || !dst)
        throw std::invalid_argument("structure has no ambient space");
    if (src->dim() > kMaxDim || dst->dim() > kMaxDim)
        throw std::invalid_argument("ambient space too large");
    if (role == Role::structure && src != dst)
        throw std::invalid_argument("structure operations must be endomorphic");
    for (const auto& [slot, table] : slots) {
        if (slot.arity < 0 || slot.arity > trunc.k_max || slot.arity > kMaxArity)
            throw std::invalid_argument("slot arity outside the window");
        if (slot.energy < Rational(0) || slot.energy > trunc.e_max)
            throw std::invalid_argument("slot energy outside the window");
        if (slot.arity == 0 && slot.energy.is_zero() && !table.empty())
            throw std::invalid_argument("the (0,0) slot is forbidden");
        for (const auto& [key, val] : table) {
            if (tuple_arity(key) != slot.arity)
                throw std::invalid_argument("entry arity mismatch");
            auto idx = unpack_tuple(key);
            long long deg = degree_shift(slot.arity);
            for (int i : idx) {
                if (i < 0 || i >= src->dim())
                    throw std::invalid_argument("entry index out of range");
                deg += src->degree(i);
            }
            if (val.is_zero())
                continue;
            auto vd = val.homogeneous_degree(*dst);
            if (!vd || *vd != dst->reduce_degree(deg))
                throw std::invalid_argument("entry violates the degree constraint");
        }
    }
}

std::vector<SlotWitness> check_ainf(const GappedStructure& m, const TruncParams& trunc)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("check_ainf expects a structure");
    m.validate(trunc);

    std::set<SlotKey> outputs;
    for (const auto& [s1, t1] : m.slots)
        for (const auto& [s2, t2] : m.slots) {
            int k = s1.arity + s2.arity - 1;
            Rational beta = s1.energy + s2.energy;
            if (k >= 0 && k <= trunc.k_max - 1 && beta <= trunc.e_max)
                outputs.insert(SlotKey{k, beta});
        }

    std::vector<SlotWitness> violations;
    const GradedBasis& space = *m.src;
    for (const SlotKey& out : outputs) {
        bool violated = false;
        for_each_tuple(out.arity, space.dim(), [&](std::span<const int> t) {
            if (violated)
                return;
            SparseVec total;
            for (const auto& [inner, inner_table] : m.slots) {
                int k1 = out.arity + 1 - inner.arity;
                Rational b1 = out.energy - inner.energy;
                if (k1 < 0 || b1 < Rational(0))
                    continue;
                SlotKey outer{k1, b1};
                if (!m.slots.count(outer))
                    continue;
                for (int i = 1; i <= k1; ++i) {
                    auto sub = t.subspan(static_cast<std::size_t>(i - 1),
                                         static_cast<std::size_t>(inner.arity));
                    auto iit = inner_table.find(pack_tuple(sub));
                    if (iit == inner_table.end())
                        continue;
                    SparseVec val = m.eval_slot_spliced(
                        outer, t.first(static_cast<std::size_t>(i - 1)), iit->second,
                        t.subspan(static_cast<std::size_t>(i - 1 + inner.arity)));
                    if (val.is_zero())
                        continue;
                    if (prefix_shift_parity(space, t, i - 1))
                        total -= val;
                    else
                        total += val;
                }
            }
            if (!total.is_zero()) {
                violations.push_back({out, pack_tuple(t)});
                violated = true;
            }
        });
    }
    return violations;
}

GappedStructure opposite(const GappedStructure& s)
{
    GappedStructure r = s;
    r.slots.clear();
    for (const auto& [slot, table] : s.slots) {
        SlotTable rev;
        for (const auto& [key, val] : table) {
            auto idx = unpack_tuple(key);
            std::vector<int> rid(idx.rbegin(), idx.rend());
            auto degs = degrees_of(*s.src, rid);
            int sign = reversal_op_sign(degs);
            rev.emplace(pack_tuple(rid), sign < 0 ? -val : val);
        }
        r.slots.emplace(slot, std::move(rev));
    }
    return r;
}

namespace {

std::optional<SlotWitness> self_dual_check(const GappedStructure& s, const LinearMap& c_src,
                                           const LinearMap& c_dst)
{
    if (!c_src.is_involution() || !c_dst.is_involution())
        throw std::invalid_argument("self-duality check requires involutions");
    if (c_src.src != s.src || c_dst.src != s.dst)
        throw std::invalid_argument("involution acts on the wrong space");
    const GradedBasis& space = *s.src;
    for (const auto& [slot, table] : s.slots) {
        std::optional<SlotWitness> witness;
        for_each_tuple(slot.arity, space.dim(), [&](std::span<const int> t) {
            if (witness)
                return;
            std::vector<SparseVec> args;
            args.reserve(t.size());
            for (int i : t)
                args.push_back(c_src.column(i));
            SparseVec lhs = s.eval_slot(slot, args);

            std::vector<int> rid(t.rbegin(), t.rend());
            auto it = table.find(pack_tuple(rid));
            SparseVec rhs;
            if (it != table.end()) {
                rhs = c_dst.apply(it->second);
                if (reversal_op_sign(degrees_of(space, t)) < 0)
                    rhs = -rhs;
            }
            if (lhs != rhs)
                witness = SlotWitness{slot, pack_tuple(t)};
        });
        if (witness)
            return witness;
    }
    return std::nullopt;
}

} // namespace

std::optional<SlotWitness> check_self_dual(const GappedStructure& m, const LinearMap& cbar)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("check_self_dual expects a structure");
    return self_dual_check(m, cbar, cbar);
}

std::optional<SlotWitness> check_self_dual_prehom(const GappedStructure& f,
                                                  const LinearMap& c_src,
                                                  const LinearMap& c_dst)
{
    if (f.role != Role::prehom)
        throw std::invalid_argument("expected a pre-homomorphism");
    return self_dual_check(f, c_src, c_dst);
}

GappedStructure compose(const GappedStructure& g, const GappedStructure& f,
                        const TruncParams& trunc)
{
    if (f.role != Role::prehom || g.role != Role::prehom)
        throw std::invalid_argument("compose expects pre-homomorphisms");
    if (f.dst != g.src)
        throw std::invalid_argument("composition over mismatched spaces");
    GappedStructure out = GappedStructure::empty_prehom(*f.src, *g.dst);
    for (int k = 0; k <= trunc.k_max; ++k) {
        for_each_tuple(k, f.src->dim(), [&](std::span<const int> t) {
            auto args = unit_args(t);
            std::map<Rational, SparseVec> acc;
            enumerate_splits(
                f, std::span<const SparseVec>(args.data(), args.size()), trunc.e_max,
                [&](std::span<const SparseVec> blocks, const Energy& ef) {
                    SlotKey probe{static_cast<int>(blocks.size()), Rational(0)};
                    for (auto sit = g.slots.lower_bound(probe);
                         sit != g.slots.end() && sit->first.arity == probe.arity; ++sit) {
                        if (sit->first.energy + ef > trunc.e_max)
                            break;
                        SparseVec val = g.eval_slot(sit->first, blocks);
                        if (!val.is_zero())
                            acc[sit->first.energy + ef] += val;
                    }
                });
            for (auto& [beta, val] : acc)
                out.set_entry(k, beta, pack_tuple(t), std::move(val));
        });
    }
    out.drop_empty();
    return out;
}

namespace {

/* Left side of the homomorphism relation: sums of mD over f-blocks. */
GappedStructure hom_lhs(const GappedStructure& f, const GappedStructure& mD,
                        const TruncParams& trunc)
{
    GappedStructure out = GappedStructure::empty_prehom(*f.src, *mD.dst);
    for (int k = 0; k <= trunc.k_max - 1; ++k) {
        for_each_tuple(k, f.src->dim(), [&](std::span<const int> t) {
            auto args = unit_args(t);
            std::map<Rational, SparseVec> acc;
            enumerate_splits(f, std::span<const SparseVec>(args.data(), args.size()),
                             trunc.e_max,
                             [&](std::span<const SparseVec> blocks, const Energy& ef) {
                                 SlotKey probe{static_cast<int>(blocks.size()), Rational(0)};
                                 for (auto sit = mD.slots.lower_bound(probe);
                                      sit != mD.slots.end() && sit->first.arity == probe.arity;
                                      ++sit) {
                                     if (sit->first.energy + ef > trunc.e_max)
                                         break;
                                     SparseVec val = mD.eval_slot(sit->first, blocks);
                                     if (!val.is_zero())
                                         acc[sit->first.energy + ef] += val;
                                 }
                             });
            for (auto& [beta, val] : acc)
                out.set_entry(k, beta, pack_tuple(t), std::move(val));
        });
    }
    out.drop_empty();
    return out;
}

/* Right side: f with one inner mC operation spliced in, with the
 * A-infinity insertion sign. */
GappedStructure hom_rhs(const GappedStructure& f, const GappedStructure& mC,
                        const TruncParams& trunc)
{
    GappedStructure out = GappedStructure::empty_prehom(*f.src, *f.dst);
    const GradedBasis& space = *f.src;
    for (int k = 0; k <= trunc.k_max - 1; ++k) {
        for_each_tuple(k, space.dim(), [&](std::span<const int> t) {
            std::map<Rational, SparseVec> acc;
            for (const auto& [inner, inner_table] : mC.slots) {
                int k1 = k + 1 - inner.arity;
                if (k1 < 0)
                    continue;
                for (const auto& [outer, outer_table] : f.slots) {
                    if (outer.arity != k1)
                        continue;
                    Rational beta = outer.energy + inner.energy;
                    if (beta > trunc.e_max)
                        continue;
                    for (int i = 1; i <= k1; ++i) {
                        auto sub = t.subspan(static_cast<std::size_t>(i - 1),
                                             static_cast<std::size_t>(inner.arity));
                        auto iit = inner_table.find(pack_tuple(sub));
                        if (iit == inner_table.end())
                            continue;
                        SparseVec val = f.eval_slot_spliced(
                            outer, t.first(static_cast<std::size_t>(i - 1)), iit->second,
                            t.subspan(static_cast<std::size_t>(i - 1 + inner.arity)));
                        if (val.is_zero())
                            continue;
                        if (prefix_shift_parity(space, t, i - 1))
                            acc[beta] -= val;
                        else
                            acc[beta] += val;
                    }
                }
            }
            for (auto& [beta, val] : acc)
                out.set_entry(k, beta, pack_tuple(t), std::move(val));
        });
    }
    out.drop_empty();
    return out;
}

std::optional<SlotWitness> first_difference(const GappedStructure& a, const GappedStructure& b)
{
    std::set<SlotKey> keys;
    for (const auto& [k, t] : a.slots)
        keys.insert(k);
    for (const auto& [k, t] : b.slots)
        keys.insert(k);
    for (const SlotKey& key : keys) {
        std::set<TupleKey> tuples;
        auto ait = a.slots.find(key);
        auto bit = b.slots.find(key);
        if (ait != a.slots.end())
            for (const auto& [t, v] : ait->second)
                tuples.insert(t);
        if (bit != b.slots.end())
            for (const auto& [t, v] : bit->second)
                tuples.insert(t);
        for (TupleKey t : tuples) {
            const SparseVec* av = a.entry(key.arity, key.energy, t);
            const SparseVec* bv = b.entry(key.arity, key.energy, t);
            static const SparseVec zero;
            if ((av ? *av : zero) != (bv ? *bv : zero))
                return SlotWitness{key, t};
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<SlotWitness> check_homomorphism(const GappedStructure& f,
                                              const GappedStructure& mC,
                                              const GappedStructure& mD,
                                              const TruncParams& trunc)
{
    if (f.role != Role::prehom || mC.role != Role::structure || mD.role != Role::structure)
        throw std::invalid_argument("check_homomorphism expects (prehom, structure, structure)");
    if (f.src != mC.src || f.dst != mD.src)
        throw std::invalid_argument("homomorphism check over mismatched spaces");
    return first_difference(hom_lhs(f, mD, trunc), hom_rhs(f, mC, trunc));
}

GappedStructure invert_diffeo(const GappedStructure& f, const TruncParams& trunc)
{
    require_diffeo(f);
    auto series = inverse_linear_series(f, trunc);

    GappedStructure g = GappedStructure::empty_prehom(*f.src, *f.src);
    for (const auto& [beta, a] : series) {
        SlotTable table;
        for (int j = 0; j < f.src->dim(); ++j) {
            if (a.column(j).is_zero())
                continue;
            int idx[1] = {j};
            table.emplace(pack_tuple(idx), a.column(j));
        }
        if (!table.empty())
            g.slots.emplace(SlotKey{1, beta}, std::move(table));
    }

    const LinearMap& inv0 = series.at(Rational(0));
    std::vector<Energy> energies = energy_closure(f, trunc.e_max);

    for (int k = 2; k <= trunc.k_max; ++k) {
        /* candidate energies: closure of f's labels, ascending; the slot
         * (k,beta) consumes (k,beta') with beta' < beta, so each energy is
         * merged before the next one is computed */
        for (const Energy& beta : energies) {
            SlotTable fresh;
            for_each_tuple(k, f.src->dim(), [&](std::span<const int> t) {
                std::vector<SparseVec> args;
                args.reserve(t.size());
                for (int i : t)
                    args.push_back(inv0.column(i));
                SparseVec total;
                enumerate_splits(
                    f, std::span<const SparseVec>(args.data(), args.size()), beta,
                    [&](std::span<const SparseVec> blocks, const Energy& ef) {
                        int l = static_cast<int>(blocks.size());
                        Rational b0 = beta - ef;
                        if (l == k && b0 == beta)
                            return; /* the leading term being solved for */
                        SparseVec val = g.eval_slot(SlotKey{l, b0}, blocks);
                        total += val;
                    });
                if (!total.is_zero())
                    fresh.emplace(pack_tuple(t), -total);
            });
            if (!fresh.empty())
                g.slots.emplace(SlotKey{k, beta}, std::move(fresh));
        }
    }
    g.drop_empty();
    return g;
}

GappedStructure pullback(const GappedStructure& f, const GappedStructure& m,
                         const TruncParams& trunc)
{
    require_diffeo(f);
    if (m.role != Role::structure || m.src != f.src)
        throw std::invalid_argument("pullback expects a structure on the domain of f");
    auto series = inverse_linear_series(f, trunc);
    const GradedBasis& space = *f.src;

    GappedStructure out = GappedStructure::empty_structure(space);
    for (int k = 0; k <= trunc.k_max; ++k) {
        for_each_tuple(k, space.dim(), [&](std::span<const int> t) {
            std::map<Rational, SparseVec> acc;
            auto push = [&](const Rational& used, const SparseVec& val, bool negate) {
                if (val.is_zero())
                    return;
                for (const auto& [binv, a] : series) {
                    Rational total = used + binv;
                    if (total > trunc.e_max)
                        break;
                    SparseVec img = a.apply(val);
                    if (img.is_zero())
                        continue;
                    if (negate)
                        acc[total] -= img;
                    else
                        acc[total] += img;
                }
            };

            /* direct terms: m over f-blocks */
            auto args = unit_args(t);
            enumerate_splits(f, std::span<const SparseVec>(args.data(), args.size()),
                             trunc.e_max,
                             [&](std::span<const SparseVec> blocks, const Energy& ef) {
                                 SlotKey probe{static_cast<int>(blocks.size()), Rational(0)};
                                 for (auto sit = m.slots.lower_bound(probe);
                                      sit != m.slots.end() && sit->first.arity == probe.arity;
                                      ++sit) {
                                     if (sit->first.energy + ef > trunc.e_max)
                                         break;
                                     SparseVec val = m.eval_slot(sit->first, blocks);
                                     push(sit->first.energy + ef, val, false);
                                 }
                             });

            /* correction terms: f with an already-computed slot spliced in */
            for (const auto& [fslot, ftable] : f.slots) {
                int k1 = fslot.arity;
                int k2 = k + 1 - k1;
                if (k1 < 2 || k2 < 0 || k2 >= k)
                    continue;
                for (const auto& [oslot, otable] : out.slots) {
                    if (oslot.arity != k2)
                        continue;
                    Rational used = fslot.energy + oslot.energy;
                    if (used > trunc.e_max)
                        continue;
                    for (int i = 1; i <= k1; ++i) {
                        auto sub = t.subspan(static_cast<std::size_t>(i - 1),
                                             static_cast<std::size_t>(k2));
                        auto iit = otable.find(pack_tuple(sub));
                        if (iit == otable.end())
                            continue;
                        SparseVec val = f.eval_slot_spliced(
                            fslot, t.first(static_cast<std::size_t>(i - 1)), iit->second,
                            t.subspan(static_cast<std::size_t>(i - 1 + k2)));
                        push(used, val, prefix_shift_parity(space, t, i - 1) == 0);
                    }
                }
            }

            for (auto& [beta, val] : acc)
                if (beta <= trunc.e_max)
                    out.set_entry(k, beta, pack_tuple(t), std::move(val));
        });
    }
    out.drop_empty();
    return out;
}

NuReport nu(const GappedStructure& s)
{
    Rational threshold(s.role == Role::structure ? 2 : 1);
    NuReport report;
    for (const auto& [slot, table] : s.slots) {
        if (table.empty())
            continue;
        Rational level = Rational(slot.arity) + slot.energy;
        if (!(level > threshold))
            continue;
        if (!report.value || level < *report.value ||
            (level == *report.value && slot.arity < report.witness->arity)) {
            report.value = level;
            report.witness = slot;
        }
    }
    return report;
}

std::optional<Energy> kappa(const GappedStructure& f)
{
    std::optional<Energy> best;
    for (const auto& [slot, table] : f.slots) {
        if (slot.arity != 1 || slot.energy <= Rational(0) || table.empty())
            continue;
        if (!best || slot.energy < *best)
            best = slot.energy;
    }
    return best;
}

SparseVec ProductTable::multiply(const SparseVec& x, const SparseVec& y) const
{
    SparseVec r;
    for (const auto& tx : x.terms())
        for (const auto& ty : y.terms())
            r.add_scaled(at(tx.first, ty.first), tx.second * ty.second);
    return r;
}

ProductTable underlying_product(const GappedStructure& m)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("underlying_product expects a structure");
    if (m.slots.count(SlotKey{1, Energy(0)}))
        throw std::invalid_argument("structure is not weakly minimal");
    const GradedBasis& space = *m.src;
    int n = space.dim();
    ProductTable p;
    p.space = &space;
    p.table.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), SparseVec());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            int idx[2] = {a, b};
            const SparseVec* v = m.entry(2, Energy(0), pack_tuple(idx));
            if (!v)
                continue;
            p.table[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(b)] =
                space.degree(a) % 2 ? -*v : *v;
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                SparseVec lhs = p.multiply(p.at(a, b), SparseVec::unit(c));
                SparseVec rhs = p.multiply(SparseVec::unit(a), p.at(b, c));
                if (lhs != rhs)
                    throw std::logic_error("underlying product is not associative");
            }
    return p;
}

bool is_quasi_iso(const GappedStructure& f, const GappedStructure& mC,
                  const GappedStructure& mD)
{
    if (f.role != Role::prehom)
        throw std::invalid_argument("is_quasi_iso expects a pre-homomorphism");
    LinearMap f10 = f.linear_part(Energy(0));
    LinearMap dC = mC.linear_part(Energy(0));
    LinearMap dD = mD.linear_part(Energy(0));
    if (!(f10.compose(dC) == dD.compose(f10)))
        throw std::invalid_argument("linear part is not a map of complexes");
    CohomologySplit hc = cohomology(dC);
    CohomologySplit hd = cohomology(dD);
    if (hc.h_space->dim() != hd.h_space->dim())
        return false;
    LinearMap induced = hd.project.compose(f10).compose(hc.include);
    return matrix_rank(induced) == hc.h_space->dim();
}

} // namespace ainf
