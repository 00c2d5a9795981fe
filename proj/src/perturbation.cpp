#include "ainf/perturbation.hpp"

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

/* sums of m's energy labels, up to e_max */
std::vector<Rational> level_energies(const GappedStructure& m, const Energy& e_max)
{
    std::set<Rational> gens, out;
    for (const auto& [slot, table] : m.slots)
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

/* Blocks of the tree recursion: splits of the inputs into inclusion slots,
 * every block strictly below the level being built. */
template <class CB>
void split_rec(const GappedStructure& incl, std::span<const int> t, std::size_t pos,
               const Energy& budget, Energy used, const Rational& level,
               std::vector<SparseVec>& blocks, CB&& cb)
{
    if (pos == t.size())
        cb(std::span<const SparseVec>(blocks.data(), blocks.size()), used);
    for (const auto& [slot, table] : incl.slots) {
        if (pos + static_cast<std::size_t>(slot.arity) > t.size() || slot.energy > budget)
            continue;
        if (Rational(slot.arity) + slot.energy >= level)
            continue; /* recursion is founded on arity+energy */
        auto it = table.find(
            pack_tuple(t.subspan(pos, static_cast<std::size_t>(slot.arity))));
        if (it == table.end())
            continue;
        blocks.push_back(it->second);
        split_rec(incl, t, pos + static_cast<std::size_t>(slot.arity),
                  budget - slot.energy, used + slot.energy, level, blocks, cb);
        blocks.pop_back();
    }
}

} // namespace

RetractionData derive_retraction(const GappedStructure& m, const LinearMap* cbar)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("derive_retraction expects a structure");
    LinearMap d = m.linear_part(Energy(0));
    CohomologySplit split = cohomology(d, cbar);
    RetractionData r;
    r.reduced = split.h_space;
    r.include = std::move(split.include);
    r.project = std::move(split.project);
    r.homotopy = std::move(split.homotopy);
    r.ranks = std::move(split.ranks);
    r.induced_involution = std::move(split.induced_involution);
    return r;
}

MinimalModel build_minimal_model(const GappedStructure& m, const RetractionData& r,
                                 const TruncParams& trunc)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("build_minimal_model expects a structure");
    if (r.include.dst != m.src)
        throw std::invalid_argument("retraction does not match the structure");

    const GradedBasis& total = *m.src;
    const GradedBasis& reduced = *r.reduced;

    MinimalModel out;
    out.reduced = r.reduced;
    out.structure = GappedStructure::empty_structure(reduced);
    out.inclusion = GappedStructure::empty_prehom(reduced, total);

    /* the linear inclusion seeds the recursion */
    {
        SlotTable table;
        for (int j = 0; j < reduced.dim(); ++j) {
            if (r.include.column(j).is_zero())
                continue;
            int idx[1] = {j};
            table.emplace(pack_tuple(idx), r.include.column(j));
        }
        out.inclusion.slots.emplace(SlotKey{1, Energy(0)}, std::move(table));
    }

    /* slots ordered by arity + energy; every block in the tree sum is
     * strictly lower, so each level only consumes finished ones */
    std::vector<Rational> energies = level_energies(m, trunc.e_max);
    std::vector<SlotKey> order;
    for (int k = 0; k <= trunc.k_max; ++k)
        for (const Rational& beta : energies) {
            if (k == 0 && beta.is_zero())
                continue;
            if (k == 1 && beta.is_zero())
                continue; /* i_{1,0} and m^D_{1,0} are fixed */
            order.push_back(SlotKey{k, beta});
        }
    std::sort(order.begin(), order.end(), [](const SlotKey& a, const SlotKey& b) {
        Rational la = Rational(a.arity) + a.energy;
        Rational lb = Rational(b.arity) + b.energy;
        if (la != lb)
            return la < lb;
        return a < b;
    });

    for (const SlotKey& slot : order) {
        Rational level = Rational(slot.arity) + slot.energy;
        SlotTable incl_table, str_table;
        for_each_tuple(slot.arity, reduced.dim(), [&](std::span<const int> t) {
            SparseVec total_val;
            std::vector<SparseVec> blocks;
            split_rec(out.inclusion, t, 0, slot.energy, Energy(0), level, blocks,
                      [&](std::span<const SparseVec> inner, const Energy& used) {
                          SlotKey mslot{static_cast<int>(inner.size()), slot.energy - used};
                          if (mslot.arity == 1 && mslot.energy.is_zero())
                              return; /* excluded from the tree sum */
                          SparseVec val = m.eval_slot(mslot, inner);
                          total_val += val;
                      });
            if (total_val.is_zero())
                return;
            SparseVec hi = r.homotopy.apply(total_val);
            SparseVec pr = r.project.apply(total_val);
            if (!hi.is_zero())
                incl_table.emplace(pack_tuple(t), std::move(hi));
            if (!pr.is_zero())
                str_table.emplace(pack_tuple(t), std::move(pr));
        });
        if (!incl_table.empty())
            out.inclusion.slots.emplace(slot, std::move(incl_table));
        if (!str_table.empty())
            out.structure.slots.emplace(slot, std::move(str_table));
    }

    out.structure.validate(trunc);
    out.inclusion.validate(trunc);

    if (out.structure.slots.count(SlotKey{1, Energy(0)}))
        throw std::logic_error("minimal model failed: output is not weakly minimal");
    if (!check_ainf(out.structure, trunc).empty())
        throw std::logic_error("minimal model failed the structure relations");
    if (check_homomorphism(out.inclusion, out.structure, m, trunc))
        throw std::logic_error("minimal model inclusion is not a homomorphism");
    if (!is_quasi_iso(out.inclusion, out.structure, m))
        throw std::logic_error("minimal model inclusion is not a quasi-isomorphism");
    return out;
}

} // namespace ainf
