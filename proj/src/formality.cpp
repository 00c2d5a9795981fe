#include "ainf/formality.hpp"

#include "ainf/rng.hpp"

#include <stdexcept>

namespace ainf {

namespace {

Cochain half_symmetrize(const Cochain& eta, const LinearMap& parity)
{
    Cochain mirror = pullback_cochain(parity, transpose_cochain(eta));
    return (eta + mirror).scaled(Rational(1, 2));
}

} // namespace

AntisymValidation validate_antisymmetric(const GappedStructure& m, const FreeGCA& gca,
                                         const LinearMap& cbar)
{
    if (m.role != Role::structure || m.src != &gca.space())
        throw std::invalid_argument("validation expects a structure on the free algebra");
    if (m.slots.count(SlotKey{1, Energy(0)}))
        throw std::invalid_argument("structure is not weakly minimal");

    AntisymValidation v;
    const GradedBasis& space = gca.space();

    ProductTable p = underlying_product(m);
    v.underlying_is_wedge = true;
    for (int a = 0; a < space.dim() && v.underlying_is_wedge; ++a)
        for (int b = 0; b < space.dim(); ++b) {
            FreeGCA::WedgeTerm w = gca.wedge(a, b);
            SparseVec want;
            if (!w.zero)
                want = SparseVec::unit(w.mono, Rational(w.sign));
            if (p.at(a, b) != want) {
                v.underlying_is_wedge = false;
                v.first_failure = "underlying product differs from the wedge at (" +
                                  gca.mono_name(a) + ", " + gca.mono_name(b) + ")";
                break;
            }
        }

    auto witness = check_self_dual(m, cbar);
    v.self_dual = !witness;
    if (witness && v.first_failure.empty())
        v.first_failure = "self-duality fails at arity " + std::to_string(witness->slot.arity) +
                          ", energy " + witness->slot.energy.str();

    v.involution_is_parity = cbar == gca.parity_involution();
    if (!v.involution_is_parity && v.first_failure.empty())
        v.first_failure = "involution is not the parity map";

    v.flat = true;
    v.minimal = true;
    for (const auto& [slot, table] : m.slots) {
        if (table.empty())
            continue;
        if (slot.arity == 0)
            v.flat = false;
        if (slot.arity == 1)
            v.minimal = false;
    }
    if (!(v.flat && v.minimal) && v.first_failure.empty())
        v.first_failure = "structure is not flat minimal";
    return v;
}

std::vector<std::pair<SlotKey, Cochain>> obstruction_classes(const GappedStructure& m,
                                                             const FreeGCA& gca,
                                                             const TruncParams& trunc)
{
    (void)trunc;
    NuReport level = nu(m);
    std::vector<std::pair<SlotKey, Cochain>> classes;
    if (!level.value)
        return classes;
    for (const auto& [slot, table] : m.slots) {
        if (table.empty() || Rational(slot.arity) + slot.energy != *level.value)
            continue;
        Cochain c = cochain_from_slot(m, gca, slot);
        if (!coboundary(c).is_zero())
            throw std::logic_error(
                "obstruction class is not closed: the structure relations are violated");
        classes.emplace_back(slot, std::move(c));
    }
    return classes;
}

ObstructionStep obstruction_step(const GappedStructure& m, const FreeGCA& gca,
                                 const LinearMap& cbar, const TruncParams& trunc,
                                 bool symmetrize)
{
    NuReport level = nu(m);
    if (!level.value)
        throw std::invalid_argument("no obstruction level: structure is already formal");
    auto classes = obstruction_classes(m, gca, trunc);

    GappedStructure f = GappedStructure::identity(gca.space());
    for (auto& [slot, cls] : classes) {
        if (symmetrize && antisymmetry_witness(cls))
            throw std::logic_error("obstruction class is not anti-symmetric");
        Cochain target = -cls;
        auto primitive = solve_primitive(target);
        if (!primitive)
            throw std::logic_error("obstruction class admits no primitive: corrupt input");
        Cochain entry = *primitive;
        if (symmetrize) {
            entry = half_symmetrize(entry, cbar);
            if (!(coboundary(entry) == target))
                throw std::logic_error("symmetrized primitive stopped solving the equation");
        }
        if (!entry.is_zero()) {
            SlotTable table;
            for (const auto& [t, v] : entry.values)
                table.emplace(t, v);
            f.slots.emplace(SlotKey{slot.arity - 1, slot.energy}, std::move(table));
        }
    }
    f.validate(trunc);
    if (symmetrize && check_self_dual_prehom(f, cbar, cbar))
        throw std::logic_error("gauge diffeomorphism is not self-dual");

    ObstructionStep step;
    step.pulled = pullback(f, m, trunc);
    step.diffeo = std::move(f);

    /* the binary operation is untouched and the level strictly increases */
    SlotKey wedge_slot{2, Energy(0)};
    auto before = m.slots.find(wedge_slot);
    auto after = step.pulled.slots.find(wedge_slot);
    bool same = (before == m.slots.end() && after == step.pulled.slots.end()) ||
                (before != m.slots.end() && after != step.pulled.slots.end() &&
                 before->second == after->second);
    if (!same)
        throw std::logic_error("gauge step changed the binary operation");
    NuReport post = nu(step.pulled);
    if (post.value && !(*post.value > *level.value))
        throw std::logic_error("gauge step failed to raise the obstruction level");
    return step;
}

FormalityResult formality_run(const GappedStructure& m, const FreeGCA& gca,
                              const LinearMap& cbar, const TruncParams& trunc,
                              bool symmetrize)
{
    AntisymValidation v = validate_antisymmetric(m, gca, cbar);
    if (!v.ok())
        throw std::invalid_argument("structure is not anti-symmetric: " + v.first_failure);

    FormalityResult out;
    out.gauge = GappedStructure::identity(gca.space());
    out.final_structure = m;

    int index = 0;
    while (true) {
        NuReport level = nu(out.final_structure);
        if (!level.value)
            break;
        ObstructionStep step =
            obstruction_step(out.final_structure, gca, cbar, trunc, symmetrize);

        GaugeIteration it;
        it.index = index++;
        it.level_before = *level.value;
        for (const auto& [slot, table] : step.diffeo.slots)
            if (!(slot.arity == 1 && slot.energy.is_zero()))
                it.killed.push_back(SlotKey{slot.arity + 1, slot.energy});
        it.level_after = nu(step.pulled).value;
        out.log.push_back(std::move(it));

        if (symmetrize) {
            auto witness = check_self_dual(step.pulled, cbar);
            if (witness)
                throw std::logic_error("self-duality lost during the iteration");
        }
        out.gauge = compose(out.gauge, step.diffeo, trunc);
        out.final_structure = std::move(step.pulled);
        if (index > 4 * (trunc.k_max + 4))
            throw std::logic_error("gauge iteration failed to terminate");
    }

    for (const auto& [slot, table] : out.final_structure.slots)
        if (!table.empty() && !(slot.arity == 2 && slot.energy.is_zero()))
            throw std::logic_error("final structure retains an operation beyond the product");
    return out;
}

GappedStructure random_self_dual_diffeo(const FreeGCA& gca, std::uint64_t seed,
                                        const ScrambleProfile& profile,
                                        const TruncParams& trunc)
{
    const GradedBasis& space = gca.space();
    LinearMap parity = gca.parity_involution();
    Rng rng(seed);

    /* energy pool: positive multiples of the step within the window */
    std::vector<Rational> pool;
    for (int i = 1;; ++i) {
        Rational e = profile.step * Rational(i);
        if (e > trunc.e_max)
            break;
        pool.push_back(e);
        if (static_cast<int>(pool.size()) >= 3)
            break;
    }
    if (pool.empty())
        throw std::invalid_argument("profile step does not fit the window");

    /* monomials per degree for output choices */
    std::map<int, std::vector<int>> by_degree;
    for (int i = 0; i < space.dim(); ++i)
        by_degree[space.degree(i)].push_back(i);

    std::map<SlotKey, Cochain> raw;
    int max_arity = std::min(profile.max_arity, trunc.k_max - 1);
    for (int drawn = 0; drawn < profile.entries; ++drawn) {
        int k = rng.range(1, std::max(1, max_arity));
        Rational beta = pool[static_cast<std::size_t>(rng.below(pool.size()))];
        SlotKey slot{k, beta};
        auto [it, fresh] = raw.try_emplace(slot, Cochain::zero(gca, k, 1));
        Cochain& c = it->second;
        (void)fresh;
        /* one random entry of the right degree */
        std::vector<int> t(static_cast<std::size_t>(k));
        for (auto& i : t)
            i = static_cast<int>(rng.below(static_cast<std::uint64_t>(space.dim())));
        auto dit = by_degree.find(c.value_degree(t));
        if (dit == by_degree.end())
            continue;
        int mono = dit->second[static_cast<std::size_t>(rng.below(dit->second.size()))];
        c.add_value(pack_tuple(t), SparseVec::unit(mono, rng.small_rational()));
    }

    GappedStructure f = GappedStructure::identity(space);
    for (auto& [slot, c] : raw) {
        Cochain sym = half_symmetrize(c, parity);
        if (sym.is_zero())
            continue;
        SlotTable table;
        for (const auto& [t, v] : sym.values)
            table.emplace(t, v);
        f.slots.emplace(slot, std::move(table));
    }
    f.validate(trunc);
    if (check_self_dual_prehom(f, parity, parity))
        throw std::logic_error("generated diffeomorphism is not self-dual");
    return f;
}

Scramble scramble(const FreeGCA& gca, std::uint64_t seed, const ScrambleProfile& profile,
                  const TruncParams& trunc)
{
    Scramble s;
    s.diffeo = random_self_dual_diffeo(gca, seed, profile, trunc);
    GappedStructure wedge = GappedStructure::canonical_wedge(gca);
    s.structure = pullback(s.diffeo, wedge, trunc);
    return s;
}

} // namespace ainf
