#include "ainf/mc.hpp"

#include <algorithm>
#include <stdexcept>

namespace ainf {

namespace {

struct BTerm {
    int mono;
    Energy energy;
    Rational coeff;
};

std::vector<BTerm> flatten(const NovVec& v)
{
    std::vector<BTerm> terms;
    for (const auto& [idx, scalar] : v)
        for (const auto& [e, c] : scalar.terms())
            terms.push_back({idx, e, c});
    return terms;
}

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

} // namespace

bool novvec_is_zero(const NovVec& v)
{
    for (const auto& [idx, scalar] : v)
        if (!scalar.is_zero())
            return false;
    return true;
}

NovVec novvec_truncate(const NovVec& v, const Energy& e_max)
{
    NovVec out;
    for (const auto& [idx, scalar] : v) {
        NovElem t = scalar.truncated(e_max);
        if (!t.is_zero())
            out.emplace(idx, std::move(t));
    }
    return out;
}

void novvec_add(NovVec& acc, int idx, const Energy& e, const Rational& c)
{
    acc[idx].add_term(e, c);
    if (acc[idx].is_zero())
        acc.erase(idx);
}

void validate_candidate(const GradedBasis& space, const NovVec& b)
{
    for (const auto& [idx, scalar] : b) {
        if (scalar.is_zero())
            continue;
        if (space.degree(idx) != space.reduce_degree(1))
            throw std::invalid_argument("candidate has a component outside degree 1");
        auto v = scalar.valuation();
        if (v && v->is_zero())
            throw std::invalid_argument("candidate has an energy-0 coefficient");
    }
}

NovVec mc_residual(const GappedStructure& m, const NovVec& b, const TruncParams& trunc)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("mc_residual expects a structure");
    validate_candidate(*m.src, b);
    auto terms = flatten(b);

    NovVec acc;
    std::vector<int> idx;
    for (const auto& [slot, table] : m.slots) {
        idx.assign(static_cast<std::size_t>(slot.arity), 0);
        auto rec = [&](auto&& self, int pos, Energy used, Rational coeff) -> void {
            if (pos == slot.arity) {
                auto it = table.find(pack_tuple(idx));
                if (it == table.end())
                    return;
                for (const auto& [mono, c] : it->second.terms())
                    novvec_add(acc, mono, used, coeff * c);
                return;
            }
            for (const auto& t : terms) {
                Energy e = used + t.energy;
                if (!(e < trunc.e_max))
                    continue; /* arithmetic is modulo T^{e_max} */
                idx[static_cast<std::size_t>(pos)] = t.mono;
                self(self, pos + 1, e, coeff * t.coeff);
            }
        };
        rec(rec, 0, slot.energy, Rational(1));
    }
    return novvec_truncate(acc, trunc.e_max);
}

GappedStructure deform(const GappedStructure& m, const NovVec& b, const TruncParams& trunc)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("deform expects a structure");
    validate_candidate(*m.src, b);
    auto terms = flatten(b);
    const GradedBasis& space = *m.src;

    GappedStructure out = GappedStructure::empty_structure(space);
    for (int k = 0; k <= trunc.k_max; ++k) {
        for_each_tuple(k, space.dim(), [&](std::span<const int> t) {
            /* walk the source argument list: at each point either insert a
             * term of b or consume the next input */
            std::map<Rational, SparseVec> acc;
            std::vector<int> args;
            auto rec = [&](auto&& self, int consumed, Energy used, Rational coeff) -> void {
                if (static_cast<int>(args.size()) > trunc.k_max)
                    return;
                if (consumed == k) {
                    SlotKey probe{static_cast<int>(args.size()), Rational(0)};
                    for (auto sit = m.slots.lower_bound(probe);
                         sit != m.slots.end() && sit->first.arity == probe.arity; ++sit) {
                        Rational total = sit->first.energy + used;
                        if (total > trunc.e_max)
                            break;
                        auto it = sit->second.find(pack_tuple(args));
                        if (it != sit->second.end())
                            acc[total].add_scaled(it->second, coeff);
                    }
                }
                /* insert one b term */
                for (const auto& bt : terms) {
                    Energy e = used + bt.energy;
                    if (e > trunc.e_max)
                        continue;
                    args.push_back(bt.mono);
                    self(self, consumed, e, coeff * bt.coeff);
                    args.pop_back();
                }
                /* consume the next input */
                if (consumed < k) {
                    args.push_back(t[static_cast<std::size_t>(consumed)]);
                    self(self, consumed + 1, used, coeff);
                    args.pop_back();
                }
            };
            rec(rec, 0, Energy(0), Rational(1));
            for (auto& [beta, val] : acc)
                out.set_entry(k, beta, pack_tuple(t), std::move(val));
        });
    }
    out.drop_empty();
    out.validate(trunc);
    return out;
}

bool check_gauge(const GappedStructure& m, const NovVec& b0, const NovVec& b1,
                 const NovVec& c, const TruncParams& trunc)
{
    if (m.role != Role::structure)
        throw std::invalid_argument("check_gauge expects a structure");
    validate_candidate(*m.src, b0);
    validate_candidate(*m.src, b1);
    auto t0 = flatten(b0);
    auto t1 = flatten(b1);
    auto tc = flatten(c);

    NovVec rhs;
    std::vector<int> args;
    for (const auto& [slot, table] : m.slots) {
        /* arguments: k0 copies of b0, then one c, then k1 copies of b1 */
        args.assign(static_cast<std::size_t>(slot.arity), 0);
        auto rec = [&](auto&& self, int pos, int c_used, Energy used, Rational coeff) -> void {
            if (!(used < trunc.e_max))
                return;
            if (pos == slot.arity) {
                if (!c_used)
                    return;
                auto it = table.find(pack_tuple(args));
                if (it == table.end())
                    return;
                for (const auto& [mono, cc] : it->second.terms())
                    novvec_add(rhs, mono, used, coeff * cc);
                return;
            }
            const auto& pool = c_used ? t1 : t0;
            for (const auto& bt : pool) {
                args[static_cast<std::size_t>(pos)] = bt.mono;
                self(self, pos + 1, c_used, used + bt.energy, coeff * bt.coeff);
            }
            if (!c_used)
                for (const auto& ct : tc) {
                    args[static_cast<std::size_t>(pos)] = ct.mono;
                    self(self, pos + 1, 1, used + ct.energy, coeff * ct.coeff);
                }
        };
        rec(rec, 0, 0, slot.energy, Rational(1));
    }

    NovVec lhs;
    for (const auto& [idx, scalar] : b1)
        for (const auto& [e, cc] : scalar.terms())
            novvec_add(lhs, idx, e, cc);
    for (const auto& [idx, scalar] : b0)
        for (const auto& [e, cc] : scalar.terms())
            novvec_add(lhs, idx, e, -cc);

    return novvec_truncate(lhs, trunc.e_max) == novvec_truncate(rhs, trunc.e_max);
}

namespace {

/* u / v modulo T^{prec}, assuming val(u) >= val(v). */
NovElem nov_divide(const NovElem& u, const NovElem& v, const Energy& prec)
{
    NovElem q, r = u;
    Energy v0 = *v.valuation();
    Rational c0 = v.terms().front().second;
    while (!r.is_zero()) {
        const auto& lead = r.terms().front();
        Energy qe = lead.first - v0;
        if (!(qe < prec))
            break;
        Rational qc = lead.second / c0;
        q.add_term(qe, qc);
        NovElem sub;
        for (const auto& [e, c] : v.terms())
            sub.add_term(e + qe, c * qc);
        r = r - sub;
    }
    return q;
}

} // namespace

FloerReport floer_rank(const GappedStructure& m, const NovVec& b, const TruncParams& trunc)
{
    if (!novvec_is_zero(mc_residual(m, b, trunc)))
        throw std::invalid_argument("floer_rank needs a bounding cochain (nonzero residual)");
    const GradedBasis& space = *m.src;

    GappedStructure mb = deform(m, b, trunc);
    /* the deformed differential as a Novikov matrix, dropping terms at or
     * above the scalar window */
    std::vector<std::vector<NovElem>> mat(
        static_cast<std::size_t>(space.dim()),
        std::vector<NovElem>(static_cast<std::size_t>(space.dim())));
    bool all_zero = true;
    for (const auto& [slot, table] : mb.slots) {
        if (slot.arity != 1 || !(slot.energy < trunc.e_max))
            continue;
        for (const auto& [key, val] : table) {
            int j = unpack_tuple(key)[0];
            for (const auto& [mono, c] : val.terms()) {
                mat[static_cast<std::size_t>(mono)][static_cast<std::size_t>(j)].add_term(
                    slot.energy, c);
                all_zero = false;
            }
        }
    }

    FloerReport report;
    report.differential_zero = all_zero;
    report.precision = trunc.e_max;

    /* per-degree blocks */
    std::map<int, std::vector<int>> block;
    for (int i = 0; i < space.dim(); ++i)
        block[space.degree(i)].push_back(i);

    std::map<int, int> rank_out;
    for (const auto& [deg, cols] : block) {
        int tdeg = space.reduce_degree(static_cast<long long>(deg) + 1);
        auto rit = block.find(tdeg);
        std::vector<int> rows = rit == block.end() ? std::vector<int>{} : rit->second;
        /* local dense copy */
        std::vector<std::vector<NovElem>> a(rows.size(),
                                            std::vector<NovElem>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                a[i][j] = mat[static_cast<std::size_t>(rows[i])]
                             [static_cast<std::size_t>(cols[j])];

        int rank = 0;
        std::vector<bool> row_used(rows.size(), false), col_used(cols.size(), false);
        while (true) {
            /* minimal-valuation pivot, ties by (row, col) */
            int pr = -1, pc = -1;
            std::optional<Energy> best;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (row_used[i])
                    continue;
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    if (col_used[j])
                        continue;
                    NovElem entry = a[i][j].truncated(report.precision);
                    auto v = entry.valuation();
                    if (!v)
                        continue;
                    if (!best || *v < *best) {
                        best = *v;
                        pr = static_cast<int>(i);
                        pc = static_cast<int>(j);
                    }
                }
            }
            if (pr < 0)
                break;
            ++rank;
            row_used[static_cast<std::size_t>(pr)] = true;
            col_used[static_cast<std::size_t>(pc)] = true;
            Energy pivot_val = *best;
            Energy new_prec = report.precision - pivot_val;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (row_used[i] || a[i][static_cast<std::size_t>(pc)].is_zero())
                    continue;
                NovElem factor = nov_divide(a[i][static_cast<std::size_t>(pc)],
                                            a[static_cast<std::size_t>(pr)]
                                             [static_cast<std::size_t>(pc)],
                                            new_prec);
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    if (col_used[j])
                        continue;
                    NovElem delta;
                    for (const auto& [e1, c1] : factor.terms())
                        for (const auto& [e2, c2] :
                             a[static_cast<std::size_t>(pr)][j].terms()) {
                            Energy e = e1 + e2;
                            if (e < trunc.e_max)
                                delta.add_term(e, c1 * c2);
                        }
                    a[i][j] = a[i][j] - delta;
                }
            }
            report.precision = new_prec;
        }
        rank_out[deg] = rank;
    }

    for (const auto& [deg, cols] : block) {
        FloerReport::Row row;
        row.degree = deg;
        row.dim = static_cast<int>(cols.size());
        row.rank_out = rank_out.count(deg) ? rank_out.at(deg) : 0;
        int prev = space.modulus == 0 ? deg - 1
                                      : space.reduce_degree(static_cast<long long>(deg) - 1);
        int rank_in = rank_out.count(prev) && block.count(prev) ? rank_out.at(prev) : 0;
        row.hf_rank = row.dim - row.rank_out - rank_in;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace ainf
