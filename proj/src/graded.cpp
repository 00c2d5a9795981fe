#include "ainf/graded.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

namespace ainf {

int shifted_koszul_sign(std::span<const int> perm, std::span<const int> degrees)
{
    if (perm.size() != degrees.size())
        throw std::invalid_argument("permutation/degree length mismatch");
    long long exponent = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j])
                exponent += static_cast<long long>(degrees[static_cast<std::size_t>(perm[i])] + 1) *
                            (degrees[static_cast<std::size_t>(perm[j])] + 1);
    return exponent % 2 ? -1 : 1;
}

int reversal_op_sign(std::span<const int> degrees)
{
    long long exponent = static_cast<long long>(degrees.size()) + 1;
    for (std::size_t i = 0; i < degrees.size(); ++i)
        for (std::size_t j = i + 1; j < degrees.size(); ++j)
            exponent += static_cast<long long>(degrees[i] + 1) * (degrees[j] + 1);
    return exponent % 2 ? -1 : 1;
}

LinearMap LinearMap::compose(const LinearMap& other) const
{
    if (src != other.dst)
        throw std::invalid_argument("composing maps over mismatched spaces");
    LinearMap r = zero(*other.src, *dst, deg_shift + other.deg_shift);
    for (int j = 0; j < other.src->dim(); ++j)
        r.cols[static_cast<std::size_t>(j)] = apply(other.column(j));
    return r;
}

bool LinearMap::is_identity() const
{
    if (src != dst || deg_shift != 0)
        return false;
    for (int j = 0; j < src->dim(); ++j)
        if (column(j) != SparseVec::unit(j))
            return false;
    return true;
}

bool LinearMap::is_involution() const
{
    return src == dst && deg_shift == 0 && compose(*this).is_identity();
}

void LinearMap::validate() const
{
    for (int j = 0; j < src->dim(); ++j) {
        const SparseVec& c = column(j);
        if (c.is_zero())
            continue;
        long long want = src->degree(j) + deg_shift;
        for (const auto& t : c.terms())
            if (dst->degree(t.first) != dst->reduce_degree(want))
                throw std::invalid_argument("linear map violates its degree shift");
    }
}

void RowEchelonSolver::add_row(SparseVec row, Rational rhs)
{
    while (!row.is_zero()) {
        int lead = row.terms().front().first;
        auto it = pivots_.find(lead);
        if (it == pivots_.end()) {
            Rational inv = Rational(1) / row.terms().front().second;
            row = row.scaled(inv);
            rhs *= inv;
            pivots_.emplace(lead, std::move(row));
            pivot_rhs_.emplace(lead, std::move(rhs));
            return;
        }
        Rational c = row.terms().front().second;
        row.add_scaled(it->second, -c);
        rhs -= pivot_rhs_.at(lead) * c;
    }
    if (!rhs.is_zero())
        inconsistent_ = true;
}

std::optional<std::vector<Rational>> RowEchelonSolver::solve() const
{
    if (inconsistent_)
        return std::nullopt;
    std::vector<Rational> x(static_cast<std::size_t>(ncols_), Rational(0));
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
        Rational v = pivot_rhs_.at(it->first);
        for (const auto& t : it->second.terms())
            if (t.first != it->first)
                v -= t.second * x[static_cast<std::size_t>(t.first)];
        x[static_cast<std::size_t>(it->first)] = v;
    }
    return x;
}

namespace {

std::vector<SparseVec> rows_of(const LinearMap& a)
{
    std::vector<SparseVec> rows(static_cast<std::size_t>(a.dst->dim()));
    for (int j = 0; j < a.src->dim(); ++j)
        for (const auto& t : a.column(j).terms())
            rows[static_cast<std::size_t>(t.first)].add_term(j, t.second);
    return rows;
}

} // namespace

std::optional<SparseVec> linear_solve(const LinearMap& a, const SparseVec& y)
{
    RowEchelonSolver sys(a.src->dim());
    auto rows = rows_of(a);
    for (int i = 0; i < a.dst->dim(); ++i)
        sys.add_row(rows[static_cast<std::size_t>(i)], y.coeff(i));
    auto x = sys.solve();
    if (!x)
        return std::nullopt;
    SparseVec r;
    for (int j = 0; j < a.src->dim(); ++j)
        r.add_term(j, (*x)[static_cast<std::size_t>(j)]);
    return r;
}

int matrix_rank(const LinearMap& a)
{
    RowEchelonSolver sys(a.src->dim());
    auto rows = rows_of(a);
    for (auto& row : rows)
        sys.add_row(std::move(row), Rational(0));
    return sys.rank();
}

std::optional<LinearMap> linear_inverse(const LinearMap& a)
{
    if (a.src->dim() != a.dst->dim())
        return std::nullopt;
    int n = a.src->dim();
    /* Gauss-Jordan on [A | I], columns in declared order. */
    std::vector<SparseVec> rows = rows_of(a);
    std::vector<SparseVec> aug(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        aug[static_cast<std::size_t>(i)] = SparseVec::unit(i);
    std::vector<int> pivot_row_of_col(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int i = 0; i < n; ++i)
            if (!used[static_cast<std::size_t>(i)] &&
                !rows[static_cast<std::size_t>(i)].coeff(col).is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0)
            return std::nullopt;
        used[static_cast<std::size_t>(pr)] = true;
        pivot_row_of_col[static_cast<std::size_t>(col)] = pr;
        Rational inv = Rational(1) / rows[static_cast<std::size_t>(pr)].coeff(col);
        rows[static_cast<std::size_t>(pr)] = rows[static_cast<std::size_t>(pr)].scaled(inv);
        aug[static_cast<std::size_t>(pr)] = aug[static_cast<std::size_t>(pr)].scaled(inv);
        for (int i = 0; i < n; ++i) {
            if (i == pr)
                continue;
            Rational c = rows[static_cast<std::size_t>(i)].coeff(col);
            if (c.is_zero())
                continue;
            rows[static_cast<std::size_t>(i)].add_scaled(rows[static_cast<std::size_t>(pr)], -c);
            aug[static_cast<std::size_t>(i)].add_scaled(aug[static_cast<std::size_t>(pr)], -c);
        }
    }
    LinearMap inv = LinearMap::zero(*a.dst, *a.src, -a.deg_shift);
    for (int col = 0; col < n; ++col) {
        const SparseVec& row = aug[static_cast<std::size_t>(pivot_row_of_col[static_cast<std::size_t>(col)])];
        for (const auto& t : row.terms())
            inv.cols[static_cast<std::size_t>(t.first)].add_term(col, t.second);
    }
    return inv;
}

namespace {

/* Dense reduced row echelon form of the columns of `vecs` seen as a matrix
 * acting from tuple positions; returns pivot column list and kernel basis
 * (RREF-canonical, free columns in increasing order). */
struct Echelon {
    std::vector<int> pivot_cols;
    std::vector<SparseVec> kernel; /* coordinates in column index space */
};

Echelon column_echelon(const std::vector<SparseVec>& cols, int nrows)
{
    (void)nrows;
    Echelon out;
    int n = static_cast<int>(cols.size());
    /* row-echelon over rows = transposed usage: we eliminate directly on
     * column vectors, tracking the combination that produced each. */
    std::vector<SparseVec> reduced;      /* independent column images */
    std::vector<SparseVec> combo;        /* expression in original columns */
    std::vector<int> lead;               /* leading row of reduced[i] */
    for (int j = 0; j < n; ++j) {
        SparseVec v = cols[static_cast<std::size_t>(j)];
        SparseVec c = SparseVec::unit(j);
        bool progressed = true;
        while (!v.is_zero() && progressed) {
            progressed = false;
            int lv = v.terms().front().first;
            for (std::size_t i = 0; i < reduced.size(); ++i) {
                if (lead[i] == lv) {
                    Rational f = v.terms().front().second / reduced[i].terms().front().second;
                    v.add_scaled(reduced[i], -f);
                    c.add_scaled(combo[i], -f);
                    progressed = true;
                    break;
                }
            }
        }
        if (v.is_zero()) {
            out.kernel.push_back(c);
        } else {
            out.pivot_cols.push_back(j);
            lead.push_back(v.terms().front().first);
            reduced.push_back(std::move(v));
            combo.push_back(std::move(c));
        }
    }
    return out;
}

/* Dense inverse of the square matrix whose columns are `cols`, expressed in
 * the ambient index set `support` (size n). Returns rows of the inverse:
 * row k gives the k-th coordinate functional. */
std::vector<SparseVec> invert_basis(const std::vector<SparseVec>& cols,
                                    const std::vector<int>& support)
{
    int n = static_cast<int>(cols.size());
    if (static_cast<int>(support.size()) != n)
        throw std::logic_error("basis inversion: size mismatch");
    std::map<int, int> pos;
    for (int i = 0; i < n; ++i)
        pos[support[static_cast<std::size_t>(i)]] = i;
    /* dense [M | I] elimination in local coordinates */
    std::vector<std::vector<Rational>> m(static_cast<std::size_t>(n),
                                         std::vector<Rational>(static_cast<std::size_t>(2 * n)));
    for (int j = 0; j < n; ++j)
        for (const auto& t : cols[static_cast<std::size_t>(j)].terms()) {
            auto it = pos.find(t.first);
            if (it == pos.end())
                throw std::logic_error("basis inversion: vector outside support");
            m[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(j)] = t.second;
        }
    for (int i = 0; i < n; ++i)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = Rational(1);
    for (int col = 0; col < n; ++col) {
        int pr = -1;
        for (int i = col; i < n; ++i)
            if (!m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0)
            throw std::logic_error("basis inversion: singular matrix");
        std::swap(m[static_cast<std::size_t>(pr)], m[static_cast<std::size_t>(col)]);
        Rational inv = Rational(1) / m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int j = 0; j < 2 * n; ++j)
            m[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] *= inv;
        for (int i = 0; i < n; ++i) {
            if (i == col)
                continue;
            Rational c = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
            if (c.is_zero())
                continue;
            for (int j = 0; j < 2 * n; ++j)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    c * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
        }
    }
    std::vector<SparseVec> rows(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const Rational& v = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(n + i)];
            if (!v.is_zero())
                rows[static_cast<std::size_t>(k)].add_term(support[static_cast<std::size_t>(i)], v);
        }
    return rows;
}

LinearMap conjugate(const LinearMap& inner, const LinearMap& c)
{
    return c.compose(inner).compose(c);
}

LinearMap average_with_conjugate(const LinearMap& p, const LinearMap& c)
{
    LinearMap q = conjugate(p, c);
    LinearMap r = LinearMap::zero(*p.src, *p.dst, p.deg_shift);
    Rational half(1, 2);
    for (std::size_t j = 0; j < p.cols.size(); ++j) {
        r.cols[j] = p.cols[j].scaled(half);
        r.cols[j].add_scaled(q.cols[j], half);
    }
    return r;
}

} // namespace

CohomologySplit cohomology(const LinearMap& d, const LinearMap* involution)
{
    if (d.src != d.dst || d.deg_shift != 1)
        throw std::invalid_argument("differential must be an endomorphism of degree +1");
    d.validate();
    if (!d.compose(d).is_zero())
        throw std::invalid_argument("differential does not square to zero");
    if (involution) {
        if (involution->src != d.src || involution->deg_shift != 0)
            throw std::invalid_argument("involution must be a degree-0 endomorphism");
        if (!involution->is_involution())
            throw std::invalid_argument("supplied map is not an involution");
        if (!(involution->compose(d) == d.compose(*involution)))
            throw std::invalid_argument("involution does not commute with the differential");
    }

    const GradedBasis& space = *d.src;
    int n = space.dim();

    /* degree blocks in declared order */
    std::map<int, std::vector<int>> block;
    for (int i = 0; i < n; ++i)
        block[space.degree(i)].push_back(i);

    /* Z = ker d and W = a complement, per degree. */
    std::map<int, std::vector<SparseVec>> z_basis, w_basis;
    for (const auto& [deg, idxs] : block) {
        std::vector<SparseVec> cols;
        cols.reserve(idxs.size());
        for (int i : idxs)
            cols.push_back(d.column(i));
        Echelon e = column_echelon(cols, n);
        for (const auto& kvec : e.kernel) {
            SparseVec z;
            for (const auto& t : kvec.terms())
                z.add_term(idxs[static_cast<std::size_t>(t.first)], t.second);
            z_basis[deg].push_back(std::move(z));
        }
        for (int j : e.pivot_cols)
            w_basis[deg].push_back(SparseVec::unit(idxs[static_cast<std::size_t>(j)]));
    }

    /* Equivariant case: replace W by the c-stable complement of Z obtained
     * by averaging the projection onto Z along W. */
    if (involution) {
        LinearMap proj_z = LinearMap::zero(space, space, 0);
        for (const auto& [deg, idxs] : block) {
            const auto& zb = z_basis[deg];
            const auto& wb = w_basis[deg];
            if (zb.empty())
                continue;
            std::vector<SparseVec> full = zb;
            full.insert(full.end(), wb.begin(), wb.end());
            auto coord_rows = invert_basis(full, idxs);
            /* proj_z = sum over Z coordinates of zb[k] * coord_k */
            for (int i : idxs) {
                SparseVec img;
                for (std::size_t k = 0; k < zb.size(); ++k) {
                    Rational c = coord_rows[k].coeff(i);
                    if (!c.is_zero())
                        img.add_scaled(zb[k], c);
                }
                proj_z.cols[static_cast<std::size_t>(i)] = std::move(img);
            }
        }
        LinearMap avg = average_with_conjugate(proj_z, *involution);
        /* W' = image of (Id - avg) */
        LinearMap id_minus = LinearMap::identity(space);
        for (std::size_t j = 0; j < id_minus.cols.size(); ++j)
            id_minus.cols[j] -= avg.cols[j];
        w_basis.clear();
        for (const auto& [deg, idxs] : block) {
            std::vector<SparseVec> cols;
            for (int i : idxs)
                cols.push_back(id_minus.column(i));
            Echelon e = column_echelon(cols, n);
            for (int j : e.pivot_cols)
                w_basis[deg].push_back(id_minus.column(idxs[static_cast<std::size_t>(j)]));
        }
    }

    /* B_{deg+1} = d(W_deg), with the W vectors as chosen preimages. */
    std::map<int, std::vector<SparseVec>> b_basis, b_preimage;
    for (const auto& [deg, wb] : w_basis) {
        int tdeg = space.reduce_degree(static_cast<long long>(deg) + 1);
        for (const auto& w : wb) {
            b_basis[tdeg].push_back(d.apply(w));
            b_preimage[tdeg].push_back(w);
        }
    }

    /* H = complement of B inside Z, greedy over the kernel basis. */
    std::map<int, std::vector<SparseVec>> h_basis;
    for (const auto& [deg, idxs] : block) {
        const auto& zb = z_basis[deg];
        const auto& bb = b_basis[deg];
        std::vector<SparseVec> cols = bb;
        cols.insert(cols.end(), zb.begin(), zb.end());
        Echelon e = column_echelon(cols, n);
        for (int j : e.pivot_cols)
            if (j >= static_cast<int>(bb.size()))
                h_basis[deg].push_back(cols[static_cast<std::size_t>(j)]);
    }

    /* Equivariant case: replace H by the c-stable complement of B in Z. */
    if (involution) {
        for (auto& [deg, hb] : h_basis) {
            const auto& bb = b_basis[deg];
            if (bb.empty() || hb.empty())
                continue;
            const auto& idxs = block[deg];
            /* projection of Z onto B along current H, extended by 0 on W */
            std::vector<SparseVec> zw = bb;
            zw.insert(zw.end(), hb.begin(), hb.end());
            const auto& wb = w_basis[deg];
            zw.insert(zw.end(), wb.begin(), wb.end());
            auto coord_rows = invert_basis(zw, idxs);
            LinearMap proj_b = LinearMap::zero(space, space, 0);
            for (int i : idxs) {
                SparseVec img;
                for (std::size_t k = 0; k < bb.size(); ++k) {
                    Rational c = coord_rows[k].coeff(i);
                    if (!c.is_zero())
                        img.add_scaled(bb[k], c);
                }
                proj_b.cols[static_cast<std::size_t>(i)] = std::move(img);
            }
            LinearMap avg = average_with_conjugate(proj_b, *involution);
            /* H' = (Id - avg)(Z) */
            std::vector<SparseVec> cand;
            for (const auto& z : z_basis[deg]) {
                SparseVec v = z;
                v -= avg.apply(z);
                cand.push_back(std::move(v));
            }
            Echelon e = column_echelon(cand, n);
            std::vector<SparseVec> fresh;
            for (int j : e.pivot_cols)
                fresh.push_back(cand[static_cast<std::size_t>(j)]);
            hb = std::move(fresh);
        }
    }

    /* Assemble the quotient space and the three maps. */
    CohomologySplit out;
    out.h_space = std::make_shared<GradedBasis>();
    out.h_space->modulus = space.modulus;
    std::map<int, std::vector<int>> h_index; /* degree -> indices in h_space */
    for (const auto& [deg, hb] : h_basis)
        for (std::size_t k = 0; k < hb.size(); ++k) {
            h_index[deg].push_back(out.h_space->dim());
            out.h_space->names.push_back("h" + std::to_string(out.h_space->dim()));
            out.h_space->degrees.push_back(deg);
        }

    out.include = LinearMap::zero(*out.h_space, space, 0);
    out.project = LinearMap::zero(space, *out.h_space, 0);
    out.homotopy = LinearMap::zero(space, space, -1);

    for (const auto& [deg, idxs] : block) {
        const auto& bb = b_basis[deg];
        const auto& hb = h_basis[deg];
        const auto& wb = w_basis[deg];
        std::vector<SparseVec> full = bb;
        full.insert(full.end(), hb.begin(), hb.end());
        full.insert(full.end(), wb.begin(), wb.end());
        if (full.empty())
            continue;
        auto coord_rows = invert_basis(full, idxs);
        for (std::size_t k = 0; k < hb.size(); ++k)
            out.include.cols[static_cast<std::size_t>(h_index[deg][k])] = hb[k];
        for (int i : idxs) {
            SparseVec p_img, h_img;
            for (std::size_t k = 0; k < bb.size(); ++k) {
                Rational c = coord_rows[k].coeff(i);
                if (!c.is_zero())
                    h_img.add_scaled(b_preimage[deg][k], -c);
            }
            for (std::size_t k = 0; k < hb.size(); ++k) {
                Rational c = coord_rows[bb.size() + k].coeff(i);
                if (!c.is_zero())
                    p_img.add_term(h_index[deg][k], c);
            }
            out.project.cols[static_cast<std::size_t>(i)] = std::move(p_img);
            out.homotopy.cols[static_cast<std::size_t>(i)] = std::move(h_img);
        }
    }

    if (involution)
        out.homotopy = average_with_conjugate(out.homotopy, *involution);

    /* ranks report */
    for (const auto& [deg, idxs] : block) {
        DegreeRank r;
        r.degree = deg;
        r.kernel = static_cast<int>(z_basis[deg].size());
        r.image = static_cast<int>(w_basis[deg].size());
        r.cohomology = static_cast<int>(h_basis[deg].size());
        out.ranks.push_back(r);
    }

    /* exact postconditions */
    if (!out.project.compose(d).is_zero())
        throw std::logic_error("retraction identity p*d = 0 failed");
    if (!d.compose(out.include).is_zero())
        throw std::logic_error("retraction identity d*i = 0 failed");
    if (!out.project.compose(out.include).is_identity())
        throw std::logic_error("retraction identity p*i = Id failed");
    {
        LinearMap lhs = d.compose(out.homotopy);
        LinearMap rhs = out.homotopy.compose(d);
        LinearMap ip = out.include.compose(out.project);
        for (std::size_t j = 0; j < lhs.cols.size(); ++j) {
            SparseVec v = lhs.cols[j] + rhs.cols[j] - ip.cols[j] + SparseVec::unit(static_cast<int>(j));
            if (!v.is_zero())
                throw std::logic_error("retraction identity d*h + h*d = i*p - Id failed");
        }
    }

    if (involution) {
        LinearMap chat = out.project.compose(*involution).compose(out.include);
        if (!(involution->compose(out.include) == out.include.compose(chat)))
            throw std::logic_error("equivariance c*i = i*c_hat failed");
        if (!(chat.compose(out.project) == out.project.compose(*involution)))
            throw std::logic_error("equivariance c_hat*p = p*c failed");
        if (!(involution->compose(out.homotopy) == out.homotopy.compose(*involution)))
            throw std::logic_error("equivariance c*h = h*c failed");
        out.induced_involution = std::move(chat);
    }

    return out;
}

FreeGCA::FreeGCA(std::vector<std::string> gen_names, std::vector<int> gen_degrees, int modulus)
    : gen_names_(std::move(gen_names)), gen_degrees_(std::move(gen_degrees))
{
    if (modulus < 0 || modulus % 2 != 0)
        throw std::invalid_argument("grading modulus must be a nonnegative even integer");
    if (gen_names_.size() != gen_degrees_.size())
        throw std::invalid_argument("generator name/degree count mismatch");
    if (gen_names_.size() > 16)
        throw std::invalid_argument("too many generators");
    std::set<std::string> seen;
    for (const auto& nm : gen_names_) {
        if (nm.empty() || nm == "1")
            throw std::invalid_argument("invalid generator name");
        if (!seen.insert(nm).second)
            throw std::invalid_argument("duplicate generator name: " + nm);
    }
    basis_.modulus = modulus;
    for (std::size_t g = 0; g < gen_degrees_.size(); ++g) {
        gen_degrees_[g] = basis_.reduce_degree(gen_degrees_[g]);
        if (gen_degrees_[g] % 2 != 1)
            throw std::invalid_argument("generator " + gen_names_[g] +
                                        " has even degree; generators must be odd");
    }
    int n = static_cast<int>(gen_names_.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
        long long deg = 0;
        for (int g = 0; g < n; ++g)
            if (mask & (1 << g))
                deg += gen_degrees_[static_cast<std::size_t>(g)];
        basis_.names.push_back(mono_name(mask));
        basis_.degrees.push_back(basis_.reduce_degree(deg));
    }
}

FreeGCA::WedgeTerm FreeGCA::wedge(int a, int b) const
{
    if (a & b)
        return {true, 0, 1};
    /* all generators odd: each transposition contributes -1 */
    int inversions = 0;
    for (int g = 0; g < gen_count(); ++g)
        if (b & (1 << g))
            inversions += __builtin_popcount(static_cast<unsigned>(a) >> (g + 1));
    return {false, a | b, inversions % 2 ? -1 : 1};
}

SparseVec FreeGCA::multiply(const SparseVec& x, const SparseVec& y) const
{
    SparseVec r;
    for (const auto& tx : x.terms())
        for (const auto& ty : y.terms()) {
            WedgeTerm w = wedge(tx.first, ty.first);
            if (w.zero)
                continue;
            Rational c = tx.second * ty.second;
            if (w.sign < 0)
                c = -c;
            r.add_term(w.mono, c);
        }
    return r;
}

LinearMap FreeGCA::parity_involution() const
{
    LinearMap m = LinearMap::zero(basis_, basis_, 0);
    for (int mono = 0; mono < basis_.dim(); ++mono)
        m.cols[static_cast<std::size_t>(mono)] =
            SparseVec::unit(mono, Rational(word_length(mono) % 2 ? -1 : 1));
    return m;
}

SparseVec FreeGCA::parity_apply(const SparseVec& x) const
{
    SparseVec out;
    for (const auto& t : x.terms())
        out.add_term(t.first, word_length(t.first) % 2 ? -t.second : t.second);
    return out;
}

std::string FreeGCA::mono_name(int mono) const
{
    if (mono == 0)
        return "1";
    std::string s;
    for (int g = 0; g < gen_count(); ++g)
        if (mono & (1 << g)) {
            if (!s.empty())
                s += ".";
            s += gen_names_[static_cast<std::size_t>(g)];
        }
    return s;
}

std::optional<int> FreeGCA::parse_mono(std::string_view text) const
{
    if (text == "1")
        return 0;
    int mask = 0;
    int last = -1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        std::string_view part =
            dot == std::string_view::npos ? text.substr(pos) : text.substr(pos, dot - pos);
        int g = -1;
        for (int i = 0; i < gen_count(); ++i)
            if (gen_names_[static_cast<std::size_t>(i)] == part) {
                g = i;
                break;
            }
        if (g < 0 || g <= last)
            return std::nullopt;
        mask |= 1 << g;
        last = g;
        if (dot == std::string_view::npos)
            break;
        pos = dot + 1;
    }
    return mask;
}

} // namespace ainf
