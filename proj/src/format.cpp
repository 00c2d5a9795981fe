#include "ainf/format.hpp"

#include <algorithm>
#include <sstream>

namespace ainf {

namespace {

struct Line {
    int number;
    std::string text;
    std::vector<std::string> tokens;
    std::vector<int> cols; /* 1-based column of each token */
};

std::vector<Line> tokenize(const std::string& text)
{
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::string body = raw;
        if (!body.empty() && body.back() == '\r')
            body.pop_back();
        auto hash = body.find('#');
        if (hash != std::string::npos)
            body.resize(hash);
        Line line;
        line.number = number;
        line.text = body;
        std::size_t pos = 0;
        while (pos < body.size()) {
            while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos])))
                ++pos;
            if (pos >= body.size())
                break;
            std::size_t start = pos;
            while (pos < body.size() && !std::isspace(static_cast<unsigned char>(body[pos])))
                ++pos;
            line.tokens.push_back(body.substr(start, pos - start));
            line.cols.push_back(static_cast<int>(start) + 1);
        }
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(const Line& line, int token, const std::string& reason)
{
    int col = token >= 0 && token < static_cast<int>(line.cols.size())
                  ? line.cols[static_cast<std::size_t>(token)]
                  : 1;
    throw FileParseError(line.number, col, reason);
}

Rational parse_rat(const Line& line, int token)
{
    try {
        return Rational::parse(line.tokens[static_cast<std::size_t>(token)]);
    } catch (const std::exception& e) {
        fail(line, token, e.what());
    }
}

long parse_int(const Line& line, int token)
{
    Rational r = parse_rat(line, token);
    if (!r.is_integer())
        fail(line, token, "expected an integer");
    return static_cast<long>(r.num());
}

bool valid_name(const std::string& s)
{
    if (s.empty() || s == "1")
        return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

struct SpaceContext {
    const FreeGCA* gca = nullptr;
    const GradedBasis* space = nullptr;

    int parse_mono(const Line& line, int token) const
    {
        const std::string& s = line.tokens[static_cast<std::size_t>(token)];
        if (gca) {
            auto m = gca->parse_mono(s);
            if (!m)
                fail(line, token, "unknown monomial '" + s + "'");
            return *m;
        }
        for (int i = 0; i < space->dim(); ++i)
            if (space->names[static_cast<std::size_t>(i)] == s)
                return i;
        fail(line, token, "unknown basis element '" + s + "'");
    }

    std::string mono_name(int idx) const
    {
        return gca ? gca->mono_name(idx) : space->names[static_cast<std::size_t>(idx)];
    }
};

/* element tokens: terms separated by a bare "+" token; each term
 * "coeff*mono"; "0" for the zero element */
SparseVec parse_element_tokens(const SpaceContext& ctx, const Line& line, int from)
{
    SparseVec v;
    int ntok = static_cast<int>(line.tokens.size());
    if (from >= ntok)
        fail(line, ntok - 1, "missing element");
    if (from + 1 == ntok && line.tokens[static_cast<std::size_t>(from)] == "0")
        return v;
    int i = from;
    while (i < ntok) {
        const std::string& term = line.tokens[static_cast<std::size_t>(i)];
        auto star = term.find('*');
        if (star == std::string::npos)
            fail(line, i, "element term must be coeff*monomial");
        Rational c;
        try {
            c = Rational::parse(term.substr(0, star));
        } catch (const std::exception& e) {
            fail(line, i, e.what());
        }
        std::string mono = term.substr(star + 1);
        Line sub = line;
        sub.tokens[static_cast<std::size_t>(i)] = mono;
        v.add_term(ctx.parse_mono(sub, i), c);
        ++i;
        if (i < ntok) {
            if (line.tokens[static_cast<std::size_t>(i)] != "+")
                fail(line, i, "expected '+' between element terms");
            ++i;
            if (i >= ntok)
                fail(line, i - 1, "dangling '+'");
        }
    }
    return v;
}

std::string rat_str(const Rational& r) { return r.str(); }

std::string element_str(const SpaceContext& ctx, const SparseVec& v)
{
    if (v.is_zero())
        return "0";
    std::string s;
    for (std::size_t i = 0; i < v.terms().size(); ++i) {
        if (i)
            s += " + ";
        s += rat_str(v.terms()[i].second) + "*" + ctx.mono_name(v.terms()[i].first);
    }
    return s;
}

} // namespace

LinearMap AlgebraFile::involution_map() const
{
    if (involution == InvolutionKind::parity) {
        if (!algebra)
            throw std::invalid_argument("parity involution needs a free algebra context");
        return algebra->parity_involution();
    }
    return LinearMap::identity(space());
}

AlgebraFile parse_algebra_file(const std::string& text)
{
    auto lines = tokenize(text);

    int modulus = 0;
    bool saw_grading = false;
    std::vector<std::string> names;
    std::vector<int> degrees;
    bool plain_basis = false;
    std::optional<Rational> e_max;
    std::optional<long> k_max;
    Role role = Role::structure;
    InvolutionKind involution = InvolutionKind::parity;
    bool saw_involution = false;
    bool canonical = false;

    AlgebraFile out;
    SpaceContext ctx;
    bool space_built = false;

    auto build_space = [&](const Line& line) {
        if (space_built)
            return;
        if (names.empty())
            fail(line, 0, "no generators or basis declared before this line");
        if (!e_max || !k_max)
            fail(line, 0, "truncation window must be declared before operations");
        try {
            out.trunc = TruncParams(*e_max, static_cast<int>(*k_max));
        } catch (const std::exception& e) {
            fail(line, 0, e.what());
        }
        if (plain_basis) {
            out.plain_space = std::make_shared<GradedBasis>();
            out.plain_space->modulus = modulus;
            out.plain_space->names = names;
            for (int d : degrees)
                out.plain_space->degrees.push_back(out.plain_space->reduce_degree(d));
            ctx.space = out.plain_space.get();
            if (!saw_involution)
                involution = InvolutionKind::identity;
        } else {
            try {
                out.algebra = std::make_shared<FreeGCA>(names, degrees, modulus);
            } catch (const std::exception& e) {
                fail(line, 0, e.what());
            }
            ctx.gca = out.algebra.get();
            ctx.space = &out.algebra->space();
        }
        out.structure = role == Role::structure
                            ? GappedStructure::empty_structure(*ctx.space)
                            : GappedStructure::empty_prehom(*ctx.space, *ctx.space);
        out.involution = involution;
        space_built = true;
    };

    for (const Line& line : lines) {
        const std::string& head = line.tokens[0];
        if (head == "grading") {
            if (line.tokens.size() != 2)
                fail(line, 0, "grading takes one argument");
            modulus = static_cast<int>(parse_int(line, 1));
            if (modulus < 0 || modulus % 2)
                fail(line, 1, "grading modulus must be a nonnegative even integer");
            saw_grading = true;
        } else if (head == "generator" || head == "basis") {
            if (space_built)
                fail(line, 0, "declarations must precede operations");
            if (line.tokens.size() != 3)
                fail(line, 0, head + " takes a name and a degree");
            if (!valid_name(line.tokens[1]))
                fail(line, 1, "invalid name '" + line.tokens[1] + "'");
            for (const auto& n : names)
                if (n == line.tokens[1])
                    fail(line, 1, "duplicate name '" + line.tokens[1] + "'");
            if (head == "basis")
                plain_basis = true;
            else if (plain_basis)
                fail(line, 0, "cannot mix generator and basis lines");
            names.push_back(line.tokens[1]);
            degrees.push_back(static_cast<int>(parse_int(line, 2)));
        } else if (head == "trunc_energy") {
            if (line.tokens.size() != 2)
                fail(line, 0, "trunc_energy takes one rational");
            e_max = parse_rat(line, 1);
        } else if (head == "trunc_arity") {
            if (line.tokens.size() != 2)
                fail(line, 0, "trunc_arity takes one integer");
            k_max = parse_int(line, 1);
            if (*k_max > kMaxArity)
                fail(line, 1, "trunc_arity is capped at " + std::to_string(kMaxArity));
        } else if (head == "role") {
            if (line.tokens.size() != 2 || (line.tokens[1] != "m" && line.tokens[1] != "f"))
                fail(line, 0, "role must be m or f");
            role = line.tokens[1] == "m" ? Role::structure : Role::prehom;
        } else if (head == "involution") {
            if (line.tokens.size() != 2 ||
                (line.tokens[1] != "parity" && line.tokens[1] != "id"))
                fail(line, 0, "involution must be parity or id");
            involution =
                line.tokens[1] == "parity" ? InvolutionKind::parity : InvolutionKind::identity;
            saw_involution = true;
        } else if (head == "canonical_m2") {
            build_space(line);
            if (!ctx.gca)
                fail(line, 0, "canonical_m2 needs a free algebra context");
            if (out.structure.role != Role::structure)
                fail(line, 0, "canonical_m2 applies to structures only");
            canonical = true;
            GappedStructure wedge = GappedStructure::canonical_wedge(*ctx.gca);
            for (auto& [slot, table] : wedge.slots)
                for (auto& [t, v] : table)
                    out.structure.set_entry(slot.arity, slot.energy, t, v);
        } else if (head == "op") {
            build_space(line);
            if (line.tokens.size() < 5)
                fail(line, 0, "op line too short");
            long arity = parse_int(line, 1);
            if (arity < 0 || arity > *k_max)
                fail(line, 1, "op arity outside the window");
            Rational energy = parse_rat(line, 2);
            if (energy < Rational(0) || energy > *e_max)
                fail(line, 2, "op energy outside the window");
            if (line.tokens[3] != ":")
                fail(line, 3, "expected ':' after op arity and energy");
            int arrow = -1;
            for (std::size_t i = 4; i < line.tokens.size(); ++i)
                if (line.tokens[i] == "->") {
                    arrow = static_cast<int>(i);
                    break;
                }
            if (arrow < 0)
                fail(line, static_cast<int>(line.tokens.size()) - 1, "missing '->' in op line");
            if (arrow - 4 != arity)
                fail(line, 3, "op inputs do not match the declared arity");
            std::vector<int> idx;
            for (int i = 4; i < arrow; ++i)
                idx.push_back(ctx.parse_mono(line, i));
            SparseVec val = parse_element_tokens(ctx, line, arrow + 1);
            TupleKey key = pack_tuple(idx);
            const SparseVec* prev = out.structure.entry(static_cast<int>(arity), energy, key);
            if (prev && !canonical)
                fail(line, 0, "duplicate op entry");
            SparseVec merged = prev ? *prev + val : val;
            out.structure.set_entry(static_cast<int>(arity), energy, key, merged);
        } else {
            fail(line, 0, "unknown directive '" + head + "'");
        }
    }

    if (!saw_grading)
        throw FileParseError(1, 1, "missing grading line");
    if (!space_built) {
        Line sentinel;
        sentinel.number = lines.empty() ? 1 : lines.back().number;
        build_space(sentinel);
    }
    try {
        out.structure.validate(out.trunc);
    } catch (const std::exception& e) {
        throw FileParseError(lines.empty() ? 1 : lines.back().number, 1, e.what());
    }
    return out;
}

std::string emit_algebra_file(const AlgebraFile& file)
{
    SpaceContext ctx;
    ctx.gca = file.algebra.get();
    ctx.space = &file.space();

    std::string s;
    s += "grading " + std::to_string(ctx.space->modulus) + "\n";
    if (file.algebra) {
        for (int g = 0; g < file.algebra->gen_count(); ++g)
            s += "generator " + file.algebra->gen_names()[static_cast<std::size_t>(g)] + " " +
                 std::to_string(file.algebra->gen_degree(g)) + "\n";
    } else {
        for (int i = 0; i < ctx.space->dim(); ++i)
            s += "basis " + ctx.space->names[static_cast<std::size_t>(i)] + " " +
                 std::to_string(ctx.space->degree(i)) + "\n";
    }
    s += "trunc_energy " + rat_str(file.trunc.e_max) + "\n";
    s += "trunc_arity " + std::to_string(file.trunc.k_max) + "\n";
    s += std::string("role ") + (file.structure.role == Role::structure ? "m" : "f") + "\n";
    s += std::string("involution ") +
         (file.involution == InvolutionKind::parity ? "parity" : "id") + "\n";
    for (const auto& [slot, table] : file.structure.slots)
        for (const auto& [key, val] : table) {
            s += "op " + std::to_string(slot.arity) + " " + rat_str(slot.energy) + " :";
            for (int i : unpack_tuple(key))
                s += " " + ctx.mono_name(i);
            s += " -> " + element_str(ctx, val) + "\n";
        }
    return s;
}

CochainFile parse_cochain_file(const std::string& text)
{
    auto lines = tokenize(text);

    int modulus = 0;
    std::vector<std::string> names;
    std::vector<int> degrees;
    std::optional<Rational> e_max;
    std::optional<long> k_max;

    CochainFile out;
    SpaceContext ctx;
    bool declared = false;

    for (const Line& line : lines) {
        const std::string& head = line.tokens[0];
        if (head == "grading") {
            if (line.tokens.size() != 2)
                fail(line, 0, "grading takes one argument");
            modulus = static_cast<int>(parse_int(line, 1));
            if (modulus < 0 || modulus % 2)
                fail(line, 1, "grading modulus must be a nonnegative even integer");
        } else if (head == "generator") {
            if (line.tokens.size() != 3)
                fail(line, 0, "generator takes a name and a degree");
            if (!valid_name(line.tokens[1]))
                fail(line, 1, "invalid name");
            names.push_back(line.tokens[1]);
            degrees.push_back(static_cast<int>(parse_int(line, 2)));
        } else if (head == "trunc_energy") {
            e_max = parse_rat(line, 1);
        } else if (head == "trunc_arity") {
            k_max = parse_int(line, 1);
        } else if (head == "cochain") {
            if (line.tokens.size() != 3)
                fail(line, 0, "cochain takes arity and degree");
            if (names.empty() || !e_max || !k_max)
                fail(line, 0, "cochain line before algebra declaration");
            try {
                out.algebra = std::make_shared<FreeGCA>(names, degrees, modulus);
                out.trunc = TruncParams(*e_max, static_cast<int>(*k_max));
            } catch (const std::exception& e) {
                fail(line, 0, e.what());
            }
            ctx.gca = out.algebra.get();
            ctx.space = &out.algebra->space();
            long arity = parse_int(line, 1);
            if (arity < 0 || arity > kMaxArity)
                fail(line, 1, "cochain arity out of range");
            out.cochain = Cochain::zero(*out.algebra, static_cast<int>(arity),
                                        static_cast<int>(parse_int(line, 2)));
            declared = true;
        } else if (head == "cc") {
            if (!declared)
                fail(line, 0, "cc line before cochain declaration");
            if (line.tokens.size() < 3 || line.tokens[1] != ":")
                fail(line, 0, "cc line must read  cc : inputs -> element");
            int arrow = -1;
            for (std::size_t i = 2; i < line.tokens.size(); ++i)
                if (line.tokens[i] == "->") {
                    arrow = static_cast<int>(i);
                    break;
                }
            if (arrow < 0)
                fail(line, 0, "missing '->' in cc line");
            if (arrow - 2 != out.cochain.arity)
                fail(line, 1, "cc inputs do not match the declared arity");
            std::vector<int> idx;
            for (int i = 2; i < arrow; ++i)
                idx.push_back(ctx.parse_mono(line, i));
            SparseVec val = parse_element_tokens(ctx, line, arrow + 1);
            out.cochain.add_value(pack_tuple(idx), val);
        } else {
            fail(line, 0, "unknown directive '" + head + "'");
        }
    }
    if (!declared)
        throw FileParseError(lines.empty() ? 1 : lines.back().number, 1,
                             "missing cochain declaration");
    try {
        out.cochain.validate();
    } catch (const std::exception& e) {
        throw FileParseError(lines.back().number, 1, e.what());
    }
    return out;
}

std::string emit_cochain_file(const CochainFile& file)
{
    SpaceContext ctx;
    ctx.gca = file.algebra.get();
    ctx.space = &file.algebra->space();

    std::string s;
    s += "grading " + std::to_string(ctx.space->modulus) + "\n";
    for (int g = 0; g < file.algebra->gen_count(); ++g)
        s += "generator " + file.algebra->gen_names()[static_cast<std::size_t>(g)] + " " +
             std::to_string(file.algebra->gen_degree(g)) + "\n";
    s += "trunc_energy " + rat_str(file.trunc.e_max) + "\n";
    s += "trunc_arity " + std::to_string(file.trunc.k_max) + "\n";
    s += "cochain " + std::to_string(file.cochain.arity) + " " +
         std::to_string(file.cochain.degree) + "\n";
    for (const auto& [key, val] : file.cochain.values) {
        s += "cc :";
        for (int i : unpack_tuple(key))
            s += " " + ctx.mono_name(i);
        s += " -> " + element_str(ctx, val) + "\n";
    }
    return s;
}

std::string emit_element(const AlgebraFile& ctx_file, const SparseVec& v)
{
    SpaceContext ctx;
    ctx.gca = ctx_file.algebra.get();
    ctx.space = &ctx_file.space();
    return element_str(ctx, v);
}

NovVec parse_nov_element(const FreeGCA& gca, const std::string& text)
{
    NovVec out;
    std::string trimmed;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            trimmed += c;
    if (trimmed.empty())
        throw parse_error("empty element");
    if (trimmed == "0")
        return out;

    std::size_t pos = 0;
    while (pos < trimmed.size()) {
        std::size_t plus = pos;
        /* split at '+' that starts a new term (not inside a token) */
        plus = trimmed.find('+', pos + 1);
        std::string term = trimmed.substr(pos, plus == std::string::npos ? plus : plus - pos);
        pos = plus == std::string::npos ? trimmed.size() : plus + 1;

        Rational coeff(1);
        Energy energy(0);
        std::optional<int> mono;
        std::size_t tp = 0;
        bool saw_coeff = false;
        while (tp < term.size()) {
            std::size_t star = term.find('*', tp);
            std::string part =
                term.substr(tp, star == std::string::npos ? star : star - tp);
            tp = star == std::string::npos ? term.size() : star + 1;
            if (part.rfind("T^", 0) == 0) {
                std::string e = part.substr(2);
                if (!e.empty() && e.front() == '{' && e.back() == '}')
                    e = e.substr(1, e.size() - 2);
                energy = Rational::parse(e);
                if (energy < Rational(0))
                    throw parse_error("negative energy in element");
            } else if (!part.empty() &&
                       (std::isdigit(static_cast<unsigned char>(part[0])) || part[0] == '-' ||
                        part[0] == '+')) {
                if (saw_coeff)
                    throw parse_error("two coefficients in one term");
                coeff = Rational::parse(part);
                saw_coeff = true;
            } else {
                auto m = gca.parse_mono(part);
                if (!m)
                    throw parse_error("unknown monomial '" + part + "'");
                if (mono)
                    throw parse_error("two monomials in one term");
                mono = *m;
            }
        }
        novvec_add(out, mono.value_or(0), energy, coeff);
    }
    return out;
}

std::string emit_nov_element(const FreeGCA& gca, const NovVec& v)
{
    bool empty = true;
    std::string s;
    for (const auto& [idx, scalar] : v)
        for (const auto& [e, c] : scalar.terms()) {
            if (!empty)
                s += " + ";
            empty = false;
            s += c.str();
            if (!e.is_zero())
                s += "*T^" + (e.is_integer() ? e.str() : "{" + e.str() + "}");
            s += "*" + gca.mono_name(idx);
        }
    return empty ? "0" : s;
}

} // namespace ainf
