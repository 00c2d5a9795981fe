#pragma once

#include "ainf/hochschild.hpp"
#include "ainf/mc.hpp"
#include "ainf/structure.hpp"

#include <memory>
#include <string>

namespace ainf {

struct FileParseError : std::runtime_error {
    int line;
    int col;
    std::string reason;

    FileParseError(int line_, int col_, const std::string& reason_)
        : std::runtime_error("line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ": " + reason_),
          line(line_), col(col_), reason(reason_)
    {
    }
};

enum class InvolutionKind { parity, identity };

/* A parsed structure file: either over a free graded-commutative algebra
 * (generator lines) or over a plain graded basis (basis lines). */
struct AlgebraFile {
    std::shared_ptr<FreeGCA> algebra;         /* null for basis-only files */
    std::shared_ptr<GradedBasis> plain_space; /* set when algebra is null */
    GappedStructure structure;
    TruncParams trunc{Energy(1), 3};
    InvolutionKind involution = InvolutionKind::parity;

    const GradedBasis& space() const
    {
        return algebra ? algebra->space() : *plain_space;
    }
    LinearMap involution_map() const;
};

AlgebraFile parse_algebra_file(const std::string& text);
std::string emit_algebra_file(const AlgebraFile& file);

struct CochainFile {
    std::shared_ptr<FreeGCA> algebra;
    Cochain cochain;
    TruncParams trunc{Energy(1), 3};
};

CochainFile parse_cochain_file(const std::string& text);
std::string emit_cochain_file(const CochainFile& file);

/* element with rational coefficients, e.g. "1*v1 + -3/4*v1.v2"; "0" */
std::string emit_element(const AlgebraFile& ctx, const SparseVec& v);

/* element with Novikov scalars, e.g. "1/2*T^{1/2}*v1 + 2*v2" */
NovVec parse_nov_element(const FreeGCA& gca, const std::string& text);
std::string emit_nov_element(const FreeGCA& gca, const NovVec& v);

} // namespace ainf
