#pragma once

#include <map>
#include <string>
#include <vector>

#include "qml/poly.hpp"

namespace qml {

// One summand of a direct sum of sheaves on the line, in the chart where the
// coordinate z vanishes at 0:
//   Line(a)    means z^a O embedded in O (a >= 0),
//   Torsion(e) means O / z^e O (e >= 1), supported at 0.
// The label tags the summand with a color index or a wedge subset; it takes
// no part in the calculus itself.
enum class SummandKind { Line, Torsion };

struct SheafSummand {
    SummandKind kind;
    long par;  // twist a or length e
    std::vector<int> label;

    static SheafSummand line(long a, std::vector<int> label = {});
    static SheafSummand torsion(long e, std::vector<int> label = {});

    bool same_shape(const SheafSummand& o) const { return kind == o.kind && par == o.par; }
    std::string str() const;
};

// A morphism between two summands. The payload records where the canonical
// generator goes:
//   Poly u:             Line(a) -> Line(b), generator z^a |-> u * z^b, deg u <= a-b
//   TorsionClass c:     Line(a) -> Torsion(e), z^a |-> c mod z^e, deg c < e
//   TorsionToTorsion b: Torsion(e) -> Torsion(e'), 1 |-> b mod z^{e'},
//                       with z^e * b = 0 mod z^{e'}
//   Zero:               forced for Torsion -> Line, available everywhere
enum class BlockKind { Zero, Poly, TorsionClass, TorsionToTorsion };

struct BlockHom {
    BlockKind kind = BlockKind::Zero;
    SummandKind src_kind = SummandKind::Line, tgt_kind = SummandKind::Line;
    long src_par = 0, tgt_par = 0;
    Poly u;

    static BlockHom zero(const SheafSummand& src, const SheafSummand& tgt);
    static BlockHom make(const SheafSummand& src, const SheafSummand& tgt, const Poly& payload);

    bool is_zero() const { return kind == BlockKind::Zero || u.is_zero(); }
    BlockHom operator+(const BlockHom& o) const;
    BlockHom scaled(const Rational& s) const;
    bool operator==(const BlockHom& o) const;
    std::string str() const;
};

struct HomBasis {
    long dim = 0;
    std::vector<BlockHom> basis;  // monomial payloads, ascending degree
};

HomBasis hom_space(const SheafSummand& src, const SheafSummand& tgt);
long hom_dim(const SheafSummand& src, const SheafSummand& tgt);

// g after f; endpoints must match exactly.
BlockHom compose(const BlockHom& g, const BlockHom& f);

// A morphism between direct sums, stored blockwise. Missing blocks are zero.
struct SumHom {
    std::vector<SheafSummand> source, target;
    std::map<std::pair<int, int>, BlockHom> blocks;  // (source index, target index)

    const BlockHom* block(int i, int j) const;
    void set_block(int i, int j, BlockHom b);
    bool is_zero() const;
    SumHom operator-(const SumHom& o) const;
    SumHom operator+(const SumHom& o) const;
};

SumHom assemble(std::vector<SheafSummand> source, std::vector<SheafSummand> target,
                std::map<std::pair<int, int>, BlockHom> blocks);
long full_hom_dim(const std::vector<SheafSummand>& source,
                  const std::vector<SheafSummand>& target);
SumHom compose(const SumHom& g, const SumHom& f);

}  // namespace qml
