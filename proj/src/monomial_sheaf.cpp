#include "qml/monomial_sheaf.hpp"

#include <sstream>

namespace qml {

SheafSummand SheafSummand::line(long a, std::vector<int> label) {
    if (a < 0)
        throw error("line twist must be nonnegative");
    return {SummandKind::Line, a, std::move(label)};
}

SheafSummand SheafSummand::torsion(long e, std::vector<int> label) {
    if (e < 1)
        throw error("torsion length must be positive");
    return {SummandKind::Torsion, e, std::move(label)};
}

std::string SheafSummand::str() const {
    std::ostringstream os;
    os << (kind == SummandKind::Line ? "O(-" : "O/z^");
    os << par;
    if (kind == SummandKind::Line)
        os << ")";
    if (!label.empty()) {
        os << "[";
        for (size_t i = 0; i < label.size(); ++i)
            os << (i ? "," : "") << label[i];
        os << "]";
    }
    return os.str();
}

namespace {

void check_payload(BlockKind kind, long src_par, long tgt_par, const Poly& u) {
    switch (kind) {
        case BlockKind::Zero:
            if (!u.is_zero())
                throw error("zero block with nonzero payload");
            break;
        case BlockKind::Poly:
            if (u.degree() > src_par - tgt_par)
                throw error("line block degree exceeds twist difference");
            break;
        case BlockKind::TorsionClass:
            if (u.degree() >= tgt_par)
                throw error("torsion class representative not reduced");
            break;
        case BlockKind::TorsionToTorsion:
            if (u.degree() >= tgt_par)
                throw error("torsion-to-torsion representative not reduced");
            if (!u.shifted(src_par).truncated(tgt_par).is_zero())
                throw error("torsion-to-torsion divisibility constraint violated");
            break;
    }
}

BlockKind kind_for(const SheafSummand& src, const SheafSummand& tgt) {
    if (src.kind == SummandKind::Line)
        return tgt.kind == SummandKind::Line ? BlockKind::Poly : BlockKind::TorsionClass;
    return tgt.kind == SummandKind::Torsion ? BlockKind::TorsionToTorsion : BlockKind::Zero;
}

}  // namespace

BlockHom BlockHom::zero(const SheafSummand& src, const SheafSummand& tgt) {
    return {BlockKind::Zero, src.kind, tgt.kind, src.par, tgt.par, Poly()};
}

BlockHom BlockHom::make(const SheafSummand& src, const SheafSummand& tgt, const Poly& payload) {
    if (payload.is_zero())
        return zero(src, tgt);
    BlockKind k = kind_for(src, tgt);
    if (k == BlockKind::Zero)
        throw error("no nonzero maps from torsion to a line summand");
    check_payload(k, src.par, tgt.par, payload);
    return {k, src.kind, tgt.kind, src.par, tgt.par, payload};
}

BlockHom BlockHom::operator+(const BlockHom& o) const {
    if (src_kind != o.src_kind || tgt_kind != o.tgt_kind || src_par != o.src_par ||
        tgt_par != o.tgt_par)
        throw error("adding blocks with different endpoints");
    SheafSummand s{src_kind, src_par, {}};
    SheafSummand t{tgt_kind, tgt_par, {}};
    return make(s, t, u + o.u);
}

BlockHom BlockHom::scaled(const Rational& s) const {
    BlockHom b = *this;
    b.u = u.scaled(s);
    if (b.u.is_zero())
        b.kind = BlockKind::Zero;
    return b;
}

bool BlockHom::operator==(const BlockHom& o) const {
    return src_kind == o.src_kind && tgt_kind == o.tgt_kind && src_par == o.src_par &&
           tgt_par == o.tgt_par && u == o.u;
}

std::string BlockHom::str() const {
    return u.str();
}

HomBasis hom_space(const SheafSummand& src, const SheafSummand& tgt) {
    HomBasis h;
    if (src.kind == SummandKind::Line && tgt.kind == SummandKind::Line) {
        long top = src.par - tgt.par;
        for (long j = 0; j <= top; ++j)
            h.basis.push_back(BlockHom::make(src, tgt, Poly::monomial(j)));
    } else if (src.kind == SummandKind::Line && tgt.kind == SummandKind::Torsion) {
        for (long j = 0; j < tgt.par; ++j)
            h.basis.push_back(BlockHom::make(src, tgt, Poly::monomial(j)));
    } else if (src.kind == SummandKind::Torsion && tgt.kind == SummandKind::Torsion) {
        for (long j = std::max(tgt.par - src.par, 0L); j < tgt.par; ++j)
            h.basis.push_back(BlockHom::make(src, tgt, Poly::monomial(j)));
    }
    h.dim = static_cast<long>(h.basis.size());
    return h;
}

long hom_dim(const SheafSummand& src, const SheafSummand& tgt) {
    if (src.kind == SummandKind::Line && tgt.kind == SummandKind::Line)
        return std::max(src.par - tgt.par + 1, 0L);
    if (src.kind == SummandKind::Line && tgt.kind == SummandKind::Torsion)
        return tgt.par;
    if (src.kind == SummandKind::Torsion && tgt.kind == SummandKind::Torsion)
        return std::min(src.par, tgt.par);
    return 0;
}

BlockHom compose(const BlockHom& g, const BlockHom& f) {
    if (f.tgt_kind != g.src_kind || f.tgt_par != g.src_par)
        throw error("composition endpoint mismatch");
    SheafSummand src{f.src_kind, f.src_par, {}};
    SheafSummand tgt{g.tgt_kind, g.tgt_par, {}};
    if (f.is_zero() || g.is_zero())
        return BlockHom::zero(src, tgt);

    Poly prod = g.u * f.u;
    if (tgt.kind == SummandKind::Torsion)
        prod = prod.truncated(tgt.par);
    return BlockHom::make(src, tgt, prod);
}

const BlockHom* SumHom::block(int i, int j) const {
    auto it = blocks.find({i, j});
    return it == blocks.end() ? nullptr : &it->second;
}

void SumHom::set_block(int i, int j, BlockHom b) {
    if (i < 0 || i >= static_cast<int>(source.size()) || j < 0 ||
        j >= static_cast<int>(target.size()))
        throw error("block index out of range");
    if (b.src_kind != source[static_cast<size_t>(i)].kind ||
        b.src_par != source[static_cast<size_t>(i)].par ||
        b.tgt_kind != target[static_cast<size_t>(j)].kind ||
        b.tgt_par != target[static_cast<size_t>(j)].par)
        throw error("block endpoints do not match summands");
    if (b.is_zero())
        blocks.erase({i, j});
    else
        blocks[{i, j}] = std::move(b);
}

bool SumHom::is_zero() const {
    for (const auto& [ij, b] : blocks)
        if (!b.is_zero())
            return false;
    return true;
}

SumHom SumHom::operator-(const SumHom& o) const {
    if (source.size() != o.source.size() || target.size() != o.target.size())
        throw error("sum-hom difference shape mismatch");
    SumHom r = *this;
    for (const auto& [ij, b] : o.blocks) {
        const BlockHom* mine = r.block(ij.first, ij.second);
        BlockHom nb = mine ? (*mine + b.scaled(-1)) : b.scaled(-1);
        r.set_block(ij.first, ij.second, nb);
    }
    return r;
}

SumHom SumHom::operator+(const SumHom& o) const {
    if (source.size() != o.source.size() || target.size() != o.target.size())
        throw error("sum-hom sum shape mismatch");
    SumHom r = *this;
    for (const auto& [ij, b] : o.blocks) {
        const BlockHom* mine = r.block(ij.first, ij.second);
        BlockHom nb = mine ? (*mine + b) : b;
        r.set_block(ij.first, ij.second, nb);
    }
    return r;
}

SumHom assemble(std::vector<SheafSummand> source, std::vector<SheafSummand> target,
                std::map<std::pair<int, int>, BlockHom> blocks) {
    SumHom h;
    h.source = std::move(source);
    h.target = std::move(target);
    for (auto& [ij, b] : blocks)
        h.set_block(ij.first, ij.second, std::move(b));
    return h;
}

long full_hom_dim(const std::vector<SheafSummand>& source,
                  const std::vector<SheafSummand>& target) {
    long d = 0;
    for (const auto& s : source)
        for (const auto& t : target)
            d += hom_dim(s, t);
    return d;
}

SumHom compose(const SumHom& g, const SumHom& f) {
    if (f.target.size() != g.source.size())
        throw error("sum-hom composition shape mismatch");
    for (size_t k = 0; k < f.target.size(); ++k)
        if (!f.target[k].same_shape(g.source[k]))
            throw error("sum-hom composition summand mismatch");
    SumHom r;
    r.source = f.source;
    r.target = g.target;
    for (const auto& [ik, fb] : f.blocks)
        for (const auto& [kj, gb] : g.blocks) {
            if (kj.first != ik.second)
                continue;
            BlockHom comp = compose(gb, fb);
            if (comp.is_zero())
                continue;
            const BlockHom* cur = r.block(ik.first, kj.second);
            r.set_block(ik.first, kj.second, cur ? (*cur + comp) : comp);
        }
    return r;
}

}  // namespace qml
