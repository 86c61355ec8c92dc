#include "qml/fixed_point.hpp"

#include <algorithm>
#include <sstream>

namespace qml {

FixedPointData::FixedPointData(const DefectMatrix& d)
    : n(d.n()), dm(d), gamma(d.gamma()) {
    for (int p = 1; p <= n - 1; ++p) {
        std::vector<SheafSummand> ep;
        for (int q = 1; q <= p; ++q)
            ep.push_back(SheafSummand::line(dm.d.at(p, q), {q}));
        E.push_back(std::move(ep));

        std::vector<SheafSummand> qp;
        std::vector<int> tpos(static_cast<size_t>(n), -1), fpos(static_cast<size_t>(n), -1);
        for (int q = 1; q <= p; ++q) {
            long e = dm.d.at(p, q);
            if (e >= 1) {
                tpos[static_cast<size_t>(q - 1)] = static_cast<int>(qp.size());
                qp.push_back(SheafSummand::torsion(e, {q}));
            }
        }
        for (int r = p + 1; r <= n; ++r) {
            fpos[static_cast<size_t>(r - 1)] = static_cast<int>(qp.size());
            qp.push_back(SheafSummand::line(0, {r}));
        }
        Q.push_back(std::move(qp));
        torsion_pos.push_back(std::move(tpos));
        free_pos.push_back(std::move(fpos));
    }

    for (int p = 1; p <= n - 2; ++p) {
        SumHom inc;
        inc.source = E[static_cast<size_t>(p - 1)];
        inc.target = E[static_cast<size_t>(p)];
        for (int q = 1; q <= p; ++q) {
            long drop = dm.d.at(p, q) - dm.d.at(p + 1, q);
            inc.set_block(q - 1, q - 1,
                          BlockHom::make(inc.source[static_cast<size_t>(q - 1)],
                                         inc.target[static_cast<size_t>(q - 1)],
                                         Poly::monomial(drop)));
        }
        iota.push_back(std::move(inc));

        SumHom proj;
        proj.source = Q[static_cast<size_t>(p - 1)];
        proj.target = Q[static_cast<size_t>(p)];
        const auto& tp = torsion_pos[static_cast<size_t>(p - 1)];
        const auto& fp = free_pos[static_cast<size_t>(p - 1)];
        const auto& tn = torsion_pos[static_cast<size_t>(p)];
        const auto& fn = free_pos[static_cast<size_t>(p)];
        for (int q = 1; q <= p; ++q) {
            int si = tp[static_cast<size_t>(q - 1)];
            int ti = tn[static_cast<size_t>(q - 1)];
            if (si >= 0 && ti >= 0)
                proj.set_block(si, ti,
                               BlockHom::make(proj.source[static_cast<size_t>(si)],
                                              proj.target[static_cast<size_t>(ti)], Poly::one()));
        }
        {
            int si = fp[static_cast<size_t>(p)];  // color p+1, free upstairs
            int ti = tn[static_cast<size_t>(p)];
            if (ti >= 0)
                proj.set_block(si, ti,
                               BlockHom::make(proj.source[static_cast<size_t>(si)],
                                              proj.target[static_cast<size_t>(ti)], Poly::one()));
        }
        for (int r = p + 2; r <= n; ++r) {
            int si = fp[static_cast<size_t>(r - 1)];
            int ti = fn[static_cast<size_t>(r - 1)];
            proj.set_block(si, ti,
                           BlockHom::make(proj.source[static_cast<size_t>(si)],
                                          proj.target[static_cast<size_t>(ti)], Poly::one()));
        }
        sigma.push_back(std::move(proj));
    }
}

FixedPointData build_fixed_point(const DefectMatrix& d) {
    return FixedPointData(d);
}

PairLayout make_pair_layout(const std::vector<SheafSummand>& src,
                            const std::vector<SheafSummand>& tgt) {
    PairLayout lay;
    lay.src = src;
    lay.tgt = tgt;
    lay.offset.assign(src.size(), std::vector<long>(tgt.size(), -1));
    lay.count.assign(src.size(), std::vector<long>(tgt.size(), 0));
    long off = 0;
    for (size_t i = 0; i < src.size(); ++i)
        for (size_t j = 0; j < tgt.size(); ++j) {
            long d = hom_dim(src[i], tgt[j]);
            if (d > 0) {
                lay.offset[i][j] = off;
                lay.count[i][j] = d;
                off += d;
            }
        }
    lay.dim = off;
    return lay;
}

namespace {

// Index of the monomial z^k within the canonical basis of the block.
long basis_slot(const BlockHom& b, long k) {
    if (b.src_kind == SummandKind::Torsion && b.tgt_kind == SummandKind::Torsion)
        return k - std::max(b.tgt_par - b.src_par, 0L);
    return k;
}

}  // namespace

std::vector<Rational> pair_coords(const PairLayout& lay, const SumHom& h) {
    std::vector<Rational> v(static_cast<size_t>(lay.dim), Rational(0));
    for (const auto& [ij, b] : h.blocks) {
        if (b.is_zero())
            continue;
        long off = lay.offset[static_cast<size_t>(ij.first)][static_cast<size_t>(ij.second)];
        long cnt = lay.count[static_cast<size_t>(ij.first)][static_cast<size_t>(ij.second)];
        if (off < 0)
            throw engine_bug("nonzero block in a zero hom slot");
        for (long k = 0; k <= b.u.degree(); ++k) {
            if (b.u.coeff(k) == 0)
                continue;
            long slot = basis_slot(b, k);
            if (slot < 0 || slot >= cnt)
                throw engine_bug("block coefficient outside basis range");
            v[static_cast<size_t>(off + slot)] = b.u.coeff(k);
        }
    }
    return v;
}

SumHom from_pair_coords(const PairLayout& lay, const std::vector<Rational>& v) {
    if (static_cast<long>(v.size()) != lay.dim)
        throw engine_bug("pair coordinate size mismatch");
    SumHom h;
    h.source = lay.src;
    h.target = lay.tgt;
    for (size_t i = 0; i < lay.src.size(); ++i)
        for (size_t j = 0; j < lay.tgt.size(); ++j) {
            long off = lay.offset[i][j];
            if (off < 0)
                continue;
            HomBasis hb = hom_space(lay.src[i], lay.tgt[j]);
            BlockHom acc = BlockHom::zero(lay.src[i], lay.tgt[j]);
            bool any = false;
            for (long k = 0; k < lay.count[i][j]; ++k) {
                const Rational& c = v[static_cast<size_t>(off + k)];
                if (c == 0)
                    continue;
                acc = acc + hb.basis[static_cast<size_t>(k)].scaled(c);
                any = true;
            }
            if (any)
                h.set_block(static_cast<int>(i), static_cast<int>(j), acc);
        }
    return h;
}

FixedPointModel::FixedPointModel(const DefectMatrix& d)
    : dm(d), gamma(d.gamma()), data(d), amb(ambient_tangent(gamma)) {
    int n = data.n;
    for (int p = 1; p <= n - 1; ++p) {
        hom.push_back(make_pair_layout(data.E[static_cast<size_t>(p - 1)],
                                       data.Q[static_cast<size_t>(p - 1)]));
        hom_offset.push_back(hom_dim);
        hom_dim += hom.back().dim;
    }
    for (int p = 1; p <= n - 2; ++p)
        cross.push_back(
            make_pair_layout(data.E[static_cast<size_t>(p - 1)], data.Q[static_cast<size_t>(p)]));

    // Constraint matrix of the commutation squares, evaluated on the
    // coordinate basis of +_p Hom(E_p, Q_p).
    long cross_dim = 0;
    std::vector<long> cross_offset;
    for (const auto& c : cross) {
        cross_offset.push_back(cross_dim);
        cross_dim += c.dim;
    }
    Mat constraints(cross_dim, hom_dim);
    for (long col = 0; col < hom_dim; ++col) {
        std::vector<Rational> unit(static_cast<size_t>(hom_dim), Rational(0));
        unit[static_cast<size_t>(col)] = 1;
        std::vector<Rational> res = commutation_residual(unit);
        for (long i = 0; i < cross_dim; ++i)
            constraints.at(i, col) = res[static_cast<size_t>(i)];
    }
    tangent_basis = kernel_basis(constraints);
    dim_T = tangent_basis.cols();
    DimensionTable dt = dimension_table(gamma);
    if (dim_T != dt.quasiflag_dim)
        throw engine_bug("tangent dimension mismatch at n=" + std::to_string(n) +
                         " gamma=" + gamma.str() + " defect=" + dm.str() + ": got " +
                         std::to_string(dim_T) + ", expected " + std::to_string(dt.quasiflag_dim));

    // Wedge differential on block coordinates. Only diagonal torsion blocks
    // and free blocks survive; a free block from source color q to color
    // r > p lands on the label [1..p] with q replaced by r, with the sign of
    // the resorting permutation.
    dpi_full = Mat(amb.dim, hom_dim);
    for (int p = 1; p <= n - 1; ++p) {
        const PairLayout& lay = hom[static_cast<size_t>(p - 1)];
        long base = hom_offset[static_cast<size_t>(p - 1)];
        long cp = gamma.c[static_cast<size_t>(p - 1)];
        for (size_t i = 0; i < lay.src.size(); ++i) {
            int q = lay.src[i].label[0];
            long dpq = lay.src[i].par;
            for (size_t j = 0; j < lay.tgt.size(); ++j) {
                long off = lay.offset[i][j];
                if (off < 0)
                    continue;
                const SheafSummand& tgt = lay.tgt[j];
                if (tgt.kind == SummandKind::Torsion) {
                    if (tgt.label[0] != q)
                        continue;  // repeated wedge factor
                    for (long k = 0; k < lay.count[i][j]; ++k) {
                        long deg = cp - dpq + k;
                        if (deg < cp)
                            dpi_full.at(amb.torsion_index(p, deg), base + off + k) = 1;
                    }
                } else {
                    int r = tgt.label[0];
                    std::vector<int> s;
                    for (int x = 1; x <= p; ++x)
                        if (x != q)
                            s.push_back(x);
                    s.push_back(r);
                    std::sort(s.begin(), s.end());
                    long li = amb.label_index(p, s);
                    int sign = ((p - q) % 2 == 0) ? 1 : -1;
                    for (long k = 0; k < lay.count[i][j]; ++k)
                        dpi_full.at(amb.free_index(p, li, cp - dpq + k), base + off + k) = sign;
                }
            }
        }
    }
    dpi_tangent = dpi_full * tangent_basis;
    dpi_rank = rank(dpi_tangent);
    kernel = dim_T - dpi_rank;
}

std::vector<Rational> FixedPointModel::commutation_residual(
    const std::vector<Rational>& hom_coords) const {
    if (static_cast<long>(hom_coords.size()) != hom_dim)
        throw engine_bug("hom coordinate size mismatch");
    int n = data.n;
    std::vector<SumHom> h;
    for (int p = 1; p <= n - 1; ++p) {
        const PairLayout& lay = hom[static_cast<size_t>(p - 1)];
        std::vector<Rational> slice(
            hom_coords.begin() + hom_offset[static_cast<size_t>(p - 1)],
            hom_coords.begin() + hom_offset[static_cast<size_t>(p - 1)] + lay.dim);
        h.push_back(from_pair_coords(lay, slice));
    }
    std::vector<Rational> out;
    for (int p = 1; p <= n - 2; ++p) {
        SumHom lhs = compose(h[static_cast<size_t>(p)], data.iota[static_cast<size_t>(p - 1)]);
        SumHom rhs = compose(data.sigma[static_cast<size_t>(p - 1)], h[static_cast<size_t>(p - 1)]);
        std::vector<Rational> res =
            pair_coords(cross[static_cast<size_t>(p - 1)], rhs - lhs);
        out.insert(out.end(), res.begin(), res.end());
    }
    return out;
}

bool FixedPointModel::in_tangent_space(const std::vector<Rational>& hom_coords) const {
    for (const auto& x : commutation_residual(hom_coords))
        if (x != 0)
            return false;
    return true;
}

TangentSpace tangent_space(const DefectMatrix& d) {
    FixedPointModel m(d);
    return {m.dim_T, m.tangent_basis};
}

DpiMap dpi(const DefectMatrix& d) {
    FixedPointModel m(d);
    return {m.dpi_tangent, m.dpi_rank};
}

long kernel_dim(const DefectMatrix& d) {
    FixedPointModel m(d);
    return m.kernel;
}

namespace {

// Block coordinate positions of the torsion blocks from source color q to
// target color r over all levels; these are the completion unknowns of one
// channel.
std::vector<long> channel_torsion_slots(const FixedPointModel& m, int q, int r) {
    std::vector<long> slots;
    int n = m.data.n;
    for (int p = std::max(q, r); p <= n - 1; ++p) {
        const PairLayout& lay = m.hom[static_cast<size_t>(p - 1)];
        int ti = m.data.torsion_pos[static_cast<size_t>(p - 1)][static_cast<size_t>(r - 1)];
        if (ti < 0)
            continue;
        long off = lay.offset[static_cast<size_t>(q - 1)][static_cast<size_t>(ti)];
        if (off < 0)
            continue;
        for (long k = 0; k < lay.count[static_cast<size_t>(q - 1)][static_cast<size_t>(ti)]; ++k)
            slots.push_back(m.hom_offset[static_cast<size_t>(p - 1)] + off + k);
    }
    return slots;
}

// Solves for torsion-block coefficients on the given slots making
// fixed + sum x_i e_{slot_i} commute. Returns the completed coordinates, or
// nullopt when the linear system is inconsistent.
std::optional<std::vector<Rational>> complete_with_torsion(const FixedPointModel& m,
                                                           std::vector<Rational> fixed,
                                                           const std::vector<long>& slots) {
    std::vector<Rational> base_res = m.commutation_residual(fixed);
    long rows = static_cast<long>(base_res.size());
    Mat a(rows, static_cast<long>(slots.size()));
    for (size_t s = 0; s < slots.size(); ++s) {
        std::vector<Rational> unit(static_cast<size_t>(m.hom_dim), Rational(0));
        unit[static_cast<size_t>(slots[s])] = 1;
        std::vector<Rational> res = m.commutation_residual(unit);
        for (long i = 0; i < rows; ++i)
            a.at(i, static_cast<long>(s)) = res[static_cast<size_t>(i)];
    }
    std::vector<Rational> rhs(base_res);
    for (auto& x : rhs)
        x = -x;
    auto sol = solve(a, rhs);
    if (!sol)
        return std::nullopt;
    for (size_t s = 0; s < slots.size(); ++s)
        fixed[static_cast<size_t>(slots[s])] += (*sol)[s];
    if (!m.in_tangent_space(fixed))
        throw engine_bug("completion failed to commute");
    return fixed;
}

}  // namespace

std::vector<Rational> nu0(const FixedPointModel& m, const N0Vector& f) {
    int n = m.data.n;
    std::vector<Rational> coords(static_cast<size_t>(m.hom_dim), Rational(0));
    std::vector<long> slots;

    for (const auto& [pq, poly] : f.f) {
        int r = pq.first, q = pq.second;
        if (!(1 <= q && q < r && r <= n - 1))
            throw error("strict pair index out of range");
        long drq = m.dm.d.at(r, q);
        if (poly.degree() > drq)
            throw error("coefficient degree exceeds bound for pair (" + std::to_string(r) + "," +
                        std::to_string(q) + ")");
        if (poly.is_zero())
            continue;
        // Free blocks: at each level q <= p < r the composite of the column
        // inclusion with the pair coefficient, i.e. z^{d_{p,q}-d_{r,q}} f.
        for (int p = q; p < r; ++p) {
            const PairLayout& lay = m.hom[static_cast<size_t>(p - 1)];
            int fi = m.data.free_pos[static_cast<size_t>(p - 1)][static_cast<size_t>(r - 1)];
            long off = lay.offset[static_cast<size_t>(q - 1)][static_cast<size_t>(fi)];
            Poly block = poly.shifted(m.dm.d.at(p, q) - drq);
            for (long k = 0; k <= block.degree(); ++k)
                if (block.coeff(k) != 0)
                    coords[static_cast<size_t>(m.hom_offset[static_cast<size_t>(p - 1)] + off +
                                               k)] += block.coeff(k);
        }
        auto ch = channel_torsion_slots(m, q, r);
        slots.insert(slots.end(), ch.begin(), ch.end());
    }
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

    auto completed = complete_with_torsion(m, std::move(coords), slots);
    if (!completed) {
        std::ostringstream os;
        os << "no commuting completion for lower-triangular data at defect " << m.dm.str();
        throw ObstructionError(os.str());
    }
    return *completed;
}

long nu1_p0(const FixedPointModel& m) {
    if (m.gamma.is_zero())
        throw error("nu1 undefined for gamma = 0");
    for (int p = 1; p <= m.data.n - 1; ++p)
        if (m.dm.d.at(p, p) > 0)
            return p;
    throw engine_bug("no positive diagonal defect for nonzero gamma");
}

std::optional<std::vector<Rational>> nu1_monomial(const FixedPointModel& m, long j) {
    int p0 = static_cast<int>(nu1_p0(m));
    long d = m.dm.d.at(p0, p0);
    if (j < 0 || j >= d)
        throw error("nu1 exponent out of range");
    std::vector<Rational> coords(static_cast<size_t>(m.hom_dim), Rational(0));
    const PairLayout& lay = m.hom[static_cast<size_t>(p0 - 1)];
    int ti = m.data.torsion_pos[static_cast<size_t>(p0 - 1)][static_cast<size_t>(p0 - 1)];
    long off = lay.offset[static_cast<size_t>(p0 - 1)][static_cast<size_t>(ti)];
    coords[static_cast<size_t>(m.hom_offset[static_cast<size_t>(p0 - 1)] + off + j)] = 1;

    // Completion unknowns: the diagonal-channel classes at the later levels.
    std::vector<long> slots = channel_torsion_slots(m, p0, p0);
    std::vector<long> unknowns;
    long self = m.hom_offset[static_cast<size_t>(p0 - 1)] + off;
    for (long s : slots)
        if (s < self || s >= self + m.dm.d.at(p0, p0))
            unknowns.push_back(s);
    return complete_with_torsion(m, std::move(coords), unknowns);
}

Nu1Choice nu1(const FixedPointModel& m) {
    Nu1Choice ch;
    ch.p0 = nu1_p0(m);
    long d = m.dm.d.at(static_cast<int>(ch.p0), static_cast<int>(ch.p0));
    for (long j = 0; j < d; ++j) {
        auto v = nu1_monomial(m, j);
        if (v) {
            ch.exponent = j;
            ch.coords = std::move(*v);
            return ch;
        }
    }
    throw engine_bug("no feasible monomial class for nu1 at defect " + m.dm.str());
}

SubspaceReport verify_N(const FixedPointModel& m) {
    if (m.gamma.is_zero())
        throw error("subspace certificate requires a nonzero degree vector");
    SubspaceReport rep;
    int n = m.data.n;

    long formula = 1;
    for (int p = 2; p <= n - 1; ++p)
        for (int q = 1; q < p; ++q)
            formula += m.dm.d.at(p, q) + 1;
    rep.dim_N_formula = formula;

    std::vector<std::vector<Rational>> family;
    for (int p = 2; p <= n - 1; ++p)
        for (int q = 1; q < p; ++q)
            for (long i = 0; i <= m.dm.d.at(p, q); ++i) {
                N0Vector f;
                f.f[{p, q}] = Poly::monomial(i);
                try {
                    family.push_back(nu0(m, f));
                } catch (const ObstructionError&) {
                    std::ostringstream os;
                    os << "f[" << p << "," << q << "]=z^" << i;
                    rep.obstructed.push_back(os.str());
                }
            }

    Nu1Choice one = nu1(m);
    rep.p0 = one.p0;
    rep.nu1_exponent = one.exponent;

    long d0 = m.dm.d.at(static_cast<int>(one.p0), static_cast<int>(one.p0));
    std::vector<std::vector<Rational>> nu1_vectors;
    for (long j = 0; j < d0; ++j) {
        auto v = nu1_monomial(m, j);
        if (v) {
            rep.nu1_feasible.push_back(j);
            nu1_vectors.push_back(std::move(*v));
        }
    }

    auto span_of = [&](const std::vector<Rational>& nu1_vec) {
        std::vector<std::vector<Rational>> cols = family;
        cols.push_back(nu1_vec);
        return Mat::from_columns(cols);
    };

    Mat canonical = span_of(one.coords);
    rep.dim_N = rank(canonical);
    rep.rank_dpi_N = rank(m.dpi_full * canonical);
    rep.formula_ok = rep.dim_N == rep.dim_N_formula;
    rep.rank_ok = rep.rank_dpi_N == rep.dim_N;

    rep.all_monomial_injective = true;
    for (const auto& v : nu1_vectors) {
        Mat nm = span_of(v);
        long dn = rank(nm);
        if (rank(m.dpi_full * nm) != dn || dn != rep.dim_N)
            rep.all_monomial_injective = false;
    }
    rep.pass = rep.formula_ok && rep.rank_ok && rep.all_monomial_injective;
    return rep;
}

KeyPropReport verify_key_prop(const FixedPointModel& m) {
    KeyPropReport r;
    r.dim_T = m.dim_T;
    r.kernel = m.kernel;
    r.bound = key_prop_bound(m.dm);
    r.margin = r.bound - r.kernel;
    r.pass = r.kernel < r.bound;
    return r;
}

ReductionChainReport verify_reduction_chain(const FixedPointModel& m) {
    if (m.gamma.is_zero())
        throw error("reduction chain applies to nonzero degree vectors only");
    ReductionChainReport r;
    DimensionTable dt = dimension_table(m.gamma);
    r.quasiflag_dim = dt.quasiflag_dim;
    r.kernel = m.kernel;
    r.flag_dim = dt.flag_dim;
    r.piece = piece_dim(m.dm);
    r.pass = r.quasiflag_dim - r.kernel > r.flag_dim + 1 + r.piece;
    return r;
}

}  // namespace qml
