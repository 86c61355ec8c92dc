#include "qml/ambient.hpp"

#include <algorithm>

namespace qml {

std::vector<std::vector<int>> subsets_of_size(int n, int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    // Lexicographic enumeration of p-subsets of {1..n}.
    auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(cur.size()) == p) {
            out.push_back(cur);
            return;
        }
        int needed = p - static_cast<int>(cur.size());
        for (int v = next; v <= n - needed + 1; ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

long AmbientLayout::torsion_index(int p, long j) const {
    const Level& lv = levels[static_cast<size_t>(p - 1)];
    if (j < 0 || j >= lv.torsion_count)
        throw engine_bug("torsion coordinate out of range");
    return lv.torsion_offset + j;
}

long AmbientLayout::free_index(int p, long label_idx, long j) const {
    const Level& lv = levels[static_cast<size_t>(p - 1)];
    if (j < 0 || j >= lv.coeffs_per_label)
        throw engine_bug("free coordinate out of range");
    return lv.free_offset + label_idx * lv.coeffs_per_label + j;
}

long AmbientLayout::label_index(int p, const std::vector<int>& s) const {
    const Level& lv = levels[static_cast<size_t>(p - 1)];
    auto it = std::lower_bound(lv.labels.begin(), lv.labels.end(), s);
    if (it == lv.labels.end() || *it != s)
        throw engine_bug("wedge label not in layout");
    return static_cast<long>(it - lv.labels.begin());
}

AmbientLayout ambient_tangent(const GammaVector& gamma) {
    AmbientLayout lay;
    lay.n = gamma.n;
    lay.gamma = gamma;
    long off = 0;
    for (int p = 1; p <= gamma.n - 1; ++p) {
        AmbientLayout::Level lv;
        long cp = gamma.c[static_cast<size_t>(p - 1)];
        lv.torsion_offset = off;
        lv.torsion_count = cp;
        off += cp;
        std::vector<int> base;
        for (int i = 1; i <= p; ++i)
            base.push_back(i);
        for (auto& s : subsets_of_size(gamma.n, p))
            if (s != base)
                lv.labels.push_back(std::move(s));
        lv.free_offset = off;
        lv.coeffs_per_label = cp + 1;
        off += static_cast<long>(lv.labels.size()) * lv.coeffs_per_label;
        lay.levels.push_back(std::move(lv));
    }
    lay.dim = off;
    if (lay.dim != dimension_table(gamma).ambient_dim)
        throw engine_bug("ambient dimension mismatch");
    return lay;
}

namespace {

// First-order motion of the wedge lines under the elementary matrix E_{ab}
// (v_b -> v_a), as ambient coordinates. Nonzero only for b <= p < a.
std::vector<Rational> elementary_motion(const AmbientLayout& lay, int a, int b) {
    std::vector<Rational> v(static_cast<size_t>(lay.dim), Rational(0));
    if (a == b)
        return v;  // diagonal actions fix the point
    for (int p = 1; p <= lay.n - 1; ++p) {
        if (!(b <= p && p < a))
            continue;
        long cp = lay.gamma.c[static_cast<size_t>(p - 1)];
        std::vector<int> s;
        for (int i = 1; i <= p; ++i)
            if (i != b)
                s.push_back(i);
        s.push_back(a);
        std::sort(s.begin(), s.end());
        // Moving slot b to the end of [1..p] costs p-b transpositions.
        int sign = ((p - b) % 2 == 0) ? 1 : -1;
        long li = lay.label_index(p, s);
        v[static_cast<size_t>(lay.free_index(p, li, cp))] = sign;
    }
    return v;
}

}  // namespace

Mat stratum_tangent(const GammaVector& gamma) {
    if (gamma.is_zero())
        throw error("stratum tangent requires a nonzero degree vector");
    AmbientLayout lay = ambient_tangent(gamma);
    std::vector<std::vector<Rational>> cols;

    for (int a = 1; a <= gamma.n; ++a)
        for (int b = 1; b <= gamma.n; ++b) {
            if (a == b)
                continue;
            auto col = elementary_motion(lay, a, b);
            bool nonzero = false;
            for (const auto& x : col)
                if (x != 0) {
                    nonzero = true;
                    break;
                }
            if (nonzero)
                cols.push_back(std::move(col));
        }

    // Derivative of (z - x)^{c_p} at x = 0: the class -c_p z^{c_p-1}.
    std::vector<Rational> defect(static_cast<size_t>(lay.dim), Rational(0));
    for (int p = 1; p <= gamma.n - 1; ++p) {
        long cp = gamma.c[static_cast<size_t>(p - 1)];
        if (cp > 0)
            defect[static_cast<size_t>(lay.torsion_index(p, cp - 1))] = Rational(-cp);
    }
    cols.push_back(std::move(defect));

    Mat span = Mat::from_columns(cols);
    long flag_dim = static_cast<long>(gamma.n) * (gamma.n - 1) / 2;
    if (rank(span) != flag_dim + 1)
        throw engine_bug("stratum tangent dimension mismatch");

    // Reduce to an independent basis with deterministic order.
    Mat rt = span.transposed();
    std::vector<long> piv = rt.rref();
    Mat basis(lay.dim, static_cast<long>(piv.size()));
    for (size_t i = 0; i < piv.size(); ++i)
        for (long j = 0; j < lay.dim; ++j)
            basis.at(j, static_cast<long>(i)) = rt.at(static_cast<long>(i), j);
    return basis;
}

Mat conormal_fiber(const GammaVector& gamma) {
    Mat st = stratum_tangent(gamma);
    Mat ann = annihilator(st);
    DimensionTable dt = dimension_table(gamma);
    if (ann.cols() != dt.ambient_dim - dt.flag_dim - 1)
        throw engine_bug("conormal fiber dimension mismatch");
    return ann;
}

namespace {

// splitmix64; fixed-seed reproducible stream.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // small integer in [-9, 9]
    long small() { return static_cast<long>(next() % 19) - 9; }
};

}  // namespace

MicrolocalReport microlocal_check(const GammaVector& gamma, const Mat& dpi_on_tangent,
                                  std::uint64_t seed, long max_draws) {
    if (gamma.is_zero())
        throw error("microlocal check requires a nonzero degree vector");
    MicrolocalReport rep;
    DimensionTable dt = dimension_table(gamma);
    rep.ambient_dim = dt.ambient_dim;
    if (dpi_on_tangent.rows() != dt.ambient_dim)
        throw engine_bug("differential not in ambient coordinates");

    rep.rank_dpi = rank(dpi_on_tangent);
    Mat kstar = annihilator(dpi_on_tangent);  // covectors killing the image
    rep.dim_kstar = kstar.cols();
    if (rep.dim_kstar + rep.rank_dpi != rep.ambient_dim)
        throw engine_bug("annihilator duality violated");

    Mat fiber = conormal_fiber(gamma);
    rep.dim_fiber = fiber.cols();
    Mat inter = intersect_columns(kstar, fiber);
    rep.dim_intersection = inter.cols();
    rep.pass = rep.dim_intersection < rep.dim_fiber;

    if (rep.pass) {
        Rng rng(seed);
        Mat image_t = dpi_on_tangent.transposed();  // for xi . image columns
        for (long d = 0; d < max_draws && !rep.witness_found; ++d) {
            ++rep.draws_used;
            std::vector<Rational> coeff(static_cast<size_t>(fiber.cols()));
            for (auto& x : coeff)
                x = Rational(rng.small());
            std::vector<Rational> xi = fiber.apply(coeff);
            std::vector<Rational> pairing = image_t.apply(xi);
            for (const auto& x : pairing)
                if (x != 0) {
                    rep.witness_found = true;
                    rep.witness = std::move(xi);
                    break;
                }
        }
    }
    return rep;
}

}  // namespace qml
