#include "qml/graded_engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace qml {

PolyMatrix::PolyMatrix(int rows_, int cols_, std::vector<long> col_deg_)
    : rows(rows_), cols(cols_), col_deg(std::move(col_deg_)),
      e(static_cast<size_t>(rows_ * cols_)) {
    if (static_cast<int>(col_deg.size()) != cols)
        throw error("column degree list size mismatch");
    for (long d : col_deg)
        if (d < 0)
            throw error("column degree bounds must be nonnegative");
}

void PolyMatrix::check_degrees() const {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (at(i, j).degree() > col_deg[static_cast<size_t>(j)])
                throw error("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            ") exceeds column degree bound");
}

long PolyMatrix::bound_total() const {
    long s = 0;
    for (long d : col_deg)
        s += d;
    return s;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
    if (cols != o.rows)
        throw error("polynomial matrix product shape mismatch");
    PolyMatrix r(rows, o.cols, o.col_deg);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < o.cols; ++j) {
            Poly acc;
            for (int k = 0; k < cols; ++k)
                acc = acc + at(i, k) * o.at(k, j);
            r.at(i, j) = acc;
        }
    return r;
}

namespace {

Poly det(const std::vector<std::vector<Poly>>& m) {
    size_t k = m.size();
    if (k == 0)
        return Poly::one();
    if (k == 1)
        return m[0][0];
    Poly acc;
    for (size_t i = 0; i < k; ++i) {
        if (m[i][0].is_zero())
            continue;
        std::vector<std::vector<Poly>> minor;
        for (size_t r = 0; r < k; ++r) {
            if (r == i)
                continue;
            minor.push_back(std::vector<Poly>(m[r].begin() + 1, m[r].end()));
        }
        Poly term = m[i][0] * det(minor);
        acc = (i % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

}  // namespace

std::vector<Poly> wedge_vector(const PolyMatrix& m) {
    auto labels = subsets_of_size(m.rows, m.cols);
    std::vector<Poly> out;
    out.reserve(labels.size());
    for (const auto& s : labels) {
        std::vector<std::vector<Poly>> sub;
        for (int r : s) {
            std::vector<Poly> row;
            for (int j = 0; j < m.cols; ++j)
                row.push_back(m.at(r - 1, j));
            sub.push_back(std::move(row));
        }
        out.push_back(det(sub));
    }
    return out;
}

GammaVector validate(const Quasiflag& q) {
    int n = q.n;
    if (n < 2)
        throw error("rank must be at least 2");
    if (static_cast<int>(q.M.size()) != n - 1)
        throw error("expected " + std::to_string(n - 1) + " matrices");
    if (static_cast<int>(q.A.size()) != n - 2)
        throw error("expected " + std::to_string(n - 2) + " witnesses");

    std::vector<long> c;
    for (int p = 1; p <= n - 1; ++p) {
        const PolyMatrix& m = q.M[static_cast<size_t>(p - 1)];
        if (m.rows != n || m.cols != p)
            throw error("matrix " + std::to_string(p) + " has wrong shape");
        m.check_degrees();
        c.push_back(m.bound_total());

        bool nonzero_minor = false;
        for (const auto& w : wedge_vector(m))
            if (!w.is_zero()) {
                nonzero_minor = true;
                break;
            }
        if (!nonzero_minor)
            throw error("matrix " + std::to_string(p) + " is not generically injective");
    }
    for (int p = 1; p <= n - 2; ++p) {
        const PolyMatrix& a = q.A[static_cast<size_t>(p - 1)];
        const PolyMatrix& mp = q.M[static_cast<size_t>(p - 1)];
        const PolyMatrix& mn = q.M[static_cast<size_t>(p)];
        if (a.rows != p + 1 || a.cols != p)
            throw error("witness " + std::to_string(p) + " has wrong shape");
        for (int i = 0; i < p + 1; ++i)
            for (int j = 0; j < p; ++j) {
                if (a.at(i, j).is_zero())
                    continue;
                long bound = mp.col_deg[static_cast<size_t>(j)] -
                             mn.col_deg[static_cast<size_t>(i)];
                if (a.at(i, j).degree() > bound)
                    throw error("witness " + std::to_string(p) + " entry (" +
                                std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") exceeds twist bound");
            }
        PolyMatrix prod = mn * a;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j)
                if (prod.at(i, j) != mp.at(i, j))
                    throw error("witness identity fails at step " + std::to_string(p));
    }
    return GammaVector(n, std::move(c));
}

Quasiflag fixed_point_quasiflag(const DefectMatrix& d) {
    int n = d.n();
    Quasiflag q;
    q.n = n;
    for (int p = 1; p <= n - 1; ++p) {
        std::vector<long> deg;
        for (int col = 1; col <= p; ++col)
            deg.push_back(d.d.at(p, col));
        PolyMatrix m(n, p, deg);
        for (int col = 1; col <= p; ++col)
            m.at(col - 1, col - 1) = Poly::monomial(d.d.at(p, col));
        q.M.push_back(std::move(m));
    }
    for (int p = 1; p <= n - 2; ++p) {
        std::vector<long> deg;
        for (int col = 1; col <= p; ++col)
            deg.push_back(d.d.at(p, col));
        PolyMatrix a(p + 1, p, deg);
        for (int col = 1; col <= p; ++col)
            a.at(col - 1, col - 1) = Poly::monomial(d.d.at(p, col) - d.d.at(p + 1, col));
        q.A.push_back(std::move(a));
    }
    return q;
}

namespace {

EngineConfig normalize_config(const GammaVector& gamma, int n, EngineConfig cfg) {
    if (cfg.start_level <= 0)
        cfg.start_level = static_cast<int>(gamma.total()) + n + 2;
    if (cfg.cap <= 0)
        cfg.cap = 8L * cfg.start_level;
    if (const char* env = std::getenv("QML_TRUNCATION_CAP")) {
        long v = std::atol(env);
        if (v > 0)
            cfg.cap = v;
    }
    return cfg;
}

}  // namespace

EngineConfig engine_config(const Quasiflag& q) {
    GammaVector g = validate(q);
    return normalize_config(g, q.n, EngineConfig{});
}

namespace {

// coordinate index of (component, degree) in P_{<=level}^rows
long pcoord(int rows, int level, int comp, long deg) {
    (void)rows;
    return static_cast<long>(comp) * (level + 1) + deg;
}

Mat piece_columns(const PolyMatrix& m, int level) {
    std::vector<std::vector<Rational>> cols;
    long dim = static_cast<long>(m.rows) * (level + 1);
    for (int j = 0; j < m.cols; ++j) {
        long a = m.col_deg[static_cast<size_t>(j)];
        for (long s = 0; s + a <= level; ++s) {
            std::vector<Rational> v(static_cast<size_t>(dim), Rational(0));
            for (int i = 0; i < m.rows; ++i) {
                const Poly& p = m.at(i, j);
                for (long k = 0; k <= p.degree(); ++k)
                    if (p.coeff(k) != 0)
                        v[static_cast<size_t>(pcoord(m.rows, level, i, k + s))] = p.coeff(k);
            }
            cols.push_back(std::move(v));
        }
    }
    if (cols.empty())
        return Mat(dim, 0);
    return Mat::from_columns(cols);
}

// multiplication by z from P_{<=level}^n to P_{<=level+1}^n in coordinates
std::vector<Rational> shift_coords(int rows, int level, const std::vector<Rational>& v) {
    std::vector<Rational> out(static_cast<size_t>(rows * (level + 2)), Rational(0));
    for (int i = 0; i < rows; ++i)
        for (long k = 0; k <= level; ++k) {
            const Rational& x = v[static_cast<size_t>(pcoord(rows, level, i, k))];
            if (x != 0)
                out[static_cast<size_t>(pcoord(rows, level + 1, i, k + 1))] = x;
        }
    return out;
}

std::vector<Rational> embed_coords(int rows, int level, const std::vector<Rational>& v) {
    std::vector<Rational> out(static_cast<size_t>(rows * (level + 2)), Rational(0));
    for (int i = 0; i < rows; ++i)
        for (long k = 0; k <= level; ++k) {
            const Rational& x = v[static_cast<size_t>(pcoord(rows, level, i, k))];
            if (x != 0)
                out[static_cast<size_t>(pcoord(rows, level + 1, i, k))] = x;
        }
    return out;
}

}  // namespace

Mat TruncatedSheaf::mult_vanishing_at_zero() const {
    Mat out(piece_next.dim(), piece.dim());
    for (long i = 0; i < piece.dim(); ++i) {
        auto img = shift_coords(rows, level, piece.basis_vector(i));
        auto c = piece_next.coords_in_basis(img);
        for (long r = 0; r < piece_next.dim(); ++r)
            out.at(r, i) = c[static_cast<size_t>(r)];
    }
    return out;
}

Mat TruncatedSheaf::mult_vanishing_at_infinity() const {
    Mat out(piece_next.dim(), piece.dim());
    for (long i = 0; i < piece.dim(); ++i) {
        auto img = embed_coords(rows, level, piece.basis_vector(i));
        auto c = piece_next.coords_in_basis(img);
        for (long r = 0; r < piece_next.dim(); ++r)
            out.at(r, i) = c[static_cast<size_t>(r)];
    }
    return out;
}

TruncatedSheaf truncate(const PolyMatrix& m, int level) {
    TruncatedSheaf t;
    t.level = level;
    t.rank = m.cols;
    t.degree = m.bound_total();
    t.rows = m.rows;
    t.piece = Subspace(piece_columns(m, level));
    t.piece_next = Subspace(piece_columns(m, level + 1));
    long expect = t.rank * (level + 1) - t.degree;
    long expect_next = t.rank * (level + 2) - t.degree;
    t.certified = t.piece.dim() == expect && t.piece_next.dim() == expect_next;
    return t;
}

TruncatedSheaf truncate_certified(const PolyMatrix& m, const EngineConfig& cfg) {
    long start = cfg.start_level > 0 ? cfg.start_level : m.bound_total() + m.rows + 2;
    long cap = cfg.cap > 0 ? cfg.cap : 8 * start;
    for (long level = start; level <= cap; level *= 2) {
        TruncatedSheaf t = truncate(m, static_cast<int>(level));
        if (t.certified)
            return t;
    }
    throw error("truncation cap exceeded");
}

namespace {

std::vector<long> nonpivot_coords(const Subspace& s) {
    std::vector<bool> is_pivot(static_cast<size_t>(s.ambient()), false);
    for (long p : s.pivots())
        is_pivot[static_cast<size_t>(p)] = true;
    std::vector<long> out;
    for (long i = 0; i < s.ambient(); ++i)
        if (!is_pivot[static_cast<size_t>(i)])
            out.push_back(i);
    return out;
}

std::vector<Rational> project_quot(const Subspace& piece, const std::vector<long>& coords,
                                   const std::vector<Rational>& full) {
    std::vector<Rational> red = piece.reduce(full);
    std::vector<Rational> out(coords.size());
    for (size_t i = 0; i < coords.size(); ++i)
        out[i] = red[static_cast<size_t>(coords[i])];
    return out;
}

std::vector<Rational> lift_quot(long ambient, const std::vector<long>& coords,
                                const std::vector<Rational>& quot) {
    std::vector<Rational> out(static_cast<size_t>(ambient), Rational(0));
    for (size_t i = 0; i < coords.size(); ++i)
        out[coords[i]] = quot[i];
    return out;
}

std::vector<Poly> coords_to_polys(int rows, int level, const std::vector<Rational>& v) {
    std::vector<Poly> out;
    for (int i = 0; i < rows; ++i) {
        std::vector<Rational> c(v.begin() + i * (level + 1), v.begin() + (i + 1) * (level + 1));
        out.push_back(Poly(std::move(c)));
    }
    return out;
}

}  // namespace

std::vector<Rational> EngineModel::value_slice(const Mat& basis, long col, int p, int j,
                                               int s) const {
    const LevelData& ld = lv[static_cast<size_t>(p - 1)];
    long slot = ld.chain_offset[static_cast<size_t>(j)] + s;
    long off = value_offset[static_cast<size_t>(p - 1)] + slot * ld.quot_dim;
    std::vector<Rational> out(static_cast<size_t>(ld.quot_dim));
    for (long i = 0; i < ld.quot_dim; ++i)
        out[static_cast<size_t>(i)] = basis.at(off + i, col);
    return out;
}

EngineModel quiver_tangent_general(const Quasiflag& q, const EngineConfig& cfg_in) {
    EngineModel m;
    m.q = q;
    m.gamma = validate(q);
    m.n = q.n;
    EngineConfig cfg = normalize_config(m.gamma, m.n, cfg_in);

    for (long level = cfg.start_level;; level *= 2) {
        if (level > cfg.cap)
            throw error("truncation cap exceeded");
        bool ok = true;
        std::vector<TruncatedSheaf> sheaves;
        for (const auto& mat : q.M) {
            TruncatedSheaf t = truncate(mat, static_cast<int>(level));
            if (!t.certified) {
                ok = false;
                break;
            }
            sheaves.push_back(std::move(t));
        }
        if (!ok)
            continue;
        m.level = static_cast<int>(level);
        m.lv.clear();
        for (auto& t : sheaves) {
            EngineModel::LevelData ld;
            ld.sheaf = std::move(t);
            ld.quot_coords = nonpivot_coords(ld.sheaf.piece);
            ld.quot_coords_next = nonpivot_coords(ld.sheaf.piece_next);
            ld.quot_dim = static_cast<long>(ld.quot_coords.size());
            ld.quot_dim_next = static_cast<long>(ld.quot_coords_next.size());
            m.lv.push_back(std::move(ld));
        }
        break;
    }

    int n = m.n;
    int level = m.level;

    // Chain bookkeeping.
    m.value_dim = 0;
    for (int p = 1; p <= n - 1; ++p) {
        EngineModel::LevelData& ld = m.lv[static_cast<size_t>(p - 1)];
        const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
        ld.values = 0;
        for (int j = 0; j < mat.cols; ++j) {
            long slots = level - mat.col_deg[static_cast<size_t>(j)] + 1;
            if (slots < 1)
                throw error("truncation level " + std::to_string(level) +
                            " below column degree bound " +
                            std::to_string(mat.col_deg[static_cast<size_t>(j)]));
            ld.chain_offset.push_back(ld.values);
            ld.values += slots;
        }
        m.value_offset.push_back(m.value_dim);
        m.value_dim += ld.values * ld.quot_dim;
    }

    // Multiplication operators on quotient coordinates.
    std::vector<Mat> xb, yb;
    for (int p = 1; p <= n - 1; ++p) {
        const EngineModel::LevelData& ld = m.lv[static_cast<size_t>(p - 1)];
        Mat x(ld.quot_dim_next, ld.quot_dim), y(ld.quot_dim_next, ld.quot_dim);
        for (long c = 0; c < ld.quot_dim; ++c) {
            std::vector<Rational> unit(static_cast<size_t>(ld.sheaf.piece.ambient()), Rational(0));
            unit[static_cast<size_t>(ld.quot_coords[static_cast<size_t>(c)])] = 1;
            auto xi = project_quot(ld.sheaf.piece_next, ld.quot_coords_next,
                                   shift_coords(n, level, unit));
            auto yi = project_quot(ld.sheaf.piece_next, ld.quot_coords_next,
                                   embed_coords(n, level, unit));
            for (long r = 0; r < ld.quot_dim_next; ++r) {
                x.at(r, c) = xi[static_cast<size_t>(r)];
                y.at(r, c) = yi[static_cast<size_t>(r)];
            }
        }
        xb.push_back(std::move(x));
        yb.push_back(std::move(y));
    }

    // Per-generator chain solution spaces.
    std::vector<std::vector<Mat>> chain_kernel(static_cast<size_t>(n - 1));
    std::vector<long> param_offset;
    long param_dim = 0;
    for (int p = 1; p <= n - 1; ++p) {
        const EngineModel::LevelData& ld = m.lv[static_cast<size_t>(p - 1)];
        const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
        for (int j = 0; j < mat.cols; ++j) {
            long slots = level - mat.col_deg[static_cast<size_t>(j)] + 1;
            Mat sys((slots - 1) * ld.quot_dim_next, slots * ld.quot_dim);
            for (long s = 0; s + 1 < slots; ++s)
                for (long r = 0; r < ld.quot_dim_next; ++r)
                    for (long c = 0; c < ld.quot_dim; ++c) {
                        if (yb[static_cast<size_t>(p - 1)].at(r, c) != 0)
                            sys.at(s * ld.quot_dim_next + r, (s + 1) * ld.quot_dim + c) =
                                yb[static_cast<size_t>(p - 1)].at(r, c);
                        if (xb[static_cast<size_t>(p - 1)].at(r, c) != 0)
                            sys.at(s * ld.quot_dim_next + r, s * ld.quot_dim + c) -=
                                xb[static_cast<size_t>(p - 1)].at(r, c);
                    }
            Mat ker = kernel_basis(sys);
            param_offset.push_back(param_dim);
            param_dim += ker.cols();
            chain_kernel[static_cast<size_t>(p - 1)].push_back(std::move(ker));
        }
    }

    // Values as a function of the chain parameters.
    Mat chain_map(m.value_dim, param_dim);
    {
        size_t idx = 0;
        for (int p = 1; p <= n - 1; ++p) {
            const EngineModel::LevelData& ld = m.lv[static_cast<size_t>(p - 1)];
            const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
            for (int j = 0; j < mat.cols; ++j, ++idx) {
                const Mat& ker = chain_kernel[static_cast<size_t>(p - 1)][static_cast<size_t>(j)];
                long row0 = m.value_offset[static_cast<size_t>(p - 1)] +
                            ld.chain_offset[static_cast<size_t>(j)] * ld.quot_dim;
                for (long r = 0; r < ker.rows(); ++r)
                    for (long c = 0; c < ker.cols(); ++c)
                        if (ker.at(r, c) != 0)
                            chain_map.at(row0 + r, param_offset[idx] + c) = ker.at(r, c);
            }
        }
    }

    // Quiver squares at every chain index, evaluated through the chain map.
    std::vector<Mat> sg;
    for (int p = 1; p <= n - 2; ++p) {
        const EngineModel::LevelData& src = m.lv[static_cast<size_t>(p - 1)];
        const EngineModel::LevelData& dst = m.lv[static_cast<size_t>(p)];
        Mat s(dst.quot_dim, src.quot_dim);
        for (long c = 0; c < src.quot_dim; ++c) {
            std::vector<Rational> unit(static_cast<size_t>(src.sheaf.piece.ambient()),
                                       Rational(0));
            unit[static_cast<size_t>(src.quot_coords[static_cast<size_t>(c)])] = 1;
            auto v = project_quot(dst.sheaf.piece, dst.quot_coords, unit);
            for (long r = 0; r < dst.quot_dim; ++r)
                s.at(r, c) = v[static_cast<size_t>(r)];
        }
        sg.push_back(std::move(s));
    }

    long quiver_rows = 0;
    for (int p = 1; p <= n - 2; ++p) {
        const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
        const EngineModel::LevelData& dst = m.lv[static_cast<size_t>(p)];
        for (int j = 0; j < mat.cols; ++j)
            quiver_rows += (level - mat.col_deg[static_cast<size_t>(j)] + 1) * dst.quot_dim;
    }

    Mat quiver(quiver_rows, m.value_dim);
    {
        long row0 = 0;
        for (int p = 1; p <= n - 2; ++p) {
            const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
            const PolyMatrix& nxt = q.M[static_cast<size_t>(p)];
            const PolyMatrix& a = q.A[static_cast<size_t>(p - 1)];
            const EngineModel::LevelData& src = m.lv[static_cast<size_t>(p - 1)];
            const EngineModel::LevelData& dst = m.lv[static_cast<size_t>(p)];
            for (int j = 0; j < mat.cols; ++j) {
                long slots = level - mat.col_deg[static_cast<size_t>(j)] + 1;
                for (long s = 0; s < slots; ++s) {
                    // sigma applied to the source value block
                    long src_col0 = m.value_offset[static_cast<size_t>(p - 1)] +
                                    (src.chain_offset[static_cast<size_t>(j)] + s) * src.quot_dim;
                    for (long r = 0; r < dst.quot_dim; ++r)
                        for (long c = 0; c < src.quot_dim; ++c)
                            if (sg[static_cast<size_t>(p - 1)].at(r, c) != 0)
                                quiver.at(row0 + r, src_col0 + c) =
                                    sg[static_cast<size_t>(p - 1)].at(r, c);
                    // minus the witness-weighted target values
                    for (int i = 0; i < p + 1; ++i) {
                        const Poly& w = a.at(i, j);
                        if (w.is_zero())
                            continue;
                        for (long t = 0; t <= w.degree(); ++t) {
                            if (w.coeff(t) == 0)
                                continue;
                            long tgt_slot = s + t;
                            long tgt_slots =
                                level - nxt.col_deg[static_cast<size_t>(i)] + 1;
                            if (tgt_slot >= tgt_slots)
                                throw engine_bug("witness degree exceeds chain range");
                            long tgt_col0 =
                                m.value_offset[static_cast<size_t>(p)] +
                                (dst.chain_offset[static_cast<size_t>(i)] + tgt_slot) *
                                    dst.quot_dim;
                            for (long r = 0; r < dst.quot_dim; ++r)
                                quiver.at(row0 + r, tgt_col0 + r) -= w.coeff(t);
                        }
                    }
                    row0 += dst.quot_dim;
                }
            }
        }
    }

    Mat reduced = quiver * chain_map;
    Mat param_kernel = kernel_basis(reduced);
    m.tangent_basis = chain_map * param_kernel;
    m.dim_T = m.tangent_basis.cols();

    DimensionTable dt = dimension_table(m.gamma);
    if (m.dim_T != dt.quasiflag_dim)
        throw engine_bug("engine tangent dimension mismatch: got " + std::to_string(m.dim_T) +
                         ", expected " + std::to_string(dt.quasiflag_dim));
    return m;
}

std::vector<Poly> wedge_motion(const PolyMatrix& mat, const std::vector<std::vector<Poly>>& reps) {
    auto labels = subsets_of_size(mat.rows, mat.cols);
    std::vector<Poly> acc(labels.size());
    for (int j = 0; j < mat.cols; ++j) {
        for (size_t li = 0; li < labels.size(); ++li) {
            std::vector<std::vector<Poly>> sub;
            for (int r : labels[li]) {
                std::vector<Poly> row;
                for (int col = 0; col < mat.cols; ++col)
                    row.push_back(col == j ? reps[static_cast<size_t>(j)][static_cast<size_t>(r - 1)]
                                           : mat.at(r - 1, col));
                sub.push_back(std::move(row));
            }
            acc[li] = acc[li] + det(sub);
        }
    }
    return acc;
}

namespace {

struct WedgeQuotient {
    long amb = 0;          // labels * (L+1)
    int big_level = 0;     // L
    std::vector<Poly> wp;  // minor vector
    Subspace line_pieces;  // span of z^s * wp
};

WedgeQuotient wedge_quotient(const PolyMatrix& mat, int level) {
    WedgeQuotient w;
    long cp = mat.bound_total();
    w.big_level = static_cast<int>(cp) + level;
    auto labels = subsets_of_size(mat.rows, mat.cols);
    w.amb = static_cast<long>(labels.size()) * (w.big_level + 1);
    w.wp = wedge_vector(mat);
    std::vector<std::vector<Rational>> cols;
    for (long s = 0; s + cp <= w.big_level; ++s) {
        std::vector<Rational> v(static_cast<size_t>(w.amb), Rational(0));
        for (size_t li = 0; li < labels.size(); ++li) {
            const Poly& e = w.wp[li];
            for (long k = 0; k <= e.degree(); ++k)
                if (e.coeff(k) != 0)
                    v[static_cast<size_t>(static_cast<long>(li) * (w.big_level + 1) + k + s)] =
                        e.coeff(k);
        }
        cols.push_back(std::move(v));
    }
    w.line_pieces = Subspace(cols.empty() ? Mat(w.amb, 0) : Mat::from_columns(cols));
    return w;
}

std::vector<Rational> wedge_coords(const std::vector<Poly>& v, int big_level) {
    std::vector<Rational> out(v.size() * static_cast<size_t>(big_level + 1), Rational(0));
    for (size_t li = 0; li < v.size(); ++li) {
        if (v[li].degree() > big_level)
            throw engine_bug("wedge motion exceeds coordinate range");
        for (long k = 0; k <= v[li].degree(); ++k)
            out[li * static_cast<size_t>(big_level + 1) + static_cast<size_t>(k)] = v[li].coeff(k);
    }
    return out;
}

}  // namespace

std::vector<std::vector<Poly>> tangent_generator_reps(const EngineModel& m, long col, int p) {
    const EngineModel::LevelData& ld = m.lv[static_cast<size_t>(p - 1)];
    const PolyMatrix& mat = m.q.M[static_cast<size_t>(p - 1)];
    std::vector<std::vector<Poly>> reps;
    for (int j = 0; j < mat.cols; ++j) {
        auto quot = m.value_slice(m.tangent_basis, col, p, j, 0);
        auto full = lift_quot(ld.sheaf.piece.ambient(), ld.quot_coords, quot);
        reps.push_back(coords_to_polys(m.n, m.level, full));
    }
    return reps;
}

std::vector<Rational> reduce_wedge_motion(const PolyMatrix& mat, int level,
                                          const std::vector<Poly>& motion) {
    WedgeQuotient w = wedge_quotient(mat, level);
    return w.line_pieces.reduce(wedge_coords(motion, w.big_level));
}

long dpi_kernel_general(const EngineModel& m) {
    std::vector<WedgeQuotient> wq;
    long total_rows = 0;
    for (int p = 1; p <= m.n - 1; ++p) {
        wq.push_back(wedge_quotient(m.q.M[static_cast<size_t>(p - 1)], m.level));
        total_rows += wq.back().amb;
    }
    Mat img(total_rows, m.dim_T);
    for (long col = 0; col < m.dim_T; ++col) {
        long row0 = 0;
        for (int p = 1; p <= m.n - 1; ++p) {
            const WedgeQuotient& w = wq[static_cast<size_t>(p - 1)];
            auto reps = tangent_generator_reps(m, col, p);
            auto motion = wedge_motion(m.q.M[static_cast<size_t>(p - 1)], reps);
            auto red = w.line_pieces.reduce(wedge_coords(motion, w.big_level));
            for (long r = 0; r < w.amb; ++r)
                img.at(row0 + r, col) = red[static_cast<size_t>(r)];
            row0 += w.amb;
        }
    }
    return m.dim_T - rank(img);
}

long dpi_kernel_general(const Quasiflag& q, const EngineConfig& cfg) {
    EngineModel m = quiver_tangent_general(q, cfg);
    return dpi_kernel_general(m);
}

bool fiber_membership(const Quasiflag& q, const GammaVector& gamma) {
    GammaVector g = validate(q);
    if (!(g == gamma))
        return false;
    for (int p = 1; p <= q.n - 1; ++p) {
        const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
        auto w = wedge_vector(mat);
        auto labels = subsets_of_size(q.n, p);
        long cp = mat.bound_total();
        for (size_t li = 0; li < labels.size(); ++li) {
            bool is_base = true;
            for (int i = 0; i < p; ++i)
                if (labels[li][static_cast<size_t>(i)] != i + 1)
                    is_base = false;
            if (is_base) {
                // exactly a nonzero multiple of z^{c_p}
                if (w[li].order() != cp || w[li].degree() != cp)
                    return false;
            } else if (!w[li].is_zero()) {
                return false;
            }
        }
    }
    return true;
}

Mat engine_dpi_ambient(const EngineModel& m) {
    if (!fiber_membership(m.q, m.gamma))
        throw error("ambient coordinates require a simple-fiber point");
    AmbientLayout amb = ambient_tangent(m.gamma);
    Mat out(amb.dim, m.dim_T);
    for (int p = 1; p <= m.n - 1; ++p) {
        const PolyMatrix& mat = m.q.M[static_cast<size_t>(p - 1)];
        long cp = mat.bound_total();
        auto w = wedge_vector(mat);
        auto labels = subsets_of_size(m.n, p);
        std::vector<int> base;
        for (int i = 1; i <= p; ++i)
            base.push_back(i);
        Rational lambda;
        for (size_t li = 0; li < labels.size(); ++li)
            if (labels[li] == base)
                lambda = w[li].coeff(cp);
        if (lambda == 0)
            throw engine_bug("degenerate wedge normalization");

        for (long col = 0; col < m.dim_T; ++col) {
            auto reps = tangent_generator_reps(m, col, p);
            auto motion = wedge_motion(mat, reps);
            for (size_t li = 0; li < labels.size(); ++li) {
                Poly val = motion[li].scaled(1 / lambda);
                if (labels[li] == base) {
                    Poly tor = val.truncated(cp);
                    for (long k = 0; k <= tor.degree(); ++k)
                        if (tor.coeff(k) != 0)
                            out.at(amb.torsion_index(p, k), col) = tor.coeff(k);
                } else {
                    if (val.degree() > cp)
                        throw engine_bug("free wedge coordinate exceeds twist bound");
                    long lidx = amb.label_index(p, labels[li]);
                    for (long k = 0; k <= val.degree(); ++k)
                        if (val.coeff(k) != 0)
                            out.at(amb.free_index(p, lidx, k), col) = val.coeff(k);
                }
            }
        }
    }
    return out;
}

OracleComparison compare_with_fast_path(const FixedPointModel& fast, const EngineConfig& cfg) {
    OracleComparison cmp;
    Quasiflag q = fixed_point_quasiflag(fast.dm);
    EngineModel em = quiver_tangent_general(q, cfg);

    cmp.fast_dim_T = fast.dim_T;
    cmp.engine_dim_T = em.dim_T;
    cmp.dims_equal = cmp.fast_dim_T == cmp.engine_dim_T;

    cmp.fast_kernel = fast.kernel;
    cmp.engine_kernel = dpi_kernel_general(em);
    cmp.kernels_equal = cmp.fast_kernel == cmp.engine_kernel;

    // Map engine tangent vectors to the block coordinates of the fast path.
    Mat mapped(fast.hom_dim, em.dim_T);
    for (long col = 0; col < em.dim_T; ++col) {
        for (int p = 1; p <= em.n - 1; ++p) {
            auto reps = tangent_generator_reps(em, col, p);
            const PairLayout& lay = fast.hom[static_cast<size_t>(p - 1)];
            long base = fast.hom_offset[static_cast<size_t>(p - 1)];
            for (int j = 0; j < static_cast<int>(reps.size()); ++j) {
                int qcol = j + 1;  // source color
                long dpq = fast.dm.d.at(p, qcol);
                for (int comp = 1; comp <= em.n; ++comp) {
                    const Poly& val = reps[static_cast<size_t>(j)][static_cast<size_t>(comp - 1)];
                    if (val.is_zero())
                        continue;
                    if (comp <= p) {
                        int ti = fast.data.torsion_pos[static_cast<size_t>(p - 1)]
                                                      [static_cast<size_t>(comp - 1)];
                        if (ti < 0 || val.degree() >= fast.dm.d.at(p, comp))
                            throw engine_bug("engine torsion response not reduced");
                        long off = lay.offset[static_cast<size_t>(j)][static_cast<size_t>(ti)];
                        for (long k = 0; k <= val.degree(); ++k)
                            mapped.at(base + off + k, col) = val.coeff(k);
                    } else {
                        if (val.degree() > dpq)
                            throw engine_bug("engine free response exceeds twist bound");
                        int fi = fast.data.free_pos[static_cast<size_t>(p - 1)]
                                                   [static_cast<size_t>(comp - 1)];
                        long off = lay.offset[static_cast<size_t>(j)][static_cast<size_t>(fi)];
                        for (long k = 0; k <= val.degree(); ++k)
                            mapped.at(base + off + k, col) = val.coeff(k);
                    }
                }
            }
        }
    }

    cmp.tangent_spaces_equal =
        cmp.dims_equal && rank(fast.tangent_basis.hcat(mapped)) == fast.dim_T &&
        rank(mapped) == em.dim_T;

    Mat fast_on_mapped = fast.dpi_full * mapped;
    Mat engine_amb = engine_dpi_ambient(em);
    cmp.dpi_matrices_equal = fast_on_mapped.rows() == engine_amb.rows() &&
                             fast_on_mapped.cols() == engine_amb.cols();
    if (cmp.dpi_matrices_equal)
        for (long i = 0; i < fast_on_mapped.rows() && cmp.dpi_matrices_equal; ++i)
            for (long j = 0; j < fast_on_mapped.cols(); ++j)
                if (fast_on_mapped.at(i, j) != engine_amb.at(i, j)) {
                    cmp.dpi_matrices_equal = false;
                    break;
                }

    cmp.pass = cmp.dims_equal && cmp.kernels_equal && cmp.tangent_spaces_equal &&
               cmp.dpi_matrices_equal;
    return cmp;
}

namespace {

Quasiflag remark_family(long t) {
    Quasiflag q;
    q.n = 3;
    PolyMatrix m1(3, 1, {2});
    m1.at(0, 0) = Poly::monomial(2);
    PolyMatrix m2(3, 2, {1, 1});
    m2.at(0, 0) = Poly::monomial(1);
    m2.at(0, 1) = Poly(Rational(t));
    m2.at(1, 1) = Poly::monomial(1);
    PolyMatrix a1(2, 1, {2});
    a1.at(0, 0) = Poly::monomial(1);
    q.M = {std::move(m1), std::move(m2)};
    q.A = {std::move(a1)};
    return q;
}

}  // namespace

RemarkReport remark_scenario() {
    RemarkReport rep;
    GammaVector g(3, {2, 2});

    auto defects = enumerate_defects(g);
    std::vector<long> dims;
    for (const auto& d : defects) {
        rep.cell_defects.push_back(d.str());
        rep.cell_dims.push_back(piece_dim(d));
        FixedPointModel fm(d);
        rep.cell_kernels.push_back(fm.kernel);
    }
    dims = rep.cell_dims;
    std::sort(dims.begin(), dims.end());
    rep.cells_ok = defects.size() == 3 && dims == std::vector<long>{0, 1, 2};

    // the singular fixed point sits in the 1-dimensional cell
    for (size_t i = 0; i < defects.size(); ++i)
        if (rep.cell_dims[i] == 1)
            rep.vertex_kernel_ok = rep.cell_kernels[i] == 3;

    for (long t : {0L, 1L, 2L}) {
        Quasiflag q = remark_family(t);
        EngineConfig cfg = engine_config(q);
        rep.family_in_fiber[t] = fiber_membership(q, g);
        rep.family_kernels[t] = dpi_kernel_general(q, cfg);
    }
    rep.offvertex_kernel_ok = rep.family_kernels[1] == 2 && rep.family_kernels[2] == 2;
    rep.semicontinuity_ok = rep.family_kernels[0] >= rep.family_kernels[1];
    bool fiber_ok =
        rep.family_in_fiber[0] && rep.family_in_fiber[1] && rep.family_in_fiber[2];
    bool vertex_engine_ok = rep.family_kernels[0] == 3;
    rep.pass = rep.cells_ok && rep.vertex_kernel_ok && vertex_engine_ok &&
               rep.offvertex_kernel_ok && rep.semicontinuity_ok && fiber_ok;
    return rep;
}

namespace {

struct Rng64 {
    std::uint64_t state;
    explicit Rng64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    long small() { return static_cast<long>(next() % 7) - 3; }
};

Poly random_poly(Rng64& rng, long max_deg) {
    if (max_deg < 0)
        return Poly();
    std::vector<Rational> c;
    for (long k = 0; k <= max_deg; ++k)
        c.emplace_back(rng.small());
    return Poly(std::move(c));
}

// Column-degree profiles along the chain that admit inclusions: level p+1
// either keeps the level-p degrees and gives the slack to the new column, or
// lowers the largest degrees until the row sum fits and adds a degree-0
// column. Either way each old column dominates its successor.
std::vector<std::vector<long>> chain_profiles(const GammaVector& g) {
    std::vector<std::vector<long>> prof;
    std::vector<long> cur = {g.c[0]};
    prof.push_back(cur);
    for (int p = 2; p <= g.n - 1; ++p) {
        long target = g.c[static_cast<size_t>(p - 1)];
        long sum = 0;
        for (long x : cur)
            sum += x;
        std::vector<long> next = cur;
        if (target >= sum) {
            next.push_back(target - sum);
        } else {
            long deficit = sum - target;
            while (deficit > 0) {
                size_t arg = 0;
                for (size_t i = 1; i < next.size(); ++i)
                    if (next[i] > next[arg])
                        arg = i;
                --next[arg];
                --deficit;
            }
            next.push_back(0);
        }
        prof.push_back(next);
        cur = std::move(next);
    }
    return prof;
}

}  // namespace

bool is_subbundle_chain(const Quasiflag& q) {
    for (int p = 1; p <= q.n - 1; ++p) {
        const PolyMatrix& mat = q.M[static_cast<size_t>(p - 1)];
        auto w = wedge_vector(mat);
        long cp = mat.bound_total();
        Poly g;
        long maxdeg = -1;
        for (const auto& e : w) {
            g = gcd(g, e);
            maxdeg = std::max(maxdeg, e.degree());
        }
        // no common zero on the affine chart, and no common zero at infinity
        if (g.degree() != 0 || maxdeg != cp)
            return false;
    }
    return true;
}

std::optional<Quasiflag> random_genuine_flag(const GammaVector& gamma, std::uint64_t seed) {
    Rng64 rng(seed);
    int n = gamma.n;
    Quasiflag q;
    q.n = n;
    q.M.resize(static_cast<size_t>(n - 1));
    q.A.resize(static_cast<size_t>(n - 2));

    std::vector<std::vector<long>> profiles = chain_profiles(gamma);

    PolyMatrix top(n, n - 1, profiles[static_cast<size_t>(n - 2)]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - 1; ++j)
            top.at(i, j) = random_poly(rng, top.col_deg[static_cast<size_t>(j)]);
    q.M[static_cast<size_t>(n - 2)] = top;

    for (int p = n - 2; p >= 1; --p) {
        const PolyMatrix& next = q.M[static_cast<size_t>(p)];
        PolyMatrix a(p + 1, p, profiles[static_cast<size_t>(p - 1)]);
        for (int i = 0; i < p + 1; ++i)
            for (int j = 0; j < p; ++j)
                a.at(i, j) = random_poly(rng, profiles[static_cast<size_t>(p - 1)][static_cast<size_t>(j)] -
                                                  next.col_deg[static_cast<size_t>(i)]);
        PolyMatrix prod = next * a;
        PolyMatrix mp(n, p, profiles[static_cast<size_t>(p - 1)]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j)
                mp.at(i, j) = prod.at(i, j);
        q.A[static_cast<size_t>(p - 1)] = std::move(a);
        q.M[static_cast<size_t>(p - 1)] = std::move(mp);
    }

    try {
        validate(q);
    } catch (const error&) {
        return std::nullopt;
    }
    if (!is_subbundle_chain(q))
        return std::nullopt;
    return q;
}

Quasiflag parse_quasiflag(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    Quasiflag q;
    q.n = doc.at("n").get<int>();
    auto mats = doc.at("matrices");
    auto degs = doc.at("col_degrees");
    if (mats.size() != degs.size())
        throw error("matrices and col_degrees must align");
    for (size_t p = 0; p < mats.size(); ++p) {
        std::vector<long> cd = degs[p].get<std::vector<long>>();
        int rows = static_cast<int>(mats[p].size());
        int cols = static_cast<int>(cd.size());
        PolyMatrix m(rows, cols, cd);
        for (int i = 0; i < rows; ++i) {
            if (static_cast<int>(mats[p][static_cast<size_t>(i)].size()) != cols)
                throw error("ragged matrix row");
            for (int j = 0; j < cols; ++j)
                m.at(i, j) = parse_poly(
                    mats[p][static_cast<size_t>(i)][static_cast<size_t>(j)].get<std::string>());
        }
        q.M.push_back(std::move(m));
    }
    if (doc.contains("witnesses")) {
        for (size_t p = 0; p < doc["witnesses"].size(); ++p) {
            const auto& wj = doc["witnesses"][p];
            int rows = static_cast<int>(wj.size());
            int cols = rows > 0 ? static_cast<int>(wj[0].size()) : 0;
            std::vector<long> cd = q.M[p].col_deg;
            PolyMatrix a(rows, cols, cd);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    a.at(i, j) = parse_poly(
                        wj[static_cast<size_t>(i)][static_cast<size_t>(j)].get<std::string>());
            q.A.push_back(std::move(a));
        }
    }
    return q;
}

std::string quasiflag_to_json(const Quasiflag& q) {
    nlohmann::ordered_json doc;
    doc["n"] = q.n;
    nlohmann::ordered_json mats = nlohmann::ordered_json::array();
    nlohmann::ordered_json degs = nlohmann::ordered_json::array();
    for (const auto& m : q.M) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < m.rows; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int j = 0; j < m.cols; ++j)
                row.push_back(m.at(i, j).str());
            rows.push_back(row);
        }
        mats.push_back(rows);
        degs.push_back(m.col_deg);
    }
    doc["matrices"] = mats;
    doc["col_degrees"] = degs;
    nlohmann::ordered_json wits = nlohmann::ordered_json::array();
    for (const auto& a : q.A) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < a.rows; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int j = 0; j < a.cols; ++j)
                row.push_back(a.at(i, j).str());
            rows.push_back(row);
        }
        wits.push_back(rows);
    }
    doc["witnesses"] = wits;
    return doc.dump(2);
}

}  // namespace qml
