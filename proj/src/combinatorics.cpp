#include "qml/combinatorics.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace qml {

GammaVector::GammaVector(int n_, std::vector<long> c_) : n(n_), c(std::move(c_)) {
    if (n < 2)
        throw error("rank must be at least 2");
    if (static_cast<int>(c.size()) != n - 1)
        throw error("degree vector must have n-1 entries");
    for (long x : c)
        if (x < 0)
            throw error("degree vector entries must be nonnegative");
}

long GammaVector::total() const {
    long s = 0;
    for (long x : c)
        s += x;
    return s;
}

bool GammaVector::leq(const GammaVector& o) const {
    if (n != o.n)
        throw error("rank mismatch");
    for (int i = 0; i < n - 1; ++i)
        if (c[static_cast<size_t>(i)] > o.c[static_cast<size_t>(i)])
            return false;
    return true;
}

GammaVector GammaVector::minus(const GammaVector& o) const {
    if (!o.leq(*this))
        throw error("difference of degree vectors would be negative");
    std::vector<long> r(c);
    for (int i = 0; i < n - 1; ++i)
        r[static_cast<size_t>(i)] -= o.c[static_cast<size_t>(i)];
    return GammaVector(n, std::move(r));
}

std::string GammaVector::str() const {
    std::ostringstream os;
    for (size_t i = 0; i < c.size(); ++i) {
        if (i)
            os << ",";
        os << c[i];
    }
    return os.str();
}

GammaVector parse_gamma(int n, const std::string& s) {
    std::vector<long> c;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        c.push_back(std::stol(tok));
    return GammaVector(n, std::move(c));
}

GammaVector coroot_weight(int n, const Coroot& r) {
    if (!(1 <= r.q && r.q <= r.p && r.p <= n - 1))
        throw error("coroot index out of range");
    std::vector<long> c(static_cast<size_t>(n - 1), 0);
    for (int i = r.q; i <= r.p; ++i)
        c[static_cast<size_t>(i - 1)] = 1;
    return GammaVector(n, std::move(c));
}

long& Triangular::at(int p, int q) {
    if (!(1 <= q && q <= p && p <= n - 1))
        throw error("triangular index out of range");
    return v[static_cast<size_t>((p - 1) * p / 2 + (q - 1))];
}

long Triangular::at(int p, int q) const {
    if (!(1 <= q && q <= p && p <= n - 1))
        throw error("triangular index out of range");
    return v[static_cast<size_t>((p - 1) * p / 2 + (q - 1))];
}

namespace {

std::string triangular_str(const Triangular& t) {
    std::ostringstream os;
    for (int p = 1; p <= t.n - 1; ++p) {
        if (p > 1)
            os << ";";
        for (int q = 1; q <= p; ++q) {
            if (q > 1)
                os << ",";
            os << t.at(p, q);
        }
    }
    return os.str();
}

Triangular parse_triangular(int n, const std::string& s) {
    Triangular t(n);
    std::istringstream rows(s);
    std::string row;
    int p = 0;
    while (std::getline(rows, row, ';')) {
        ++p;
        std::istringstream entries(row);
        std::string tok;
        int q = 0;
        while (std::getline(entries, tok, ',')) {
            ++q;
            t.at(p, q) = std::stol(tok);
        }
        if (q != p)
            throw error("row " + std::to_string(p) + " must have " + std::to_string(p) + " entries");
    }
    if (p != n - 1)
        throw error("expected " + std::to_string(n - 1) + " rows");
    return t;
}

}  // namespace

GammaVector KostantPartition::weight() const {
    int nn = n();
    std::vector<long> c(static_cast<size_t>(nn - 1), 0);
    for (int p = 1; p <= nn - 1; ++p)
        for (int q = 1; q <= p; ++q) {
            long k = kappa.at(p, q);
            if (k < 0)
                throw error("negative multiplicity in Kostant partition");
            for (int i = q; i <= p; ++i)
                c[static_cast<size_t>(i - 1)] += k;
        }
    return GammaVector(nn, std::move(c));
}

long KostantPartition::parts() const {
    long s = 0;
    for (long x : kappa.v)
        s += x;
    return s;
}

std::string KostantPartition::str() const {
    return triangular_str(kappa);
}

DefectMatrix::DefectMatrix(Triangular t) : d(std::move(t)) {
    for (long x : d.v)
        if (x < 0)
            throw error("defect entries must be nonnegative");
    for (int q = 1; q <= d.n - 1; ++q)
        for (int p = q; p <= d.n - 2; ++p)
            if (d.at(p + 1, q) > d.at(p, q))
                throw error("defect column " + std::to_string(q) + " increases at row " +
                            std::to_string(p + 1));
}

GammaVector DefectMatrix::gamma() const {
    std::vector<long> c(static_cast<size_t>(d.n - 1), 0);
    for (int p = 1; p <= d.n - 1; ++p)
        for (int q = 1; q <= p; ++q)
            c[static_cast<size_t>(p - 1)] += d.at(p, q);
    return GammaVector(d.n, std::move(c));
}

std::string DefectMatrix::str() const {
    return triangular_str(d);
}

DefectMatrix parse_defect(int n, const std::string& s) {
    return DefectMatrix(parse_triangular(n, s));
}

std::string PartitionMultiset::str() const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i)
            os << " + ";
        os << parts[i].str();
    }
    os << "}";
    return os.str();
}

std::vector<KostantPartition> enumerate_kostant(const GammaVector& gamma) {
    int n = gamma.n;
    std::vector<Coroot> coroots;
    for (int p = 1; p <= n - 1; ++p)
        for (int q = 1; q <= p; ++q)
            coroots.push_back({p, q});

    std::vector<KostantPartition> out;
    KostantPartition cur(n);
    std::vector<long> rem(gamma.c);

    // Recursion over coroots in row-major order keeps the output in
    // ascending lexicographic order on the flattened array.
    std::function<void(size_t)> rec = [&](size_t idx) {
        if (idx == coroots.size()) {
            for (long x : rem)
                if (x != 0)
                    return;
            out.push_back(cur);
            return;
        }
        const Coroot& r = coroots[idx];
        long bound = rem[static_cast<size_t>(r.q - 1)];
        for (int i = r.q; i <= r.p; ++i)
            bound = std::min(bound, rem[static_cast<size_t>(i - 1)]);
        for (long k = 0; k <= bound; ++k) {
            cur.kappa.at(r.p, r.q) = k;
            for (int i = r.q; i <= r.p; ++i)
                rem[static_cast<size_t>(i - 1)] -= k;
            rec(idx + 1);
            for (int i = r.q; i <= r.p; ++i)
                rem[static_cast<size_t>(i - 1)] += k;
        }
        cur.kappa.at(r.p, r.q) = 0;
    };
    rec(0);
    return out;
}

MuCollection mu_of(const KostantPartition& kappa) {
    int n = kappa.n();
    MuCollection m{Triangular(n)};
    for (int p = 1; p <= n - 1; ++p)
        for (int q = 1; q <= p; ++q) {
            long s = 0;
            for (int t = 1; t <= n - 1; ++t)
                for (int r = 1; r <= t; ++r)
                    if (r <= q && p <= t)
                        s += kappa.kappa.at(t, r);
            m.mu.at(p, q) = s;
        }
    return m;
}

DefectMatrix kappa_to_defect(const KostantPartition& kappa) {
    int n = kappa.n();
    Triangular t(n);
    for (int p = 1; p <= n - 1; ++p)
        for (int q = 1; q <= p; ++q) {
            long s = 0;
            for (int r = p; r <= n - 1; ++r)
                s += kappa.kappa.at(r, q);
            t.at(p, q) = s;
        }
    return DefectMatrix(std::move(t));
}

KostantPartition defect_to_kappa(const DefectMatrix& d) {
    int n = d.n();
    KostantPartition k(n);
    for (int p = 1; p <= n - 1; ++p)
        for (int q = 1; q <= p; ++q) {
            long next = (p + 1 <= n - 1) ? d.d.at(p + 1, q) : 0;
            long val = d.d.at(p, q) - next;
            if (val < 0)
                throw error("defect column monotonicity violated");
            k.kappa.at(p, q) = val;
        }
    return k;
}

std::vector<DefectMatrix> enumerate_defects(const GammaVector& gamma) {
    int n = gamma.n;
    std::vector<DefectMatrix> out;
    Triangular cur(n);

    // Fill row by row; each row is a composition of c_p bounded above by the
    // previous row entries (column q = p is unconstrained from above).
    std::function<void(int)> fill_row = [&](int p) {
        if (p == n) {
            out.emplace_back(cur);
            return;
        }
        long target = gamma.c[static_cast<size_t>(p - 1)];
        std::function<void(int, long)> fill_entry = [&](int q, long remaining) {
            if (q == p) {
                // Last entry of the row is the new diagonal, unbounded above.
                cur.at(p, p) = remaining;
                fill_row(p + 1);
                cur.at(p, p) = 0;
                return;
            }
            long cap = std::min(remaining, p > 1 ? cur.at(p - 1, q) : remaining);
            for (long v = 0; v <= cap; ++v) {
                cur.at(p, q) = v;
                fill_entry(q + 1, remaining - v);
            }
            cur.at(p, q) = 0;
        };
        fill_entry(1, target);
    };
    fill_row(1);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PartitionMultiset> enumerate_partitions(const GammaVector& gamma) {
    int n = gamma.n;
    std::vector<PartitionMultiset> out;
    std::vector<GammaVector> cur;

    std::function<void(GammaVector, std::optional<GammaVector>)> rec =
        [&](GammaVector rem, std::optional<GammaVector> cap) {
            if (rem.is_zero()) {
                PartitionMultiset pm;
                pm.parts = cur;
                out.push_back(std::move(pm));
                return;
            }
            // Next part: nonzero, <= rem componentwise, and lexicographically
            // <= the previous part so each multiset appears once.
            std::vector<long> part(static_cast<size_t>(n - 1), 0);
            std::function<void(int, bool)> choose = [&](int i, bool tight) {
                if (i == n - 1) {
                    GammaVector g(n, part);
                    if (g.is_zero())
                        return;
                    cur.push_back(g);
                    rec(rem.minus(g), g);
                    cur.pop_back();
                    return;
                }
                long hi = rem.c[static_cast<size_t>(i)];
                if (tight && cap)
                    hi = std::min(hi, cap->c[static_cast<size_t>(i)]);
                for (long v = hi; v >= 0; --v) {
                    part[static_cast<size_t>(i)] = v;
                    bool still_tight = tight && cap && v == cap->c[static_cast<size_t>(i)];
                    choose(i + 1, still_tight);
                }
                part[static_cast<size_t>(i)] = 0;
            };
            choose(0, cap.has_value());
        };
    rec(gamma, std::nullopt);

    std::sort(out.begin(), out.end(), [](const PartitionMultiset& a, const PartitionMultiset& b) {
        return a.parts < b.parts;
    });
    return out;
}

long piece_dim(const DefectMatrix& d) {
    long s = 0;
    for (int p = 2; p <= d.n() - 1; ++p)
        for (int q = 1; q < p; ++q)
            s += d.d.at(p, q);
    return s;
}

long key_prop_bound(const DefectMatrix& d) {
    GammaVector g = d.gamma();
    if (g.is_zero())
        throw error("kernel bound requires a nonzero degree vector");
    long diag = 0;
    for (int p = 1; p <= d.n() - 1; ++p)
        diag += d.d.at(p, p);
    return diag + g.total() - 1;
}

DimensionTable dimension_table(const GammaVector& gamma) {
    int n = gamma.n;
    DimensionTable t;
    t.flag_dim = static_cast<long>(n) * (n - 1) / 2;
    t.quasiflag_dim = 2 * gamma.total() + t.flag_dim;
    Integer amb = 0;
    for (int p = 1; p <= n - 1; ++p)
        amb += Integer(gamma.c[static_cast<size_t>(p - 1)] + 1) * binomial(n, p) - 1;
    t.ambient_dim = to_long(amb);
    t.closed_stratum_dim = t.flag_dim + 1;
    return t;
}

DimensionTable dimension_table(const GammaVector& gamma, const GammaVector& beta,
                               const PartitionMultiset& parts) {
    if (!beta.leq(gamma))
        throw error("beta must be <= gamma componentwise");
    GammaVector diff = gamma.minus(beta);
    std::vector<long> sum(static_cast<size_t>(gamma.n - 1), 0);
    for (const auto& part : parts.parts) {
        if (part.is_zero())
            throw error("partition parts must be nonzero");
        for (int i = 0; i < gamma.n - 1; ++i)
            sum[static_cast<size_t>(i)] += part.c[static_cast<size_t>(i)];
    }
    if (sum != diff.c)
        throw error("partition does not sum to gamma - beta");
    DimensionTable t = dimension_table(gamma);
    t.stratum_dim = 2 * beta.total() + t.flag_dim + parts.size();
    return t;
}

}  // namespace qml
