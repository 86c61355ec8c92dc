#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qml/rational.hpp"

namespace qml {

// Degree vector for sl_n: coefficients c_1..c_{n-1} over the simple coroots.
struct GammaVector {
    int n = 2;
    std::vector<long> c;

    GammaVector() = default;
    GammaVector(int n_, std::vector<long> c_);

    long total() const;
    bool is_zero() const { return total() == 0; }
    bool leq(const GammaVector& o) const;  // componentwise
    GammaVector minus(const GammaVector& o) const;

    bool operator==(const GammaVector& o) const { return n == o.n && c == o.c; }
    bool operator<(const GammaVector& o) const { return c < o.c; }

    std::string str() const;  // "c1,c2,...,c_{n-1}"
};

GammaVector parse_gamma(int n, const std::string& s);

// Positive coroot of sl_n: the segment [q..p], 1 <= q <= p <= n-1.
struct Coroot {
    int p = 1, q = 1;
};

GammaVector coroot_weight(int n, const Coroot& r);

// Lower-triangular array x_{p,q}, 1 <= q <= p <= n-1, stored row-major.
struct Triangular {
    int n = 2;
    std::vector<long> v;

    Triangular() = default;
    explicit Triangular(int n_) : n(n_), v(static_cast<size_t>((n_ - 1) * n_ / 2), 0) {}

    long& at(int p, int q);
    long at(int p, int q) const;

    bool operator==(const Triangular& o) const { return n == o.n && v == o.v; }
    bool operator<(const Triangular& o) const { return v < o.v; }
};

// Multiplicities kappa_{p,q} of the coroot [q..p] in a decomposition of some
// gamma into positive coroots.
struct KostantPartition {
    Triangular kappa;

    explicit KostantPartition(int n) : kappa(n) {}
    explicit KostantPartition(Triangular t) : kappa(std::move(t)) {}

    int n() const { return kappa.n; }
    GammaVector weight() const;
    long parts() const;  // total multiplicity

    bool operator==(const KostantPartition& o) const { return kappa == o.kappa; }
    bool operator<(const KostantPartition& o) const { return kappa < o.kappa; }

    std::string str() const;
};

// Triangular array with weakly decreasing columns (d_{r,q} <= d_{p,q} for
// p <= r) and row sums prescribing a degree vector.
struct DefectMatrix {
    Triangular d;

    explicit DefectMatrix(Triangular t);

    int n() const { return d.n; }
    GammaVector gamma() const;  // row sums

    bool operator==(const DefectMatrix& o) const { return d == o.d; }
    bool operator<(const DefectMatrix& o) const { return d < o.d; }

    std::string str() const;  // rows joined by ';', entries by ','
};

DefectMatrix parse_defect(int n, const std::string& s);

// Multiset of nonzero degree vectors summing to a given gamma. Parts are kept
// sorted descending, which makes equality multiset equality.
struct PartitionMultiset {
    std::vector<GammaVector> parts;

    long size() const { return static_cast<long>(parts.size()); }
    std::string str() const;
};

struct MuCollection {
    Triangular mu;
};

std::vector<KostantPartition> enumerate_kostant(const GammaVector& gamma);
MuCollection mu_of(const KostantPartition& kappa);
DefectMatrix kappa_to_defect(const KostantPartition& kappa);
KostantPartition defect_to_kappa(const DefectMatrix& d);
std::vector<DefectMatrix> enumerate_defects(const GammaVector& gamma);
std::vector<PartitionMultiset> enumerate_partitions(const GammaVector& gamma);

// Dimension of the attracting cell indexed by d: sum of the strictly
// sub-diagonal entries.
long piece_dim(const DefectMatrix& d);

// Strict upper bound required of the differential kernel at the fixed point:
// sum_p d_{p,p} + |gamma| - 1. Rejects gamma = 0.
long key_prop_bound(const DefectMatrix& d);

struct DimensionTable {
    long flag_dim = 0;           // n(n-1)/2
    long quasiflag_dim = 0;         // 2|gamma| + flag_dim
    long ambient_dim = 0;        // sum_p ((c_p+1)*binom(n,p) - 1)
    long closed_stratum_dim = 0; // flag_dim + 1
    std::optional<long> stratum_dim;  // 2|beta| + flag_dim + |Gamma| when given
};

DimensionTable dimension_table(const GammaVector& gamma);
DimensionTable dimension_table(const GammaVector& gamma, const GammaVector& beta,
                               const PartitionMultiset& parts);

}  // namespace qml
