#pragma once

#include <optional>
#include <vector>

#include "qml/rational.hpp"

namespace qml {

// Dense matrix over the rationals. Row-major. All reductions use exact
// arithmetic with first-nonzero pivoting, so every derived basis is
// deterministic.
class Mat {
public:
    Mat() = default;
    Mat(long rows, long cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows * cols), Rational(0)) {}

    static Mat identity(long n);
    static Mat from_columns(const std::vector<std::vector<Rational>>& cols);

    long rows() const { return r_; }
    long cols() const { return c_; }

    Rational& at(long i, long j) { return a_[static_cast<size_t>(i * c_ + j)]; }
    const Rational& at(long i, long j) const { return a_[static_cast<size_t>(i * c_ + j)]; }

    std::vector<Rational> column(long j) const;
    std::vector<Rational> row(long i) const;
    void set_column(long j, const std::vector<Rational>& v);

    Mat transposed() const;
    Mat operator*(const Mat& o) const;
    std::vector<Rational> apply(const std::vector<Rational>& v) const;

    // Appends the columns of o on the right.
    Mat hcat(const Mat& o) const;

    bool is_zero() const;

    // In-place reduced row echelon form; returns pivot column indices.
    std::vector<long> rref();

private:
    long r_ = 0, c_ = 0;
    std::vector<Rational> a_;
};

long rank(Mat m);

// Basis of the right kernel {x : Ax = 0}, as columns. Free variables are
// taken in ascending index order, so the basis is canonical.
Mat kernel_basis(const Mat& a);

// One solution of Ax = b if consistent.
std::optional<std::vector<Rational>> solve(const Mat& a, const std::vector<Rational>& b);

// Row-echelon description of a subspace given by spanning columns; used for
// canonical reduction of vectors modulo the subspace.
class Subspace {
public:
    Subspace() = default;
    // span of the columns of m
    explicit Subspace(const Mat& m);

    long ambient() const { return ambient_; }
    long dim() const { return static_cast<long>(rows_.size()); }
    const std::vector<long>& pivots() const { return pivots_; }

    // Canonical representative of v modulo the subspace (pivot coordinates
    // eliminated).
    std::vector<Rational> reduce(const std::vector<Rational>& v) const;
    bool contains(const std::vector<Rational>& v) const;

    // Coordinates of a member vector in the echelon basis; throws if v is
    // not in the subspace.
    std::vector<Rational> coords_in_basis(const std::vector<Rational>& v) const;
    std::vector<Rational> basis_vector(long i) const { return rows_[static_cast<size_t>(i)]; }

private:
    long ambient_ = 0;
    std::vector<std::vector<Rational>> rows_;  // echelon basis, pivot = 1
    std::vector<long> pivots_;
};

// Basis (as columns) of the intersection of the column spans of u and v.
Mat intersect_columns(const Mat& u, const Mat& v);

// Basis (as columns of the returned matrix) of the annihilator of the column
// span of u inside the dual space, i.e. kernel of u^T.
Mat annihilator(const Mat& u);

}  // namespace qml
