#include "qml/matrix.hpp"

namespace qml {

Mat Mat::identity(long n) {
    Mat m(n, n);
    for (long i = 0; i < n; ++i)
        m.at(i, i) = 1;
    return m;
}

Mat Mat::from_columns(const std::vector<std::vector<Rational>>& cols) {
    if (cols.empty())
        return Mat(0, 0);
    long rows = static_cast<long>(cols[0].size());
    Mat m(rows, static_cast<long>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) {
        if (static_cast<long>(cols[j].size()) != rows)
            throw engine_bug("ragged column list");
        for (long i = 0; i < rows; ++i)
            m.at(i, static_cast<long>(j)) = cols[j][static_cast<size_t>(i)];
    }
    return m;
}

std::vector<Rational> Mat::column(long j) const {
    std::vector<Rational> v(static_cast<size_t>(r_));
    for (long i = 0; i < r_; ++i)
        v[static_cast<size_t>(i)] = at(i, j);
    return v;
}

std::vector<Rational> Mat::row(long i) const {
    std::vector<Rational> v(static_cast<size_t>(c_));
    for (long j = 0; j < c_; ++j)
        v[static_cast<size_t>(j)] = at(i, j);
    return v;
}

void Mat::set_column(long j, const std::vector<Rational>& v) {
    if (static_cast<long>(v.size()) != r_)
        throw engine_bug("column size mismatch");
    for (long i = 0; i < r_; ++i)
        at(i, j) = v[static_cast<size_t>(i)];
}

Mat Mat::transposed() const {
    Mat t(c_, r_);
    for (long i = 0; i < r_; ++i)
        for (long j = 0; j < c_; ++j)
            t.at(j, i) = at(i, j);
    return t;
}

Mat Mat::operator*(const Mat& o) const {
    if (c_ != o.r_)
        throw engine_bug("matrix product shape mismatch");
    Mat p(r_, o.c_);
    for (long i = 0; i < r_; ++i)
        for (long k = 0; k < c_; ++k) {
            const Rational& x = at(i, k);
            if (x == 0)
                continue;
            for (long j = 0; j < o.c_; ++j)
                if (o.at(k, j) != 0)
                    p.at(i, j) += x * o.at(k, j);
        }
    return p;
}

std::vector<Rational> Mat::apply(const std::vector<Rational>& v) const {
    if (static_cast<long>(v.size()) != c_)
        throw engine_bug("matrix apply shape mismatch");
    std::vector<Rational> out(static_cast<size_t>(r_), Rational(0));
    for (long i = 0; i < r_; ++i)
        for (long j = 0; j < c_; ++j)
            if (at(i, j) != 0 && v[static_cast<size_t>(j)] != 0)
                out[static_cast<size_t>(i)] += at(i, j) * v[static_cast<size_t>(j)];
    return out;
}

Mat Mat::hcat(const Mat& o) const {
    if (r_ != o.r_)
        throw engine_bug("hcat row mismatch");
    Mat m(r_, c_ + o.c_);
    for (long i = 0; i < r_; ++i) {
        for (long j = 0; j < c_; ++j)
            m.at(i, j) = at(i, j);
        for (long j = 0; j < o.c_; ++j)
            m.at(i, c_ + j) = o.at(i, j);
    }
    return m;
}

bool Mat::is_zero() const {
    for (const auto& x : a_)
        if (x != 0)
            return false;
    return true;
}

std::vector<long> Mat::rref() {
    std::vector<long> pivots;
    long row = 0;
    for (long col = 0; col < c_ && row < r_; ++col) {
        long piv = -1;
        for (long i = row; i < r_; ++i)
            if (at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        if (piv != row)
            for (long j = 0; j < c_; ++j)
                std::swap(at(piv, j), at(row, j));
        Rational inv = 1 / at(row, col);
        for (long j = col; j < c_; ++j)
            if (at(row, j) != 0)
                at(row, j) *= inv;
        for (long i = 0; i < r_; ++i) {
            if (i == row || at(i, col) == 0)
                continue;
            Rational f = at(i, col);
            for (long j = col; j < c_; ++j)
                if (at(row, j) != 0)
                    at(i, j) -= f * at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

long rank(Mat m) {
    return static_cast<long>(m.rref().size());
}

Mat kernel_basis(const Mat& a) {
    Mat r = a;
    std::vector<long> pivots = r.rref();
    std::vector<bool> is_pivot(static_cast<size_t>(a.cols()), false);
    for (long p : pivots)
        is_pivot[static_cast<size_t>(p)] = true;

    std::vector<long> free_cols;
    for (long j = 0; j < a.cols(); ++j)
        if (!is_pivot[static_cast<size_t>(j)])
            free_cols.push_back(j);

    Mat k(a.cols(), static_cast<long>(free_cols.size()));
    for (size_t f = 0; f < free_cols.size(); ++f) {
        long fc = free_cols[f];
        k.at(fc, static_cast<long>(f)) = 1;
        for (size_t i = 0; i < pivots.size(); ++i)
            k.at(pivots[i], static_cast<long>(f)) = -r.at(static_cast<long>(i), fc);
    }
    return k;
}

std::optional<std::vector<Rational>> solve(const Mat& a, const std::vector<Rational>& b) {
    if (static_cast<long>(b.size()) != a.rows())
        throw engine_bug("solve shape mismatch");
    Mat aug(a.rows(), a.cols() + 1);
    for (long i = 0; i < a.rows(); ++i) {
        for (long j = 0; j < a.cols(); ++j)
            aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols()) = b[static_cast<size_t>(i)];
    }
    std::vector<long> pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == a.cols())
        return std::nullopt;  // inconsistent
    std::vector<Rational> x(static_cast<size_t>(a.cols()), Rational(0));
    for (size_t i = 0; i < pivots.size(); ++i)
        x[static_cast<size_t>(pivots[i])] = aug.at(static_cast<long>(i), a.cols());
    return x;
}

Subspace::Subspace(const Mat& m) : ambient_(m.rows()) {
    Mat r = m.transposed();
    std::vector<long> pivots = r.rref();
    for (size_t i = 0; i < pivots.size(); ++i) {
        rows_.push_back(r.row(static_cast<long>(i)));
        pivots_.push_back(pivots[i]);
    }
}

std::vector<Rational> Subspace::reduce(const std::vector<Rational>& v) const {
    if (static_cast<long>(v.size()) != ambient_)
        throw engine_bug("reduce shape mismatch");
    std::vector<Rational> w = v;
    for (size_t i = 0; i < rows_.size(); ++i) {
        const Rational& c = w[static_cast<size_t>(pivots_[i])];
        if (c == 0)
            continue;
        Rational f = c;  // pivot entry is 1
        for (long j = 0; j < ambient_; ++j)
            if (rows_[i][static_cast<size_t>(j)] != 0)
                w[static_cast<size_t>(j)] -= f * rows_[i][static_cast<size_t>(j)];
    }
    return w;
}

bool Subspace::contains(const std::vector<Rational>& v) const {
    auto w = reduce(v);
    for (const auto& x : w)
        if (x != 0)
            return false;
    return true;
}

std::vector<Rational> Subspace::coords_in_basis(const std::vector<Rational>& v) const {
    if (!contains(v))
        throw engine_bug("vector not in subspace");
    std::vector<Rational> c(rows_.size());
    for (size_t i = 0; i < rows_.size(); ++i)
        c[i] = v[static_cast<size_t>(pivots_[i])];
    return c;
}

Mat intersect_columns(const Mat& u, const Mat& v) {
    if (u.rows() != v.rows())
        throw engine_bug("intersection ambient mismatch");
    if (u.cols() == 0 || v.cols() == 0)
        return Mat(u.rows(), 0);
    Mat neg_v = v;
    for (long i = 0; i < v.rows(); ++i)
        for (long j = 0; j < v.cols(); ++j)
            neg_v.at(i, j) = -v.at(i, j);
    Mat k = kernel_basis(u.hcat(neg_v));
    // First u.cols() entries of each kernel vector give a combination of u's
    // columns lying in span(v).
    Mat comb(u.cols(), k.cols());
    for (long i = 0; i < u.cols(); ++i)
        for (long j = 0; j < k.cols(); ++j)
            comb.at(i, j) = k.at(i, j);
    Mat raw = u * comb;
    // Filter to an independent spanning set.
    Subspace s(raw);
    Mat out(u.rows(), s.dim());
    Mat rt = raw.transposed();
    std::vector<long> piv = rt.rref();
    for (size_t i = 0; i < piv.size(); ++i)
        for (long j = 0; j < u.rows(); ++j)
            out.at(j, static_cast<long>(i)) = rt.at(static_cast<long>(i), j);
    return out;
}

Mat annihilator(const Mat& u) {
    return kernel_basis(u.transposed());
}

}  // namespace qml
