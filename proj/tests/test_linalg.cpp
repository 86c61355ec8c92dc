#include <doctest.h>

#include "qml/matrix.hpp"
#include "qml/poly.hpp"

using namespace qml;

namespace {

Mat from_rows(const std::vector<std::vector<long>>& rows) {
    Mat m(static_cast<long>(rows.size()), rows.empty() ? 0 : static_cast<long>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m.at(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    return m;
}

}  // namespace

TEST_CASE("rref, rank and kernel") {
    Mat a = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}});
    CHECK(rank(a) == 2);
    Mat k = kernel_basis(a);
    REQUIRE(k.cols() == 1);
    // kernel vector (1, -2, 1)
    auto v = k.column(0);
    std::vector<Rational> img = a.apply(v);
    for (const auto& x : img)
        CHECK(x == 0);

    CHECK(rank(Mat::identity(4)) == 4);
    CHECK(kernel_basis(Mat::identity(4)).cols() == 0);

    // exact rational pivots
    Mat b(2, 2);
    b.at(0, 0) = Rational(1, 3);
    b.at(0, 1) = Rational(1, 6);
    b.at(1, 0) = Rational(2, 3);
    b.at(1, 1) = Rational(1, 3);
    CHECK(rank(b) == 1);
}

TEST_CASE("solve detects inconsistency") {
    Mat a = from_rows({{1, 1}, {2, 2}});
    auto none = solve(a, {Rational(1), Rational(3)});
    CHECK(!none.has_value());
    auto some = solve(a, {Rational(1), Rational(2)});
    REQUIRE(some.has_value());
    auto img = a.apply(*some);
    CHECK(img[0] == 1);
    CHECK(img[1] == 2);
}

TEST_CASE("subspace reduction is canonical") {
    Mat u = from_rows({{1, 0}, {0, 1}, {0, 0}});
    Subspace s(u);
    CHECK(s.dim() == 2);
    std::vector<Rational> v = {Rational(5), Rational(7), Rational(9)};
    auto r = s.reduce(v);
    CHECK(r[0] == 0);
    CHECK(r[1] == 0);
    CHECK(r[2] == 9);
    CHECK(!s.contains(v));
    CHECK(s.contains({Rational(3), Rational(-2), Rational(0)}));
    auto c = s.coords_in_basis({Rational(3), Rational(-2), Rational(0)});
    CHECK(c == std::vector<Rational>{Rational(3), Rational(-2)});
}

TEST_CASE("intersection and annihilator of column spans") {
    // span{e1, e2} meet span{e2, e3} = span{e2}
    Mat u = from_rows({{1, 0}, {0, 1}, {0, 0}});
    Mat v = from_rows({{0, 0}, {1, 0}, {0, 1}});
    Mat inter = intersect_columns(u, v);
    REQUIRE(inter.cols() == 1);
    CHECK(inter.at(0, 0) == 0);
    CHECK(inter.at(1, 0) != 0);
    CHECK(inter.at(2, 0) == 0);

    // skew planes in 4-space meet trivially
    Mat p = from_rows({{1, 0}, {0, 1}, {0, 0}, {0, 0}});
    Mat q = from_rows({{0, 0}, {0, 0}, {1, 0}, {0, 1}});
    CHECK(intersect_columns(p, q).cols() == 0);

    Mat ann = annihilator(u);
    REQUIRE(ann.cols() == 1);
    Mat pairing = ann.transposed() * u;
    CHECK(pairing.is_zero());

    // dim(U) + dim(ann U) = ambient
    CHECK(u.cols() + ann.cols() == u.rows());
}

TEST_CASE("polynomial gcd") {
    Poly a = parse_poly("z^2-1");
    Poly b = parse_poly("z^2+2*z+1");
    Poly g = gcd(a, b);
    CHECK(g == parse_poly("z+1"));
    CHECK(gcd(parse_poly("z"), parse_poly("1")).degree() == 0);
    CHECK(gcd(Poly(), Poly()).is_zero());
    CHECK(gcd(parse_poly("2*z^2"), Poly()) == parse_poly("z^2"));  // monic normalization
}

TEST_CASE("poly shift and truncation") {
    Poly p = parse_poly("1+z+z^2");
    CHECK(p.shifted(2) == parse_poly("z^2+z^3+z^4"));
    CHECK(p.truncated(2) == parse_poly("1+z"));
    CHECK(p.truncated(0).is_zero());
    CHECK(p.shifted(1).shifted_down(1) == p);
    CHECK_THROWS_AS(p.shifted_down(1), error);
    CHECK(p.order() == 0);
    CHECK(Poly().order() == -1);
    CHECK(parse_poly("z^3").order() == 3);
    CHECK(p.eval(Rational(2)) == 7);
}
