#include <doctest.h>

#include <cstdint>

#include "qml/monomial_sheaf.hpp"

using namespace qml;

namespace {

struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    long range(long n) { return static_cast<long>(next() % static_cast<std::uint64_t>(n)); }
};

BlockHom random_block(Rng& rng, const SheafSummand& src, const SheafSummand& tgt) {
    HomBasis h = hom_space(src, tgt);
    BlockHom acc = BlockHom::zero(src, tgt);
    for (const auto& b : h.basis)
        acc = acc + b.scaled(Rational(rng.range(7) - 3));
    return acc;
}

SheafSummand random_summand(Rng& rng) {
    if (rng.range(2) == 0)
        return SheafSummand::line(rng.range(4));
    return SheafSummand::torsion(1 + rng.range(3));
}

}  // namespace

TEST_CASE("poly parsing and printing") {
    Poly p = parse_poly("z^2+3*z-1/2");
    CHECK(p.coeff(0) == Rational(-1, 2));
    CHECK(p.coeff(1) == 3);
    CHECK(p.coeff(2) == 1);
    CHECK(parse_poly(p.str()) == p);
    CHECK(parse_poly("0").is_zero());
    CHECK(parse_poly("-z").coeff(1) == -1);
    CHECK_THROWS_AS(parse_poly("z+"), error);
}

TEST_CASE("hom space dimension table") {
    auto L = [](long a) { return SheafSummand::line(a); };
    auto T = [](long e) { return SheafSummand::torsion(e); };

    HomBasis h = hom_space(L(2), L(1));
    CHECK(h.dim == 2);
    CHECK(h.basis[0].u == Poly::one());
    CHECK(h.basis[1].u == Poly::monomial(1));

    CHECK(hom_dim(L(0), L(2)) == 0);
    CHECK(hom_dim(L(5), T(3)) == 3);
    CHECK(hom_dim(L(0), T(4)) == 4);

    HomBasis tt = hom_space(T(2), T(3));
    CHECK(tt.dim == 2);
    CHECK(tt.basis[0].u == Poly::monomial(1));
    CHECK(tt.basis[1].u == Poly::monomial(2));

    CHECK(hom_dim(T(2), L(1)) == 0);
    CHECK(hom_space(T(2), L(1)).dim == 0);
}

TEST_CASE("block constructors enforce constraints") {
    auto L = [](long a) { return SheafSummand::line(a); };
    auto T = [](long e) { return SheafSummand::torsion(e); };
    CHECK_THROWS_AS(BlockHom::make(L(1), L(0), Poly::monomial(2)), error);
    CHECK_THROWS_AS(BlockHom::make(L(1), T(2), Poly::monomial(2)), error);
    CHECK_THROWS_AS(BlockHom::make(T(1), T(3), Poly::one()), error);  // z*1 != 0 mod z^3
    CHECK_THROWS_AS(BlockHom::make(T(2), L(0), Poly::one()), error);
    CHECK(BlockHom::make(T(1), T(3), Poly::monomial(2)).kind == BlockKind::TorsionToTorsion);
}

TEST_CASE("composition of blocks") {
    auto L = [](long a) { return SheafSummand::line(a); };
    auto T = [](long e) { return SheafSummand::torsion(e); };

    // truncation kills the top degree
    BlockHom f = BlockHom::make(L(2), L(1), Poly::monomial(1));
    BlockHom g = BlockHom::make(L(1), T(2), Poly::monomial(1));
    CHECK(compose(g, f).is_zero());

    // identity embedding composes trivially
    BlockHom id = BlockHom::make(L(2), L(2), Poly::one());
    BlockHom any = BlockHom::make(L(2), T(3), parse_poly("1+2*z"));
    CHECK(compose(any, id) == any);

    // quotient after a polynomial block
    BlockHom h = BlockHom::make(L(2), L(0), parse_poly("1+z"));
    BlockHom quot = BlockHom::make(L(0), T(2), Poly::one());
    CHECK(compose(quot, h).u == parse_poly("1+z"));

    CHECK_THROWS_AS(compose(h, h), error);  // endpoint mismatch
}

TEST_CASE("composition is associative on random triples") {
    Rng rng(20240817);
    int done = 0;
    while (done < 200) {
        SheafSummand a = random_summand(rng), b = random_summand(rng), c = random_summand(rng),
                     d = random_summand(rng);
        if (hom_dim(a, b) == 0 || hom_dim(b, c) == 0 || hom_dim(c, d) == 0)
            continue;
        BlockHom f = random_block(rng, a, b);
        BlockHom g = random_block(rng, b, c);
        BlockHom h = random_block(rng, c, d);
        CHECK(compose(h, compose(g, f)) == compose(compose(h, g), f));
        ++done;
    }
}

TEST_CASE("assembly and full hom dimension") {
    auto L = [](long a, int q) { return SheafSummand::line(a, {q}); };
    auto T = [](long e, int q) { return SheafSummand::torsion(e, {q}); };

    CHECK(full_hom_dim({L(1, 1)}, {}) == 0);

    // E_2 against Q_2 at the singular-quadric defect
    std::vector<SheafSummand> src = {L(1, 1), L(1, 2)};
    std::vector<SheafSummand> tgt = {T(1, 1), T(1, 2), L(0, 3)};
    CHECK(full_hom_dim(src, tgt) == 8);

    SumHom zero = assemble(src, tgt, {});
    CHECK(zero.is_zero());

    std::map<std::pair<int, int>, BlockHom> blocks;
    blocks[{0, 2}] = BlockHom::make(src[0], tgt[2], Poly::monomial(1));
    SumHom h = assemble(src, tgt, std::move(blocks));
    CHECK(!h.is_zero());
    CHECK((h - h).is_zero());

    std::map<std::pair<int, int>, BlockHom> bad;
    bad[{0, 0}] = BlockHom::make(src[0], tgt[2], Poly::one());
    CHECK_THROWS_AS(assemble(src, tgt, std::move(bad)), error);
}

TEST_CASE("hom dimensions are additive over direct sums") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SheafSummand> src, tgt;
        long n_src = 1 + rng.range(3), n_tgt = rng.range(4);
        for (long i = 0; i < n_src; ++i)
            src.push_back(random_summand(rng));
        for (long i = 0; i < n_tgt; ++i)
            tgt.push_back(random_summand(rng));
        long total = 0;
        for (const auto& s : src)
            for (const auto& t : tgt)
                total += hom_space(s, t).dim;
        CHECK(full_hom_dim(src, tgt) == total);
    }
}
