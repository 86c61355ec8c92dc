#include <doctest.h>

#include <functional>

#include "qml/fixed_point.hpp"
#include "qml/graded_engine.hpp"

using namespace qml;

TEST_CASE("fixed point data on small cases") {
    // zero defect: the standard flag of subbundles
    FixedPointData flat = build_fixed_point(parse_defect(3, "0;0,0"));
    CHECK(flat.E[0].size() == 1);
    CHECK(flat.E[0][0].par == 0);
    CHECK(flat.Q[0].size() == 2);  // free colors 2 and 3 only

    FixedPointData fp = build_fixed_point(parse_defect(3, "2;1,1"));
    CHECK(fp.E[0][0].par == 2);         // E_1 = z^2 O v_1
    CHECK(fp.E[1][0].par == 1);         // E_2 = z O v_1 + z O v_2
    CHECK(fp.E[1][1].par == 1);
    const BlockHom* inc = fp.iota[0].block(0, 0);
    REQUIRE(inc != nullptr);
    CHECK(inc->u == Poly::monomial(1));  // inclusion block z

    FixedPointData f2 = build_fixed_point(parse_defect(2, "1"));
    CHECK(f2.E[0][0].par == 1);
    REQUIRE(f2.Q[0].size() == 2);
    CHECK(f2.Q[0][0].kind == SummandKind::Torsion);
    CHECK(f2.Q[0][0].par == 1);
    CHECK(f2.Q[0][1].kind == SummandKind::Line);

    // row sums of the defect match the degree profile
    CHECK(fp.gamma.str() == "2,2");
}

TEST_CASE("tangent space dimensions") {
    CHECK(tangent_space(parse_defect(2, "1")).dim == 3);
    CHECK(tangent_space(parse_defect(3, "2;1,1")).dim == 11);
    CHECK(tangent_space(parse_defect(3, "0;0,0")).dim == 3);  // flag variety
    CHECK(tangent_space(parse_defect(4, "0;0,0;0,0,0")).dim == 6);
}

TEST_CASE("tangent dimension identity across a sweep range") {
    for (int n = 2; n <= 4; ++n)
        for (long total = 0; total <= (n == 4 ? 3 : 4); ++total)
            for (const auto& g : [&] {
                     std::vector<GammaVector> out;
                     std::vector<long> cur(static_cast<size_t>(n - 1), 0);
                     std::function<void(int, long)> rec = [&](int i, long used) {
                         if (i == n - 1) {
                             if (used == total)
                                 out.emplace_back(n, cur);
                             return;
                         }
                         for (long v = 0; used + v <= total; ++v) {
                             cur[static_cast<size_t>(i)] = v;
                             rec(i + 1, used + v);
                         }
                         cur[static_cast<size_t>(i)] = 0;
                     };
                     rec(0, 0);
                     return out;
                 }())
                for (const auto& d : enumerate_defects(g)) {
                    FixedPointModel m(d);
                    CHECK(m.dim_T == 2 * g.total() + n * (n - 1) / 2);
                    // rank-nullity in exact arithmetic
                    CHECK(m.kernel + m.dpi_rank == m.dim_T);
                }
}

TEST_CASE("differential of the wedge map") {
    // rank 2 case: the differential is the identity on the tangent space
    for (long a : {1L, 2L, 3L}) {
        FixedPointModel m(parse_defect(2, std::to_string(a)));
        CHECK(m.kernel == 0);
        CHECK(m.dpi_rank == m.dim_T);
    }

    FixedPointModel sing(parse_defect(3, "2;1,1"));
    CHECK(sing.dpi_rank == 8);
    CHECK(sing.kernel == 3);

    // no defect: an embedding of the flag variety
    FixedPointModel flat(parse_defect(3, "0;0,0"));
    CHECK(flat.kernel == 0);
    FixedPointModel flat4(parse_defect(4, "0;0,0;0,0,0"));
    CHECK(flat4.kernel == 0);

    CHECK(kernel_dim(parse_defect(2, "2")) == 0);
}

TEST_CASE("rank-2 differential is literally the identity matrix") {
    FixedPointModel m(parse_defect(2, "1"));
    REQUIRE(m.dpi_full.rows() == 3);
    REQUIRE(m.dpi_full.cols() == 3);
    for (long i = 0; i < 3; ++i)
        for (long j = 0; j < 3; ++j)
            CHECK(m.dpi_full.at(i, j) == (i == j ? 1 : 0));
}

TEST_CASE("tangent basis columns satisfy the commutation constraints") {
    for (auto item : {std::pair<int, const char*>{3, "2;1,1"}, {3, "1;1,1"}, {4, "1;1,1;0,1,0"}}) {
        FixedPointModel m(parse_defect(item.first, item.second));
        for (long j = 0; j < m.dim_T; ++j)
            CHECK(m.in_tangent_space(m.tangent_basis.column(j)));
    }
}

TEST_CASE("torsion completion is invisible to the differential") {
    // The completion touches only off-diagonal torsion blocks, so the image
    // under the wedge differential equals that of the bare free-block family.
    for (auto item : {std::pair<int, const char*>{3, "1;1,1"}, {3, "0;0,1"}, {3, "2;1,1"}}) {
        FixedPointModel m(parse_defect(item.first, item.second));
        N0Vector f;
        f.f[{2, 1}] = Poly::one();
        auto full = nu0(m, f);
        auto free_only = full;
        for (int p = 1; p <= m.data.n - 1; ++p) {
            const PairLayout& lay = m.hom[static_cast<size_t>(p - 1)];
            for (size_t i = 0; i < lay.src.size(); ++i)
                for (size_t j = 0; j < lay.tgt.size(); ++j) {
                    if (lay.offset[i][j] < 0 || lay.tgt[j].kind != SummandKind::Torsion)
                        continue;
                    for (long k = 0; k < lay.count[i][j]; ++k)
                        free_only[static_cast<size_t>(m.hom_offset[static_cast<size_t>(p - 1)] +
                                                      lay.offset[i][j] + k)] = 0;
                }
        }
        CHECK(m.dpi_full.apply(full) == m.dpi_full.apply(free_only));
    }
}

TEST_CASE("nu0 produces commuting tangent elements") {
    FixedPointModel m(parse_defect(3, "2;1,1"));

    N0Vector zero;
    auto v0 = nu0(m, zero);
    for (const auto& x : v0)
        CHECK(x == 0);

    N0Vector f;
    f.f[{2, 1}] = Poly::one();
    auto v = nu0(m, f);
    CHECK(m.in_tangent_space(v));
    bool nonzero = false;
    for (const auto& x : v)
        if (x != 0)
            nonzero = true;
    CHECK(nonzero);

    // degree bound enforced
    N0Vector bad;
    bad.f[{2, 1}] = Poly::monomial(2);
    CHECK_THROWS_AS(nu0(m, bad), error);

    // completion needed when the inclusion exponent vanishes
    FixedPointModel m2(parse_defect(3, "0;0,1"));
    N0Vector g;
    g.f[{2, 1}] = Poly::one();
    auto w = nu0(m2, g);
    CHECK(m2.in_tangent_space(w));

    FixedPointModel m3(parse_defect(3, "1;1,1"));
    N0Vector h;
    h.f[{2, 1}] = Poly::one();
    auto u = nu0(m3, h);
    CHECK(m3.in_tangent_space(u));
}

TEST_CASE("nu1 choices") {
    FixedPointModel m(parse_defect(3, "2;1,1"));
    CHECK(nu1_p0(m) == 1);
    // the constant class does not extend here; the minimal feasible class is z
    CHECK(!nu1_monomial(m, 0).has_value());
    Nu1Choice c = nu1(m);
    CHECK(c.exponent == 1);
    CHECK(m.in_tangent_space(c.coords));

    FixedPointModel m2(parse_defect(3, "0;0,1"));
    CHECK(nu1_p0(m2) == 2);
    Nu1Choice c2 = nu1(m2);
    CHECK(c2.exponent == 0);
    CHECK(m2.in_tangent_space(c2.coords));

    // constant column: the constant class extends after completion
    FixedPointModel m3(parse_defect(3, "1;1,0"));
    Nu1Choice c3 = nu1(m3);
    CHECK(c3.p0 == 1);
    CHECK(c3.exponent == 0);
    CHECK(m3.in_tangent_space(c3.coords));

    CHECK_THROWS_AS(nu1(FixedPointModel(parse_defect(3, "0;0,0"))), error);
}

TEST_CASE("subspace certificate on small cases") {
    FixedPointModel m(parse_defect(3, "2;1,1"));
    SubspaceReport r = verify_N(m);
    CHECK(r.dim_N_formula == 3);
    CHECK(r.dim_N == 3);
    CHECK(r.rank_dpi_N == 3);
    CHECK(r.pass);
    CHECK(m.kernel <= m.dim_T - r.dim_N);

    FixedPointModel m2(parse_defect(2, "1"));
    SubspaceReport r2 = verify_N(m2);
    CHECK(r2.dim_N == 1);  // no strict pairs, the diagonal class alone
    CHECK(r2.rank_dpi_N == 1);
    CHECK(r2.pass);

    FixedPointModel m3(parse_defect(3, "0;0,1"));
    SubspaceReport r3 = verify_N(m3);
    CHECK(r3.dim_N == 2);
    CHECK(r3.rank_dpi_N == 2);
    CHECK(r3.pass);
}

TEST_CASE("subspace certificate across small ranges") {
    for (int n = 2; n <= 3; ++n)
        for (long total = 1; total <= 4; ++total) {
            std::vector<long> cur(static_cast<size_t>(n - 1), 0);
            std::function<void(int, long)> rec = [&](int i, long used) {
                if (i == n - 1) {
                    if (used != total)
                        return;
                    GammaVector g(n, cur);
                    for (const auto& d : enumerate_defects(g)) {
                        FixedPointModel m(d);
                        SubspaceReport r = verify_N(m);
                        CHECK(r.obstructed.empty());
                        CHECK(r.pass);
                        CHECK(m.kernel <= m.dim_T - r.dim_N);
                    }
                    return;
                }
                for (long v = 0; used + v <= total; ++v) {
                    cur[static_cast<size_t>(i)] = v;
                    rec(i + 1, used + v);
                }
                cur[static_cast<size_t>(i)] = 0;
            };
            rec(0, 0);
        }
}

TEST_CASE("certain rank-4 defects admit no completion for some directions") {
    // column pattern (1,1,0 | 1,1 | 0): the lower corner forces the constant
    // part of the (2,1) coefficient to vanish
    FixedPointModel m(parse_defect(4, "1;1,1;0,1,0"));
    N0Vector f;
    f.f[{2, 1}] = Poly::one();
    CHECK_THROWS_AS(nu0(m, f), ObstructionError);
    N0Vector g;
    g.f[{2, 1}] = Poly::monomial(1);
    CHECK(m.in_tangent_space(nu0(m, g)));

    SubspaceReport r = verify_N(m);
    CHECK(r.dim_N_formula == 6);
    CHECK(r.dim_N == 5);
    CHECK(!r.formula_ok);
    CHECK(r.obstructed == std::vector<std::string>{"f[2,1]=z^0"});
    // the differential is still injective on what exists
    CHECK(r.rank_dpi_N == r.dim_N);
}

TEST_CASE("the rank-4 obstruction is intrinsic to the tangent space") {
    // Pin every free-block coordinate to the prescribed lower-triangular
    // pattern and let every torsion coordinate float; the commutation system
    // must still be inconsistent, so no completion of any kind exists.
    FixedPointModel m(parse_defect(4, "1;1,1;0,1,0"));
    N0Vector f;
    f.f[{2, 1}] = Poly::one();

    std::vector<Rational> pattern(static_cast<size_t>(m.hom_dim), Rational(0));
    {
        // free blocks of the prescribed element: z^{d_{p,q}-d_{r,q}} f at
        // levels q <= p < r for the pair (r,q) = (2,1)
        const PairLayout& lay = m.hom[0];
        int fi = m.data.free_pos[0][1];  // color 2 at level 1
        long off = lay.offset[0][static_cast<size_t>(fi)];
        pattern[static_cast<size_t>(m.hom_offset[0] + off)] = 1;
    }
    std::vector<long> torsion_slots;
    for (int p = 1; p <= 3; ++p) {
        const PairLayout& lay = m.hom[static_cast<size_t>(p - 1)];
        for (size_t i = 0; i < lay.src.size(); ++i)
            for (size_t j = 0; j < lay.tgt.size(); ++j) {
                if (lay.offset[i][j] < 0 || lay.tgt[j].kind != SummandKind::Torsion)
                    continue;
                for (long k = 0; k < lay.count[i][j]; ++k)
                    torsion_slots.push_back(m.hom_offset[static_cast<size_t>(p - 1)] +
                                            lay.offset[i][j] + k);
            }
    }
    std::vector<Rational> base = m.commutation_residual(pattern);
    Mat sys(static_cast<long>(base.size()), static_cast<long>(torsion_slots.size()));
    for (size_t s = 0; s < torsion_slots.size(); ++s) {
        std::vector<Rational> unit(static_cast<size_t>(m.hom_dim), Rational(0));
        unit[static_cast<size_t>(torsion_slots[s])] = 1;
        std::vector<Rational> r = m.commutation_residual(unit);
        for (size_t i = 0; i < r.size(); ++i)
            sys.at(static_cast<long>(i), static_cast<long>(s)) = r[i];
    }
    for (auto& x : base)
        x = -x;
    CHECK(!solve(sys, base).has_value());
}

TEST_CASE("obstructed rank-4 defect is confirmed by the graded oracle") {
    // The independent engine reproduces the same tangent space and kernel at
    // the defect where the certificate formula fails, so the failure is a
    // property of the space, not of the block model.
    FixedPointModel m(parse_defect(4, "1;1,1;0,1,0"));
    EngineConfig cfg;
    OracleComparison cmp = compare_with_fast_path(m, cfg);
    CHECK(cmp.dims_equal);
    CHECK(cmp.kernels_equal);
    CHECK(cmp.tangent_spaces_equal);
    CHECK(cmp.dpi_matrices_equal);
}

TEST_CASE("kernel bound and reduction chain") {
    FixedPointModel m(parse_defect(3, "2;1,1"));
    KeyPropReport kp = verify_key_prop(m);
    CHECK(kp.kernel == 3);
    CHECK(kp.bound == 6);
    CHECK(kp.margin == 3);
    CHECK(kp.pass);

    ReductionChainReport rc = verify_reduction_chain(m);
    CHECK(rc.quasiflag_dim == 11);
    CHECK(rc.kernel == 3);
    CHECK(rc.flag_dim + 1 + rc.piece == 5);
    CHECK(rc.pass);

    FixedPointModel m2(parse_defect(2, "1"));
    CHECK(verify_key_prop(m2).pass);
    ReductionChainReport rc2 = verify_reduction_chain(m2);
    CHECK(rc2.quasiflag_dim - rc2.kernel == 3);
    CHECK(rc2.flag_dim + 1 + rc2.piece == 2);
    CHECK(rc2.pass);

    CHECK_THROWS_AS(verify_reduction_chain(FixedPointModel(parse_defect(3, "0;0,0"))), error);
}
