#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qml/ambient.hpp"
#include "qml/combinatorics.hpp"
#include "qml/matrix.hpp"
#include "qml/monomial_sheaf.hpp"

namespace qml {

// The unique torus-fixed chain of monomial subsheaves attached to a defect
// matrix: E_p = sum_{q<=p} z^{d_{p,q}} O v_q, with its inclusions and the
// quotient surjections between the Q_p = V/E_p.
struct FixedPointData {
    int n = 2;
    DefectMatrix dm;
    GammaVector gamma;
    std::vector<std::vector<SheafSummand>> E;  // index p-1
    std::vector<std::vector<SheafSummand>> Q;
    // Summand bookkeeping for Q_p: torsion_pos[p-1][q-1] is the index of the
    // torsion summand of color q (-1 if absent), free_pos[p-1][r-1] likewise
    // for the free summand of color r.
    std::vector<std::vector<int>> torsion_pos, free_pos;
    std::vector<SumHom> iota;   // E_p -> E_{p+1}, p = 1..n-2
    std::vector<SumHom> sigma;  // Q_p -> Q_{p+1}

    explicit FixedPointData(const DefectMatrix& d);
};

FixedPointData build_fixed_point(const DefectMatrix& d);

// Monomial coordinates on a full block-hom space Hom(+src, +tgt).
struct PairLayout {
    std::vector<SheafSummand> src, tgt;
    std::vector<std::vector<long>> offset;  // [i][j], -1 when hom is zero
    std::vector<std::vector<long>> count;
    long dim = 0;
};

PairLayout make_pair_layout(const std::vector<SheafSummand>& src,
                            const std::vector<SheafSummand>& tgt);
std::vector<Rational> pair_coords(const PairLayout& lay, const SumHom& h);
SumHom from_pair_coords(const PairLayout& lay, const std::vector<Rational>& v);

// Everything computed once per defect matrix: the tangent space of the
// quasiflag chain at the fixed point, and the differential of the wedge map
// into ambient coordinates.
struct FixedPointModel {
    DefectMatrix dm;
    GammaVector gamma;
    FixedPointData data;
    std::vector<PairLayout> hom;         // Hom(E_p, Q_p) per p
    std::vector<long> hom_offset;        // global offsets per level
    long hom_dim = 0;
    std::vector<PairLayout> cross;       // Hom(E_p, Q_{p+1}) per edge
    Mat tangent_basis;                   // hom_dim x dim_T
    long dim_T = 0;
    AmbientLayout amb;
    Mat dpi_full;                        // ambient x hom_dim
    Mat dpi_tangent;                     // ambient x dim_T
    long dpi_rank = 0;
    long kernel = 0;

    explicit FixedPointModel(const DefectMatrix& d);

    // sigma_p h_p - h_{p+1} iota_p over all edges, in cross coordinates.
    std::vector<Rational> commutation_residual(const std::vector<Rational>& hom_coords) const;
    bool in_tangent_space(const std::vector<Rational>& hom_coords) const;
};

struct TangentSpace {
    long dim = 0;
    Mat basis;  // hom coordinates, columns
};

TangentSpace tangent_space(const DefectMatrix& d);

struct DpiMap {
    Mat on_tangent;  // ambient x dim_T
    long rank = 0;
};

DpiMap dpi(const DefectMatrix& d);
long kernel_dim(const DefectMatrix& d);

// Coefficients of the distinguished subspace: one polynomial per strict pair
// (p,q), p > q, of degree <= d_{p,q}.
struct N0Vector {
    std::map<std::pair<int, int>, Poly> f;
};

struct ObstructionError : error {
    using error::error;
};

// Tangent element with the prescribed lower-triangular free blocks, plus the
// canonical torsion completion solving the commutation constraints. Throws
// ObstructionError when no completion exists.
std::vector<Rational> nu0(const FixedPointModel& m, const N0Vector& f);

// Tangent element supported on the diagonal channel at the first nonzero
// diagonal defect, with class z^j; infeasible exponents yield nullopt.
std::optional<std::vector<Rational>> nu1_monomial(const FixedPointModel& m, long j);
long nu1_p0(const FixedPointModel& m);

struct Nu1Choice {
    long p0 = 0;
    long exponent = 0;
    std::vector<Rational> coords;
};
Nu1Choice nu1(const FixedPointModel& m);  // minimal feasible exponent

struct SubspaceReport {
    long dim_N_formula = 0;
    long dim_N = 0;
    long rank_dpi_N = 0;
    bool formula_ok = false;
    bool rank_ok = false;
    std::vector<std::string> obstructed;       // nu0 basis vectors with no completion
    long p0 = 0;
    long nu1_exponent = 0;
    std::vector<long> nu1_feasible;
    bool all_monomial_injective = false;
    bool pass = false;
};

SubspaceReport verify_N(const FixedPointModel& m);

struct KeyPropReport {
    long dim_T = 0;
    long kernel = 0;
    long bound = 0;
    long margin = 0;
    bool pass = false;
};

KeyPropReport verify_key_prop(const FixedPointModel& m);

struct ReductionChainReport {
    long quasiflag_dim = 0;
    long kernel = 0;
    long flag_dim = 0;
    long piece = 0;
    bool pass = false;  // quasiflag_dim - kernel > flag_dim + 1 + piece
};

ReductionChainReport verify_reduction_chain(const FixedPointModel& m);

}  // namespace qml
