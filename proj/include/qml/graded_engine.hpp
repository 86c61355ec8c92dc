#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qml/ambient.hpp"
#include "qml/combinatorics.hpp"
#include "qml/fixed_point.hpp"
#include "qml/matrix.hpp"
#include "qml/poly.hpp"

namespace qml {

// Polynomial matrix with per-column degree bounds. Column j represents a map
// O(-a_j) -> O^rows, so the bounds are part of the data: they fix the twist
// of the generated subsheaf even when top coefficients vanish.
struct PolyMatrix {
    int rows = 0, cols = 0;
    std::vector<long> col_deg;
    std::vector<Poly> e;  // row-major

    PolyMatrix() = default;
    PolyMatrix(int rows_, int cols_, std::vector<long> col_deg_);

    Poly& at(int i, int j) { return e[static_cast<size_t>(i * cols + j)]; }
    const Poly& at(int i, int j) const { return e[static_cast<size_t>(i * cols + j)]; }

    void check_degrees() const;
    long bound_total() const;
    PolyMatrix operator*(const PolyMatrix& o) const;
};

// Chain of polynomial matrices M_1..M_{n-1} (M_p is n x p) with inclusion
// witnesses M_p = M_{p+1} A_p. The witnesses carry the degree bounds that
// make each inclusion a map of twisted sums.
struct Quasiflag {
    int n = 2;
    std::vector<PolyMatrix> M;
    std::vector<PolyMatrix> A;
};

// Shape, witness identities, witness degree bounds and generic injectivity
// (some maximal minor nonzero); returns the degree profile.
GammaVector validate(const Quasiflag& q);

// Minor vector of the p columns: entry per p-subset of rows, lex order.
std::vector<Poly> wedge_vector(const PolyMatrix& m);

Quasiflag fixed_point_quasiflag(const DefectMatrix& d);

struct EngineConfig {
    int start_level = 0;  // 0: use |gamma| + n + 2
    long cap = 0;         // 0: 8 * start; QML_TRUNCATION_CAP overrides
};

EngineConfig engine_config(const Quasiflag& q);

// Exact bases of two consecutive graded pieces of the column module, with
// the Euler-characteristic stabilization certificate.
struct TruncatedSheaf {
    int level = 0;
    long rank = 0;
    long degree = 0;  // sum of column bounds
    int rows = 0;
    Subspace piece;      // inside P_{<=level}^rows
    Subspace piece_next; // inside P_{<=level+1}^rows
    bool certified = false;

    // The two multiplication operators between the pieces, in their echelon
    // bases: by the coordinate vanishing at 0 (degree shift) and by the one
    // vanishing at infinity (plain inclusion after dehomogenizing).
    Mat mult_vanishing_at_zero() const;
    Mat mult_vanishing_at_infinity() const;
};

TruncatedSheaf truncate(const PolyMatrix& m, int level);
// Doubles the level until the certificate holds; throws "truncation cap
// exceeded" past the cap.
TruncatedSheaf truncate_certified(const PolyMatrix& m, const EngineConfig& cfg);

// Tangent space of the quasiflag chain computed on truncated pieces: each
// component hom is stored through its values on the generator chain
// z^s g_j, subject to commutation with both multiplication operators and to
// the quiver squares at every chain index.
struct EngineModel {
    Quasiflag q;
    GammaVector gamma;
    int n = 2;
    int level = 0;

    struct LevelData {
        TruncatedSheaf sheaf;
        std::vector<long> quot_coords;       // non-pivot coords at `level`
        std::vector<long> quot_coords_next;  // at `level`+1
        long quot_dim = 0, quot_dim_next = 0;
        // chain layout: generator j has level - a_j + 1 value slots
        std::vector<long> chain_offset;  // per generator, in value-slot units
        long values = 0;                 // total value slots
    };
    std::vector<LevelData> lv;  // per p

    long dim_T = 0;
    // columns: tangent basis in the concatenated value coordinates
    // (p, j, s, quot coordinate)
    Mat tangent_basis;
    std::vector<long> value_offset;  // per p, in coordinates
    long value_dim = 0;

    std::vector<Rational> value_slice(const Mat& basis, long col, int p, int j, int s) const;
};

EngineModel quiver_tangent_general(const Quasiflag& q, const EngineConfig& cfg);

// First-order motion of the wedge of the generator columns when generator j
// moves by reps[j] (one polynomial vector per column).
std::vector<Poly> wedge_motion(const PolyMatrix& mat, const std::vector<std::vector<Poly>>& reps);

// Canonical representatives of the generator responses of one tangent basis
// vector at level p.
std::vector<std::vector<Poly>> tangent_generator_reps(const EngineModel& m, long col, int p);

// Coordinates of a wedge motion reduced modulo the pieces of the wedge line,
// at level bound_total + level.
std::vector<Rational> reduce_wedge_motion(const PolyMatrix& mat, int level,
                                          const std::vector<Poly>& motion);

// Exact nullity of the wedge-map differential, computed by first-order
// deformation of the generator wedges reduced modulo the wedge-line pieces.
long dpi_kernel_general(const Quasiflag& q, const EngineConfig& cfg);
long dpi_kernel_general(const EngineModel& m);

bool fiber_membership(const Quasiflag& q, const GammaVector& gamma);

// Ambient-coordinate differential at a simple-fiber point (requires fiber
// membership), for coordinatewise comparison with the fixed-point fast path.
Mat engine_dpi_ambient(const EngineModel& m);

struct OracleComparison {
    long fast_dim_T = 0, engine_dim_T = 0;
    long fast_kernel = 0, engine_kernel = 0;
    bool dims_equal = false;
    bool kernels_equal = false;
    bool tangent_spaces_equal = false;  // as subspaces in block coordinates
    bool dpi_matrices_equal = false;    // blockwise map agrees with the wedge oracle
    bool pass = false;
};

OracleComparison compare_with_fast_path(const FixedPointModel& fast, const EngineConfig& cfg);

struct RemarkReport {
    std::vector<std::string> cell_defects;
    std::vector<long> cell_dims;
    std::vector<long> cell_kernels;
    std::map<long, long> family_kernels;  // t -> kernel
    std::map<long, bool> family_in_fiber;
    bool cells_ok = false;        // dims are exactly {0,1,2}
    bool vertex_kernel_ok = false;  // kernel 3 at the singular fixed point
    bool offvertex_kernel_ok = false;  // kernel 2 at t != 0
    bool semicontinuity_ok = false;
    bool pass = false;
};

RemarkReport remark_scenario();

// Seeded search for a chain of subbundles with the given profile; exact
// subbundle verification via gcds of homogenized minors.
std::optional<Quasiflag> random_genuine_flag(const GammaVector& gamma, std::uint64_t seed);
bool is_subbundle_chain(const Quasiflag& q);

// Structured text format: JSON with polynomial-string entries.
Quasiflag parse_quasiflag(const std::string& json_text);
std::string quasiflag_to_json(const Quasiflag& q);

}  // namespace qml
