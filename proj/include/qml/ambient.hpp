#pragma once

#include <cstdint>
#include <vector>

#include "qml/combinatorics.hpp"
#include "qml/matrix.hpp"

namespace qml {

// Coordinates of the tangent space, at the fully degenerate point, of the
// product of projective spaces of twisted maps into the fundamental
// representations. For each p the distinguished line is z^{c_p} O on the
// wedge label [1..p]; its tangent directions are a torsion class mod z^{c_p}
// on that label plus a polynomial of degree <= c_p on every other label.
struct AmbientLayout {
    int n = 2;
    GammaVector gamma;

    struct Level {
        long torsion_offset = 0;
        long torsion_count = 0;  // c_p
        std::vector<std::vector<int>> labels;  // p-subsets != [1..p], lex order
        long free_offset = 0;
        long coeffs_per_label = 0;  // c_p + 1
    };
    std::vector<Level> levels;  // index p-1
    long dim = 0;

    long torsion_index(int p, long j) const;
    long free_index(int p, long label_idx, long j) const;
    long label_index(int p, const std::vector<int>& s) const;
};

std::vector<std::vector<int>> subsets_of_size(int n, int p);

AmbientLayout ambient_tangent(const GammaVector& gamma);

// Span of the first-order motions of the closed stratum (flag motion plus
// motion of the defect point), as columns; dimension is asserted to be
// flag_dim + 1.
Mat stratum_tangent(const GammaVector& gamma);

// Annihilator of the stratum tangent space in the dual of the ambient
// tangent space, as columns of coordinates on the dual basis.
Mat conormal_fiber(const GammaVector& gamma);

struct MicrolocalReport {
    long ambient_dim = 0;
    long rank_dpi = 0;
    long dim_kstar = 0;        // ambient_dim - rank_dpi
    long dim_fiber = 0;
    long dim_intersection = 0;
    bool pass = false;         // dim_intersection < dim_fiber
    bool witness_found = false;
    long draws_used = 0;
    std::vector<Rational> witness;  // coordinates in the dual basis
};

// dpi_on_tangent maps tangent coordinates into the ambient layout. The
// witness covector lies in the conormal fiber and does not annihilate the
// image of the differential.
MicrolocalReport microlocal_check(const GammaVector& gamma, const Mat& dpi_on_tangent,
                                  std::uint64_t seed, long max_draws = 64);

}  // namespace qml
