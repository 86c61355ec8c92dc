// Acceptance gate: one exact check per criterion, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "qml/ambient.hpp"
#include "qml/fixed_point.hpp"
#include "qml/graded_engine.hpp"
#include "qml/report.hpp"

using namespace qml;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::vector<GammaVector> gammas_up_to(int n, long max_total) {
    return gamma_range(n, max_total);
}

template <typename F>
void for_defects(int n_max, long gamma_max, F&& f) {
    for (int n = 2; n <= n_max; ++n)
        for (const auto& g : gammas_up_to(n, gamma_max))
            for (const auto& d : enumerate_defects(g))
                f(g, d);
}

// 1. Kostant partitions and defect matrices are in exact bijection.
void criterion_bijection() {
    bool pass = true;
    std::ostringstream detail;
    long checked = 0;
    for (int n = 2; n <= 4 && pass; ++n)
        for (long total = 0; total <= 6 && pass; ++total)
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
                 }()) {
                auto ks = enumerate_kostant(g);
                auto ds = enumerate_defects(g);
                if (ks.size() != ds.size()) {
                    pass = false;
                    detail << "count mismatch at gamma=" << g.str();
                    break;
                }
                for (const auto& k : ks)
                    if (!(defect_to_kappa(kappa_to_defect(k)).kappa.v == k.kappa.v)) {
                        pass = false;
                        detail << "roundtrip failure at gamma=" << g.str();
                        break;
                    }
                for (const auto& d : ds)
                    if (!(kappa_to_defect(defect_to_kappa(d)).d.v == d.d.v)) {
                        pass = false;
                        detail << "inverse roundtrip failure at defect=" << d.str();
                        break;
                    }
                checked += static_cast<long>(ks.size());
            }
    if (pass)
        detail << checked << " partitions over n<=4, |gamma|<=6";
    report(1, "combinatorial bijection", pass, detail.str());
}

struct SweepCache {
    std::vector<std::pair<GammaVector, DefectMatrix>> items;
    std::vector<FixedPointModel> models;
};

SweepCache build_models(int n_max, long gamma_max) {
    SweepCache c;
    for_defects(n_max, gamma_max, [&](const GammaVector& g, const DefectMatrix& d) {
        c.items.emplace_back(g, d);
    });
    c.models.reserve(c.items.size());
    for (const auto& [g, d] : c.items)
        c.models.emplace_back(d);
    return c;
}

// 2. dim Hom = 2|gamma| + flag_dim at every fixed point.
void criterion_tangent_dims(const SweepCache& c) {
    bool pass = true;
    std::ostringstream detail;
    for (size_t i = 0; i < c.models.size(); ++i) {
        const auto& [g, d] = c.items[i];
        long expect = 2 * g.total() + g.n * (g.n - 1) / 2;
        if (c.models[i].dim_T != expect) {
            pass = false;
            detail << "dim " << c.models[i].dim_T << " != " << expect << " at " << d.str();
            break;
        }
    }
    if (pass)
        detail << c.models.size() << " fixed points over n<=4, |gamma|<=5";
    report(2, "tangent dimension identity", pass, detail.str());
}

// 3. kernel < sum of diagonal defects + |gamma| - 1, strictly, everywhere.
void criterion_key_prop(const SweepCache& c) {
    bool pass = true;
    std::ostringstream detail;
    long min_margin = -1;
    for (size_t i = 0; i < c.models.size(); ++i) {
        KeyPropReport r = verify_key_prop(c.models[i]);
        if (!r.pass) {
            pass = false;
            detail << "kernel " << r.kernel << " !< " << r.bound << " at "
                   << c.items[i].second.str();
            break;
        }
        if (min_margin < 0 || r.margin < min_margin)
            min_margin = r.margin;
    }
    if (pass)
        detail << c.models.size() << " defects, smallest margin " << min_margin;
    report(3, "kernel bound", pass, detail.str());
}

// 4. dim N matches the formula and the differential is injective on N, for
// the canonical class and every feasible monomial class.
void criterion_subspace(const SweepCache& c) {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failing;
    for (size_t i = 0; i < c.models.size(); ++i) {
        SubspaceReport r = verify_N(c.models[i]);
        if (!r.pass) {
            pass = false;
            std::ostringstream os;
            os << c.items[i].second.str() << " (dim " << r.dim_N << "/" << r.dim_N_formula;
            for (const auto& o : r.obstructed)
                os << " " << o;
            os << ")";
            failing.push_back(os.str());
        }
    }
    if (pass) {
        detail << c.models.size() << " certificates with all monomial classes";
    } else {
        detail << failing.size() << " defect(s) without a full certificate:";
        for (const auto& f : failing)
            detail << " [" << f << "]";
    }
    report(4, "subspace certificate", pass, detail.str());
}

// 5. The singular-quadric example: cells 0/1/2, kernels 3 and 2,
// semicontinuity along the family.
void criterion_remark() {
    RemarkReport r = remark_scenario();
    std::ostringstream detail;
    detail << "cells";
    for (size_t i = 0; i < r.cell_defects.size(); ++i)
        detail << " " << r.cell_defects[i] << ":dim" << r.cell_dims[i] << ":ker"
               << r.cell_kernels[i];
    detail << "; family";
    for (const auto& [t, k] : r.family_kernels)
        detail << " t=" << t << ":ker" << k;
    report(5, "singular quadric fiber", r.pass, detail.str());
}

// 6. The block closed form of the differential agrees with the graded
// engine at every fixed point with n <= 3, |gamma| <= 4.
void criterion_oracle() {
    bool pass = true;
    std::ostringstream detail;
    long count = 0;
    EngineConfig cfg;
    for_defects(3, 4, [&](const GammaVector&, const DefectMatrix& d) {
        if (!pass)
            return;
        FixedPointModel fast(d);
        OracleComparison cmp = compare_with_fast_path(fast, cfg);
        if (!cmp.pass) {
            pass = false;
            detail << "disagreement at " << d.str() << " (fast ker " << cmp.fast_kernel
                   << ", engine ker " << cmp.engine_kernel << ")";
            return;
        }
        ++count;
    });
    if (pass)
        detail << count << " fixed points, tangent spaces and differentials identical";
    report(6, "oracle equivalence", pass, detail.str());
}

// 7. The annihilator of the image meets the conormal fiber properly, with a
// witness covector, at every fixed point in range.
void criterion_microlocal(const SweepCache& c) {
    bool pass = true;
    std::ostringstream detail;
    for (size_t i = 0; i < c.models.size(); ++i) {
        const auto& [g, d] = c.items[i];
        MicrolocalReport r = microlocal_check(g, c.models[i].dpi_tangent, 1);
        if (!r.pass || !r.witness_found) {
            pass = false;
            detail << "at " << d.str() << ": intersection " << r.dim_intersection << " of fiber "
                   << r.dim_fiber << (r.witness_found ? "" : ", no witness");
            break;
        }
    }
    if (pass)
        detail << c.models.size() << " proper intersections with witnesses";
    report(7, "microlocal emptiness at fixed points", pass, detail.str());
}

// 8. max piece dimension = |gamma| - min number of parts <= |gamma| - 1.
void criterion_smallness() {
    bool pass = true;
    std::ostringstream detail;
    long checked = 0;
    for (int n = 2; n <= 4 && pass; ++n)
        for (const auto& g : gammas_up_to(n, 6)) {
            long max_piece = -1, min_parts = g.total() + 1;
            for (const auto& d : enumerate_defects(g)) {
                max_piece = std::max(max_piece, piece_dim(d));
                min_parts = std::min(min_parts, defect_to_kappa(d).parts());
            }
            if (max_piece != g.total() - min_parts || max_piece > g.total() - 1) {
                pass = false;
                detail << "at gamma=" << g.str();
                break;
            }
            ++checked;
        }
    if (pass)
        detail << checked << " degree vectors over n<=4, |gamma|<=6";
    report(8, "smallness shadow", pass, detail.str());
}

// 9. Seeded chains of subbundles have the full tangent dimension and an
// injective differential.
void criterion_genuine() {
    bool pass = true;
    std::ostringstream detail;
    long flags_checked = 0;
    EngineConfig cfg;
    for (int n = 2; n <= 3 && pass; ++n)
        for (const auto& g : gammas_up_to(n, 3)) {
            int found = 0;
            std::uint64_t seed = 0;
            while (found < 3 && seed < 1000) {
                auto flag = random_genuine_flag(g, ++seed);
                if (!flag)
                    continue;
                ++found;
                EngineModel m = quiver_tangent_general(*flag, cfg);
                long expect = 2 * g.total() + g.n * (g.n - 1) / 2;
                if (m.dim_T != expect || dpi_kernel_general(m) != 0) {
                    pass = false;
                    detail << "failure at gamma=" << g.str() << " seed=" << seed;
                    break;
                }
                ++flags_checked;
            }
            if (found < 3 && pass) {
                pass = false;
                detail << "could not find 3 subbundle chains at gamma=" << g.str();
            }
            if (!pass)
                break;
        }
    if (pass)
        detail << flags_checked << " seeded subbundle chains";
    report(9, "genuine-map sanity", pass, detail.str());
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    try {
        criterion_bijection();
        SweepCache cache = build_models(4, 5);
        criterion_tangent_dims(cache);
        criterion_key_prop(cache);
        criterion_subspace(cache);
        criterion_remark();
        criterion_oracle();
        criterion_microlocal(cache);
        criterion_smallness();
        criterion_genuine();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }
    auto t1 = std::chrono::steady_clock::now();
    std::printf("%d criterion failure(s), %lld ms total\n", failures,
                static_cast<long long>(
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()));
    return failures == 0 ? 0 : 2;
}
