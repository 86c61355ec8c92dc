#include "qml/report.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qml/ambient.hpp"
#include "qml/fixed_point.hpp"

namespace qml {

std::vector<GammaVector> gamma_range(int n, long max_total) {
    std::vector<GammaVector> out;
    std::vector<long> cur(static_cast<size_t>(n - 1), 0);
    std::function<void(int, long)> rec = [&](int i, long used) {
        if (i == n - 1) {
            GammaVector g(n, cur);
            if (!g.is_zero())
                out.push_back(std::move(g));
            return;
        }
        for (long v = 0; used + v <= max_total; ++v) {
            cur[static_cast<size_t>(i)] = v;
            rec(i + 1, used + v);
        }
        cur[static_cast<size_t>(i)] = 0;
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

SweepRecord run_item(const SweepOptions& opt, const DefectMatrix& d) {
    auto t0 = std::chrono::steady_clock::now();
    SweepRecord rec;
    GammaVector g = d.gamma();
    rec.n = d.n();
    rec.gamma = g.str();
    rec.defect = d.str();
    rec.piece_dim = piece_dim(d);

    FixedPointModel model(d);
    rec.dim_T = model.dim_T;
    rec.kernel_dim = model.kernel;
    KeyPropReport kp = verify_key_prop(model);
    rec.key_prop_bound = kp.bound;
    rec.margin = kp.margin;

    SubspaceReport ns = verify_N(model);
    rec.dim_N = ns.dim_N;
    rec.dim_N_formula = ns.dim_N_formula;
    rec.nu_injective = ns.pass;
    rec.nu_obstructions = ns.obstructed;

    rec.reduction_chain_pass = verify_reduction_chain(model).pass;
    rec.microlocal_pass =
        microlocal_check(g, model.dpi_tangent, opt.seed, opt.witness_max_draws).pass;

    // Both sides of the expected-dimension identity for the certificate
    // subspace; recorded, never asserted.
    {
        long diag = 0, total = g.total();
        for (int p = 1; p <= d.n() - 1; ++p)
            diag += d.d.at(p, p);
        DimensionTable dt = dimension_table(g);
        rec.identity_lhs = 2 * total + dt.flag_dim - diag - total + 1;
        rec.identity_rhs = ns.dim_N_formula;
    }

    bool in_oracle_range = opt.oracle_everywhere ||
                           (rec.n <= opt.oracle_n_max && g.total() <= opt.oracle_gamma_max);
    if (in_oracle_range) {
        EngineConfig cfg;
        cfg.start_level = opt.truncation_start;
        cfg.cap = opt.truncation_cap;
        OracleComparison cmp = compare_with_fast_path(model, cfg);
        if (!cmp.pass) {
            std::ostringstream os;
            os << "oracle disagreement at n=" << rec.n << " gamma=" << rec.gamma
               << " defect=" << rec.defect << " (fast kernel " << cmp.fast_kernel
               << ", engine kernel " << cmp.engine_kernel << ", dims " << cmp.fast_dim_T << "/"
               << cmp.engine_dim_T << ")";
            throw MathViolation(os.str());
        }
        rec.oracle_checked = true;
    }

    auto t1 = std::chrono::steady_clock::now();
    rec.micros =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
    return rec;
}

}  // namespace

ReportDocument sweep(const SweepOptions& opt) {
    ReportDocument doc;
    doc.config = opt;

    std::vector<DefectMatrix> items;
    for (int n = 2; n <= opt.n_max; ++n)
        for (const auto& g : gamma_range(n, opt.gamma_max)) {
            auto ds = enumerate_defects(g);
            items.insert(items.end(), ds.begin(), ds.end());
            doc.expected_records += static_cast<long>(enumerate_kostant(g).size());
        }

    doc.records.resize(items.size());
    std::atomic<size_t> next{0};
    std::vector<std::string> errors(items.size());
    int jobs = std::max(1, opt.jobs);
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= items.size())
                return;
            try {
                doc.records[i] = run_item(opt, items[i]);
            } catch (const std::exception& e) {
                errors[i] = "at n=" + std::to_string(items[i].n()) +
                            " gamma=" + items[i].gamma().str() + " defect=" + items[i].str() +
                            ": " + e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (size_t i = 0; i < items.size(); ++i)
        if (!errors[i].empty())
            throw MathViolation(errors[i]);

    for (const auto& r : doc.records) {
        doc.total_micros += r.micros;
        if (!r.pass() && !doc.first_violation) {
            Violation v;
            v.n = r.n;
            v.gamma = r.gamma;
            v.defect = r.defect;
            if (r.margin <= 0)
                v.check = "kernel_bound";
            else if (!r.nu_injective)
                v.check = "subspace_certificate";
            else if (!r.reduction_chain_pass)
                v.check = "reduction_chain";
            else
                v.check = "microlocal";
            doc.first_violation = v;
        }
    }
    return doc;
}

Format parse_format(const std::string& s) {
    if (s == "json")
        return Format::Json;
    if (s == "csv")
        return Format::Csv;
    if (s == "human")
        return Format::Human;
    throw error("unknown format: " + s);
}

namespace {

nlohmann::ordered_json record_json(const SweepRecord& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["gamma"] = r.gamma;
    j["defect"] = r.defect;
    j["dim_T"] = r.dim_T;
    j["kernel_dim"] = r.kernel_dim;
    j["key_prop_bound"] = r.key_prop_bound;
    j["margin"] = r.margin;
    j["dim_N"] = r.dim_N;
    j["nu_injective"] = r.nu_injective;
    j["reduction_chain_pass"] = r.reduction_chain_pass;
    j["microlocal_pass"] = r.microlocal_pass;
    j["piece_dim"] = r.piece_dim;
    j["oracle_checked"] = r.oracle_checked;
    return j;
}

std::string csv_quote(const std::string& s) {
    return "\"" + s + "\"";
}

}  // namespace

std::string emit(const ReportDocument& doc, Format f) {
    long pass = 0, fail = 0;
    for (const auto& r : doc.records)
        (r.pass() ? pass : fail) += 1;

    if (f == Format::Json) {
        nlohmann::ordered_json j;
        j["tool_version"] = kToolVersion;
        j["config"] = {{"n_max", doc.config.n_max},
                       {"gamma_max", doc.config.gamma_max},
                       {"oracle_n_max", doc.config.oracle_n_max},
                       {"oracle_gamma_max", doc.config.oracle_gamma_max},
                       {"oracle_everywhere", doc.config.oracle_everywhere},
                       {"seed", doc.config.seed},
                       {"witness_max_draws", doc.config.witness_max_draws},
                       {"truncation_start", doc.config.truncation_start},
                       {"truncation_cap", doc.config.truncation_cap}};
        j["records"] = nlohmann::ordered_json::array();
        for (const auto& r : doc.records)
            j["records"].push_back(record_json(r));
        j["summary"] = {{"records", static_cast<long>(doc.records.size())},
                        {"expected_records", doc.expected_records},
                        {"pass", pass},
                        {"fail", fail}};
        if (doc.first_violation) {
            j["summary"]["first_violation"] = {{"n", doc.first_violation->n},
                                               {"gamma", doc.first_violation->gamma},
                                               {"defect", doc.first_violation->defect},
                                               {"check", doc.first_violation->check}};
        } else {
            j["summary"]["first_violation"] = nullptr;
        }
        // informational sidecar, excluded from determinism comparisons
        nlohmann::ordered_json timings;
        timings["unit"] = "microseconds";
        timings["total"] = doc.total_micros;
        timings["records"] = nlohmann::ordered_json::array();
        for (const auto& r : doc.records)
            timings["records"].push_back(r.micros);
        j["timings"] = timings;
        return j.dump(2) + "\n";
    }

    if (f == Format::Csv) {
        std::ostringstream os;
        os << "n,gamma,defect,dim_T,kernel_dim,key_prop_bound,margin,dim_N,nu_injective,"
              "reduction_chain_pass,microlocal_pass,piece_dim,oracle_checked\n";
        for (const auto& r : doc.records)
            os << r.n << "," << csv_quote(r.gamma) << "," << csv_quote(r.defect) << "," << r.dim_T
               << "," << r.kernel_dim << "," << r.key_prop_bound << "," << r.margin << ","
               << r.dim_N << "," << (r.nu_injective ? 1 : 0) << ","
               << (r.reduction_chain_pass ? 1 : 0) << "," << (r.microlocal_pass ? 1 : 0) << ","
               << r.piece_dim << "," << (r.oracle_checked ? 1 : 0) << "\n";
        return os.str();
    }

    std::ostringstream os;
    if (doc.records.empty())
        os << "no gamma > 0 in range\n";
    for (const auto& r : doc.records) {
        DimensionTable dt = dimension_table(parse_gamma(r.n, r.gamma));
        os << "[n=" << r.n << " gamma=" << r.gamma << " defect=" << r.defect << "]";
        os << " dimT=" << r.dim_T << " ker=" << r.kernel_dim << " < " << r.key_prop_bound
           << (r.margin > 0 ? " ok" : " VIOLATION") << " (margin " << r.margin << ")";
        os << " | chain " << dt.quasiflag_dim << "-" << r.kernel_dim << "="
           << (dt.quasiflag_dim - r.kernel_dim) << " > " << dt.flag_dim << "+1+" << r.piece_dim << "="
           << (dt.flag_dim + 1 + r.piece_dim) << (r.reduction_chain_pass ? " ok" : " VIOLATION");
        os << " | N dim=" << r.dim_N << " (formula " << r.dim_N_formula << ")"
           << (r.nu_injective ? " ok" : " VIOLATION");
        if (!r.nu_obstructions.empty()) {
            os << " obstructed:";
            for (const auto& o : r.nu_obstructions)
                os << " " << o;
        }
        os << " | micro " << (r.microlocal_pass ? "ok" : "VIOLATION");
        os << " | identity lhs=" << r.identity_lhs << " rhs=" << r.identity_rhs;
        os << " | piece=" << r.piece_dim;
        if (r.oracle_checked)
            os << " | oracle ok";
        os << "\n";
    }
    os << "summary: " << doc.records.size() << " records (expected " << doc.expected_records
       << "), " << pass << " pass, " << fail << " fail\n";
    if (doc.first_violation)
        os << "first violation: n=" << doc.first_violation->n
           << " gamma=" << doc.first_violation->gamma
           << " defect=" << doc.first_violation->defect << " check=" << doc.first_violation->check
           << "\n";
    os << "-- timings (informational) --\n";
    os << "total " << doc.total_micros << " us\n";
    return os.str();
}

std::string emit(const RemarkReport& rep, Format f) {
    if (f == Format::Json) {
        nlohmann::ordered_json j;
        j["tool_version"] = kToolVersion;
        j["cells"] = nlohmann::ordered_json::array();
        for (size_t i = 0; i < rep.cell_defects.size(); ++i)
            j["cells"].push_back({{"defect", rep.cell_defects[i]},
                                  {"piece_dim", rep.cell_dims[i]},
                                  {"kernel_dim", rep.cell_kernels[i]}});
        j["family"] = nlohmann::ordered_json::array();
        for (const auto& [t, k] : rep.family_kernels)
            j["family"].push_back({{"t", t},
                                   {"kernel_dim", k},
                                   {"in_fiber", rep.family_in_fiber.at(t)}});
        j["checks"] = {{"cells_ok", rep.cells_ok},
                       {"vertex_kernel_ok", rep.vertex_kernel_ok},
                       {"offvertex_kernel_ok", rep.offvertex_kernel_ok},
                       {"semicontinuity_ok", rep.semicontinuity_ok},
                       {"pass", rep.pass}};
        return j.dump(2) + "\n";
    }
    if (f == Format::Csv) {
        std::ostringstream os;
        os << "kind,key,piece_dim,kernel_dim,in_fiber\n";
        for (size_t i = 0; i < rep.cell_defects.size(); ++i)
            os << "cell," << csv_quote(rep.cell_defects[i]) << "," << rep.cell_dims[i] << ","
               << rep.cell_kernels[i] << ",\n";
        for (const auto& [t, k] : rep.family_kernels)
            os << "family,t=" << t << ",," << k << "," << (rep.family_in_fiber.at(t) ? 1 : 0)
               << "\n";
        return os.str();
    }
    std::ostringstream os;
    os << "cells of the simple fiber for n=3, gamma=2,2:\n";
    for (size_t i = 0; i < rep.cell_defects.size(); ++i)
        os << "  defect " << rep.cell_defects[i] << ": cell dim " << rep.cell_dims[i]
           << ", kernel " << rep.cell_kernels[i] << "\n";
    os << "family kernels:";
    for (const auto& [t, k] : rep.family_kernels)
        os << " t=" << t << " -> " << k << (rep.family_in_fiber.at(t) ? " (in fiber)" : " (NOT in fiber)");
    os << "\nchecks: cells " << (rep.cells_ok ? "ok" : "FAIL") << ", vertex kernel "
       << (rep.vertex_kernel_ok ? "ok" : "FAIL") << ", off-vertex kernel "
       << (rep.offvertex_kernel_ok ? "ok" : "FAIL") << ", semicontinuity "
       << (rep.semicontinuity_ok ? "ok" : "FAIL") << "\n";
    os << (rep.pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

std::string emit(const MicrolocalReport& rep, const GammaVector& gamma,
                 const std::string& defect, Format f) {
    if (f == Format::Json) {
        nlohmann::ordered_json j;
        j["tool_version"] = kToolVersion;
        j["gamma"] = gamma.str();
        j["defect"] = defect;
        j["ambient_dim"] = rep.ambient_dim;
        j["rank_dpi"] = rep.rank_dpi;
        j["dim_kstar"] = rep.dim_kstar;
        j["dim_fiber"] = rep.dim_fiber;
        j["dim_intersection"] = rep.dim_intersection;
        j["pass"] = rep.pass;
        j["witness_found"] = rep.witness_found;
        j["draws_used"] = rep.draws_used;
        nlohmann::ordered_json w = nlohmann::ordered_json::array();
        for (const auto& x : rep.witness)
            w.push_back(to_string(x));
        j["witness"] = w;
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    if (f == Format::Csv) {
        os << "gamma,defect,ambient_dim,rank_dpi,dim_kstar,dim_fiber,dim_intersection,pass,"
              "witness_found\n";
        os << csv_quote(gamma.str()) << "," << csv_quote(defect) << "," << rep.ambient_dim << ","
           << rep.rank_dpi << "," << rep.dim_kstar << "," << rep.dim_fiber << ","
           << rep.dim_intersection << "," << (rep.pass ? 1 : 0) << ","
           << (rep.witness_found ? 1 : 0) << "\n";
        return os.str();
    }
    os << "microlocal check at gamma=" << gamma.str() << " defect=" << defect << ":\n";
    os << "  ambient " << rep.ambient_dim << ", rank " << rep.rank_dpi << ", kstar "
       << rep.dim_kstar << ", fiber " << rep.dim_fiber << ", intersection "
       << rep.dim_intersection << " -> " << (rep.pass ? "proper (ok)" : "NOT proper") << "\n";
    if (rep.witness_found) {
        os << "  witness covector (" << rep.draws_used << " draw(s)):";
        for (const auto& x : rep.witness)
            os << " " << to_string(x);
        os << "\n";
    }
    return os.str();
}

int exit_code(const ReportDocument& doc) {
    for (const auto& r : doc.records)
        if (!r.pass())
            return 2;
    return 0;
}

}  // namespace qml
