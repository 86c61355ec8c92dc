#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qml/combinatorics.hpp"
#include "qml/graded_engine.hpp"

namespace qml {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepOptions {
    int n_max = 3;
    long gamma_max = 4;
    int oracle_n_max = 3;      // cross-check range for the graded engine
    long oracle_gamma_max = 4;
    bool oracle_everywhere = false;
    std::uint64_t seed = 1;
    long witness_max_draws = 64;
    int jobs = 1;
    int truncation_start = 0;  // 0 = automatic
    long truncation_cap = 0;   // 0 = automatic
};

struct SweepRecord {
    int n = 0;
    std::string gamma;
    std::string defect;
    long dim_T = 0;
    long kernel_dim = 0;
    long key_prop_bound = 0;
    long margin = 0;
    long dim_N = 0;
    bool nu_injective = false;
    bool reduction_chain_pass = false;
    bool microlocal_pass = false;
    long piece_dim = 0;
    bool oracle_checked = false;
    long micros = 0;  // informational, emitted in the sidecar only

    // extras for the human-readable report; not part of the record schema
    long identity_lhs = 0, identity_rhs = 0;
    long dim_N_formula = 0;
    std::vector<std::string> nu_obstructions;

    bool pass() const {
        return margin > 0 && nu_injective && reduction_chain_pass && microlocal_pass;
    }
};

struct Violation {
    int n = 0;
    std::string gamma, defect, check;
};

struct ReportDocument {
    SweepOptions config;
    std::vector<SweepRecord> records;
    long expected_records = 0;  // independent count through Kostant partitions
    std::optional<Violation> first_violation;
    long total_micros = 0;
};

// Thrown when a cross-check that must never fail (oracle equivalence,
// dimension identities) disagrees; carries the offending index data.
struct MathViolation : error {
    using error::error;
};

ReportDocument sweep(const SweepOptions& opt);

enum class Format { Json, Csv, Human };
Format parse_format(const std::string& s);

std::string emit(const ReportDocument& doc, Format f);
std::string emit(const RemarkReport& rep, Format f);
std::string emit(const MicrolocalReport& rep, const GammaVector& gamma,
                 const std::string& defect, Format f);

// 0 when every record passes every check, 2 otherwise.
int exit_code(const ReportDocument& doc);

// All degree vectors with 0 < |gamma| <= max_total, lexicographically.
std::vector<GammaVector> gamma_range(int n, long max_total);

}  // namespace qml
