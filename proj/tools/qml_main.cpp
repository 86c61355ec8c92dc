#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qml/ambient.hpp"
#include "qml/fixed_point.hpp"
#include "qml/graded_engine.hpp"
#include "qml/report.hpp"

namespace {

void write_out(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw qml::error("cannot open output file: " + out_path);
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification toolkit for quasiflag chains on the projective line"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "human";
    std::string out_path;
    app.add_option("--format", format, "output format: json|csv|human")->capture_default_str();
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // enum
    auto* cmd_enum = app.add_subcommand("enum", "enumerate combinatorial index data");
    std::string enum_kind;
    int enum_n = 3;
    std::string enum_gamma;
    cmd_enum->add_option("kind", enum_kind, "kostant|defects|partitions")->required();
    cmd_enum->add_option("--n", enum_n, "rank")->required();
    cmd_enum->add_option("--gamma", enum_gamma, "degree vector, e.g. 2,2")->required();

    // fixedpoint
    auto* cmd_fp = app.add_subcommand("fixedpoint", "analyze one torus-fixed quasiflag");
    int fp_n = 3;
    std::string fp_gamma, fp_defect;
    cmd_fp->add_option("--n", fp_n, "rank")->required();
    cmd_fp->add_option("--gamma", fp_gamma, "degree vector (validated against the defect)");
    cmd_fp->add_option("--defect", fp_defect, "defect matrix, e.g. 2;1,1")->required();

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "verify every defect matrix in range");
    qml::SweepOptions opt;
    cmd_sweep->add_option("--n-max", opt.n_max, "largest rank")->capture_default_str();
    cmd_sweep->add_option("--gamma-max", opt.gamma_max, "largest |gamma|")->capture_default_str();
    long oracle_max = -1;
    cmd_sweep->add_option("--oracle-max", oracle_max,
                          "run the graded-engine cross-check up to this |gamma| at every rank "
                          "(default: n<=3, |gamma|<=4)");
    cmd_sweep->add_option("--jobs", opt.jobs, "worker threads")->capture_default_str();
    cmd_sweep->add_option("--seed", opt.seed, "seed for witness sampling")->capture_default_str();

    // remark
    app.add_subcommand("remark", "reproduce the singular-quadric fiber example");

    // microlocal
    auto* cmd_micro = app.add_subcommand("microlocal", "conormal-fiber intersection at one defect");
    int mi_n = 3;
    std::string mi_gamma, mi_defect;
    std::uint64_t mi_seed = 1;
    cmd_micro->add_option("--n", mi_n, "rank")->required();
    cmd_micro->add_option("--gamma", mi_gamma, "degree vector (validated against the defect)");
    cmd_micro->add_option("--defect", mi_defect, "defect matrix")->required();
    cmd_micro->add_option("--seed", mi_seed, "witness sampling seed")->capture_default_str();

    // quasiflag
    auto* cmd_qf = app.add_subcommand("quasiflag", "analyze a quasiflag document");
    std::string qf_file;
    int qf_level = 0;
    cmd_qf->add_option("--file", qf_file, "JSON document with matrices and witnesses")->required();
    cmd_qf->add_option("--level", qf_level, "truncation level override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 0 for --help, 1 for usage errors
    }

    try {
        qml::Format fmt = qml::parse_format(format);
        std::ostringstream os;

        if (cmd_enum->parsed()) {
            qml::GammaVector g = qml::parse_gamma(enum_n, enum_gamma);
            if (enum_kind == "kostant") {
                auto ks = qml::enumerate_kostant(g);
                if (fmt == qml::Format::Json) {
                    os << "[";
                    for (size_t i = 0; i < ks.size(); ++i)
                        os << (i ? "," : "") << "\"" << ks[i].str() << "\"";
                    os << "]\n";
                } else {
                    for (const auto& k : ks)
                        os << k.str() << "\n";
                    os << "count: " << ks.size() << "\n";
                }
            } else if (enum_kind == "defects") {
                auto ds = qml::enumerate_defects(g);
                if (fmt == qml::Format::Json) {
                    os << "[";
                    for (size_t i = 0; i < ds.size(); ++i)
                        os << (i ? "," : "") << "\"" << ds[i].str() << "\"";
                    os << "]\n";
                } else {
                    for (const auto& d : ds)
                        os << d.str() << "  (cell dim " << qml::piece_dim(d) << ")\n";
                    os << "count: " << ds.size() << "\n";
                }
            } else if (enum_kind == "partitions") {
                auto ps = qml::enumerate_partitions(g);
                if (fmt == qml::Format::Json) {
                    os << "[";
                    for (size_t i = 0; i < ps.size(); ++i) {
                        os << (i ? "," : "") << "[";
                        for (size_t j = 0; j < ps[i].parts.size(); ++j)
                            os << (j ? "," : "") << "\"" << ps[i].parts[j].str() << "\"";
                        os << "]";
                    }
                    os << "]\n";
                } else {
                    for (const auto& p : ps)
                        os << p.str() << "\n";
                    os << "count: " << ps.size() << "\n";
                }
            } else {
                std::cerr << "unknown enumeration kind: " << enum_kind << "\n";
                return 1;
            }
            write_out(os.str(), out_path);
            return 0;
        }

        if (cmd_fp->parsed()) {
            qml::DefectMatrix d = qml::parse_defect(fp_n, fp_defect);
            if (!fp_gamma.empty() && !(d.gamma() == qml::parse_gamma(fp_n, fp_gamma)))
                throw qml::error("defect row sums do not match --gamma");
            qml::FixedPointModel m(d);
            qml::KeyPropReport kp = qml::verify_key_prop(m);
            qml::SubspaceReport ns = qml::verify_N(m);
            qml::ReductionChainReport rc = qml::verify_reduction_chain(m);
            if (fmt == qml::Format::Json) {
                os << "{\n  \"defect\": \"" << d.str() << "\",\n  \"gamma\": \"" << m.gamma.str()
                   << "\",\n  \"dim_T\": " << m.dim_T << ",\n  \"rank\": " << m.dpi_rank
                   << ",\n  \"kernel_dim\": " << m.kernel << ",\n  \"key_prop_bound\": " << kp.bound
                   << ",\n  \"margin\": " << kp.margin << ",\n  \"dim_N\": " << ns.dim_N
                   << ",\n  \"dim_N_formula\": " << ns.dim_N_formula
                   << ",\n  \"nu_injective\": " << (ns.pass ? "true" : "false")
                   << ",\n  \"reduction_chain_pass\": " << (rc.pass ? "true" : "false") << "\n}\n";
                write_out(os.str(), out_path);
                return (kp.pass && ns.pass && rc.pass) ? 0 : 2;
            }
            os << "defect " << d.str() << " (gamma " << m.gamma.str() << ")\n";
            os << "dim T = " << m.dim_T << ", rank = " << m.dpi_rank << ", kernel = " << m.kernel
               << "\n";
            os << "kernel bound: " << kp.kernel << " < " << kp.bound
               << (kp.pass ? " ok" : " VIOLATION") << " (margin " << kp.margin << ")\n";
            os << "subspace: dim " << ns.dim_N << " (formula " << ns.dim_N_formula << "), rank "
               << ns.rank_dpi_N << (ns.pass ? " ok" : " VIOLATION") << ", class z^"
               << ns.nu1_exponent << " at p0=" << ns.p0 << "\n";
            if (!ns.obstructed.empty()) {
                os << "  obstructed directions:";
                for (const auto& o : ns.obstructed)
                    os << " " << o;
                os << "\n";
            }
            os << "reduction chain: " << rc.quasiflag_dim << "-" << rc.kernel << " > " << rc.flag_dim
               << "+1+" << rc.piece << (rc.pass ? " ok" : " VIOLATION") << "\n";
            write_out(os.str(), out_path);
            return (kp.pass && ns.pass && rc.pass) ? 0 : 2;
        }

        if (cmd_sweep->parsed()) {
            if (oracle_max >= 0) {
                opt.oracle_n_max = opt.n_max;
                opt.oracle_gamma_max = oracle_max;
            }
            qml::ReportDocument doc = qml::sweep(opt);
            write_out(qml::emit(doc, fmt), out_path);
            return qml::exit_code(doc);
        }

        if (app.get_subcommand("remark")->parsed()) {
            qml::RemarkReport rep = qml::remark_scenario();
            write_out(qml::emit(rep, fmt), out_path);
            return rep.pass ? 0 : 2;
        }

        if (cmd_micro->parsed()) {
            qml::DefectMatrix d = qml::parse_defect(mi_n, mi_defect);
            if (!mi_gamma.empty() && !(d.gamma() == qml::parse_gamma(mi_n, mi_gamma)))
                throw qml::error("defect row sums do not match --gamma");
            qml::FixedPointModel m(d);
            qml::MicrolocalReport rep = qml::microlocal_check(m.gamma, m.dpi_tangent, mi_seed);
            write_out(qml::emit(rep, m.gamma, d.str(), fmt), out_path);
            return rep.pass ? 0 : 2;
        }

        if (cmd_qf->parsed()) {
            std::ifstream f(qf_file);
            if (!f)
                throw qml::error("cannot open " + qf_file);
            std::stringstream buf;
            buf << f.rdbuf();
            qml::Quasiflag q = qml::parse_quasiflag(buf.str());
            qml::GammaVector g = qml::validate(q);
            qml::EngineConfig cfg = qml::engine_config(q);
            if (qf_level > 0)
                cfg.start_level = qf_level;
            qml::EngineModel m = qml::quiver_tangent_general(q, cfg);
            long ker = qml::dpi_kernel_general(m);
            os << "degree profile gamma = " << g.str() << "\n";
            os << "truncation level " << m.level << "\n";
            os << "tangent dim = " << m.dim_T << "\n";
            os << "kernel dim = " << ker << "\n";
            os << "simple fiber member: " << (qml::fiber_membership(q, g) ? "yes" : "no") << "\n";
            write_out(os.str(), out_path);
            return 0;
        }
    } catch (const qml::MathViolation& e) {
        std::cerr << "violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
