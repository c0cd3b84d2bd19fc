// Command-line front end: reads a JSON config, runs the analysis pipeline
// and emits the JSON report / CSV bundle.
//
// Exit codes: 0 success, 2 validation error, 3 internal inconsistency.
#include "sis/analysis.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void apply_grid_flag(sis::AnalysisConfig& config, const std::string& flag) {
    const auto comma = flag.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("--grid expects M,K (e.g. --grid 256,16)");
    }
    try {
        config.grid_m = std::stoi(flag.substr(0, comma));
        config.grid_k = std::stoi(flag.substr(comma + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("--grid expects two integers M,K");
    }
}

void print_summary(std::ostream& out, const sis::InvarianceReport& report) {
    const auto& config = report.config;
    out << "generators: " << config.generators.size() << "  grid: M=" << config.grid_m
        << " K=" << config.grid_k << "  n_max=" << config.n_max << "\n";
    if (report.order) {
        if (report.order->ti_candidate) {
            out << "invariance order: >= " << report.order->n_max
                << (report.order->ti_certified
                        ? " (translation-invariant: coordinate-subspace criterion holds)"
                        : " (translation-invariance not certified)")
                << "\n";
        } else {
            out << "invariance order: " << report.order->declared_order << "\n";
        }
        for (const auto& per : report.per_n) {
            out << "  n=" << per.rank_verdict.n << ": "
                << (per.rank_verdict.invariant ? "invariant" : "not invariant");
            if (per.oracle_verdict) {
                out << "  (oracle residual " << per.oracle_verdict->max_residual << ")";
            }
            out << "\n";
        }
    }
    out << "translation-invariance check: " << (report.ti ? "true" : "false") << "\n";
    if (report.bounds) {
        out << "frame bounds: A=" << report.bounds->lower << " B=" << report.bounds->upper
            << (report.parseval ? " (Parseval)" : "") << "\n";
    }
    for (const auto& z : report.zero_set_checks) {
        out << "zero-set bound n=" << z.n << ": bound=" << z.bound
            << " satisfied=" << (z.all_satisfied ? "yes" : "no") << "\n";
    }
    if (!report.warnings.empty()) {
        out << "warnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << "\n";
    }
}

bool internally_inconsistent(const sis::InvarianceReport& report) {
    if (!report.oracle_agreement) return true;
    if (report.order && !report.order->divisor_consistent) return true;
    return !sis::validate_report(report).empty();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extra translation invariance of finitely generated shift-invariant spaces"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "run the analysis pipeline on a JSON config");
    std::string config_path;
    std::string grid_flag;
    std::string report_path;
    std::string csv_dir;
    int n_max = -1;
    double rel_tol = -1.0;
    double oracle_tol = -1.0;
    bool no_oracle = false;
    analyze->add_option("config", config_path, "JSON configuration file")->required();
    analyze->add_option("--n-max", n_max, "largest modulus to test");
    analyze->add_option("--grid", grid_flag, "grid as M,K");
    analyze->add_option("--tol", rel_tol, "relative rank tolerance");
    analyze->add_option("--oracle-tol", oracle_tol, "membership residual tolerance");
    analyze->add_option("--report", report_path, "write the JSON report to this path");
    analyze->add_option("--csv-dir", csv_dir, "write the CSV bundle into this directory");
    analyze->add_flag("--no-oracle", no_oracle, "skip the membership cross-check");

    CLI11_PARSE(app, argc, argv);

    try {
        sis::AnalysisConfig config = sis::parse_config(read_file(config_path));
        if (n_max > 0) config.n_max = n_max;
        if (!grid_flag.empty()) apply_grid_flag(config, grid_flag);
        if (rel_tol > 0.0) config.rel_tol = rel_tol;
        if (oracle_tol > 0.0) config.oracle_tol = oracle_tol;
        if (!report_path.empty()) config.outputs.report_path = report_path;
        if (!csv_dir.empty()) config.outputs.csv_dir = csv_dir;
        if (no_oracle) config.analyses.oracle = false;
        sis::validate_config(config);

        const sis::InvarianceReport report = sis::run_analysis(config);

        if (!config.outputs.report_path.empty()) {
            sis::emit_report_json(report, config.outputs.report_path);
            print_summary(std::cout, report);
        } else {
            std::cout << sis::report_to_json(report).dump(2) << "\n";
            print_summary(std::cerr, report);
        }
        if (!config.outputs.csv_dir.empty()) {
            sis::emit_report_csv(report, config.outputs.csv_dir);
        }
        return internally_inconsistent(report) ? 3 : 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
