#include "sis/analysis.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sis {

namespace {

void check_known_fields(const nlohmann::json& j, const std::string& path,
                        std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw std::invalid_argument(path + "." + key + ": unknown field");
    }
}

int int_field(const nlohmann::json& j, const char* field, int fallback, const std::string& path) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number_integer()) {
        throw std::invalid_argument(path + "." + field + ": must be an integer");
    }
    return j[field].get<int>();
}

double number_field(const nlohmann::json& j, const char* field, double fallback,
                    const std::string& path) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) {
        throw std::invalid_argument(path + "." + field + ": must be a number");
    }
    return j[field].get<double>();
}

bool bool_field(const nlohmann::json& j, const char* field, bool fallback,
                const std::string& path) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_boolean()) {
        throw std::invalid_argument(path + "." + field + ": must be a boolean");
    }
    return j[field].get<bool>();
}

std::string string_field(const nlohmann::json& j, const char* field, const std::string& fallback,
                         const std::string& path) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_string()) {
        throw std::invalid_argument(path + "." + field + ": must be a string");
    }
    return j[field].get<std::string>();
}

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("stage ") + stage + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + stage + ": " + e.what());
    }
}

nlohmann::json verdict_to_json(const InvarianceVerdict& v, const FrequencyGrid& grid) {
    nlohmann::json j;
    j["n"] = v.n;
    j["invariant"] = v.invariant;
    j["worst_omega_index"] = v.worst_index;
    j["worst_omega"] = v.worst_index >= 0 ? grid.omega(v.worst_index) : 0.0;
    if (v.rank_full >= 0) {
        j["rank_full"] = v.rank_full;
        j["rank_cutoff_sum"] = v.rank_cutoff_sum;
        j["subadditive_ok"] = v.subadditive_ok;
    }
    if (v.max_residual >= 0.0) j["max_residual"] = v.max_residual;
    j["tolerance"] = v.tolerance;
    return j;
}

nlohmann::json bounds_to_json(const FrameBounds& b) {
    return {{"A", b.lower},
            {"B", b.upper},
            {"lower_omega_index", b.lower_index},
            {"upper_omega_index", b.upper_index}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void validate_config(const AnalysisConfig& config) {
    if (config.generators.empty()) {
        throw std::invalid_argument("generators: at least one generator required");
    }
    if (config.n_max < 2) throw std::invalid_argument("n_max must be >= 2");
    if (config.grid_m < 2) throw std::invalid_argument("grid.M must be >= 2");
    if (config.grid_k < 1) throw std::invalid_argument("grid.K must be >= 1");
    if (!(config.rel_tol > 0.0 && config.rel_tol < 1.0)) {
        throw std::invalid_argument("rel_tol must lie in (0, 1)");
    }
    if (!(config.oracle_tol > 0.0 && config.oracle_tol < 1.0)) {
        throw std::invalid_argument("oracle_tol must lie in (0, 1)");
    }
}

AnalysisConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: must be a JSON object");
    check_known_fields(j, "config",
                       {"generators", "grid", "n_max", "rel_tol", "oracle_tol", "outputs",
                        "analyses"});

    AnalysisConfig config;
    if (!j.contains("generators") || !j["generators"].is_array()) {
        throw std::invalid_argument("config.generators: must be an array");
    }
    for (std::size_t i = 0; i < j["generators"].size(); ++i) {
        config.generators.push_back(generator_from_json(
            j["generators"][i], "config.generators[" + std::to_string(i) + "]"));
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) throw std::invalid_argument("config.grid: must be an object");
        check_known_fields(g, "config.grid", {"M", "K"});
        config.grid_m = int_field(g, "M", config.grid_m, "config.grid");
        config.grid_k = int_field(g, "K", config.grid_k, "config.grid");
    }
    config.n_max = int_field(j, "n_max", config.n_max, "config");
    config.rel_tol = number_field(j, "rel_tol", config.rel_tol, "config");
    config.oracle_tol = number_field(j, "oracle_tol", config.oracle_tol, "config");
    if (j.contains("outputs")) {
        const auto& o = j["outputs"];
        if (!o.is_object()) throw std::invalid_argument("config.outputs: must be an object");
        check_known_fields(o, "config.outputs", {"report", "csv_dir"});
        config.outputs.report_path = string_field(o, "report", "", "config.outputs");
        config.outputs.csv_dir = string_field(o, "csv_dir", "", "config.outputs");
    }
    if (j.contains("analyses")) {
        const auto& a = j["analyses"];
        if (!a.is_object()) throw std::invalid_argument("config.analyses: must be an object");
        check_known_fields(a, "config.analyses", {"order", "frames", "support_bounds", "oracle"});
        config.analyses.order = bool_field(a, "order", true, "config.analyses");
        config.analyses.frames = bool_field(a, "frames", true, "config.analyses");
        config.analyses.support_bounds = bool_field(a, "support_bounds", true, "config.analyses");
        config.analyses.oracle = bool_field(a, "oracle", true, "config.analyses");
    }
    validate_config(config);
    return config;
}

AnalysisConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const AnalysisConfig& config) {
    nlohmann::json j;
    auto generators = nlohmann::json::array();
    for (const auto& g : config.generators) generators.push_back(generator_to_json(g));
    j["generators"] = generators;
    j["grid"] = {{"M", config.grid_m}, {"K", config.grid_k}};
    j["n_max"] = config.n_max;
    j["rel_tol"] = config.rel_tol;
    j["oracle_tol"] = config.oracle_tol;
    j["outputs"] = {{"report", config.outputs.report_path}, {"csv_dir", config.outputs.csv_dir}};
    j["analyses"] = {{"order", config.analyses.order},
                     {"frames", config.analyses.frames},
                     {"support_bounds", config.analyses.support_bounds},
                     {"oracle", config.analyses.oracle}};
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline

InvarianceReport run_analysis(const AnalysisConfig& config) {
    validate_config(config);
    const FrequencyGrid grid = config.grid();

    InvarianceReport report(config);

    const std::vector<SampledSpectrum> phi = run_stage("evaluate", [&] {
        std::vector<SampledSpectrum> out;
        out.reserve(config.generators.size());
        for (const auto& g : config.generators) out.push_back(evaluate(g, grid));
        return out;
    });

    run_stage("tail-energy", [&] {
        for (const auto& g : config.generators) {
            report.tail_energy.push_back(tail_energy_estimate(g, grid));
        }
        return 0;
    });

    run_stage("gramian", [&] {
        const GramianField field = gramian_field(phi, grid);
        report.dimension = dimension_function(phi, grid, config.rel_tol);
        report.eigenvalue_field.reserve(grid.base_size());
        for (int i = 0; i < grid.base_size(); ++i) {
            report.eigenvalue_field.push_back(hermitian_eigenvalues(field.at(i)));
        }
        return 0;
    });

    report.ti = run_stage("ti-check", [&] { return ti_check(phi, grid, config.rel_tol); });
    report.support =
        run_stage("level-sets", [&] { return rank_level_sets(phi, grid, config.rel_tol); });

    std::vector<int> invariant_moduli;
    if (config.analyses.order) {
        run_stage("invariance-order", [&] {
            std::vector<InvarianceVerdict> verdicts;
            for (int n = 2; n <= config.n_max; ++n) {
                RankSumProfile p = rank_sum_profile(phi, n, grid, config.rel_tol);
                verdicts.push_back(p.verdict);
                report.per_n.push_back({p.verdict, std::move(p.rank_full),
                                        std::move(p.rank_cutoff_sum), std::nullopt, {}});
            }
            report.order =
                assemble_order_result(std::move(verdicts), config.n_max, phi, grid,
                                      config.rel_tol);
            for (const auto& v : report.order->verdicts) {
                if (v.invariant) invariant_moduli.push_back(v.n);
            }
            for (const auto& flag : report.order->flags) report.warnings.push_back(flag);
            return 0;
        });

        if (config.analyses.oracle) {
            run_stage("oracle", [&] {
                for (auto& per : report.per_n) {
                    OracleProfile p = invariance_oracle_profile(phi, per.rank_verdict.n, grid,
                                                                config.oracle_tol);
                    if (p.verdict.invariant != per.rank_verdict.invariant) {
                        report.oracle_agreement = false;
                        report.warnings.push_back(
                            "oracle disagrees with the rank-sum test at n = " +
                            std::to_string(per.rank_verdict.n) + " (max residual " +
                            std::to_string(p.verdict.max_residual) + ")");
                    }
                    per.oracle_verdict = p.verdict;
                    per.residual_field = std::move(p.residuals);
                }
                return 0;
            });
        }

        if (config.analyses.support_bounds) {
            run_stage("zero-set-bounds", [&] {
                for (int n : invariant_moduli) {
                    if (n > grid.fiber_half_width) {
                        report.zero_set_skipped.push_back(n);
                        report.warnings.push_back(
                            "zero-set bound for n = " + std::to_string(n) +
                            " skipped: interval [0, n) exceeds the fiber window");
                        continue;
                    }
                    report.zero_set_checks.push_back(
                        zero_set_bound_check(phi, n, Rational(0), grid, config.rel_tol));
                }
                return 0;
            });
        }

        if (config.analyses.frames) {
            run_stage("frames", [&] {
                report.bounds = frame_bounds(phi, grid, config.rel_tol);
                report.parseval = report.bounds->parseval(config.rel_tol);
                for (int n : invariant_moduli) {
                    report.cutoff_frames.push_back(
                        cutoff_frame_check(phi, n, grid, config.rel_tol));
                }
                return 0;
            });
        }
    } else if (config.analyses.frames) {
        run_stage("frames", [&] {
            report.bounds = frame_bounds(phi, grid, config.rel_tol);
            report.parseval = report.bounds->parseval(config.rel_tol);
            return 0;
        });
    }

    report.caveats = {
        "fiber window truncated to |k| < K; per-generator discarded tail energy is listed "
        "under tail_energy (NaN when the spectrum is raw samples)",
        "verdicts sample the base window at M cells; behavior on null sets between cells "
        "is not observable on a grid",
        "frame bounds are plain min/max over evaluated cells, not essential bounds; "
        "measure-zero spikes are undetectable",
        "level-set measures count grid cells, so each boundary cell contributes up to 1/M; "
        "zero-set checks carry the 2n/M slack",
    };

    for (const auto& violation : validate_report(report)) {
        report.warnings.push_back("internal inconsistency: " + violation);
    }
    return report;
}

std::vector<std::string> validate_report(const InvarianceReport& report) {
    std::vector<std::string> violations;
    if (report.order) {
        const OrderResult& order = *report.order;
        auto passed = [&](int n) { return n == 1 || order.verdicts[n - 2].invariant; };
        if (!order.ti_candidate) {
            if (!passed(order.declared_order)) {
                violations.push_back("declared order " + std::to_string(order.declared_order) +
                                     " did not pass its own test");
            }
            for (int n = order.declared_order + 1; n <= order.n_max; ++n) {
                if (passed(n)) {
                    violations.push_back("modulus " + std::to_string(n) +
                                         " passed above the declared order");
                }
            }
        }
        if (order.divisor_consistent) {
            for (int d = 2; d <= order.declared_order; ++d) {
                if (order.declared_order % d == 0 && !passed(d)) {
                    violations.push_back("divisor " + std::to_string(d) +
                                         " of the declared order failed");
                }
            }
        }
    }
    double total = 0.0;
    for (double m : report.support.level_measures) total += m;
    if (!report.support.level_measures.empty() && std::abs(total - 1.0) > 1e-12) {
        violations.push_back("level-set measures do not sum to 1");
    }
    for (const auto& per : report.per_n) {
        if (per.oracle_verdict &&
            per.oracle_verdict->invariant != per.rank_verdict.invariant &&
            report.oracle_agreement) {
            violations.push_back("oracle agreement flag inconsistent with verdicts at n = " +
                                 std::to_string(per.rank_verdict.n));
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// Emission

nlohmann::json report_to_json(const InvarianceReport& report) {
    const FrequencyGrid grid = report.config.grid();
    nlohmann::json j;
    j["schema"] = "sis-invariance/1";
    j["config"] = config_to_json(report.config);

    nlohmann::json invariance;
    auto per_n = nlohmann::json::array();
    for (const auto& per : report.per_n) {
        nlohmann::json entry;
        entry["n"] = per.rank_verdict.n;
        entry["rank"] = verdict_to_json(per.rank_verdict, grid);
        per_n.push_back(entry);
    }
    invariance["per_n"] = per_n;
    if (report.order) {
        invariance["order"] = {{"declared", report.order->declared_order},
                               {"at_least_n_max", report.order->ti_candidate},
                               {"ti_certified", report.order->ti_certified},
                               {"divisor_consistent", report.order->divisor_consistent},
                               {"flags", report.order->flags}};
    }
    invariance["ti_check"] = report.ti;
    invariance["rel_tol"] = report.config.rel_tol;
    j["invariance"] = invariance;

    nlohmann::json support;
    support["level_measures"] = report.support.level_measures;
    support["cell_width"] = report.support.cell_width;
    auto zero_checks = nlohmann::json::array();
    for (const auto& z : report.zero_set_checks) {
        nlohmann::json entry;
        entry["n"] = z.n;
        entry["interval_lo"] = format_rational(z.interval_lo);
        entry["bound"] = z.bound;
        entry["slack"] = z.slack;
        if (z.principal_bound) entry["bound_n_minus_m"] = *z.principal_bound;
        auto gens = nlohmann::json::array();
        for (const auto& g : z.generators) {
            gens.push_back({{"measured_zero_set", g.measured_zero_set},
                            {"satisfied", g.satisfied}});
        }
        entry["per_generator"] = gens;
        entry["all_satisfied"] = z.all_satisfied;
        zero_checks.push_back(entry);
    }
    support["zero_set_checks"] = zero_checks;
    support["zero_set_skipped"] = report.zero_set_skipped;
    j["support"] = support;

    if (report.bounds) {
        nlohmann::json frames = bounds_to_json(*report.bounds);
        frames["parseval"] = report.parseval;
        auto checks = nlohmann::json::array();
        for (const auto& c : report.cutoff_frames) {
            nlohmann::json entry;
            entry["n"] = c.n;
            entry["slack"] = c.slack;
            auto per_k = nlohmann::json::array();
            for (const auto& fam : c.per_k) {
                nlohmann::json fj;
                fj["k"] = fam.k;
                fj["trivial"] = fam.trivial;
                if (!fam.trivial) {
                    fj["A"] = fam.bounds.lower;
                    fj["B"] = fam.bounds.upper;
                }
                fj["within_slack"] = fam.within_slack;
                per_k.push_back(fj);
            }
            entry["per_k"] = per_k;
            entry["union"] = {{"A", c.union_bounds.lower},
                              {"B", c.union_bounds.upper},
                              {"within_slack", c.union_within_slack}};
            entry["all_within_slack"] = c.all_within_slack;
            checks.push_back(entry);
        }
        frames["cutoff_checks"] = checks;
        j["frames"] = frames;
    }

    nlohmann::json oracle;
    oracle["enabled"] = report.config.analyses.oracle;
    oracle["tolerance"] = report.config.oracle_tol;
    oracle["agrees_with_rank_test"] = report.oracle_agreement;
    auto oracle_verdicts = nlohmann::json::array();
    for (const auto& per : report.per_n) {
        if (per.oracle_verdict) {
            oracle_verdicts.push_back(verdict_to_json(*per.oracle_verdict, grid));
        }
    }
    oracle["verdicts"] = oracle_verdicts;
    j["oracle"] = oracle;

    auto tail = nlohmann::json::array();
    for (double t : report.tail_energy) {
        if (std::isnan(t)) tail.push_back(nullptr);
        else tail.push_back(t);
    }
    j["caveats"] = {{"tail_energy", tail}, {"notes", report.caveats}};
    j["warnings"] = report.warnings;
    return j;
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

}  // namespace

void emit_report_json(const InvarianceReport& report, const std::string& path) {
    std::ofstream out = open_output(path);
    out << report_to_json(report).dump(2) << "\n";
    finish_output(out, path);
}

void emit_report_csv(const InvarianceReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());

    const FrequencyGrid grid = report.config.grid();
    const auto file = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    {
        const std::string path = file("dimension.csv");
        std::ofstream out = open_output(path);
        out << std::setprecision(17);
        write_rank_profile_csv(out, report.dimension);
        finish_output(out, path);
    }
    {
        const std::string path = file("eigenvalues.csv");
        std::ofstream out = open_output(path);
        out << std::setprecision(17) << "omega";
        const int m = static_cast<int>(report.config.generators.size());
        for (int jj = 1; jj <= m; ++jj) out << ",lambda_" << jj;
        out << "\n";
        for (int i = 0; i < grid.base_size(); ++i) {
            out << grid.omega(i);
            const auto& eigs = report.eigenvalue_field[i];
            for (Eigen::Index e = 0; e < eigs.size(); ++e) out << "," << eigs(e);
            out << "\n";
        }
        finish_output(out, path);
    }
    for (const auto& per : report.per_n) {
        const std::string path = file("rank_n" + std::to_string(per.rank_verdict.n) + ".csv");
        std::ofstream out = open_output(path);
        out << std::setprecision(17) << "omega,rank_full,rank_cutoff_sum\n";
        for (int i = 0; i < grid.base_size(); ++i) {
            out << grid.omega(i) << "," << per.rank_full[i] << "," << per.rank_cutoff_sum[i]
                << "\n";
        }
        finish_output(out, path);
        if (!per.residual_field.empty()) {
            const std::string rpath =
                file("residual_n" + std::to_string(per.rank_verdict.n) + ".csv");
            std::ofstream rout = open_output(rpath);
            rout << std::setprecision(17) << "omega,max_residual\n";
            for (int i = 0; i < grid.base_size(); ++i) {
                rout << grid.omega(i) << "," << per.residual_field[i] << "\n";
            }
            finish_output(rout, rpath);
        }
    }
}

}  // namespace sis
