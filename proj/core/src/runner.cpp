#include "intphase/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "intphase/analysis.hpp"
#include "intphase/config.hpp"
#include "intphase/report.hpp"
#include "intphase/verify.hpp"

namespace intphase {

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("output: cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ValidationError("output: write to '" + path + "' failed");
}

// Fault-injection hook: forces adaptive quadrature at the given tolerance.
void apply_quad_tol_env(EvalOptions& opts) {
    const char* env = std::getenv("INTPHASE_QUAD_TOL");
    if (!env || !*env) return;
    char* stop = nullptr;
    const double tol = std::strtod(env, &stop);
    if (stop == env || *stop != '\0' || !(tol > 0.0) || !std::isfinite(tol))
        throw ValidationError("INTPHASE_QUAD_TOL: expected a positive number");
    opts.quadrature = QuadMode::adaptive;
    opts.quad_tol = tol;
}

void check_oracle_agreement(const GeometryResult& res) {
    if (!res.oracle) return;
    const double scale = std::max(std::abs(res.differential), std::abs(*res.oracle));
    if (scale <= 1e-12) return;
    if (res.oracle_residual > 1e-6 * scale)
        throw NumericalError(
            "oracle: independent ODE integration disagrees with the analytic engine "
            "(analytic " +
            format_json_double(res.differential) + ", ode " +
            format_json_double(*res.oracle) + ", residual " +
            format_json_double(res.oracle_residual) + ")");
}

struct LoadedExperiment {
    ExperimentConfig cfg;
    AtomSpecies species;
    GeometrySpec spec;
    Warnings warnings;
    EvalOptions eval;
};

LoadedExperiment load_experiment(const CliOptions& opts) {
    if (opts.config_path.empty())
        throw ValidationError(opts.command + ": --config PATH is required");
    LoadedExperiment ex;
    ex.cfg = load_config(opts.config_path);
    ex.species = config_species(ex.cfg, &ex.warnings);
    ex.spec = make_geometry(ex.cfg, &ex.warnings);
    ex.eval = config_eval_options(ex.cfg, ex.species);
    apply_quad_tol_env(ex.eval);
    return ex;
}

int cmd_simulate(const CliOptions& opts) {
    LoadedExperiment ex = load_experiment(opts);
    AnalysisOptions aopts;
    aopts.eval = ex.eval;
    aopts.run_oracle = opts.oracle.value_or(ex.cfg.numerics.oracle);
    GeometryResult res = evaluate_geometry(ex.spec, aopts);
    check_oracle_agreement(res);

    Warnings warnings = ex.warnings;
    warnings.insert(warnings.end(), res.phases.warnings.begin(),
                    res.phases.warnings.end());

    const std::string report = render_report(ex.cfg, res, warnings);
    const std::string report_path =
        !opts.out_path.empty() ? opts.out_path : ex.cfg.output.report;
    write_output(report_path, report);
    if (!ex.cfg.output.trajectory.empty())
        write_output(ex.cfg.output.trajectory,
                     render_trajectory_csv(ex.spec, ex.cfg.output.sample_rate));
    return 0;
}

int cmd_sweep(const CliOptions& opts) {
    if (opts.axis.empty()) throw ValidationError("sweep: --axis NAME is required");
    if (opts.values.empty()) throw ValidationError("sweep: --values CSV is required");
    LoadedExperiment ex = load_experiment(opts);
    {
        // Axis must exist in the schema before any computation starts.
        ExperimentConfig probe = ex.cfg;
        apply_axis(probe, opts.axis, opts.values.front());
    }

    std::vector<SweepRow> rows(opts.values.size());
    std::vector<std::exception_ptr> errors(opts.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= opts.values.size()) return;
            try {
                ExperimentConfig cfg = ex.cfg;
                apply_axis(cfg, opts.axis, opts.values[i]);
                GeometrySpec spec = make_geometry(cfg, nullptr);
                SweepRow row;
                row.value = opts.values[i];
                row.phi = phase_dynamical_differential(spec, ex.eval);
                const ReferenceValue ref = closed_form_reference(spec);
                row.has_reference = ref.available;
                row.phi_ref = ref.value;
                rows[i] = row;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned jobs = opts.jobs > 0 ? static_cast<unsigned>(opts.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(opts.values.size()));
    std::vector<std::thread> pool;
    for (unsigned j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& err : errors)
        if (err) std::rethrow_exception(err);

    write_output(!opts.out_path.empty() ? opts.out_path : ex.cfg.output.report,
                 render_sweep_csv(rows));
    return 0;
}

int cmd_sensitivity(const CliOptions& opts) {
    if (opts.config_path.empty())
        throw ValidationError("sensitivity: --config PATH is required");
    const ExperimentConfig cfg = load_config(opts.config_path);
    const AtomSpecies species = config_species(cfg, nullptr);
    const SensitivityInputs in = config_sensitivity(cfg, species);
    const SensitivityResult out = sensitivity(in);
    write_output(!opts.out_path.empty() ? opts.out_path : cfg.output.report,
                 render_sensitivity_report(in, out));
    return 0;
}

int cmd_classify(const CliOptions& opts) {
    LoadedExperiment ex = load_experiment(opts);
    const ClassificationResult cls = classify_ugr(ex.spec, ex.eval);
    write_output(!opts.out_path.empty() ? opts.out_path : ex.cfg.output.report,
                 render_classification_report(ex.cfg, ex.spec, cls));
    return 0;
}

int cmd_export_trajectories(const CliOptions& opts) {
    LoadedExperiment ex = load_experiment(opts);
    const std::string csv = render_trajectory_csv(ex.spec, ex.cfg.output.sample_rate);
    const std::string path =
        !opts.out_path.empty() ? opts.out_path : ex.cfg.output.trajectory;
    write_output(path, csv);
    return 0;
}

int cmd_verify(const CliOptions& opts) {
    VerifyOptions vopts;
    vopts.oracle = opts.oracle.value_or(true);
    const VerifySummary summary = run_acceptance(vopts);
    std::string text;
    for (const CheckResult& check : summary.checks)
        text += format_acceptance_line(check) + "\n";
    text += summary.all_pass() ? "acceptance: all criteria passed"
                               : "acceptance: FAILURES present";
    char total[48];
    std::snprintf(total, sizeof total, " [total %.2f s]\n", summary.total_seconds);
    text += total;
    write_output(opts.out_path, text);
    return summary.all_pass() ? 0 : 1;
}

}  // namespace

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string tok = csv.substr(pos, comma - pos);
        char* stop = nullptr;
        const double v = std::strtod(tok.c_str(), &stop);
        if (tok.empty() || stop != tok.c_str() + tok.size() || !std::isfinite(v))
            throw ValidationError("sweep: non-numeric axis value '" + tok + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty()) throw ValidationError("sweep: empty value list");
    return out;
}

int run_command(const CliOptions& opts) {
    try {
        if (opts.command == "simulate") return cmd_simulate(opts);
        if (opts.command == "sweep") return cmd_sweep(opts);
        if (opts.command == "sensitivity") return cmd_sensitivity(opts);
        if (opts.command == "classify") return cmd_classify(opts);
        if (opts.command == "export-trajectories") return cmd_export_trajectories(opts);
        if (opts.command == "verify") return cmd_verify(opts);
        throw ValidationError("unknown command '" + opts.command + "'");
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace intphase
