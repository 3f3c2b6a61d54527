#include "intphase/report.hpp"

#include <cmath>
#include <cstdio>

namespace intphase {

namespace {

constexpr const char* kToolName = "intphase";
constexpr const char* kToolVersion = "1.0.0";

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

std::string format_json_double(double v) {
    if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

void JsonWriter::separate() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_.empty()) {
        if (!first_.back()) out_ += ",";
        first_.back() = false;
        out_ += "\n";
        indent();
    }
}

void JsonWriter::indent() {
    out_.append(2 * first_.size(), ' ');
}

void JsonWriter::begin_object() {
    separate();
    out_ += "{";
    first_.push_back(true);
}

void JsonWriter::end_object() {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) {
        out_ += "\n";
        indent();
    }
    out_ += "}";
}

void JsonWriter::begin_array() {
    separate();
    out_ += "[";
    first_.push_back(true);
}

void JsonWriter::end_array() {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) {
        out_ += "\n";
        indent();
    }
    out_ += "]";
}

void JsonWriter::key(const std::string& name) {
    separate();
    out_ += "\"" + escape_json(name) + "\": ";
    pending_key_ = true;
}

void JsonWriter::number(double v) {
    separate();
    out_ += format_json_double(v);
}

void JsonWriter::integer(long long v) {
    separate();
    out_ += std::to_string(v);
}

void JsonWriter::boolean(bool v) {
    separate();
    out_ += v ? "true" : "false";
}

void JsonWriter::string(const std::string& v) {
    separate();
    out_ += "\"" + escape_json(v) + "\"";
}

std::string JsonWriter::take() {
    out_ += "\n";
    return std::move(out_);
}

namespace {

void write_meta(JsonWriter& w, const char* command) {
    w.key("meta");
    w.begin_object();
    w.kv("tool", kToolName);
    w.kv("version", kToolVersion);
    w.kv("command", command);
    w.end_object();
}

void write_breakdown(JsonWriter& w, const char* name, const PhaseBreakdown& b) {
    w.key(name);
    w.begin_object();
    w.kv("phi0", b.phi0);
    w.kv("dyn_internal", b.dyn_internal);
    w.kv("dyn_motion", b.dyn_motion);
    w.kv("boundary", b.boundary);
    w.kv("wavepacket", b.wavepacket);
    w.kv("dynamical", b.dynamical());
    w.kv("total", b.total());
    w.kv("proper_lab_s", b.proper_lab);
    w.kv("proper_correction_s", b.proper_correction);
    w.end_object();
}

void write_geometry(JsonWriter& w, const GeometrySpec& spec) {
    w.key("geometry");
    w.begin_object();
    w.kv("name", to_string(spec.kind));
    w.kv("mode", to_string(spec.mode));
    w.kv("t_final", spec.t_final);
    w.key("window");
    w.begin_array();
    w.number(spec.window_begin);
    w.number(spec.window_end);
    w.end_array();
    w.key("red_window");
    w.begin_array();
    w.number(spec.red_window_begin);
    w.number(spec.red_window_end);
    w.end_array();
    w.kv("red_multiplier", spec.red_multiplier);
    w.kv("reference_separation", spec.reference_separation);
    if (spec.mimic_accel) w.kv("mimic_accel", *spec.mimic_accel);
    w.key("params");
    w.begin_object();
    for (const auto& [k, v] : spec.params) w.kv(k, v);
    w.end_object();
    w.end_object();
}

void write_input(JsonWriter& w, const ExperimentConfig& cfg) {
    w.key("input");
    w.begin_object();
    w.key("species");
    w.begin_object();
    w.kv("mass_kg", cfg.mass_kg);
    w.kv("omega_rad_s", cfg.omega);
    if (!cfg.label.empty()) w.kv("label", cfg.label);
    w.end_object();
    w.key("violation");
    w.begin_object();
    if (cfg.violation.alpha) {
        w.kv("alpha", *cfg.violation.alpha);
        if (cfg.violation.beta_mean) w.kv("beta_mean", *cfg.violation.beta_mean);
    } else {
        w.kv("beta_a", cfg.violation.beta_a);
        w.kv("beta_b", cfg.violation.beta_b);
    }
    w.end_object();
    w.key("environment");
    w.begin_object();
    w.kv("g", cfg.g);
    w.end_object();
    if (cfg.trap) {
        w.key("trap");
        w.begin_object();
        w.kv("gamma", cfg.trap->gamma);
        w.kv("dgamma2", cfg.trap->dgamma2);
        w.end_object();
    }
    w.key("numerics");
    w.begin_object();
    w.kv("quadrature",
         cfg.numerics.quadrature == QuadMode::adaptive ? "adaptive" : "closed_form");
    w.kv("quad_tol", cfg.numerics.quad_tol);
    w.kv("ode_tol", cfg.numerics.ode_tol);
    w.kv("oracle", cfg.numerics.oracle);
    w.end_object();
    w.end_object();
}

void write_classification(JsonWriter& w, const ClassificationResult& cls) {
    w.key("classification");
    w.begin_object();
    w.kv("kind", to_string(cls.kind));
    w.kv("alpha_parametrized", cls.alpha_parametrized);
    w.kv("redshift_area", cls.a_red);
    w.kv("tolerance", cls.tol);
    w.kv("scale", cls.scale);
    w.kv("zero_floor", cls.floor);
    w.kv("gold_template_fits", cls.gold_fits);
    w.kv("accel_template_fits", cls.accel_fits);
    w.kv("null_at_alpha_zero", cls.null_at_alpha_zero);
    w.kv("alpha_sensitive", cls.alpha_sensitive);
    if (!cls.note.empty()) w.kv("note", cls.note);
    w.key("grid");
    w.begin_array();
    for (const ClassifierGridPoint& pt : cls.grid) {
        w.begin_object();
        w.kv("g", pt.g);
        w.kv("alpha", pt.alpha);
        w.kv("dbeta", pt.dbeta);
        w.kv("phi", pt.phi);
        w.kv("template_gold", pt.tmpl_gold);
        w.kv("template_accel", pt.tmpl_accel);
        w.kv("residual_gold", pt.resid_gold);
        w.kv("residual_accel", pt.resid_accel);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

void write_warnings(JsonWriter& w, const Warnings& warnings) {
    w.key("warnings");
    w.begin_array();
    for (const Warning& warning : warnings) {
        w.begin_object();
        w.kv("code", warning.code);
        w.kv("message", warning.message);
        w.end_object();
    }
    w.end_array();
}

}  // namespace

std::string render_report(const ExperimentConfig& cfg, const GeometryResult& res,
                          const Warnings& warnings) {
    JsonWriter w;
    w.begin_object();
    write_meta(w, "simulate");
    write_input(w, cfg);
    write_geometry(w, res.spec);

    w.key("phases");
    w.begin_object();
    const bool clock = res.phases.mode == MeasurementMode::clock_differential;
    write_breakdown(w, clock ? "upper" : "primary", res.phases.primary);
    write_breakdown(w, clock ? "lower" : "reference", res.phases.reference);
    w.kv("differential", res.differential);
    w.key("partial_integration");
    w.begin_object();
    w.kv("boundary", res.phases.partial.boundary);
    w.kv("reduced", res.phases.partial.reduced);
    w.kv("total", res.phases.partial.total());
    w.end_object();
    w.kv("virial_residual", res.phases.virial_residual);
    w.kv("virial_scale", res.phases.virial_scale);
    w.kv("phi0", res.phases.phi0);
    w.kv("delta_tau_s", res.phases.delta_tau);
    w.kv("redshift_area", res.phases.redshift_area);
    if (res.phases.closure.applicable) {
        w.key("closure");
        w.begin_object();
        w.kv("closed", res.phases.closure.closed);
        w.kv("dz_final", res.phases.closure.dz_final);
        w.kv("dv_final", res.phases.closure.dv_final);
        w.kv("rel_z", res.phases.closure.rel_z);
        w.kv("rel_v", res.phases.closure.rel_v);
        w.end_object();
    }
    w.end_object();

    w.key("reference");
    w.begin_object();
    w.kv("available", res.reference.available);
    if (res.reference.available) {
        w.kv("value", res.reference.value);
        w.kv("residual_abs", res.residual_abs);
        w.kv("residual_rel", res.residual_rel);
    }
    w.kv("formula", res.reference.formula);
    w.end_object();

    if (res.state_references) {
        w.key("state_references");
        w.begin_object();
        w.key("primary");
        w.begin_object();
        w.kv("value", res.state_references->first.value);
        w.kv("formula", res.state_references->first.formula);
        w.end_object();
        w.key("reference");
        w.begin_object();
        w.kv("value", res.state_references->second.value);
        w.kv("formula", res.state_references->second.formula);
        w.end_object();
        w.end_object();
    }

    if (!res.extras.empty()) {
        w.key("extras");
        w.begin_object();
        for (const auto& [k, v] : res.extras) w.kv(k, v);
        w.end_object();
    }

    w.key("oracle");
    w.begin_object();
    w.kv("enabled", res.oracle.has_value());
    if (res.oracle) {
        w.kv("value", *res.oracle);
        w.kv("residual", res.oracle_residual);
    }
    w.end_object();

    if (res.classification) write_classification(w, *res.classification);

    if (cfg.contrast) {
        w.key("signal");
        w.begin_object();
        w.kv("contrast", *cfg.contrast);
        w.kv("intensity", interference_signal(res.differential, *cfg.contrast));
        w.end_object();
    }

    write_warnings(w, warnings);
    w.end_object();
    return w.take();
}

std::string render_sensitivity_report(const SensitivityInputs& in,
                                      const SensitivityResult& out) {
    JsonWriter w;
    w.begin_object();
    write_meta(w, "sensitivity");
    w.key("input");
    w.begin_object();
    w.kv("n_atoms", in.n_atoms);
    w.kv("t_avg_s", in.t_avg);
    w.kv("t_cycle_s", in.t_cycle);
    w.kv("t_red_s", in.t_red);
    w.kv("dz0_m", in.dz0);
    w.kv("omega_rad_s", in.omega);
    w.kv("g", in.g);
    w.end_object();
    w.key("result");
    w.begin_object();
    w.kv("delta_alpha", out.delta_alpha);
    w.kv("shots", out.shots);
    w.kv("phase_per_alpha", out.phase_per_alpha);
    w.end_object();
    w.key("comparison");
    w.begin_object();
    w.key("clock_limits");
    w.begin_array();
    w.number(2.5e-5);
    w.number(9.0e-5);
    w.end_array();
    w.kv("note",
         "reported clock-comparison bounds on the redshift anomaly alpha; "
         "delta_alpha scales as 1/(dz0 * t_red * sqrt(n_atoms * t_avg / t_cycle))");
    w.end_object();
    w.end_object();
    return w.take();
}

std::string render_classification_report(const ExperimentConfig& cfg,
                                         const GeometrySpec& spec,
                                         const ClassificationResult& cls) {
    JsonWriter w;
    w.begin_object();
    write_meta(w, "classify");
    write_input(w, cfg);
    write_geometry(w, spec);
    write_classification(w, cls);
    w.end_object();
    return w.take();
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "parameter,phi,phi_ref,residual\n";
    for (const SweepRow& row : rows) {
        out += format_csv_double(row.value);
        out += ",";
        out += format_csv_double(row.phi);
        out += ",";
        if (row.has_reference) {
            out += format_csv_double(row.phi_ref);
            out += ",";
            out += format_csv_double(row.phi - row.phi_ref);
        } else {
            out += ",";
        }
        out += "\n";
    }
    return out;
}

std::string render_trajectory_csv(const GeometrySpec& spec, double sample_rate) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw ValidationError("trajectory export: sample_rate must be positive");
    const PairKinematics pair =
        make_pair_kinematics(spec.upper, spec.lower, spec.species.mass, spec.env.g,
                             spec.trap.gamma, spec.t_final);
    long long n = std::llround(sample_rate * spec.t_final);
    if (n < 1) n = 1;

    std::string out = "t,z_upper,z_lower,zbar,dz,state_upper,state_lower\n";
    for (long long i = 0; i <= n; ++i) {
        const double t = spec.t_final * static_cast<double>(i) / static_cast<double>(n);
        out += format_csv_double(t);
        out += ",";
        out += format_csv_double(pair.upper.z(t));
        out += ",";
        out += format_csv_double(pair.lower.z(t));
        out += ",";
        out += format_csv_double(pair.mean.z(t));
        out += ",";
        out += format_csv_double(pair.diff.z(t));
        out += ",";
        out += format_csv_double(spec.primary.at(t));
        out += ",";
        out += format_csv_double(spec.reference.at(t));
        out += "\n";
    }
    return out;
}

}  // namespace intphase
