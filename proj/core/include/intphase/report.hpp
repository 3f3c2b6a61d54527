#pragma once

#include <string>
#include <vector>

#include "intphase/analysis.hpp"
#include "intphase/config.hpp"

namespace intphase {

// Streaming JSON writer with caller-controlled key order and %.17g doubles;
// output is byte-deterministic for identical call sequences.
class JsonWriter {
  public:
    void begin_object();
    void end_object();
    void begin_array();
    void end_array();
    void key(const std::string& name);
    void number(double v);
    void integer(long long v);
    void boolean(bool v);
    void string(const std::string& v);

    void kv(const std::string& name, double v) { key(name); number(v); }
    void kv(const std::string& name, bool v) { key(name); boolean(v); }
    void kv(const std::string& name, const std::string& v) { key(name); string(v); }
    void kv(const std::string& name, const char* v) { key(name); string(v); }
    void kv_int(const std::string& name, long long v) { key(name); integer(v); }

    std::string take();

  private:
    void separate();
    void indent();

    std::string out_;
    std::vector<bool> first_;  // per nesting level
    bool pending_key_ = false;
};

std::string format_json_double(double v);  // %.17g
std::string format_csv_double(double v);   // %.16e (17 significant digits)

// Full simulation report: inputs, per-realization breakdowns, differential,
// closed-form reference, classification, oracle, warnings. No timestamps.
std::string render_report(const ExperimentConfig& cfg, const GeometryResult& res,
                          const Warnings& warnings);

std::string render_sensitivity_report(const SensitivityInputs& in,
                                      const SensitivityResult& out);

std::string render_classification_report(const ExperimentConfig& cfg,
                                         const GeometrySpec& spec,
                                         const ClassificationResult& cls);

struct SweepRow {
    double value = 0.0;
    double phi = 0.0;
    bool has_reference = false;
    double phi_ref = 0.0;
};

std::string render_sweep_csv(const std::vector<SweepRow>& rows);

// Sampled branch trajectories: t, z_upper, z_lower, zbar, dz, state_upper,
// state_lower at sample_rate samples per second (endpoints always included).
std::string render_trajectory_csv(const GeometrySpec& spec, double sample_rate);

}  // namespace intphase
