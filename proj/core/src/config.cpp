#include "intphase/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace intphase {

namespace {

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
    throw ValidationError(src + ":" + std::to_string(line) + ": " + msg);
}

struct Value {
    enum class Kind { number, boolean, string, array };
    Kind kind = Kind::number;
    double num = 0.0;
    bool flag = false;
    std::string text;
    std::vector<Value> items;
    int line = 0;
};

struct Table {
    std::vector<std::pair<std::string, Value>> values;
    std::vector<std::pair<std::string, Table>> tables;
    std::vector<std::pair<std::string, std::vector<Table>>> arrays;
    int line = 0;

    Table* find_table(const std::string& key) {
        for (auto& [k, t] : tables)
            if (k == key) return &t;
        return nullptr;
    }
    const Table* find_table(const std::string& key) const {
        for (const auto& [k, t] : tables)
            if (k == key) return &t;
        return nullptr;
    }
    const Value* find_value(const std::string& key) const {
        for (const auto& [k, v] : values)
            if (k == key) return &v;
        return nullptr;
    }
    const std::vector<Table>* find_array(const std::string& key) const {
        for (const auto& [k, a] : arrays)
            if (k == key) return &a;
        return nullptr;
    }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            return false;
    return true;
}

class ValueParser {
  public:
    ValueParser(const std::string& src, int line, const std::string& text)
        : src_(src), line_(line), s_(text) {}

    Value parse() {
        Value v = parse_value();
        skip_ws();
        if (pos_ != s_.size()) fail(src_, line_, "trailing characters after value");
        return v;
    }

  private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    Value parse_value() {
        skip_ws();
        if (pos_ >= s_.size()) fail(src_, line_, "missing value");
        Value v;
        v.line = line_;
        char c = s_[pos_];
        if (c == '"') {
            v.kind = Value::Kind::string;
            v.text = parse_string();
        } else if (c == '[') {
            v.kind = Value::Kind::array;
            ++pos_;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            while (true) {
                v.items.push_back(parse_value());
                skip_ws();
                if (pos_ >= s_.size()) fail(src_, line_, "unterminated array");
                if (s_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                    if (pos_ < s_.size() && s_[pos_] == ']') {
                        ++pos_;
                        break;
                    }
                    continue;
                }
                if (s_[pos_] == ']') {
                    ++pos_;
                    break;
                }
                fail(src_, line_, "expected ',' or ']' in array");
            }
        } else {
            std::size_t end = pos_;
            while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != ' ' &&
                   s_[end] != '\t')
                ++end;
            std::string tok = s_.substr(pos_, end - pos_);
            pos_ = end;
            if (tok == "true" || tok == "false") {
                v.kind = Value::Kind::boolean;
                v.flag = tok == "true";
            } else {
                v.kind = Value::Kind::number;
                char* stop = nullptr;
                v.num = std::strtod(tok.c_str(), &stop);
                if (tok.empty() || stop != tok.c_str() + tok.size())
                    fail(src_, line_, "malformed value '" + tok + "'");
                if (!std::isfinite(v.num))
                    fail(src_, line_, "non-finite number '" + tok + "'");
            }
        }
        return v;
    }

    std::string parse_string() {
        std::string out;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            char c = s_[pos_++];
            if (c == '\\') {
                if (pos_ >= s_.size()) fail(src_, line_, "dangling escape in string");
                char e = s_[pos_++];
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: fail(src_, line_, "unsupported escape in string");
                }
            } else {
                out += c;
            }
        }
        if (pos_ >= s_.size()) fail(src_, line_, "unterminated string");
        ++pos_;
        return out;
    }

    const std::string& src_;
    int line_;
    std::string s_;
    std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::vector<std::string> split_path(const std::string& src, int line,
                                    const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path + ".") {
        if (c == '.') {
            cur = trim(cur);
            if (!valid_key(cur)) fail(src, line, "malformed table name '" + path + "'");
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return parts;
}

Table parse_toml(const std::string& text, const std::string& src) {
    Table root;
    Table* current = &root;
    std::set<std::string> declared;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.size() >= 4 && line.substr(0, 2) == "[[") {
            if (line.substr(line.size() - 2) != "]]")
                fail(src, line_no, "malformed table-array header");
            auto parts = split_path(src, line_no, trim(line.substr(2, line.size() - 4)));
            Table* node = &root;
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                Table* next = node->find_table(parts[i]);
                if (!next) {
                    node->tables.emplace_back(parts[i], Table{});
                    next = &node->tables.back().second;
                    next->line = line_no;
                }
                node = next;
            }
            std::vector<Table>* arr = nullptr;
            for (auto& [k, a] : node->arrays)
                if (k == parts.back()) arr = &a;
            if (!arr) {
                node->arrays.emplace_back(parts.back(), std::vector<Table>{});
                arr = &node->arrays.back().second;
            }
            arr->push_back(Table{});
            arr->back().line = line_no;
            current = &arr->back();
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') fail(src, line_no, "malformed table header");
            std::string path = trim(line.substr(1, line.size() - 2));
            if (!declared.insert(path).second)
                fail(src, line_no, "table [" + path + "] declared twice");
            auto parts = split_path(src, line_no, path);
            Table* node = &root;
            for (const auto& part : parts) {
                Table* next = node->find_table(part);
                if (!next) {
                    node->tables.emplace_back(part, Table{});
                    next = &node->tables.back().second;
                    next->line = line_no;
                }
                node = next;
            }
            current = node;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(src, line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail(src, line_no, "malformed key '" + key + "'");
        if (current->find_value(key))
            fail(src, line_no, "key '" + key + "' assigned twice");
        Value v = ValueParser(src, line_no, trim(line.substr(eq + 1))).parse();
        current->values.emplace_back(key, v);
    }
    return root;
}

// Typed, consumption-tracked view of a parsed table; finish() rejects keys
// the schema did not claim.
class Reader {
  public:
    Reader(const Table& t, std::string path, const std::string& src)
        : t_(t), path_(std::move(path)), src_(src) {}

    bool has(const char* key) const { return t_.find_value(key) != nullptr; }

    double number(const char* key) {
        auto v = opt_number(key);
        if (!v) fail(src_, t_.line, path_ + ": missing required key '" + key + "'");
        return *v;
    }

    std::optional<double> opt_number(const char* key) {
        const Value* v = claim(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::number)
            fail(src_, v->line, path_ + "." + key + ": expected a number");
        return v->num;
    }

    double number_or(const char* key, double dflt) {
        auto v = opt_number(key);
        return v ? *v : dflt;
    }

    std::optional<std::string> opt_string(const char* key) {
        const Value* v = claim(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::string)
            fail(src_, v->line, path_ + "." + key + ": expected a string");
        return v->text;
    }

    std::string string_or(const char* key, const std::string& dflt) {
        auto v = opt_string(key);
        return v ? *v : dflt;
    }

    bool bool_or(const char* key, bool dflt) {
        const Value* v = claim(key);
        if (!v) return dflt;
        if (v->kind != Value::Kind::boolean)
            fail(src_, v->line, path_ + "." + key + ": expected true or false");
        return v->flag;
    }

    std::optional<std::vector<double>> opt_number_array(const char* key) {
        const Value* v = claim(key);
        if (!v) return std::nullopt;
        if (v->kind != Value::Kind::array)
            fail(src_, v->line, path_ + "." + key + ": expected an array");
        std::vector<double> out;
        for (const Value& item : v->items) {
            if (item.kind != Value::Kind::number)
                fail(src_, item.line, path_ + "." + key + ": expected numeric entries");
            out.push_back(item.num);
        }
        return out;
    }

    std::optional<std::array<double, 2>> opt_pair(const char* key) {
        auto arr = opt_number_array(key);
        if (!arr) return std::nullopt;
        if (arr->size() != 2)
            fail(src_, t_.line, path_ + "." + key + ": expected exactly two entries");
        return std::array<double, 2>{(*arr)[0], (*arr)[1]};
    }

    // Array of [t, value] pairs (nested arrays).
    std::optional<std::vector<std::pair<double, double>>> opt_knots(const char* key) {
        const Value* v = claim(key);
        if (!v) return std::nullopt;
        if (v->kind == Value::Kind::number)
            return std::vector<std::pair<double, double>>{{0.0, v->num}};
        if (v->kind != Value::Kind::array)
            fail(src_, v->line, path_ + "." + key + ": expected an array of pairs");
        std::vector<std::pair<double, double>> out;
        for (const Value& item : v->items) {
            if (item.kind != Value::Kind::array || item.items.size() != 2 ||
                item.items[0].kind != Value::Kind::number ||
                item.items[1].kind != Value::Kind::number)
                fail(src_, item.line, path_ + "." + key + ": entries must be [t, value]");
            out.emplace_back(item.items[0].num, item.items[1].num);
        }
        return out;
    }

    const Value* raw(const char* key) { return claim(key); }

    const Table* opt_table(const char* key) {
        used_tables_.insert(key);
        return t_.find_table(key);
    }

    const std::vector<Table>* opt_array(const char* key) {
        used_arrays_.insert(key);
        return t_.find_array(key);
    }

    void finish() {
        for (const auto& [k, v] : t_.values)
            if (!used_values_.count(k))
                fail(src_, v.line, path_ + ": unknown key '" + k + "'");
        for (const auto& [k, sub] : t_.tables)
            if (!used_tables_.count(k))
                fail(src_, sub.line, path_ + ": unknown table '" + k + "'");
        for (const auto& [k, arr] : t_.arrays)
            if (!used_arrays_.count(k))
                fail(src_, arr.empty() ? t_.line : arr.front().line,
                     path_ + ": unknown table array '" + k + "'");
    }

    const std::string& src() const { return src_; }
    int line() const { return t_.line; }

  private:
    const Value* claim(const char* key) {
        used_values_.insert(key);
        return t_.find_value(key);
    }

    const Table& t_;
    std::string path_;
    const std::string& src_;
    std::set<std::string> used_values_, used_tables_, used_arrays_;
};

struct GeometryParamSchema {
    std::vector<const char*> required;
    std::vector<const char*> optional;
};

GeometryParamSchema geometry_schema(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::clock_static:
        case GeometryKind::clock_free_fall:
            return {{"separation", "duration"}, {}};
        case GeometryKind::clock_guided:
        case GeometryKind::ai_guided:
            return {{"ramp_velocity", "ramp_duration", "hold_duration"}, {}};
        case GeometryKind::ai_mach_zehnder:
            return {{"wavenumber", "pulse_interval"}, {}};
        case GeometryKind::ai_levitated:
            return {{"wavenumber", "pulse_interval", "relaunch_count", "relaunch_accel"},
                    {"relaunch_offset"}};
        case GeometryKind::ai_doubly_differential:
            return {{"wavenumber", "pulse_interval", "hold_duration", "t1", "t2"}, {}};
        case GeometryKind::ai_symmetric_transitions:
            return {{"wavenumber", "pulse_interval", "hold_duration"}, {}};
        case GeometryKind::custom:
            return {};
    }
    return {};
}

StateProgramConfig read_program(const Table& t, const std::string& path,
                                const std::string& src) {
    Reader r(t, path, src);
    StateProgramConfig p;
    const double lam = r.number("lambda0");
    if (lam != 1.0 && lam != -1.0) fail(src, r.line(), path + ".lambda0 must be +1 or -1");
    p.lambda0 = lam > 0 ? 1 : -1;
    if (auto flips = r.opt_number_array("flips")) p.flips = *flips;
    r.finish();
    return p;
}

CustomTimeline read_timeline(Reader& r, const std::string& src) {
    CustomTimeline tl;
    tl.t_final = r.number("t_final");
    tl.mode = r.string_or("mode", "");
    if (auto w = r.opt_pair("window")) tl.window = w;
    if (auto w = r.opt_pair("red_window")) tl.red_window = w;
    tl.red_multiplier = r.number_or("red_multiplier", 1.0);
    tl.reference_separation = r.number_or("reference_separation", 0.0);
    if (auto a = r.opt_number("mimic_accel")) tl.mimic_accel = a;

    if (const Table* init = r.opt_table("initial")) {
        Reader ri(*init, "geometry.initial", src);
        tl.z_upper = ri.number_or("z_upper", 0.0);
        tl.v_upper = ri.number_or("v_upper", 0.0);
        tl.z_lower = ri.number_or("z_lower", 0.0);
        tl.v_lower = ri.number_or("v_lower", 0.0);
        ri.finish();
    }
    if (const std::vector<Table>* events = r.opt_array("event")) {
        for (const Table& et : *events) {
            Reader re(et, "geometry.event", src);
            TimelineEvent ev;
            ev.t = re.number("t");
            ev.branch = re.string_or("branch", "both");
            ev.kind = re.string_or("kind", "kick");
            ev.magnitude = re.number("magnitude");
            ev.laser_phase = re.number_or("laser_phase", 0.0);
            re.finish();
            if (ev.branch != "upper" && ev.branch != "lower" && ev.branch != "both")
                fail(src, et.line, "geometry.event.branch must be upper, lower, or both");
            if (ev.kind != "kick" && ev.kind != "relaunch" && ev.kind != "velocity")
                fail(src, et.line, "geometry.event.kind must be kick, relaunch, or velocity");
            tl.events.push_back(ev);
        }
    }
    if (const std::vector<Table>* traps = r.opt_array("trap")) {
        for (const Table& tt : *traps) {
            Reader rt(tt, "geometry.trap", src);
            TimelineTrap tw;
            tw.branch = rt.string_or("branch", "both");
            tw.t_on = rt.number("t_on");
            tw.t_off = rt.number("t_off");
            if (auto knots = rt.opt_knots("center")) {
                if (knots->size() == 1) {
                    tw.center_is_const = true;
                    tw.center_const = knots->front().second;
                } else {
                    tw.center_is_const = false;
                    tw.center_knots = *knots;
                }
            }
            rt.finish();
            if (tw.branch != "upper" && tw.branch != "lower" && tw.branch != "both")
                fail(src, tt.line, "geometry.trap.branch must be upper, lower, or both");
            tl.traps.push_back(tw);
        }
    }
    if (const Table* p = r.opt_table("primary"))
        tl.primary = read_program(*p, "geometry.primary", src);
    if (const Table* p = r.opt_table("reference"))
        tl.reference = read_program(*p, "geometry.reference", src);

    if (tl.mode.empty()) tl.mode = tl.primary || tl.reference ? "state" : "clock";
    if (tl.mode != "clock" && tl.mode != "state")
        fail(src, r.line(), "geometry.mode must be \"clock\" or \"state\"");
    if (tl.mode == "state" && (!tl.primary || !tl.reference))
        fail(src, r.line(),
             "geometry: state mode requires [geometry.primary] and [geometry.reference]");
    return tl;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_program(std::ostringstream& out, const char* name,
                   const StateProgramConfig& p) {
    out << "\n[geometry." << name << "]\n";
    out << "lambda0 = " << p.lambda0 << "\n";
    out << "flips = [";
    for (std::size_t i = 0; i < p.flips.size(); ++i)
        out << (i ? ", " : "") << fmt(p.flips[i]);
    out << "]\n";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name) {
    const std::string& src = source_name;
    Table root = parse_toml(text, src);
    Reader r(root, "config", src);
    ExperimentConfig cfg;

    const Table* species = r.opt_table("species");
    if (!species) fail(src, 1, "missing required [species] block");
    {
        Reader rs(*species, "species", src);
        auto mass_kg = rs.opt_number("mass_kg");
        auto mass_u = rs.opt_number("mass_u");
        if (mass_kg.has_value() == mass_u.has_value())
            fail(src, rs.line(), "species: set exactly one of mass_kg, mass_u");
        cfg.mass_kg = mass_kg ? *mass_kg : *mass_u * kAtomicMassUnit;
        auto omega = rs.opt_number("omega_rad_s");
        auto freq = rs.opt_number("transition_frequency_hz");
        if (omega.has_value() == freq.has_value())
            fail(src, rs.line(),
                 "species: set exactly one of omega_rad_s, transition_frequency_hz");
        cfg.omega = omega ? *omega : kTwoPi * *freq;
        cfg.label = rs.string_or("label", "");
        rs.finish();
    }

    if (const Table* viol = r.opt_table("violation")) {
        Reader rv(*viol, "violation", src);
        auto alpha = rv.opt_number("alpha");
        auto beta_a = rv.opt_number("beta_a");
        auto beta_b = rv.opt_number("beta_b");
        auto beta_mean = rv.opt_number("beta_mean");
        if (alpha && (beta_a || beta_b))
            fail(src, rv.line(), "violation: alpha is exclusive with beta_a/beta_b");
        if (!alpha && beta_mean)
            fail(src, rv.line(), "violation: beta_mean is only meaningful with alpha");
        if (alpha) {
            cfg.violation.alpha = alpha;
            cfg.violation.beta_mean = beta_mean;
        } else {
            cfg.violation.beta_a = beta_a.value_or(0.0);
            cfg.violation.beta_b = beta_b.value_or(0.0);
        }
        rv.finish();
    }

    if (const Table* env = r.opt_table("environment")) {
        Reader re(*env, "environment", src);
        cfg.g = re.number("g");
        re.finish();
    }

    if (const Table* trap = r.opt_table("trap")) {
        Reader rt(*trap, "trap", src);
        TrapConfig tc;
        tc.gamma = rt.number("gamma");
        tc.dgamma2 = rt.number_or("dgamma2", 0.0);
        rt.finish();
        cfg.trap = tc;
    }

    if (const Table* wp = r.opt_table("wavepacket")) {
        Reader rw(*wp, "wavepacket", src);
        WavePacketConfig wc;
        wc.var_z = rw.opt_number("var_z");
        wc.var_p = rw.opt_number("var_p");
        wc.allow_piecewise = rw.bool_or("allow_piecewise", false);
        rw.finish();
        if (wc.var_z.has_value() != wc.var_p.has_value())
            fail(src, wp->line, "wavepacket: set both var_z and var_p or neither");
        cfg.wavepacket = wc;
    }

    const Table* geom = r.opt_table("geometry");
    if (!geom) fail(src, 1, "missing required [geometry] block");
    {
        Reader rg(*geom, "geometry", src);
        auto name = rg.opt_string("name");
        if (!name) fail(src, rg.line(), "geometry: missing required key 'name'");
        auto kind = geometry_kind_from_string(*name);
        if (!kind) fail(src, rg.line(), "geometry: unknown name '" + *name + "'");
        cfg.geometry.name = *name;
        if (*kind == GeometryKind::custom) {
            cfg.geometry.timeline = read_timeline(rg, src);
        } else {
            const GeometryParamSchema schema = geometry_schema(*kind);
            for (const char* key : schema.required)
                cfg.geometry.params.emplace_back(key, rg.number(key));
            for (const char* key : schema.optional)
                if (auto v = rg.opt_number(key)) cfg.geometry.params.emplace_back(key, *v);
            if (*kind == GeometryKind::ai_symmetric_transitions) {
                std::string state = rg.string_or("initial_state", "a");
                if (state != "a" && state != "b")
                    fail(src, rg.line(), "geometry.initial_state must be \"a\" or \"b\"");
                cfg.geometry.initial_state = state[0];
            }
        }
        rg.finish();
    }

    if (const Table* num = r.opt_table("numerics")) {
        Reader rn(*num, "numerics", src);
        std::string quad = rn.string_or("quadrature", "closed_form");
        if (quad == "closed_form") {
            cfg.numerics.quadrature = QuadMode::closed_form;
        } else if (quad == "adaptive") {
            cfg.numerics.quadrature = QuadMode::adaptive;
        } else {
            fail(src, rn.line(), "numerics.quadrature must be closed_form or adaptive");
        }
        cfg.numerics.quad_tol = rn.number_or("quad_tol", 1e-12);
        cfg.numerics.ode_tol = rn.number_or("ode_tol", 1e-12);
        cfg.numerics.oracle = rn.bool_or("oracle", true);
        rn.finish();
    }

    if (const Table* sig = r.opt_table("signal")) {
        Reader rs(*sig, "signal", src);
        cfg.contrast = rs.number("contrast");
        rs.finish();
    }

    if (const Table* sens = r.opt_table("sensitivity")) {
        Reader rs(*sens, "sensitivity", src);
        SensitivityConfig sc;
        sc.n_atoms = rs.number("n_atoms");
        sc.t_avg = rs.number("t_avg");
        sc.t_cycle = rs.number("t_cycle");
        sc.t_red = rs.number("t_red");
        sc.dz0 = rs.number("dz0");
        sc.omega = rs.opt_number("omega");
        sc.g = rs.opt_number("g");
        rs.finish();
        cfg.sensitivity = sc;
    }

    if (const Table* out = r.opt_table("output")) {
        Reader ro(*out, "output", src);
        cfg.output.report = ro.string_or("report", "");
        cfg.output.trajectory = ro.string_or("trajectory", "");
        cfg.output.sample_rate = ro.number_or("sample_rate", 1000.0);
        if (!(cfg.output.sample_rate > 0.0))
            fail(src, ro.line(), "output.sample_rate must be positive");
        ro.finish();
    }

    r.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[species]\n";
    out << "mass_kg = " << fmt(cfg.mass_kg) << "\n";
    out << "omega_rad_s = " << fmt(cfg.omega) << "\n";
    if (!cfg.label.empty()) out << "label = \"" << cfg.label << "\"\n";

    out << "\n[violation]\n";
    if (cfg.violation.alpha) {
        out << "alpha = " << fmt(*cfg.violation.alpha) << "\n";
        if (cfg.violation.beta_mean)
            out << "beta_mean = " << fmt(*cfg.violation.beta_mean) << "\n";
    } else {
        out << "beta_a = " << fmt(cfg.violation.beta_a) << "\n";
        out << "beta_b = " << fmt(cfg.violation.beta_b) << "\n";
    }

    out << "\n[environment]\n";
    out << "g = " << fmt(cfg.g) << "\n";

    if (cfg.trap) {
        out << "\n[trap]\n";
        out << "gamma = " << fmt(cfg.trap->gamma) << "\n";
        out << "dgamma2 = " << fmt(cfg.trap->dgamma2) << "\n";
    }

    if (cfg.wavepacket) {
        out << "\n[wavepacket]\n";
        if (cfg.wavepacket->var_z) {
            out << "var_z = " << fmt(*cfg.wavepacket->var_z) << "\n";
            out << "var_p = " << fmt(*cfg.wavepacket->var_p) << "\n";
        }
        out << "allow_piecewise = " << (cfg.wavepacket->allow_piecewise ? "true" : "false")
            << "\n";
    }

    out << "\n[geometry]\n";
    out << "name = \"" << cfg.geometry.name << "\"\n";
    for (const auto& [key, value] : cfg.geometry.params)
        out << key << " = " << fmt(value) << "\n";
    if (cfg.geometry.initial_state)
        out << "initial_state = \"" << *cfg.geometry.initial_state << "\"\n";
    if (cfg.geometry.timeline) {
        const CustomTimeline& tl = *cfg.geometry.timeline;
        out << "t_final = " << fmt(tl.t_final) << "\n";
        out << "mode = \"" << tl.mode << "\"\n";
        if (tl.window)
            out << "window = [" << fmt((*tl.window)[0]) << ", " << fmt((*tl.window)[1])
                << "]\n";
        if (tl.red_window)
            out << "red_window = [" << fmt((*tl.red_window)[0]) << ", "
                << fmt((*tl.red_window)[1]) << "]\n";
        out << "red_multiplier = " << fmt(tl.red_multiplier) << "\n";
        out << "reference_separation = " << fmt(tl.reference_separation) << "\n";
        if (tl.mimic_accel) out << "mimic_accel = " << fmt(*tl.mimic_accel) << "\n";
        out << "\n[geometry.initial]\n";
        out << "z_upper = " << fmt(tl.z_upper) << "\n";
        out << "v_upper = " << fmt(tl.v_upper) << "\n";
        out << "z_lower = " << fmt(tl.z_lower) << "\n";
        out << "v_lower = " << fmt(tl.v_lower) << "\n";
        if (tl.primary) write_program(out, "primary", *tl.primary);
        if (tl.reference) write_program(out, "reference", *tl.reference);
        for (const TimelineEvent& ev : tl.events) {
            out << "\n[[geometry.event]]\n";
            out << "t = " << fmt(ev.t) << "\n";
            out << "branch = \"" << ev.branch << "\"\n";
            out << "kind = \"" << ev.kind << "\"\n";
            out << "magnitude = " << fmt(ev.magnitude) << "\n";
            out << "laser_phase = " << fmt(ev.laser_phase) << "\n";
        }
        for (const TimelineTrap& tw : tl.traps) {
            out << "\n[[geometry.trap]]\n";
            out << "branch = \"" << tw.branch << "\"\n";
            out << "t_on = " << fmt(tw.t_on) << "\n";
            out << "t_off = " << fmt(tw.t_off) << "\n";
            if (tw.center_is_const) {
                out << "center = " << fmt(tw.center_const) << "\n";
            } else {
                out << "center = [";
                for (std::size_t i = 0; i < tw.center_knots.size(); ++i)
                    out << (i ? ", " : "") << "[" << fmt(tw.center_knots[i].first) << ", "
                        << fmt(tw.center_knots[i].second) << "]";
                out << "]\n";
            }
        }
    }

    out << "\n[numerics]\n";
    out << "quadrature = \""
        << (cfg.numerics.quadrature == QuadMode::adaptive ? "adaptive" : "closed_form")
        << "\"\n";
    out << "quad_tol = " << fmt(cfg.numerics.quad_tol) << "\n";
    out << "ode_tol = " << fmt(cfg.numerics.ode_tol) << "\n";
    out << "oracle = " << (cfg.numerics.oracle ? "true" : "false") << "\n";

    if (cfg.contrast) {
        out << "\n[signal]\n";
        out << "contrast = " << fmt(*cfg.contrast) << "\n";
    }

    if (cfg.sensitivity) {
        out << "\n[sensitivity]\n";
        out << "n_atoms = " << fmt(cfg.sensitivity->n_atoms) << "\n";
        out << "t_avg = " << fmt(cfg.sensitivity->t_avg) << "\n";
        out << "t_cycle = " << fmt(cfg.sensitivity->t_cycle) << "\n";
        out << "t_red = " << fmt(cfg.sensitivity->t_red) << "\n";
        out << "dz0 = " << fmt(cfg.sensitivity->dz0) << "\n";
        if (cfg.sensitivity->omega) out << "omega = " << fmt(*cfg.sensitivity->omega) << "\n";
        if (cfg.sensitivity->g) out << "g = " << fmt(*cfg.sensitivity->g) << "\n";
    }

    out << "\n[output]\n";
    if (!cfg.output.report.empty()) out << "report = \"" << cfg.output.report << "\"\n";
    if (!cfg.output.trajectory.empty())
        out << "trajectory = \"" << cfg.output.trajectory << "\"\n";
    out << "sample_rate = " << fmt(cfg.output.sample_rate) << "\n";
    return out.str();
}

AtomSpecies config_species(const ExperimentConfig& cfg, Warnings* warnings) {
    return make_species(cfg.mass_kg, cfg.omega, cfg.label, warnings);
}

ViolationModel config_violation(const ExperimentConfig& cfg, const AtomSpecies& species) {
    if (cfg.violation.alpha)
        return violation_from_alpha(*cfg.violation.alpha, species,
                                    cfg.violation.beta_mean.value_or(0.0));
    return ViolationModel{cfg.violation.beta_a, cfg.violation.beta_b};
}

namespace {

double geom_param(const ExperimentConfig& cfg, const char* key) {
    for (const auto& [k, v] : cfg.geometry.params)
        if (k == key) return v;
    throw ValidationError(std::string("geometry: missing parameter '") + key + "'");
}

std::optional<double> geom_param_opt(const ExperimentConfig& cfg, const char* key) {
    for (const auto& [k, v] : cfg.geometry.params)
        if (k == key) return v;
    return std::nullopt;
}

PiecewisePoly trap_center(const TimelineTrap& tw) {
    if (tw.center_is_const) return pw_constant(tw.center_const, tw.t_on, tw.t_off);
    std::vector<double> t, z;
    for (const auto& [ti, zi] : tw.center_knots) {
        t.push_back(ti);
        z.push_back(zi);
    }
    return pw_linear(t, z);
}

GeometrySpec make_custom_geometry(const ExperimentConfig& cfg, const AtomSpecies& species,
                                  const ViolationModel& viol) {
    const CustomTimeline& tl = *cfg.geometry.timeline;
    GeometrySpec spec;
    spec.kind = GeometryKind::custom;
    spec.species = species;
    spec.violation = viol;
    spec.env = make_environment(cfg.g);
    if (cfg.trap) spec.trap = make_trap(cfg.trap->gamma, cfg.trap->dgamma2);
    spec.t_final = tl.t_final;

    spec.upper.z0 = tl.z_upper;
    spec.upper.v0 = tl.v_upper;
    spec.lower.z0 = tl.z_lower;
    spec.lower.v0 = tl.v_lower;
    spec.upper.coalesce_kicks = true;
    spec.lower.coalesce_kicks = true;

    std::vector<TimelineEvent> events = tl.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const TimelineEvent& a, const TimelineEvent& b) { return a.t < b.t; });
    for (const TimelineEvent& ev : events) {
        Kick k;
        k.t = ev.t;
        k.laser_phase = ev.laser_phase;
        if (ev.kind == "velocity") {
            k.dv = ev.magnitude;
            k.tag = KickTag::velocity_transfer;
        } else {
            k.dp = ev.magnitude;
            k.tag = ev.kind == "relaunch" ? KickTag::relaunch : KickTag::beam_splitter;
        }
        if (ev.branch != "lower") spec.upper.kicks.push_back(k);
        if (ev.branch != "upper") spec.lower.kicks.push_back(k);
    }

    std::vector<TimelineTrap> traps = tl.traps;
    std::stable_sort(traps.begin(), traps.end(),
                     [](const TimelineTrap& a, const TimelineTrap& b) { return a.t_on < b.t_on; });
    for (const TimelineTrap& tw : traps) {
        if (!cfg.trap)
            throw ValidationError("geometry: trap windows require a [trap] block");
        TrapWindow w{tw.t_on, tw.t_off, trap_center(tw)};
        if (tw.branch != "lower") spec.upper.traps.push_back(w);
        if (tw.branch != "upper") spec.lower.traps.push_back(w);
    }

    if (tl.mode == "clock") {
        spec.mode = MeasurementMode::clock_differential;
        spec.primary = LambdaProgram{+1, {}};
        spec.reference = LambdaProgram{-1, {}};
    } else {
        spec.mode = MeasurementMode::state_differential;
        spec.primary = LambdaProgram{tl.primary->lambda0, tl.primary->flips};
        spec.reference = LambdaProgram{tl.reference->lambda0, tl.reference->flips};
    }

    spec.window_begin = tl.window ? (*tl.window)[0] : 0.0;
    spec.window_end = tl.window ? (*tl.window)[1] : tl.t_final;
    spec.red_window_begin = tl.red_window ? (*tl.red_window)[0] : spec.window_begin;
    spec.red_window_end = tl.red_window ? (*tl.red_window)[1] : spec.window_end;
    spec.red_multiplier = tl.red_multiplier;
    spec.reference_separation = tl.reference_separation;
    spec.mimic_accel = tl.mimic_accel;
    spec.validate();
    return spec;
}

}  // namespace

GeometrySpec make_geometry(const ExperimentConfig& cfg, Warnings* warnings) {
    const AtomSpecies species = config_species(cfg, warnings);
    const ViolationModel viol = config_violation(cfg, species);
    const LabEnvironment env = make_environment(cfg.g);
    const TrapSpec trap =
        cfg.trap ? make_trap(cfg.trap->gamma, cfg.trap->dgamma2) : TrapSpec{};

    auto kind = geometry_kind_from_string(cfg.geometry.name);
    if (!kind) throw ValidationError("geometry: unknown name '" + cfg.geometry.name + "'");
    switch (*kind) {
        case GeometryKind::clock_static:
            return build_clock_static(species, viol, env, trap,
                                      geom_param(cfg, "separation"),
                                      geom_param(cfg, "duration"));
        case GeometryKind::clock_free_fall:
            return build_clock_free_fall(species, viol, env, geom_param(cfg, "separation"),
                                         geom_param(cfg, "duration"));
        case GeometryKind::clock_guided:
            return build_clock_guided(species, viol, env, trap,
                                      geom_param(cfg, "ramp_velocity"),
                                      geom_param(cfg, "ramp_duration"),
                                      geom_param(cfg, "hold_duration"));
        case GeometryKind::ai_guided:
            return build_ai_guided(species, viol, env, trap,
                                   geom_param(cfg, "ramp_velocity"),
                                   geom_param(cfg, "ramp_duration"),
                                   geom_param(cfg, "hold_duration"));
        case GeometryKind::ai_mach_zehnder:
            return build_ai_mach_zehnder(species, viol, env, geom_param(cfg, "wavenumber"),
                                         geom_param(cfg, "pulse_interval"));
        case GeometryKind::ai_levitated: {
            const double count = geom_param(cfg, "relaunch_count");
            if (count != std::floor(count) || count < 1.0)
                throw ValidationError("geometry: relaunch_count must be a positive integer");
            return build_ai_levitated(species, viol, env, geom_param(cfg, "wavenumber"),
                                      geom_param(cfg, "pulse_interval"),
                                      static_cast<int>(count),
                                      geom_param(cfg, "relaunch_accel"),
                                      geom_param_opt(cfg, "relaunch_offset"), warnings);
        }
        case GeometryKind::ai_doubly_differential:
            return build_ai_doubly_differential(
                species, viol, env, geom_param(cfg, "wavenumber"),
                geom_param(cfg, "pulse_interval"), geom_param(cfg, "hold_duration"),
                geom_param(cfg, "t1"), geom_param(cfg, "t2"));
        case GeometryKind::ai_symmetric_transitions:
            return build_ai_symmetric_transitions(
                species, viol, env, geom_param(cfg, "wavenumber"),
                geom_param(cfg, "pulse_interval"), geom_param(cfg, "hold_duration"),
                cfg.geometry.initial_state.value_or('a'));
        case GeometryKind::custom:
            if (!cfg.geometry.timeline)
                throw ValidationError("geometry: custom geometry requires a timeline");
            return make_custom_geometry(cfg, species, viol);
    }
    throw ValidationError("geometry: unknown name '" + cfg.geometry.name + "'");
}

EvalOptions config_eval_options(const ExperimentConfig& cfg, const AtomSpecies& species) {
    EvalOptions opts;
    opts.quadrature = cfg.numerics.quadrature;
    opts.quad_tol = cfg.numerics.quad_tol;
    opts.ode_tol = cfg.numerics.ode_tol;
    if (cfg.wavepacket) {
        if (cfg.wavepacket->var_z) {
            opts.wavepacket = make_wavepacket(*cfg.wavepacket->var_z, *cfg.wavepacket->var_p);
        } else {
            if (!cfg.trap || !(cfg.trap->gamma > 0.0))
                throw ValidationError(
                    "wavepacket: trap ground state requires a [trap] block with gamma > 0");
            opts.wavepacket = trap_ground_state(species, cfg.trap->gamma);
        }
        opts.wavepacket_piecewise = cfg.wavepacket->allow_piecewise;
    }
    return opts;
}

SensitivityInputs config_sensitivity(const ExperimentConfig& cfg,
                                     const AtomSpecies& species) {
    if (!cfg.sensitivity)
        throw ValidationError("sensitivity: config has no [sensitivity] block");
    SensitivityInputs in;
    in.n_atoms = cfg.sensitivity->n_atoms;
    in.t_avg = cfg.sensitivity->t_avg;
    in.t_cycle = cfg.sensitivity->t_cycle;
    in.t_red = cfg.sensitivity->t_red;
    in.dz0 = cfg.sensitivity->dz0;
    in.omega = cfg.sensitivity->omega.value_or(species.omega());
    in.g = cfg.sensitivity->g.value_or(cfg.g);
    return in;
}

void apply_axis(ExperimentConfig& cfg, const std::string& name, double value) {
    if (name == "g") {
        cfg.g = value;
        return;
    }
    if (name == "alpha") {
        const double mean = cfg.violation.alpha
                                ? cfg.violation.beta_mean.value_or(0.0)
                                : 0.5 * (cfg.violation.beta_a + cfg.violation.beta_b);
        cfg.violation = ViolationConfig{};
        cfg.violation.alpha = value;
        cfg.violation.beta_mean = mean;
        return;
    }
    if (name == "dbeta") {
        if (cfg.violation.alpha)
            throw ValidationError("sweep: axis dbeta conflicts with an alpha-mode config");
        const double mean = 0.5 * (cfg.violation.beta_a + cfg.violation.beta_b);
        cfg.violation.beta_a = mean - value / 2.0;
        cfg.violation.beta_b = mean + value / 2.0;
        return;
    }
    if (name == "beta_a" || name == "beta_b") {
        if (cfg.violation.alpha)
            throw ValidationError("sweep: axis " + name + " conflicts with an alpha-mode config");
        (name == "beta_a" ? cfg.violation.beta_a : cfg.violation.beta_b) = value;
        return;
    }
    if (name == "gamma" || name == "dgamma2") {
        if (!cfg.trap)
            throw ValidationError("sweep: axis " + name + " requires a [trap] block");
        (name == "gamma" ? cfg.trap->gamma : cfg.trap->dgamma2) = value;
        return;
    }
    if (name == "mass_kg") {
        cfg.mass_kg = value;
        return;
    }
    if (name == "contrast") {
        cfg.contrast = value;
        return;
    }
    for (auto& [k, v] : cfg.geometry.params) {
        if (k == name) {
            v = value;
            return;
        }
    }
    throw ValidationError("sweep: unknown axis '" + name + "'");
}

}  // namespace intphase
