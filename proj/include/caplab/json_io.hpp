#pragma once

#include <string>
#include <vector>

#include "caplab/criterion.hpp"
#include "caplab/frostman.hpp"
#include "caplab/geometry.hpp"
#include "caplab/witness.hpp"

namespace caplab::json_io {

// Deterministic JSON emitter: insertion-ordered keys, numbers formatted with
// %.12g, no locale dependence. Build the document with the begin/end and
// field calls, then take str().
class JsonWriter {
public:
    void begin_object();
    void end_object();
    void begin_array();
    void end_array();
    void key(const std::string& name);
    void value(double v);
    void value(long long v);
    void value(int v) { value(static_cast<long long>(v)); }
    void value(bool v);
    void value(const std::string& v);
    void value(const char* v) { value(std::string(v)); }
    void null();

    void field(const std::string& name, double v) { key(name); value(v); }
    void field(const std::string& name, long long v) { key(name); value(v); }
    void field(const std::string& name, int v) { key(name); value(v); }
    void field(const std::string& name, bool v) { key(name); value(v); }
    void field(const std::string& name, const std::string& v) { key(name); value(v); }
    void field(const std::string& name, const char* v) { key(name); value(v); }

    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_key_ = false;
    void separator();
};

// Region schema: {"disk": {"center": [x, y], "radius": r}},
// {"square": {"corner": [x, y], "side": s}},
// {"annulus": {"center": [x, y], "inner": a, "outer": b}},
// {"union": [...]}, {"intersection": [...]}, {"difference": [minuend,
// subtrahend]}, {"empty": true}. Parse errors raise ConfigError.
geometry::Region parse_region(const std::string& json_text);
geometry::Region load_region(const std::string& path);
void write_region(JsonWriter& w, const geometry::Region& region);

// Measures serialize as {"resolution": r, "atoms": [[x, y, weight], ...]}.
void write_measure(JsonWriter& w, const frostman::DiscreteMeasure& nu);
frostman::DiscreteMeasure parse_measure(const std::string& json_text);

void write_criterion_report(JsonWriter& w, const criterion::CriterionReport& report);
void write_witness_report(JsonWriter& w, const witness::WitnessReport& report);

// Series terms as CSV: n, lower, upper, partial_lower, partial_upper.
std::string criterion_terms_csv(const criterion::CriterionReport& report);

// Writes atomically: temp file in the target directory, then rename.
void write_file(const std::string& path, const std::string& content);

} // namespace caplab::json_io
