#include "caplab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "caplab/errors.hpp"
#include "caplab/numerics.hpp"

namespace caplab::json_io {

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

void JsonWriter::separator() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!needs_comma_.empty()) {
        if (needs_comma_.back()) out_ += ',';
        needs_comma_.back() = true;
    }
}

void JsonWriter::begin_object() {
    separator();
    out_ += '{';
    needs_comma_.push_back(false);
}

void JsonWriter::end_object() {
    needs_comma_.pop_back();
    out_ += '}';
}

void JsonWriter::begin_array() {
    separator();
    out_ += '[';
    needs_comma_.push_back(false);
}

void JsonWriter::end_array() {
    needs_comma_.pop_back();
    out_ += ']';
}

void JsonWriter::key(const std::string& name) {
    separator();
    out_ += '"';
    out_ += escape_json(name);
    out_ += "\":";
    pending_key_ = true;
}

// Non-finite values have no JSON literal; they serialize as null.
void JsonWriter::value(double v) {
    separator();
    if (!std::isfinite(v)) {
        out_ += "null";
        return;
    }
    out_ += numerics::format_double(v);
}

void JsonWriter::value(long long v) {
    separator();
    out_ += std::to_string(v);
}

void JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
}

void JsonWriter::value(const std::string& v) {
    separator();
    out_ += '"';
    out_ += escape_json(v);
    out_ += '"';
}

void JsonWriter::null() {
    separator();
    out_ += "null";
}

namespace {

using nlohmann::json;

geometry::Point parse_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(what) + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

double parse_number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

geometry::Region region_from_json(const json& j) {
    if (!j.is_object() || j.size() != 1)
        throw ConfigError("region must be an object with exactly one kind key");
    const auto it = j.begin();
    const std::string& kind = it.key();
    const json& body = it.value();
    if (kind == "empty") {
        if (!body.is_boolean() || !body.get<bool>())
            throw ConfigError("empty region must be {\"empty\": true}");
        return geometry::Region::empty();
    }
    if (kind == "disk") {
        return geometry::Region::disk({parse_point(body.at("center"), "disk center"),
                                       parse_number(body.at("radius"), "disk radius")});
    }
    if (kind == "square") {
        return geometry::Region::square({parse_point(body.at("corner"), "square corner"),
                                         parse_number(body.at("side"), "square side")});
    }
    if (kind == "annulus") {
        return geometry::Region::annulus({parse_point(body.at("center"), "annulus center"),
                                          parse_number(body.at("inner"), "annulus inner"),
                                          parse_number(body.at("outer"), "annulus outer")});
    }
    if (kind == "union" || kind == "intersection") {
        if (!body.is_array()) throw ConfigError(kind + " body must be an array");
        std::vector<geometry::Region> parts;
        parts.reserve(body.size());
        for (const json& part : body) parts.push_back(region_from_json(part));
        return kind == "union" ? geometry::Region::join(std::move(parts))
                               : geometry::Region::intersect(std::move(parts));
    }
    if (kind == "difference") {
        if (!body.is_array() || body.size() != 2)
            throw ConfigError("difference body must be [minuend, subtrahend]");
        return geometry::Region::difference(region_from_json(body[0]),
                                            region_from_json(body[1]));
    }
    throw ConfigError("unknown region kind: " + kind);
}

} // namespace

geometry::Region parse_region(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid region JSON: ") + e.what());
    }
    try {
        return region_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid region JSON: ") + e.what());
    }
}

geometry::Region load_region(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_region(buffer.str());
}

namespace {

void write_point(JsonWriter& w, const geometry::Point& p) {
    w.begin_array();
    w.value(p.re);
    w.value(p.im);
    w.end_array();
}

} // namespace

void write_region(JsonWriter& w, const geometry::Region& region) {
    using geometry::Region;
    w.begin_object();
    switch (region.kind()) {
        case Region::Kind::Disk: {
            w.key("disk");
            w.begin_object();
            w.key("center");
            write_point(w, region.as_disk().center);
            w.field("radius", region.as_disk().radius);
            w.end_object();
            break;
        }
        case Region::Kind::Square: {
            w.key("square");
            w.begin_object();
            w.key("corner");
            write_point(w, region.as_square().corner);
            w.field("side", region.as_square().side);
            w.end_object();
            break;
        }
        case Region::Kind::Annulus: {
            w.key("annulus");
            w.begin_object();
            w.key("center");
            write_point(w, region.as_annulus().center);
            w.field("inner", region.as_annulus().inner);
            w.field("outer", region.as_annulus().outer);
            w.end_object();
            break;
        }
        case Region::Kind::Union: {
            if (region.children().empty()) {
                w.field("empty", true);
                break;
            }
            w.key("union");
            w.begin_array();
            for (const Region& part : region.children()) write_region(w, part);
            w.end_array();
            break;
        }
        case Region::Kind::Intersection: {
            w.key("intersection");
            w.begin_array();
            for (const Region& part : region.children()) write_region(w, part);
            w.end_array();
            break;
        }
        case Region::Kind::Difference: {
            w.key("difference");
            w.begin_array();
            write_region(w, region.children()[0]);
            write_region(w, region.children()[1]);
            w.end_array();
            break;
        }
    }
    w.end_object();
}

void write_measure(JsonWriter& w, const frostman::DiscreteMeasure& nu) {
    w.begin_object();
    w.field("resolution", nu.resolution);
    w.key("atoms");
    w.begin_array();
    for (const auto& atom : nu.atoms) {
        w.begin_array();
        w.value(atom.position.re);
        w.value(atom.position.im);
        w.value(atom.weight);
        w.end_array();
    }
    w.end_array();
    w.end_object();
}

frostman::DiscreteMeasure parse_measure(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid measure JSON: ") + e.what());
    }
    frostman::DiscreteMeasure nu;
    try {
        nu.resolution = parse_number(j.at("resolution"), "resolution");
        const json& atoms = j.at("atoms");
        if (!atoms.is_array()) throw ConfigError("atoms must be an array");
        for (const json& row : atoms) {
            if (!row.is_array() || row.size() != 3)
                throw ConfigError("each atom must be [x, y, weight]");
            frostman::Atom atom;
            atom.position = {parse_number(row[0], "atom x"), parse_number(row[1], "atom y")};
            atom.weight = parse_number(row[2], "atom weight");
            nu.atoms.push_back(atom);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid measure JSON: ") + e.what());
    }
    return nu;
}

void write_criterion_report(JsonWriter& w, const criterion::CriterionReport& report) {
    w.begin_object();
    w.field("p", report.params.p);
    w.field("lambda", report.params.lambda);
    w.field("t", report.t);
    w.field("method", criterion::method_name(report.method));
    w.field("verdict", criterion::verdict_name(report.verdict));
    w.key("n_values");
    w.begin_array();
    for (int n : report.n_values) w.value(n);
    w.end_array();
    w.key("term_lower");
    w.begin_array();
    for (const auto& term : report.terms) w.value(term.lower);
    w.end_array();
    w.key("term_upper");
    w.begin_array();
    for (const auto& term : report.terms) w.value(term.upper);
    w.end_array();
    w.key("partial_lower");
    w.begin_array();
    for (double v : report.partial_lower) w.value(v);
    w.end_array();
    w.key("partial_upper");
    w.begin_array();
    for (double v : report.partial_upper) w.value(v);
    w.end_array();
    w.field("sum_lower", report.sum_lower);
    w.field("sum_upper", report.sum_upper);
    w.key("ratio_limit");
    if (report.ratio_limit)
        w.value(*report.ratio_limit);
    else
        w.null();
    w.field("notes", report.notes);
    w.end_object();
}

void write_witness_report(JsonWriter& w, const witness::WitnessReport& report) {
    w.begin_object();
    w.field("status", report.status);
    w.field("p", report.params_used.p);
    w.field("lambda", report.params_used.lambda);
    w.field("t", report.t);
    w.field("alpha", report.alpha);
    w.field("derivative_floor", report.derivative_floor);
    w.key("blocks");
    w.begin_array();
    for (const auto& block : report.blocks) {
        w.begin_object();
        w.field("m", block.m);
        w.field("M", block.M);
        w.field("block_weight", block.block_weight);
        w.field("derivative_at_x", block.derivative_at_x);
        w.field("seminorm_part", block.seminorm_part);
        w.field("lp_part", block.lp_part);
        w.field("norm_estimate", block.norm_estimate);
        w.end_object();
    }
    w.end_array();
    w.key("shells");
    w.begin_array();
    for (const auto& shell : report.shells) {
        w.begin_object();
        w.field("n", shell.n);
        w.field("epsilon", shell.epsilon);
        w.field("content", shell.content);
        w.field("mass", shell.mass);
        w.field("weighted_term", shell.weighted_term);
        w.field("osc_ratio", shell.osc_ratio);
        w.field("mean_ratio", shell.mean_ratio);
        w.field("lp_ratio", shell.lp_ratio);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

std::string criterion_terms_csv(const criterion::CriterionReport& report) {
    std::string out = "n,lower,upper,partial_lower,partial_upper\n";
    for (std::size_t i = 0; i < report.terms.size(); ++i) {
        out += std::to_string(report.n_values[i]);
        out += ',';
        out += numerics::format_double(report.terms[i].lower);
        out += ',';
        out += numerics::format_double(report.terms[i].upper);
        out += ',';
        out += numerics::format_double(report.partial_lower[i]);
        out += ',';
        out += numerics::format_double(report.partial_upper[i]);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    const std::string temp = path + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + path);
        out << content;
        if (!out) throw ConfigError("cannot write file: " + path);
    }
    if (std::rename(temp.c_str(), path.c_str()) != 0) {
        std::remove(temp.c_str());
        throw ConfigError("cannot write file: " + path);
    }
}

} // namespace caplab::json_io
