#include "banlab/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace banlab::serialize {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

json parse_json_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + origin);
    return j;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

double number_at(const json& j, const std::string& field) {
    if (!j.is_number()) bad_field(field, "expected a number");
    return j.get<double>();
}

} // namespace

SpaceSpec space_from_json(const json& j, const std::string& field) {
    if (!j.is_object()) bad_field(field, "expected an object");
    SpaceSpec s;
    if (!j.contains("dim")) bad_field(field + ".dim", "missing");
    if (!j["dim"].is_number_integer()) bad_field(field + ".dim", "expected an integer");
    s.dim = j["dim"].get<int>();
    if (!j.contains("exponent")) bad_field(field + ".exponent", "missing");
    const json& e = j["exponent"];
    if (e.is_string() && (e.get<std::string>() == "inf" || e.get<std::string>() == "Inf"))
        s.exponent = kInfExponent;
    else if (e.is_number())
        s.exponent = e.get<double>();
    else
        bad_field(field + ".exponent", "expected a number or \"inf\"");
    if (j.contains("weights")) {
        if (!j["weights"].is_array()) bad_field(field + ".weights", "expected an array");
        for (const json& w : j["weights"])
            s.weights.push_back(number_at(w, field + ".weights[]"));
    }
    try {
        s.validate();
    } catch (const InputError& e2) {
        bad_field(field, e2.what());
    }
    return s;
}

json space_to_json(const SpaceSpec& s) {
    json j;
    j["dim"] = s.dim;
    if (s.is_infinity())
        j["exponent"] = "inf";
    else
        j["exponent"] = s.exponent;
    if (!s.weights.empty()) j["weights"] = s.weights;
    return j;
}

summing::Operator operator_from_json(const json& j, const std::string& field) {
    if (!j.is_object()) bad_field(field, "expected an object");
    summing::Operator T;
    if (!j.contains("domain")) bad_field(field + ".domain", "missing");
    T.domain = space_from_json(j["domain"], field + ".domain");
    if (!j.contains("codomain")) bad_field(field + ".codomain", "missing");
    T.codomain = space_from_json(j["codomain"], field + ".codomain");
    if (!j.contains("matrix")) bad_field(field + ".matrix", "missing");
    if (!j["matrix"].is_array()) bad_field(field + ".matrix", "expected an array of rows");
    for (const json& row : j["matrix"]) {
        if (!row.is_array()) bad_field(field + ".matrix", "expected rows to be arrays");
        std::vector<double> r;
        for (const json& v : row) r.push_back(number_at(v, field + ".matrix[][]"));
        T.matrix.push_back(std::move(r));
    }
    try {
        T.validate();
    } catch (const InputError& e) {
        bad_field(field, e.what());
    }
    return T;
}

json operator_to_json(const summing::Operator& T) {
    json j;
    j["matrix"] = T.matrix;
    j["domain"] = space_to_json(T.domain);
    j["codomain"] = space_to_json(T.codomain);
    return j;
}

std::pair<vfun::MeasureSpace, vfun::SimpleFunction> function_from_json(const json& j,
                                                                       const std::string& field) {
    if (!j.is_object()) bad_field(field, "expected an object");
    if (!j.contains("space")) bad_field(field + ".space", "missing");
    vfun::SimpleFunction f;
    f.space = space_from_json(j["space"], field + ".space");
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
        bad_field(field + ".cells", "expected a nonempty array");
    vfun::MeasureSpace ms;
    for (const json& cell : j["cells"]) {
        if (!cell.is_object() || !cell.contains("mass") || !cell.contains("value"))
            bad_field(field + ".cells[]", "expected objects with 'mass' and 'value'");
        ms.masses.push_back(number_at(cell["mass"], field + ".cells[].mass"));
        if (!cell["value"].is_array()) bad_field(field + ".cells[].value", "expected an array");
        Vector v;
        for (const json& c : cell["value"]) v.coords.push_back(number_at(c, field + ".cells[].value[]"));
        f.values.push_back(std::move(v));
    }
    try {
        ms.validate();
        f.validate();
    } catch (const InputError& e) {
        bad_field(field, e.what());
    }
    return {std::move(ms), std::move(f)};
}

json function_to_json(const vfun::MeasureSpace& ms, const vfun::SimpleFunction& f) {
    json j;
    j["space"] = space_to_json(f.space);
    json cells = json::array();
    for (size_t k = 0; k < f.values.size(); ++k) {
        json cell;
        cell["mass"] = ms.masses[k];
        cell["value"] = f.values[k].coords;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    return j;
}

summing::SummingParams params_from_json(const json& j, const std::string& field) {
    if (!j.is_object()) bad_field(field, "expected an object");
    summing::SummingParams params;
    const std::string kind = j.value("kind", "p_summing");
    if (kind == "p_summing")
        params.kind = summing::SummingKind::p_summing;
    else if (kind == "pq_summing")
        params.kind = summing::SummingKind::pq_summing;
    else if (kind == "p_sigma")
        params.kind = summing::SummingKind::p_sigma;
    else
        bad_field(field + ".kind", "expected p_summing, pq_summing, or p_sigma");
    if (!j.contains("p")) bad_field(field + ".p", "missing");
    params.p = number_at(j["p"], field + ".p");
    if (j.contains("q")) params.q = number_at(j["q"], field + ".q");
    if (j.contains("sigma")) params.sigma = number_at(j["sigma"], field + ".sigma");
    try {
        params.validate();
    } catch (const InputError& e) {
        bad_field(field, e.what());
    }
    return params;
}

std::string check_report_line(const harness::CheckReport& r, int instance) {
    std::string out = "{";
    out += "\"check\":\"" + escape(r.check) + "\"";
    out += ",\"instance\":" + std::to_string(instance);
    out += ",\"kind\":\"" + escape(r.kind) + "\"";
    out += ",\"lhs\":" + format_double(r.lhs);
    out += ",\"rhs\":" + format_double(r.rhs);
    out += ",\"C\":" + format_double(r.constant);
    out += ",\"margin\":" + format_double(r.margin);
    out += ",\"tolerance\":" + format_double(r.tolerance);
    out += std::string(",\"pass\":") + (r.pass ? "true" : "false");
    out += ",\"inputs_digest\":\"" + r.inputs_digest + "\"";
    out += ",\"seed\":" + std::to_string(r.seed);
    out += "}";
    return out;
}

std::string check_report_csv_row(const harness::CheckReport& r) {
    std::string out = escape(r.check);
    out += "," + format_double(r.lhs);
    out += "," + format_double(r.rhs);
    out += "," + format_double(r.constant);
    out += "," + format_double(r.margin);
    out += r.pass ? ",true" : ",false";
    out += "," + std::to_string(r.seed);
    return out;
}

std::string estimate_line(const std::string& name, const summing::NormEstimate& est) {
    std::string out = "{";
    out += "\"name\":\"" + escape(name) + "\"";
    out += ",\"value\":" + format_double(est.value);
    out += ",\"certification\":\"" + summing::to_string(est.certification) + "\"";
    out += ",\"seed\":" + std::to_string(est.diagnostics.seed);
    out += ",\"restarts\":" + std::to_string(est.diagnostics.restarts);
    out += ",\"iterations\":" + std::to_string(est.diagnostics.iterations);
    if (!est.diagnostics.oracle.empty())
        out += ",\"oracle\":\"" + escape(est.diagnostics.oracle) + "\"";
    if (est.diagnostics.best_family && !est.diagnostics.best_family->vectors.empty()) {
        out += ",\"best_family\":[";
        bool first_vec = true;
        for (const Vector& v : est.diagnostics.best_family->vectors) {
            if (!first_vec) out += ",";
            first_vec = false;
            out += "[";
            for (size_t i = 0; i < v.coords.size(); ++i) {
                if (i) out += ",";
                out += format_double(v.coords[i]);
            }
            out += "]";
        }
        out += "]";
    }
    out += "}";
    return out;
}

} // namespace banlab::serialize
