#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zetalab/experiments.hpp"

namespace zetalab::report {

using json = nlohmann::ordered_json;

/// Error bounds are printed to three significant digits; they are estimates,
/// not values.
inline std::string err_text(double e) {
    if (e == 0.0) return "0";
    if (!std::isfinite(e)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", e);
    return buf;
}

/// Shortest decimal that reads back as the same double.
inline std::string plain(double x) {
    char buf[32];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline json quantity(const Quantity& q) { return json{{"value", q.text}, {"err_bound", err_text(q.err_bound)}}; }

template <class T>
json complex_value(const CValue<T>& c, unsigned bits) {
    // digits of each part follow the shared absolute error
    return json{{"re", make_quantity<T>(c.value.re, c.err_bound, bits).text},
                {"im", make_quantity<T>(c.value.im, c.err_bound, bits).text},
                {"err_bound", err_text(c.err_bound)}};
}

template <class T>
json real_value(const T& x, double err, unsigned bits) {
    return json{{"value", make_quantity<T>(x, err, bits).text}, {"err_bound", err_text(err)}};
}

inline json params(const ParamSet& p) {
    json j;
    j["regime"] = to_string(p.regime);
    j["b"] = plain(p.b);
    j["epsilon"] = plain(p.epsilon);
    j["r"] = plain(p.r);
    j["a"] = plain(p.a);
    j["gamma0"] = p.gamma0_text;
    j["beta0"] = plain(p.beta0);
    j["T"] = plain(p.T);
    j["v"] = p.v_text;
    j["w"] = json{{"re", plain(p.w_re())}, {"im", p.v_text}, {"err_bound", "0"}};
    j["s0"] = plain(p.s0);
    j["z0"] = plain(p.z0);
    j["z1"] = plain(p.z1);
    j["U"] = p.U;
    j["V"] = p.V;
    j["J"] = p.J;
    j["c0"] = plain(p.c0);
    j["strict"] = p.strict;
    j["regime_valid"] = p.regime_valid;
    j["hypotheses_satisfied"] = p.hypotheses_satisfied;
    j["notes"] = p.notes;
    return j;
}

inline json bound_report(const BoundReport& r) {
    json j;
    j["lemma_id"] = r.lemma_id;
    j["lhs"] = quantity(r.lhs);
    j["rhs_envelope"] = quantity(r.rhs_envelope);
    j["ratio"] = r.ratio ? json(make_quantity(*r.ratio).text) : json(nullptr);
    j["hypotheses_satisfied"] = r.hypotheses_satisfied;
    j["params"] = r.params ? params(*r.params) : json(nullptr);
    json extras = json::object();
    for (const auto& e : r.extras) extras[e.name] = quantity(e.value);
    j["extras"] = extras;
    j["notes"] = r.notes;
    return j;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline constexpr const char* csv_version_line = "# zetalab-csv 1";

inline std::string csv_table(const std::vector<std::string>& cols, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    os << csv_version_line << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_escape(cols[i]);
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
        os << '\n';
    }
    return os.str();
}

/// Grid dump when the report has one, otherwise one row per reported number.
inline std::string bound_report_csv(const BoundReport& r) {
    if (!r.grid_rows.empty()) return csv_table(r.grid_columns, r.grid_rows);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"lhs", r.lhs.text, err_text(r.lhs.err_bound)});
    rows.push_back({"rhs_envelope", r.rhs_envelope.text, err_text(r.rhs_envelope.err_bound)});
    rows.push_back({"ratio", r.ratio ? make_quantity(*r.ratio).text : "", ""});
    for (const auto& e : r.extras) rows.push_back({e.name, e.value.text, err_text(e.value.err_bound)});
    return csv_table({"name", "value", "err_bound"}, rows);
}

/// Flattens a JSON object into "key: value" lines.
inline void text_lines(const json& j, const std::string& prefix, std::ostringstream& os) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            text_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) text_lines(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

inline std::string as_text(const json& j) {
    std::ostringstream os;
    text_lines(j, "", os);
    return os.str();
}

/// Flat JSON objects become a two-column CSV.
inline std::string as_csv(const json& j) {
    std::vector<std::vector<std::string>> rows;
    std::ostringstream os;
    text_lines(j, "", os);
    std::istringstream is(os.str());
    std::string line;
    while (std::getline(is, line)) {
        auto k = line.find(": ");
        rows.push_back({line.substr(0, k), line.substr(k + 2)});
    }
    return csv_table({"name", "value"}, rows);
}

inline json error_object(const std::string& kind, const std::string& message) {
    return json{{"error", json{{"kind", kind}, {"message", message}}}};
}

}  // namespace zetalab::report
