#include "quadsurf/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace quadsurf {

namespace {

using nlohmann::json;

std::string fixed(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string vec_string(const Vec3 &v) {
    return "(" + to_string(v[0]) + ", " + to_string(v[1]) + ", " + to_string(v[2]) + ")";
}

json vec_json(const Vec3 &v) { return json::array({to_string(v[0]), to_string(v[1]), to_string(v[2])}); }

std::string direction_string(const Direction &d) { return "(" + to_string(d.a) + " : " + to_string(d.b) + ")"; }

json inertia_json(const Inertia &i) { return {{"positive", i.n_pos}, {"negative", i.n_neg}, {"zero", i.n_zero}}; }

std::string inertia_string(const Inertia &i) {
    return "(+" + std::to_string(i.n_pos) + ", -" + std::to_string(i.n_neg) + ", 0:" + std::to_string(i.n_zero) + ")";
}

}  // namespace

void write_csv(std::ostream &os, const ExperimentReport &report) {
    os << "experiment,surface,R,q,p,measured,predicted_slope,fitted_slope,residual\n";
    for (const auto &s : report.series) {
        for (const auto &r : s.rows) {
            double fitted = kNaN, residual = kNaN;
            if (s.fit) {
                fitted = s.fit->slope;
                if (r.measured > 0 && r.R > 0)
                    residual = std::log(r.measured) - (s.fit->intercept + s.fit->slope * std::log(r.R));
            }
            os << csv_field(s.experiment) << ',' << csv_field(s.surface) << ',' << fixed(r.R) << ',' << fixed(s.q)
               << ',' << fixed(s.p) << ',' << fixed(r.measured) << ',' << fixed(s.predicted_slope) << ','
               << fixed(fitted) << ',' << fixed(residual) << '\n';
        }
    }
}

std::string csv_string(const ExperimentReport &report) {
    std::ostringstream os;
    write_csv(os, report);
    return os.str();
}

json to_json(const ExperimentReport &report) {
    json series = json::array();
    for (const auto &s : report.series) {
        json rows = json::array();
        for (const auto &r : s.rows)
            rows.push_back({{"R", number(r.R)},
                            {"measured", number(r.measured)},
                            {"predicted_exponent", number(r.predicted_exponent)},
                            {"notes", r.notes}});
        json fit = nullptr;
        if (s.fit)
            fit = {{"slope", number(s.fit->slope)},
                   {"intercept", number(s.fit->intercept)},
                   {"max_residual", number(s.fit->max_residual)},
                   {"n_points", s.fit->n_points}};
        series.push_back({{"experiment", s.experiment},
                          {"surface", s.surface},
                          {"q", number(s.q)},
                          {"p", number(s.p)},
                          {"predicted_slope", number(s.predicted_slope)},
                          {"rows", rows},
                          {"fit", fit}});
    }
    json extras = json::object();
    for (const auto &[k, v] : report.extras) extras[k] = number(v);
    return {{"experiment", report.experiment}, {"surface", report.surface}, {"series", series}, {"extras", extras}};
}

json to_json(const ClassificationCertificate &c) {
    json j;
    j["label"] = to_string(c.label);
    j["irreducible"] = c.irreducibility.irreducible;
    j["dependency"] = c.irreducibility.dependency
                          ? json::array({to_string(c.irreducibility.dependency->first),
                                         to_string(c.irreducibility.dependency->second)})
                          : json(nullptr);
    j["common_kernel"] = c.irreducibility.common_kernel ? vec_json(*c.irreducibility.common_kernel) : json(nullptr);
    j["cubic"] = c.cubic.to_string();
    j["cubic_coefficients"] =
        json::array({to_string(c.cubic.c[0]), to_string(c.cubic.c[1]), to_string(c.cubic.c[2]), to_string(c.cubic.c[3])});
    j["root_kind"] = to_string(c.pattern.kind);
    auto dir = [](const std::optional<Direction> &d) {
        return d ? json::array({to_string(d->a), to_string(d->b)}) : json(nullptr);
    };
    j["repeated_root_direction"] = dir(c.pattern.repeated_root_direction);
    j["simple_root_direction"] = dir(c.pattern.simple_root_direction);
    j["simple_real_roots"] = c.pattern.simple_real_roots_count;
    j["d_condition"] = c.d_result.holds;
    j["d_witness"] = c.d_result.witness_w ? vec_json(*c.d_result.witness_w) : json(nullptr);
    if (c.r_result) {
        j["d_prime"] = c.r_result->d_prime;
        j["rank_witness_normal"] = c.r_result->witness_normal.to_string();
        j["rank_method"] = to_string(c.r_result->method);
    } else {
        j["d_prime"] = nullptr;
        j["rank_witness_normal"] = nullptr;
        j["rank_method"] = nullptr;
    }
    j["cm"] = c.cm.holds;
    j["max_real_root_multiplicity"] =
        c.cm.max_real_root_multiplicity ? json(*c.cm.max_real_root_multiplicity) : json(nullptr);
    j["critical_gamma"] = to_string(c.cm.critical_gamma);
    j["signature_at_repeated_root"] =
        c.signature_at_repeated_root ? inertia_json(*c.signature_at_repeated_root) : json(nullptr);
    j["signature_at_simple_root"] =
        c.signature_at_simple_root ? inertia_json(*c.signature_at_simple_root) : json(nullptr);
    return j;
}

std::string certificate_table(const ClassificationCertificate &c) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("label", to_string(c.label));
    rows.emplace_back("irreducible", c.irreducibility.irreducible ? "yes" : "no");
    if (c.irreducibility.dependency)
        rows.emplace_back("dependency", to_string(c.irreducibility.dependency->first) + "·P + " +
                                            to_string(c.irreducibility.dependency->second) + "·Q = 0");
    if (c.irreducibility.common_kernel) rows.emplace_back("common kernel", vec_string(*c.irreducibility.common_kernel));
    rows.emplace_back("D(x1,x2)", c.cubic.to_string());
    rows.emplace_back("root pattern", to_string(c.pattern.kind));
    if (c.pattern.repeated_root_direction)
        rows.emplace_back("repeated root", direction_string(*c.pattern.repeated_root_direction));
    if (c.pattern.simple_root_direction)
        rows.emplace_back("simple root", direction_string(*c.pattern.simple_root_direction));
    rows.emplace_back("simple real roots", std::to_string(c.pattern.simple_real_roots_count));
    rows.emplace_back("(D) holds", c.d_result.holds ? "yes" : "no");
    if (c.d_result.witness_w) rows.emplace_back("(D) witness", vec_string(*c.d_result.witness_w));
    if (c.r_result) {
        rows.emplace_back("d'", std::to_string(c.r_result->d_prime));
        rows.emplace_back("rank witness normal", c.r_result->witness_normal.to_string());
        rows.emplace_back("rank method", to_string(c.r_result->method));
    }
    rows.emplace_back("(CM) holds", c.cm.holds ? "yes" : "no");
    rows.emplace_back("max real root multiplicity", c.cm.max_real_root_multiplicity
                                                        ? std::to_string(*c.cm.max_real_root_multiplicity)
                                                        : "unbounded");
    rows.emplace_back("critical gamma", to_string(c.cm.critical_gamma));
    if (c.signature_at_repeated_root)
        rows.emplace_back("signature at repeated root", inertia_string(*c.signature_at_repeated_root));
    if (c.signature_at_simple_root)
        rows.emplace_back("signature at simple root", inertia_string(*c.signature_at_simple_root));
    std::size_t width = 0;
    for (const auto &r : rows) width = std::max(width, r.first.size());
    std::string out;
    for (const auto &[k, v] : rows) out += k + std::string(width + 2 - k.size(), ' ') + v + "\n";
    return out;
}

}  // namespace quadsurf
