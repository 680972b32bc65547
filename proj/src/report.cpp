#include "steinlil/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>

#include "steinlil/error.hpp"

namespace steinlil {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
}

double parse_number(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw DomainError("unexpected number '" + s + "' in report");
    }
    return j.get<double>();
}

AuditRule::Kind rule_kind(const std::string& s) {
    for (auto k : {AuditRule::Kind::Bounded, AuditRule::Kind::Inequality, AuditRule::Kind::Stable,
                   AuditRule::Kind::Decreasing, AuditRule::Kind::Fraction, AuditRule::Kind::Info}) {
        if (rule_name(k) == s) return k;
    }
    throw DomainError("unknown audit rule '" + s + "'");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string rule_name(AuditRule::Kind kind) {
    switch (kind) {
        case AuditRule::Kind::Bounded: return "bounded";
        case AuditRule::Kind::Inequality: return "inequality";
        case AuditRule::Kind::Stable: return "stable";
        case AuditRule::Kind::Decreasing: return "decreasing";
        case AuditRule::Kind::Fraction: return "fraction";
        case AuditRule::Kind::Info: return "info";
    }
    return "info";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const AuditCheck& AuditReport::check(const std::string& check_name) const {
    for (const auto& c : checks) {
        if (c.name == check_name) return c;
    }
    throw DomainError("report '" + name + "' has no check '" + check_name + "'");
}

double fitted_spread(const AuditCheck& check, double floor) {
    if (check.rows.empty()) return 1.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : check.rows) {
        if (!std::isfinite(r.fitted)) return std::numeric_limits<double>::infinity();
        lo = std::min(lo, std::abs(r.fitted));
        hi = std::max(hi, std::abs(r.fitted));
    }
    if (hi <= floor) return 1.0;
    return hi / std::max(lo, floor);
}

bool evaluate(AuditCheck& check) {
    const AuditRule* fraction = nullptr;
    for (auto& row : check.rows) {
        row.pass = true;
        for (const auto& rule : check.rules) {
            if (rule.kind == AuditRule::Kind::Bounded) {
                row.pass = row.pass && row.fitted <= rule.bound;
            } else if (rule.kind == AuditRule::Kind::Inequality) {
                row.pass = row.pass && row.measured <= row.target + rule.k_sigma * row.std_error + rule.slack;
            }
        }
    }
    bool pass = true;
    for (const auto& rule : check.rules) {
        switch (rule.kind) {
            case AuditRule::Kind::Stable:
                pass = pass && fitted_spread(check, rule.floor) <= rule.bound;
                break;
            case AuditRule::Kind::Decreasing:
                for (std::size_t i = 1; i < check.rows.size(); ++i) {
                    pass = pass && check.rows[i].measured < check.rows[i - 1].measured;
                }
                break;
            case AuditRule::Kind::Fraction: fraction = &rule; break;
            default: break;
        }
    }
    if (fraction != nullptr) {
        const auto passing = std::count_if(check.rows.begin(), check.rows.end(), [](const AuditRow& r) { return r.pass; });
        const double share = check.rows.empty() ? 1.0 : static_cast<double>(passing) / static_cast<double>(check.rows.size());
        pass = pass && share >= fraction->bound;
    } else {
        for (const auto& row : check.rows) pass = pass && row.pass;
    }
    check.pass = pass;
    return pass;
}

void evaluate(AuditReport& report) {
    bool pass = true;
    for (auto& c : report.checks) pass = evaluate(c) && pass;
    report.pass = pass;
}

std::string to_json(const AuditReport& report) {
    Json j;
    j["report"] = report.name;
    j["pass"] = report.pass;
    j["config"] = report.config;
    j["checks"] = Json::array();
    for (const auto& c : report.checks) {
        Json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        if (!c.aux_name.empty()) jc["aux_name"] = c.aux_name;
        jc["rules"] = Json::array();
        for (const auto& r : c.rules) {
            jc["rules"].push_back({{"kind", rule_name(r.kind)},
                                   {"bound", number(r.bound)},
                                   {"k_sigma", number(r.k_sigma)},
                                   {"slack", number(r.slack)},
                                   {"floor", number(r.floor)}});
        }
        jc["rows"] = Json::array();
        for (const auto& r : c.rows) {
            jc["rows"].push_back({{"label", r.label},
                                  {"scale", number(r.scale)},
                                  {"measured", number(r.measured)},
                                  {"target", number(r.target)},
                                  {"std_error", number(r.std_error)},
                                  {"fitted", number(r.fitted)},
                                  {"aux", number(r.aux)},
                                  {"pass", r.pass}});
        }
        j["checks"].push_back(std::move(jc));
    }
    return j.dump(2) + "\n";
}

AuditReport audit_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    AuditReport report;
    report.name = j.at("report").get<std::string>();
    report.pass = j.at("pass").get<bool>();
    report.config = j.value("config", std::string{});
    for (const auto& jc : j.at("checks")) {
        AuditCheck c;
        c.name = jc.at("name").get<std::string>();
        c.pass = jc.at("pass").get<bool>();
        c.aux_name = jc.value("aux_name", std::string{});
        for (const auto& jr : jc.at("rules")) {
            AuditRule r;
            r.kind = rule_kind(jr.at("kind").get<std::string>());
            r.bound = parse_number(jr.at("bound"));
            r.k_sigma = parse_number(jr.at("k_sigma"));
            r.slack = parse_number(jr.at("slack"));
            r.floor = parse_number(jr.at("floor"));
            c.rules.push_back(r);
        }
        for (const auto& jr : jc.at("rows")) {
            AuditRow r;
            r.label = jr.at("label").get<std::string>();
            r.scale = parse_number(jr.at("scale"));
            r.measured = parse_number(jr.at("measured"));
            r.target = parse_number(jr.at("target"));
            r.std_error = parse_number(jr.at("std_error"));
            r.fitted = parse_number(jr.at("fitted"));
            r.aux = parse_number(jr.at("aux"));
            r.pass = jr.at("pass").get<bool>();
            c.rows.push_back(std::move(r));
        }
        report.checks.push_back(std::move(c));
    }
    return report;
}

void write_csv(std::ostream& os, const AuditReport& report) {
    os << "check,label,scale,measured,target,std_error,fitted,aux,pass\n";
    for (const auto& c : report.checks) {
        for (const auto& r : c.rows) {
            os << csv_field(c.name) << ',' << csv_field(r.label) << ',' << format_double(r.scale) << ','
               << format_double(r.measured) << ',' << format_double(r.target) << ',' << format_double(r.std_error)
               << ',' << format_double(r.fitted) << ',' << format_double(r.aux) << ',' << (r.pass ? 1 : 0) << '\n';
        }
    }
}

}  // namespace steinlil
