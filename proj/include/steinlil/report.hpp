#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace steinlil {

/// One measured scale of an audit.
struct AuditRow {
    std::string label;
    double scale = 0.0;     // n, m, d, ... depending on the check
    double measured = 0.0;  // the quantity under test
    double target = 0.0;    // theoretical bound or target value
    double std_error = 0.0;
    double fitted = 0.0;    // measured times the log factor of the bound
    double aux = std::numeric_limits<double>::quiet_NaN();  // check-specific extra column
    bool pass = true;
};

/// Pass/fail rules. Row rules decide each row; check rules look at all rows.
struct AuditRule {
    enum class Kind {
        Bounded,     // row: fitted <= bound
        Inequality,  // row: measured <= target + k_sigma * std_error + slack
        Stable,      // check: max fitted <= bound * max(min fitted, floor), or all below floor
        Decreasing,  // check: measured strictly decreasing in row order
        Fraction,    // check: share of passing rows >= bound (replaces all-rows-pass)
        Info,        // no assertion
    };
    Kind kind = Kind::Info;
    double bound = 0.0;
    double k_sigma = 0.0;
    double slack = 0.0;
    double floor = 1e-12;

    static AuditRule bounded(double c) { return {Kind::Bounded, c}; }
    static AuditRule inequality(double k_sigma, double slack) { return {Kind::Inequality, 0.0, k_sigma, slack}; }
    static AuditRule stable(double factor, double floor = 1e-12) { return {Kind::Stable, factor, 0.0, 0.0, floor}; }
    static AuditRule decreasing() { return {Kind::Decreasing}; }
    static AuditRule fraction(double share) { return {Kind::Fraction, share}; }
    static AuditRule info() { return {Kind::Info}; }
};

struct AuditCheck {
    std::string name;
    std::string aux_name;  // meaning of AuditRow::aux, empty if unused
    std::vector<AuditRule> rules;
    std::vector<AuditRow> rows;
    bool pass = true;
};

struct AuditReport {
    std::string name;
    std::string config;  // canonical key=value dump of the configuration
    std::vector<AuditCheck> checks;
    bool pass = true;

    const AuditCheck& check(const std::string& name) const;
};

/// Recomputes every row, check and report verdict from the rows and rules.
void evaluate(AuditReport& report);
bool evaluate(AuditCheck& check);

/// Ratio max/min of the fitted column with min clamped at `floor`.
double fitted_spread(const AuditCheck& check, double floor = 1e-12);

std::string to_json(const AuditReport& report);
AuditReport audit_from_json(const std::string& text);

/// Columns: check,label,scale,measured,target,std_error,fitted,aux,pass.
void write_csv(std::ostream& os, const AuditReport& report);

std::string rule_name(AuditRule::Kind kind);

/// %.17g, with nan/inf spelled out.
std::string format_double(double v);

}  // namespace steinlil
