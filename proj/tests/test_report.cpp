#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinlil/config.hpp"
#include "steinlil/error.hpp"
#include "steinlil/report.hpp"

using namespace steinlil;

namespace {

AuditRow row(double measured, double target, double se, double fitted) {
    AuditRow r;
    r.label = "x";
    r.measured = measured;
    r.target = target;
    r.std_error = se;
    r.fitted = fitted;
    return r;
}

}  // namespace

TEST_CASE("row rules") {
    AuditCheck c{"bounded", "", {AuditRule::bounded(2.0)}, {row(0, 0, 0, 1.9), row(0, 0, 0, 2.1)}};
    CHECK_FALSE(evaluate(c));
    CHECK(c.rows[0].pass);
    CHECK_FALSE(c.rows[1].pass);

    AuditCheck ineq{"ineq", "", {AuditRule::inequality(4.0, 0.1)}, {row(1.0, 0.5, 0.1, 0), row(1.0, 0.5, 0.09, 0)}};
    evaluate(ineq);
    CHECK(ineq.rows[0].pass);         // 1.0 <= 0.5 + 0.4 + 0.1
    CHECK_FALSE(ineq.rows[1].pass);   // 1.0 >  0.5 + 0.36 + 0.1
}

TEST_CASE("check rules") {
    AuditCheck stable{"s", "", {AuditRule::stable(3.0)}, {row(0, 0, 0, 1.0), row(0, 0, 0, 2.9)}};
    CHECK(evaluate(stable));
    stable.rows.push_back(row(0, 0, 0, 3.1));
    CHECK_FALSE(evaluate(stable));
    AuditCheck zeros{"z", "", {AuditRule::stable(3.0)}, {row(0, 0, 0, 0.0), row(0, 0, 0, 1e-15)}};
    CHECK(evaluate(zeros));

    AuditCheck dec{"d", "", {AuditRule::decreasing()}, {row(3, 0, 0, 0), row(2, 0, 0, 0), row(1, 0, 0, 0)}};
    CHECK(evaluate(dec));
    dec.rows[2].measured = 2.0;
    CHECK_FALSE(evaluate(dec));

    AuditCheck frac{"f", "", {AuditRule::inequality(0, 0), AuditRule::fraction(0.75)}, {}};
    for (int i = 0; i < 4; ++i) frac.rows.push_back(row(i == 0 ? 2.0 : 0.0, 1.0, 0, 0));
    CHECK(evaluate(frac));
    frac.rows[1].measured = 2.0;
    CHECK_FALSE(evaluate(frac));

    AuditCheck info{"i", "", {AuditRule::info()}, {row(5, 0, 0, std::nan(""))}};
    CHECK(evaluate(info));
}

TEST_CASE("verdicts survive a json round trip") {
    AuditReport r;
    r.name = "demo";
    r.config = "q = 2\n";
    r.checks.push_back({"a", "ratio", {AuditRule::bounded(1.0), AuditRule::stable(3.0)},
                        {row(0.1, 0.2, 0.0, 0.5), row(0.3, std::nan(""), 0.01, 0.9)}});
    r.checks.push_back({"b", "", {AuditRule::inequality(4.0, 0.0)}, {row(1.0, 0.1, 0.0, 0.0)}});
    r.checks[0].rows[1].aux = std::numeric_limits<double>::infinity();
    evaluate(r);
    CHECK_FALSE(r.pass);
    const auto text = to_json(r);
    auto back = audit_from_json(text);
    CHECK(to_json(back) == text);
    // flip stored verdicts; evaluation recomputes them from the rows
    back.pass = true;
    for (auto& c : back.checks) {
        c.pass = !c.pass;
        for (auto& rr : c.rows) rr.pass = !rr.pass;
    }
    evaluate(back);
    CHECK(to_json(back) == text);
    CHECK(back.check("a").pass);
    CHECK_FALSE(back.check("b").pass);
    CHECK_THROWS_AS(back.check("zzz"), DomainError);
}

TEST_CASE("csv layout") {
    AuditReport r{"demo", "", {{"a,b", "", {AuditRule::info()}, {row(1.5, 2, 0, 3)}}}, true};
    std::ostringstream os;
    write_csv(os, r);
    CHECK(os.str() == "check,label,scale,measured,target,std_error,fitted,aux,pass\n\"a,b\",x,0,1.5,2,0,3,nan,1\n");
}

TEST_CASE("key value parsing") {
    const auto kv = KeyValueConfig::parse_string("# comment\nq = 3\n  hurst=0.6   # trailing\n\nn_list = 16, 32,64\nq = 2\n");
    CHECK(kv.get_int("q", 0) == 2);
    CHECK(kv.get_double("hurst", 0) == 0.6);
    CHECK(kv.get_u64s("n_list", {}) == std::vector<std::uint64_t>{16, 32, 64});
    CHECK(kv.get_string("missing", "x") == "x");
    CHECK_THROWS_AS(KeyValueConfig::parse_string("novalue\n"), DomainError);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("q = two\n").get_int("q", 0), DomainError);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("b = maybe\n").get_bool("b", false), DomainError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.cfg"), Error);
}

TEST_CASE("experiment config") {
    const auto c = ExperimentConfig::from(KeyValueConfig::parse_string("model = explicit\nrho = 1, 0.2, 0.1\nzero_beyond = true\nregime = critical\nq = 3\n"));
    CHECK(c.covariance_model().rho(5) == 0.0);
    CHECK(c.regime == Regime::Critical);
    CHECK(c.q == 3);
    CHECK_THROWS_AS(ExperimentConfig::from(KeyValueConfig::parse_string("colour = red\n")), DomainError);
    CHECK_THROWS_AS(ExperimentConfig::from(KeyValueConfig::parse_string("replicates = 0\n")), DomainError);
    CHECK_THROWS_AS(ExperimentConfig::from(KeyValueConfig::parse_string("hurst = 1.2\n")), DomainError);
    CHECK_THROWS_AS(ExperimentConfig::from(KeyValueConfig::parse_string("model = garch\n")), DomainError);
    CHECK_THROWS_AS(ExperimentConfig::from(KeyValueConfig::parse_string("d_list = 1,5\n")), DomainError);

    // dump is a fixed point of parse
    const auto again = ExperimentConfig::from(KeyValueConfig::parse_string(c.dump()));
    CHECK(again.dump() == c.dump());
    // threads do not enter the dump
    auto t = c;
    t.threads = 8;
    CHECK(t.dump() == c.dump());
}
