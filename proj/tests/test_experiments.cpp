#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "steinlil/distances.hpp"
#include "steinlil/error.hpp"
#include "steinlil/experiments.hpp"

using namespace steinlil;

namespace {

ExperimentConfig config(const std::string& text) {
    return ExperimentConfig::from(KeyValueConfig::parse_string(text));
}

}  // namespace

TEST_CASE("variance table") {
    const auto white = run_variance_table(config("model = white\nq = 3\n"));
    CHECK(white.pass);
    for (const auto& r : white.check("variance").rows) CHECK(r.aux == 1.0);

    const auto bm = run_variance_table(config("hurst = 0.3\nregime = breuer-major\nn_min_log2 = 12\nn_max_log2 = 16\n"));
    CHECK(bm.pass);
    CHECK(bm.check("variance").rows.size() == 5);

    const auto crit = run_variance_table(config("regime = critical\nn_min_log2 = 10\nn_max_log2 = 14\n"));
    CHECK(crit.pass);  // |ratio - 1| log n ~ 3.38 < 4
    for (const auto& r : crit.check("variance").rows) CHECK(r.fitted == doctest::Approx(3.38).epsilon(0.01));

    const auto regime_b = run_variance_table(config("hurst = 0.9\nregime = critical\nn_min_log2 = 16\nn_max_log2 = 18\n"));
    CHECK_FALSE(regime_b.pass);

    CHECK_THROWS_AS(run_variance_table(config("hurst = 0.9\nregime = breuer-major\n")), RegimeError);
}

TEST_CASE("cross covariance audit") {
    const auto white = run_cross_covariance_audit(config("model = white\nq = 1\nstein_replicates = 20\n"));
    CHECK(white.pass);
    for (const auto& r : white.check("cross-covariance").rows) CHECK(r.aux == 0.0);

    const auto q1 = run_cross_covariance_audit(config("hurst = 0.3\nq = 1\nstein_replicates = 0\n"));
    CHECK(q1.pass);
    CHECK(q1.checks.size() == 1);

    const auto fgn = run_cross_covariance_audit(config("stein_replicates = 100\n"));
    CHECK(fgn.check("cross-covariance").pass);
    CHECK(fgn.check("cross-covariance").rows.size() == 5);

    CHECK_THROWS_AS(run_cross_covariance_audit(config("q_ratio = 2\nalpha = 0.5\nm_min = 30\nm_max = 30\n")), OverflowError);
}

TEST_CASE("distance decay in the first chaos") {
    const auto r = run_distance_decay(config("q = 1\nhurst = 0.3\nn_list = 64, 256\nreplicates = 1500\n"));
    CHECK(r.pass);
    for (const auto& row : r.check("stein kolmogorov").rows) {
        CHECK(row.target < 1e-12);  // Gamma == 1
        CHECK(row.measured < 1.63 / std::sqrt(1500.0));
    }
}

TEST_CASE("distance decay second chaos small scale") {
    const auto r = run_distance_decay(config("n_list = 64, 512\nreplicates = 600\n"));
    CHECK(r.check("stein kolmogorov").pass);
    const auto& rows = r.check("gamma decay").rows;
    CHECK(rows[1].measured < rows[0].measured);
}

TEST_CASE("comparison with identical samples") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> xs(3 * 50);
    for (auto& v : xs) v = g(rng);
    const PointCloud x(3, xs);
    CHECK(kolmogorov_multid(x, x).value == 0.0);
    CHECK(wasserstein_assignment(x, x).value == 0.0);
    CHECK(comparison_rhs(3, 0.0) == 0.0);
}

TEST_CASE("comparison check small") {
    const auto r = run_comparison_check(config("samples = 64\nrepetitions = 4\nd_list = 1, 2\nstein_replicates = 100\n"));
    CHECK(r.checks.size() == 3);
    CHECK(r.check("comparison d=1").rows.size() == 4);
    for (const auto& row : r.check("comparison d=2").rows) CHECK(row.target == doctest::Approx(comparison_rhs(2, row.aux)));
}

TEST_CASE("lil trajectory") {
    const auto c = config("model = white\nq = 1\nlil_n_max = 5000\nlil_replicates = 3\nlil_grid_ratio = 2\n");
    const auto t = run_lil_trajectory(c);
    REQUIRE_FALSE(t.points.empty());
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        if (t.points[i].replicate == t.points[i - 1].replicate) {
            CHECK(t.points[i].n > t.points[i - 1].n);
            CHECK(t.points[i].record >= t.points[i - 1].record);
        }
        CHECK(t.points[i].record >= t.points[i].statistic);
    }
    CHECK(t.points.front().n == 16);
    CHECK(t.points.back().n == 5000);
    std::ostringstream a, b;
    write_csv(a, t);
    write_csv(b, run_lil_trajectory(c));
    CHECK(a.str() == b.str());
    CHECK(to_json(t).find("\"candidates\"") != std::string::npos);

    const auto crit = run_lil_trajectory(config("normalizer = critical\nlil_n_max = 2000\nlil_replicates = 2\n"));
    CHECK(crit.candidates[0].second == doctest::Approx(0.5625));
    CHECK(crit.candidates[1].second == doctest::Approx(0.75));
    CHECK_THROWS_AS(run_lil_trajectory(config("normalizer = critical\nhurst = 0.7\n")), RegimeError);
}

TEST_CASE("assumption audit") {
    const auto white = run_assumption_audit(config("model = white\nq = 1\nreplicates = 200\nn_list = 64, 256\nstein_replicates = 20\n"));
    CHECK(white.pass);
    const auto crit = run_assumption_audit(
        config("regime = critical\nreplicates = 300\nn_list = 256, 1024, 4096\nstein_replicates = 200\nn_max_log2 = 16\n"));
    CHECK(crit.pass);
    const auto& lambda = crit.check("A3 theta exponent");
    CHECK(std::isfinite(lambda.rows.front().aux));
    CHECK(lambda.rows.front().aux > 0.0);
    const auto b = run_assumption_audit(config("hurst = 0.9\nregime = critical\nreplicates = 100\nn_list = 256\nm_max = 5\nstein_replicates = 0\n"));
    CHECK_FALSE(b.check("A1 variance").pass);
    CHECK_FALSE(b.pass);
}

TEST_CASE("audits are reproducible and thread independent") {
    const auto a = run_distance_decay(config("n_list = 128\nreplicates = 200\nthreads = 1\n"));
    const auto b = run_distance_decay(config("n_list = 128\nreplicates = 200\nthreads = 3\n"));
    CHECK(to_json(a) == to_json(b));
    const auto c = run_distance_decay(config("n_list = 128\nreplicates = 200\nseed = 2\n"));
    CHECK(to_json(a) != to_json(c));
}
