#include "steinlil/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <random>

#include "steinlil/distances.hpp"
#include "steinlil/error.hpp"
#include "steinlil/hermite.hpp"
#include "steinlil/parallel.hpp"
#include "steinlil/sampler.hpp"
#include "steinlil/stein.hpp"

namespace steinlil {

namespace {

std::optional<double> sigma2_if_needed(const ExperimentConfig& c, const CovarianceModel& model) {
    if (c.regime != Regime::BreuerMajor) return std::nullopt;
    return breuer_major_sigma2(model, c.chaos_order(), c.series_tol).value;
}

struct GammaEnsemble {
    std::vector<double> x;      // X_n / g(n)
    std::vector<double> gamma;  // Gamma_n
};

GammaEnsemble gamma_ensemble(const ExperimentConfig& c, const VariationSpec& spec, std::uint64_t n,
                             std::size_t replicates) {
    const auto plan = build_plan(spec.model(), n);
    const double g = normalizer(spec, n);
    const CarreDuChamp engine(spec.model(), spec.q(), c.gamma_options());
    GammaEnsemble out{std::vector<double>(replicates), std::vector<double>(replicates)};
    parallel_for(replicates, c.threads, [&](std::size_t r) {
        std::vector<double> path(n);
        sample_into(plan, c.seed, r, path);
        out.x[r] = variation_statistic(path, spec.q(), 0, n) / g;
        out.gamma[r] = engine.gamma(path, Block{0, n}, g).value;
    });
    return out;
}

std::vector<double> abs_deviation(const std::vector<double>& gamma) {
    std::vector<double> out(gamma.size());
    std::transform(gamma.begin(), gamma.end(), out.begin(), [](double v) { return std::abs(v - 1.0); });
    return out;
}

AuditCheck variance_check(const ExperimentConfig& c) {
    const auto model = c.covariance_model();
    const auto q = c.chaos_order();
    const auto sigma2 = sigma2_if_needed(c, model);
    AuditCheck check{"variance", "ratio", {AuditRule::bounded(c.variance_C)}, {}};
    for (int k = c.n_min_log2; k <= c.n_max_log2; ++k) {
        const std::uint64_t n = std::uint64_t{1} << k;
        const double ratio = partial_sum_variance(model, q, n) / target_variance(model, q, c.regime, n, sigma2);
        const double dev = std::abs(ratio - 1.0);
        const double logn = std::log(static_cast<double>(n));
        AuditRow row;
        row.label = "n=2^" + std::to_string(k);
        row.scale = static_cast<double>(n);
        row.measured = dev;
        row.target = c.variance_C / logn;
        row.fitted = dev * logn;
        row.aux = ratio;
        check.rows.push_back(row);
    }
    return check;
}

std::vector<AuditCheck> cross_checks(const ExperimentConfig& c) {
    const auto model = c.covariance_model();
    const auto q = c.chaos_order();
    const VariationSpec spec(model, q, c.normalizer);
    AuditCheck cross{"cross-covariance", "max |value|",
                     {AuditRule::bounded(c.cross_C), AuditRule::stable(c.stability_factor)}, {}};
    AuditCheck w1{"stein w1", "second moment sum", {AuditRule::stable(c.stability_factor)}, {}};
    for (int m = c.m_min; m <= c.m_max; ++m) {
        const auto sub = blocking_subsequence(c.q_ratio, c.alpha, m, c.d);
        std::vector<double> g(static_cast<std::size_t>(c.d));
        for (int i = 0; i < c.d; ++i) g[i] = normalizer(spec, sub.block_length(i + 1));
        double max_value = 0.0, max_product = 0.0;
        for (int i = 1; i <= c.d; ++i) {
            const auto a = sub.block(i);
            for (int j = i + 1; j <= c.d; ++j) {
                const auto b = sub.block(j);
                const double v = block_cross_covariance(model, q, a.begin, a.end, b.begin, b.end) / (g[i - 1] * g[j - 1]);
                max_value = std::max(max_value, std::abs(v));
                max_product = std::max(max_product, std::abs(v) * (1.0 + std::log(static_cast<double>(a.size()))));
            }
        }
        AuditRow row;
        row.label = "m=" + std::to_string(m);
        row.scale = m;
        row.measured = max_product;
        row.target = c.cross_C;
        row.fitted = max_product;
        row.aux = max_value;
        cross.rows.push_back(row);

        if (c.stein_replicates > 0) {
            const auto plan = build_plan(model, sub.last_index());
            const auto rep = stein_matrix_moments_hermite(plan, c.seed, c.stein_replicates, sub, spec, 2.0, c.threads,
                                                          c.gamma_options());
            const double sum = rep.second_moment_sum.estimate;
            const double bound = stein_w1_bound(sum);
            const double log_factor = 1.0 + std::log(static_cast<double>(sub.block_length(1)));
            AuditRow r;
            r.label = "m=" + std::to_string(m);
            r.scale = m;
            r.measured = bound;
            r.std_error = bound > 0.0 ? rep.second_moment_sum.std_error / (2.0 * bound) : 0.0;
            r.target = std::numeric_limits<double>::quiet_NaN();
            r.fitted = bound * log_factor;
            r.aux = sum;
            w1.rows.push_back(r);
        }
    }
    std::vector<AuditCheck> out{cross};
    if (c.stein_replicates > 0) out.push_back(w1);
    return out;
}

std::vector<AuditCheck> gamma_moment_checks(const ExperimentConfig& c) {
    const VariationSpec spec(c.covariance_model(), c.chaos_order(), c.normalizer);
    std::vector<AuditCheck> moments;
    for (int p = 1; p <= 3; ++p) {
        moments.push_back({"A2 gamma moments p=" + std::to_string(p), "", {AuditRule::stable(c.stability_factor)}, {}});
    }
    AuditCheck lambda{"A3 theta exponent", "lambda", {AuditRule::info()}, {}};
    std::vector<double> last_gamma;
    for (const auto n : c.n_list) {
        const auto ens = gamma_ensemble(c, spec, n, c.replicates);
        const double logn = std::log(static_cast<double>(n));
        for (int p = 1; p <= 3; ++p) {
            std::vector<double> powers(ens.gamma.size());
            std::transform(ens.gamma.begin(), ens.gamma.end(), powers.begin(),
                           [p](double v) { return std::pow(v - 1.0, 2 * p); });
            const auto est = mean_estimate(powers);
            const double norm = std::pow(std::max(est.estimate, 0.0), 1.0 / (2 * p));
            AuditRow row;
            row.label = "n=" + std::to_string(n);
            row.scale = static_cast<double>(n);
            row.measured = norm;
            row.std_error = norm > 0.0 ? est.std_error * norm / (2.0 * p * est.estimate) : 0.0;
            row.target = std::numeric_limits<double>::quiet_NaN();
            row.fitted = norm * (1.0 + logn);
            moments[static_cast<std::size_t>(p - 1)].rows.push_back(row);
        }
        last_gamma = ens.gamma;
    }

    // least squares of log ||Gamma - 1||_theta on log theta at the largest n
    std::vector<double> lx, ly;
    std::vector<AuditRow> rows;
    for (const double theta : c.theta_list) {
        const double norm = theta_norm_estimate(last_gamma, theta);
        AuditRow row;
        row.label = "theta=" + format_double(theta);
        row.scale = theta;
        row.measured = norm;
        row.target = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        if (norm > 0.0) {
            lx.push_back(std::log(theta));
            ly.push_back(std::log(norm));
        }
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        if (sxx > 0.0) slope = sxy / sxx;
    }
    for (auto& row : rows) {
        row.fitted = slope;
        row.aux = slope;
    }
    lambda.rows = std::move(rows);
    moments.push_back(lambda);
    return moments;
}

AuditReport finish(std::string name, const ExperimentConfig& c, std::vector<AuditCheck> checks) {
    AuditReport report{std::move(name), c.dump(), std::move(checks), true};
    evaluate(report);
    return report;
}

}  // namespace

AuditReport run_variance_table(const ExperimentConfig& config) {
    config.validate();
    return finish("variance-table", config, {variance_check(config)});
}

AuditReport run_cross_covariance_audit(const ExperimentConfig& config) {
    config.validate();
    return finish("cross-cov", config, cross_checks(config));
}

AuditReport run_distance_decay(const ExperimentConfig& config) {
    config.validate();
    const VariationSpec spec(config.covariance_model(), config.chaos_order(), config.normalizer);
    AuditCheck domination{"stein kolmogorov", "E|Gamma-1| std error",
                          {AuditRule::inequality(config.k_sigma, config.abs_slack)}, {}};
    AuditCheck decay{"gamma decay", "", {config.q >= 2 ? AuditRule::decreasing() : AuditRule::info()}, {}};
    for (const auto n : config.n_list) {
        const auto ens = gamma_ensemble(config, spec, n, config.replicates);
        const auto dk = kolmogorov_1d_vs_gaussian(ens.x);
        const auto dev = mean_estimate(abs_deviation(ens.gamma));
        const double logn = std::log(static_cast<double>(n));

        AuditRow row;
        row.label = "n=" + std::to_string(n);
        row.scale = static_cast<double>(n);
        row.measured = dk.value;
        row.target = stein_kolmogorov_bound(dev.estimate);
        row.std_error = std::hypot(dev.std_error, dk.std_error);
        row.fitted = dk.value * (1.0 + logn);
        row.aux = dev.std_error;
        domination.rows.push_back(row);

        AuditRow d;
        d.label = row.label;
        d.scale = row.scale;
        d.measured = dev.estimate;
        d.target = std::numeric_limits<double>::quiet_NaN();
        d.std_error = dev.std_error;
        d.fitted = dev.estimate * (1.0 + logn);
        decay.rows.push_back(d);
    }
    return finish("distance-decay", config, {domination, decay});
}

AuditReport run_comparison_check(const ExperimentConfig& config) {
    config.validate();
    const auto model = config.covariance_model();
    const VariationSpec spec(model, config.chaos_order(), config.normalizer);
    std::vector<AuditCheck> checks;
    AuditCheck stein{"stein w1 vs empirical w1", "second moment sum",
                     {AuditRule::inequality(config.k_sigma, config.abs_slack)}, {}};
    for (const auto dd : config.d_list) {
        const int d = static_cast<int>(dd);
        const auto sub = blocking_subsequence(config.q_ratio, config.alpha, config.block_m, d);
        const auto plan = build_plan(model, sub.last_index());
        AuditCheck check{"comparison d=" + std::to_string(d), "w1",
                         {AuditRule::inequality(0.0, config.comparison_slack),
                          AuditRule::fraction(config.min_pass_fraction)},
                         {}};
        std::vector<double> w1s;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            const std::uint64_t seed = config.seed + rep;
            std::vector<double> y(config.samples * static_cast<std::size_t>(d));
            std::vector<double> z(y.size());
            parallel_for(config.samples, config.threads, [&](std::size_t s) {
                std::vector<double> path(plan.n);
                sample_into(plan, seed, s, path);
                const auto v = increment_vector(path, sub, spec);
                std::copy(v.begin(), v.end(), y.begin() + static_cast<std::ptrdiff_t>(s * d));
                auto rng = make_stream(seed, s, kReferenceDomain);
                std::normal_distribution<double> normal;
                for (int i = 0; i < d; ++i) z[s * d + i] = normal(rng);
            });
            const PointCloud py(d, std::move(y)), pz(d, std::move(z));
            const auto dk = kolmogorov_multid(py, pz);
            const auto w1 = wasserstein_assignment(py, pz);
            AuditRow row;
            row.label = "d=" + std::to_string(d) + " rep=" + std::to_string(rep);
            row.scale = d;
            row.measured = dk.value;
            row.target = comparison_rhs(d, w1.value);
            row.fitted = dk.value;
            row.aux = w1.value;
            check.rows.push_back(row);
            w1s.push_back(w1.value);
        }
        checks.push_back(check);

        if (config.stein_replicates > 0) {
            const auto rep = stein_matrix_moments_hermite(plan, config.seed, config.stein_replicates, sub, spec, 2.0,
                                                          config.threads, config.gamma_options());
            const auto w1 = mean_estimate(w1s);
            AuditRow row;
            row.label = "d=" + std::to_string(d);
            row.scale = d;
            row.measured = w1.estimate;
            row.std_error = w1.std_error;
            row.target = stein_w1_bound(rep.second_moment_sum.estimate);
            row.fitted = w1.estimate;
            row.aux = rep.second_moment_sum.estimate;
            stein.rows.push_back(row);
        }
    }
    if (config.stein_replicates > 0) checks.push_back(stein);
    return finish("comparison", config, std::move(checks));
}

LilTrajectory run_lil_trajectory(const ExperimentConfig& config) {
    config.validate();
    const VariationSpec spec(config.covariance_model(), config.chaos_order(), config.normalizer);
    const std::uint64_t N = config.lil_n_max;
    const int q = config.q;

    std::vector<double> g2(N + 1, 0.0);
    if (config.normalizer == Regime::Exact) {
        const auto seq = partial_sum_variance_sequence(spec.model(), spec.q(), N);
        std::copy(seq.begin(), seq.end(), g2.begin() + 1);
    } else {
        for (std::uint64_t n = 16; n <= N; ++n) g2[n] = target_variance(spec.model(), spec.q(), spec.regime(), n, spec.sigma2());
    }

    std::vector<std::uint64_t> grid;
    for (double t = 16.0; t < static_cast<double>(N); t *= config.lil_grid_ratio) {
        const auto n = static_cast<std::uint64_t>(std::llround(t));
        if (grid.empty() || n > grid.back()) grid.push_back(n);
    }
    if (grid.empty() || grid.back() != N) grid.push_back(N);

    const auto plan = build_plan(spec.model(), N);
    std::vector<std::vector<LilPoint>> per_rep(config.lil_replicates);
    parallel_for(config.lil_replicates, config.threads, [&](std::size_t r) {
        std::vector<double> path(N);
        sample_into(plan, config.seed, r, path);
        double x = 0.0, record = -std::numeric_limits<double>::infinity();
        std::size_t next = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            x += hermite_eval(q, path[n - 1]);
            if (n < 16) continue;
            const double stat = x / (std::sqrt(g2[n]) * std::sqrt(2.0 * std::log(std::log(static_cast<double>(n)))));
            record = std::max(record, stat);
            if (next < grid.size() && grid[next] == n) {
                per_rep[r].push_back(LilPoint{r, n, stat, record});
                ++next;
            }
        }
    });

    LilTrajectory out;
    out.model_id = spec.model().id();
    out.q = q;
    out.regime = config.normalizer;
    out.config = config.dump();
    if (q >= 2) {
        const double cq = critical_variance_constant(spec.q());
        out.candidates = {{"l", cq}, {"sqrt_l", std::sqrt(cq)}};
    } else {
        out.candidates = {{"l", 1.0}, {"sqrt_l", 1.0}};
    }
    for (auto& pts : per_rep) out.points.insert(out.points.end(), pts.begin(), pts.end());
    return out;
}

void write_csv(std::ostream& os, const LilTrajectory& t) {
    os << "replicate,n,statistic,record\n";
    for (const auto& p : t.points) {
        os << p.replicate << ',' << p.n << ',' << format_double(p.statistic) << ',' << format_double(p.record) << '\n';
    }
}

std::string to_json(const LilTrajectory& t) {
    nlohmann::ordered_json j;
    j["report"] = "lil-trajectory";
    j["model"] = t.model_id;
    j["q"] = t.q;
    j["regime"] = to_string(t.regime);
    j["config"] = t.config;
    j["candidates"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : t.candidates) j["candidates"][name] = value;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : t.points) {
        j["points"].push_back({{"replicate", p.replicate}, {"n", p.n}, {"statistic", p.statistic}, {"record", p.record}});
    }
    return j.dump(2) + "\n";
}

AuditReport run_assumption_audit(const ExperimentConfig& config) {
    config.validate();
    std::vector<AuditCheck> checks;
    auto a1 = variance_check(config);
    a1.name = "A1 variance";
    checks.push_back(a1);
    for (auto& c : gamma_moment_checks(config)) checks.push_back(std::move(c));
    for (auto& c : cross_checks(config)) {
        c.name = "A4 " + c.name;
        checks.push_back(std::move(c));
    }
    return finish("audit", config, std::move(checks));
}

}  // namespace steinlil
