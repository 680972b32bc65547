#include "steinlil/stein.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "steinlil/error.hpp"
#include "steinlil/parallel.hpp"
#include "summation.hpp"

namespace steinlil {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kTailCut = 1e-16;

double integrate(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12, &error);
}

// Finite endpoint beyond which |g| stays below kTailCut times its size near
// `from`, searching in direction `dir` (+1 or -1) up to `bound`.
double tail_cut(const std::function<double(double)>& g, double from, int dir, double bound) {
    if (std::isfinite(bound)) return bound;
    double ref = 0.0;
    for (int i = 0; i <= 64; ++i) ref = std::max(ref, std::abs(g(from + dir * 8.0 * i / 64.0)));
    double step = 1.0;
    for (int j = 0; j < 14; ++j, step *= 2.0) {
        const double t = from + dir * step;
        if (std::abs(g(t)) <= kTailCut * ref && std::abs(g(t + dir * step)) <= kTailCut * ref) return t;
    }
    return from + dir * step;
}

double support_integral(const DensitySpec& d, const std::function<double(double)>& g) {
    // split at 0 (or the support midpoint) and cut each unbounded side
    const double mid = std::isfinite(d.lower) && std::isfinite(d.upper) ? 0.5 * (d.lower + d.upper)
                       : std::isfinite(d.lower)                        ? std::max(d.lower, 0.0)
                       : std::isfinite(d.upper)                        ? std::min(d.upper, 0.0)
                                                                       : 0.0;
    const double hi = tail_cut(g, mid, +1, d.upper);
    const double lo = tail_cut(g, mid, -1, d.lower);
    return integrate(g, lo, mid) + integrate(g, mid, hi);
}

}  // namespace

DensitySpec make_density(std::string name, std::function<double(double)> pdf, double lower, double upper,
                         std::function<double(std::mt19937_64&)> draw) {
    if (!(lower < upper)) throw DomainError("density support must be a nonempty interval");
    DensitySpec d{std::move(name), std::move(pdf), lower, upper, std::move(draw)};
    const double lo = std::isfinite(lower) ? lower : -40.0;
    const double hi = std::isfinite(upper) ? upper : 40.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = lo + (hi - lo) * i / 400.0;
        if (d.pdf(x) < 0.0) throw DomainError("density '" + d.name + "' is negative at " + std::to_string(x));
    }
    const double mass = support_integral(d, [&](double x) { return d.pdf(x); });
    const double mean = support_integral(d, [&](double x) { return x * d.pdf(x); });
    const double second = support_integral(d, [&](double x) { return x * x * d.pdf(x); });
    if (std::abs(mass - 1.0) > 1e-8 || std::abs(mean) > 1e-8 || std::abs(second - 1.0) > 1e-8) {
        throw DomainError("density '" + d.name + "' is not a centred unit-variance law (mass " +
                          std::to_string(mass) + ", mean " + std::to_string(mean) + ", second moment " +
                          std::to_string(second) + ")");
    }
    return d;
}

DensitySpec standard_normal_density() {
    return make_density(
        "normal", [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); },
        -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        [](std::mt19937_64& g) { return std::normal_distribution<double>()(g); });
}

DensitySpec uniform_density() {
    const double a = std::sqrt(3.0);
    return make_density(
        "uniform", [a](double x) { return std::abs(x) <= a ? 1.0 / (2.0 * a) : 0.0; }, -a, a,
        [a](std::mt19937_64& g) { return std::uniform_real_distribution<double>(-a, a)(g); });
}

DensitySpec laplace_density() {
    const double b = 1.0 / std::sqrt(2.0);
    return make_density(
        "laplace", [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); },
        -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        [b](std::mt19937_64& g) {
            const double e = std::exponential_distribution<double>(1.0 / b)(g);
            return std::bernoulli_distribution(0.5)(g) ? e : -e;
        });
}

double stein_factor_density(const DensitySpec& density, double x) {
    if (!(x > density.lower && x < density.upper)) return 0.0;
    const double fx = density.pdf(x);
    if (!(fx >= kUnderflow)) {
        throw EvaluationError("density '" + density.name + "' underflows at x = " + std::to_string(x) +
                              " inside its support");
    }
    auto integrand = [&](double y) { return y * density.pdf(y); };
    double numerator = 0.0;
    if (x >= 0.0) {
        numerator = integrate(integrand, x, tail_cut(integrand, x, +1, density.upper));
    } else {
        numerator = -integrate(integrand, tail_cut(integrand, x, -1, density.lower), x);
    }
    return std::max(numerator, 0.0) / fx;
}

double iid_stein_aggregate(std::span<const double> draws, const DensitySpec& density, std::size_t n1,
                           std::size_t n2) {
    if (!(n1 < n2 && n2 <= draws.size())) throw OutOfRangeError("aggregate range outside the sample");
    detail::NeumaierSum sum;
    for (std::size_t k = n1; k < n2; ++k) sum.add(stein_factor_density(density, draws[k]));
    return sum.value() / static_cast<double>(n2 - n1);
}

MomentEstimate mean_estimate(std::span<const double> samples) {
    if (samples.empty()) throw DomainError("mean of an empty sample");
    detail::NeumaierSum sum;
    for (double v : samples) sum.add(v);
    const double n = static_cast<double>(samples.size());
    const double mean = sum.value() / n;
    detail::NeumaierSum ss;
    for (double v : samples) ss.add((v - mean) * (v - mean));
    const double var = samples.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
    return MomentEstimate{mean, std::sqrt(var / n), samples.size()};
}

SteinMomentReport summarize_stein_matrices(const std::vector<std::vector<double>>& samples, int d, double theta) {
    if (samples.empty()) throw DomainError("no Stein-matrix samples");
    if (!(theta >= 1.0)) throw DomainError("theta must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    for (const auto& s : samples) {
        if (s.size() != cells) throw DomainError("Stein-matrix sample has the wrong size");
    }
    SteinMomentReport report;
    report.d = d;
    report.theta = theta;
    const std::size_t count = samples.size();
    std::vector<double> values(count), squares(count), totals(count, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const std::size_t c = static_cast<std::size_t>(i * d + j);
            const double delta = i == j ? 1.0 : 0.0;
            for (std::size_t r = 0; r < count; ++r) {
                values[r] = samples[r][c];
                squares[r] = (values[r] - delta) * (values[r] - delta);
                totals[r] += squares[r];
            }
            report.cells.push_back(SteinCell{i, j, mean_estimate(values), mean_estimate(squares)});
        }
    }
    report.second_moment_sum = mean_estimate(totals);
    for (int i = 0; i < d; ++i) {
        const std::size_t c = static_cast<std::size_t>(i * d + i);
        for (std::size_t r = 0; r < count; ++r) values[r] = std::pow(std::abs(samples[r][c] - 1.0), theta);
        const MomentEstimate m = mean_estimate(values);
        const double norm = std::pow(m.estimate, 1.0 / theta);
        // delta method for x -> x^(1/theta)
        const double se = m.estimate > 0.0 ? m.std_error * norm / (theta * m.estimate) : 0.0;
        report.theta_norms.push_back(MomentEstimate{norm, se, count});
    }
    return report;
}

SteinMomentReport stein_matrix_moments_hermite(const SamplerPlan& plan, std::uint64_t seed, std::size_t replicates,
                                               const BlockingSubsequence& sub, const VariationSpec& spec,
                                               double theta, unsigned threads, const GammaOptions& options) {
    if (plan.n < sub.last_index()) {
        throw OutOfRangeError("sampler plan length " + std::to_string(plan.n) + " is shorter than n_2d = " +
                              std::to_string(sub.last_index()));
    }
    if (replicates == 0) throw DomainError("need at least one replicate");
    const int d = sub.d;
    std::vector<double> g(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) g[i] = normalizer(spec, sub.block_length(i + 1));
    const CarreDuChamp engine(spec.model(), spec.q(), options);
    std::vector<std::vector<double>> samples(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        std::vector<double> path(plan.n);
        sample_into(plan, seed, r, path);
        std::vector<double> a(static_cast<std::size_t>(d * d));
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                const double v = engine.cross(path, sub.block(i + 1), sub.block(j + 1), g[i], g[j]).value;
                a[i * d + j] = v;
                a[j * d + i] = v;
            }
        }
        samples[r] = std::move(a);
    });
    return summarize_stein_matrices(samples, d, theta);
}

double TestFunction::value(std::span<const double> x) const {
    switch (kind) {
        case Kind::Linear: return x[j];
        case Kind::Square: return x[j] * x[j];
        case Kind::Cross: return x[j] * x[k];
        case Kind::Cube: return x[j] * x[j] * x[j];
    }
    return 0.0;
}

double TestFunction::partial(std::span<const double> x, int m) const {
    switch (kind) {
        case Kind::Linear: return m == j ? 1.0 : 0.0;
        case Kind::Square: return m == j ? 2.0 * x[j] : 0.0;
        case Kind::Cross:
            if (j == k) return m == j ? 2.0 * x[j] : 0.0;
            return m == j ? x[k] : (m == k ? x[j] : 0.0);
        case Kind::Cube: return m == j ? 3.0 * x[j] * x[j] : 0.0;
    }
    return 0.0;
}

std::string TestFunction::name() const {
    const std::string xj = "x" + std::to_string(j + 1);
    switch (kind) {
        case Kind::Linear: return xj;
        case Kind::Square: return xj + "^2";
        case Kind::Cross: return xj + "*x" + std::to_string(k + 1);
        case Kind::Cube: return xj + "^3";
    }
    return xj;
}

std::vector<TestFunction> polynomial_dictionary(int d) {
    std::vector<TestFunction> out;
    for (int j = 0; j < d; ++j) {
        out.push_back({TestFunction::Kind::Linear, j, 0});
        out.push_back({TestFunction::Kind::Square, j, 0});
        out.push_back({TestFunction::Kind::Cube, j, 0});
        for (int k = j + 1; k < d; ++k) out.push_back({TestFunction::Kind::Cross, j, k});
    }
    return out;
}

Residual stein_identity_residual(std::span<const double> f, std::span<const double> tau, int d, int i,
                                 const TestFunction& g) {
    if (d < 1 || i < 0 || i >= d) throw DomainError("component index out of range");
    const std::size_t du = static_cast<std::size_t>(d);
    if (f.size() % du != 0 || f.empty()) throw DomainError("F samples are not a whole number of rows");
    const std::size_t count = f.size() / du;
    if (tau.size() != count * du * du) {
        throw DomainError("tau samples (" + std::to_string(tau.size()) + " values) do not pair with " +
                          std::to_string(count) + " F rows");
    }
    std::vector<double> terms(count);
    for (std::size_t s = 0; s < count; ++s) {
        const auto x = f.subspan(s * du, du);
        const auto t = tau.subspan(s * du * du, du * du);
        double rhs = 0.0;
        for (int j = 0; j < d; ++j) rhs += t[static_cast<std::size_t>(i * d + j)] * g.partial(x, j);
        terms[s] = x[static_cast<std::size_t>(i)] * g.value(x) - rhs;
    }
    const MomentEstimate m = mean_estimate(terms);
    return Residual{m.estimate, m.std_error, count};
}

double theta_norm_estimate(std::span<const double> tau, double theta) {
    if (tau.empty()) throw DomainError("theta norm of an empty sample");
    if (!(theta >= 1.0)) throw DomainError("theta must be >= 1");
    detail::NeumaierSum sum;
    for (double t : tau) sum.add(std::pow(std::abs(t - 1.0), theta));
    return std::pow(sum.value() / static_cast<double>(tau.size()), 1.0 / theta);
}

SteinSamples rademacher_smoothed_samples(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n == 0 || count == 0) throw DomainError("need n >= 1 and at least one sample");
    constexpr std::uint64_t kDomain = 0x726164656d61ULL;
    SteinSamples out{1, count, std::vector<double>(count), std::vector<double>(count)};
    const double nd = static_cast<double>(n);
    for (std::size_t s = 0; s < count; ++s) {
        auto engine = make_stream(seed, s, kDomain);
        std::binomial_distribution<std::int64_t> heads(static_cast<std::int64_t>(n), 0.5);
        const double sum = 2.0 * static_cast<double>(heads(engine)) - nd;
        const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(engine);
        out.f[s] = (sum + u) / std::sqrt(nd);
        out.tau[s] = (nd - sum * u + 0.5 * (1.0 - u * u)) / nd;
    }
    return out;
}

SteinSamples iid_density_samples(const DensitySpec& density, std::size_t n, std::size_t count, std::uint64_t seed) {
    if (!density.draw) throw DomainError("density '" + density.name + "' has no sampler");
    if (n == 0 || count == 0) throw DomainError("need n >= 1 and at least one sample");
    constexpr std::uint64_t kDomain = 0x696964ULL;
    SteinSamples out{1, count, std::vector<double>(count), std::vector<double>(count)};
    std::vector<double> z(n);
    for (std::size_t s = 0; s < count; ++s) {
        auto engine = make_stream(seed, s, kDomain);
        for (auto& v : z) v = density.draw(engine);
        detail::NeumaierSum sum;
        for (double v : z) sum.add(v);
        out.f[s] = sum.value() / std::sqrt(static_cast<double>(n));
        out.tau[s] = iid_stein_aggregate(z, density, 0, n);
    }
    return out;
}

std::string to_json(const SteinMomentReport& report) {
    nlohmann::ordered_json j;
    j["d"] = report.d;
    j["theta"] = report.theta;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells) {
        j["cells"].push_back({{"i", c.i},
                              {"j", c.j},
                              {"estimate", c.second_moment.estimate},
                              {"std_error", c.second_moment.std_error},
                              {"n_samples", c.second_moment.n_samples},
                              {"mean", c.mean.estimate},
                              {"mean_std_error", c.mean.std_error}});
    }
    j["theta_norms"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.theta_norms.size(); ++i) {
        j["theta_norms"].push_back({{"i", i},
                                    {"estimate", report.theta_norms[i].estimate},
                                    {"std_error", report.theta_norms[i].std_error}});
    }
    j["second_moment_sum"] = {{"estimate", report.second_moment_sum.estimate},
                              {"std_error", report.second_moment_sum.std_error}};
    return j.dump(2);
}

}  // namespace steinlil
