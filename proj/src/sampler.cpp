#include "steinlil/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fft.hpp"
#include "steinlil/error.hpp"
#include "steinlil/parallel.hpp"

namespace steinlil {

namespace {

struct Spectrum {
    std::vector<double> eigenvalues;
    double max = 0.0;
    double most_negative = 0.0;
};

Spectrum circulant_spectrum(const CovarianceModel& model, std::size_t m) {
    auto row = detail::alloc_real(m);
    auto freq = detail::alloc_complex(m / 2 + 1);
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k <= half; ++k) row[k] = model.rho(static_cast<std::int64_t>(k));
    for (std::size_t k = half + 1; k < m; ++k) row[k] = row[m - k];
    detail::dft_r2c(m, row.get(), freq.get());
    Spectrum s;
    s.eigenvalues.resize(m);
    for (std::size_t j = 0; j <= half; ++j) {
        s.eigenvalues[j] = freq[j][0];
        if (j > 0 && j < m - j) s.eigenvalues[m - j] = freq[j][0];
    }
    for (double v : s.eigenvalues) {
        s.max = std::max(s.max, v);
        s.most_negative = std::min(s.most_negative, v);
    }
    return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SamplerPlan build_plan(const CovarianceModel& model, std::size_t n, double clip_tol) {
    if (n == 0) throw DomainError("path length must be positive");
    auto lags_available = [&model](std::size_t m) {
        const auto lag = model.max_lag();
        return !lag || *lag >= m / 2;
    };
    std::size_t m = detail::next_pow2(std::max<std::size_t>(2, 2 * (n - 1)));
    if (!lags_available(m)) {
        throw OutOfRangeError("circulant embedding of order " + std::to_string(m) + " needs rho up to lag " +
                              std::to_string(m / 2) + ", model stores " + std::to_string(*model.max_lag()));
    }
    auto acceptable = [clip_tol](const Spectrum& s) { return s.most_negative >= -clip_tol * s.max; };
    Spectrum s = circulant_spectrum(model, m);
    if (!acceptable(s) && lags_available(2 * m)) {
        Spectrum doubled = circulant_spectrum(model, 2 * m);
        m *= 2;
        s = std::move(doubled);
    }
    if (!acceptable(s)) {
        std::ostringstream os;
        os.precision(6);
        os << "circulant embedding of " << model.id() << " has eigenvalue " << s.most_negative << " (max "
           << s.max << ") at embedding size " << m;
        throw EmbeddingError(os.str(), s.most_negative, m);
    }
    for (double& v : s.eigenvalues) v = std::max(v, 0.0);
    return SamplerPlan{model, n, m, std::move(s.eigenvalues), s.most_negative};
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(domain));
    const std::uint64_t b = splitmix64(stream + 0x632be59bd9b4e019ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return make_stream(seed, stream, kPathDomain);
}

void sample_into(const SamplerPlan& plan, std::uint64_t seed, std::uint64_t replicate, std::span<double> out) {
    if (out.size() != plan.n) throw DomainError("output span does not match plan length");
    const std::size_t m = plan.embedding_size;
    auto engine = make_stream(seed, replicate);
    std::normal_distribution<double> normal;
    auto coeff = detail::alloc_complex(m);
    auto field = detail::alloc_complex(m);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double amp = std::sqrt(plan.eigenvalues[j] * scale);
        const double re = normal(engine);
        const double im = normal(engine);
        coeff[j][0] = amp * re;
        coeff[j][1] = amp * im;
    }
    detail::dft_forward(m, coeff.get(), field.get());
    // Real and imaginary parts are independent with the target covariance;
    // only the real part is used so that each replicate owns its stream.
    for (std::size_t k = 0; k < plan.n; ++k) out[k] = field[k][0];
}

GaussianPath sample_path(const SamplerPlan& plan, std::uint64_t seed, std::uint64_t replicate) {
    GaussianPath path{std::vector<double>(plan.n), plan.model.id(), seed, replicate};
    sample_into(plan, seed, replicate, path.values);
    return path;
}

PathEnsemble sample_ensemble(const SamplerPlan& plan, std::uint64_t seed, std::size_t replicates,
                             unsigned threads) {
    PathEnsemble ensemble;
    ensemble.paths.resize(replicates);
    parallel_for(replicates, threads,
                 [&](std::size_t r) { ensemble.paths[r] = sample_path(plan, seed, r); });
    return ensemble;
}

void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble) {
    const std::size_t n = ensemble.paths.empty() ? 0 : ensemble.paths.front().values.size();
    os << "seed,replicate,n";
    for (std::size_t k = 0; k < n; ++k) os << ",Z_" << k;
    os << '\n';
    char buf[32];
    for (const auto& p : ensemble.paths) {
        os << p.seed << ',' << p.replicate << ',' << p.values.size();
        for (double v : p.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace steinlil
