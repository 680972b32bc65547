#include "steinlil/hermite.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "steinlil/error.hpp"
#include "summation.hpp"

namespace steinlil {

double hermite_eval(int q, double x) {
    if (q < 0) throw DomainError("Hermite order must be >= 0");
    if (q == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < q; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::BreuerMajor: return "breuer-major";
        case Regime::Critical: return "critical";
        case Regime::Exact: return "exact";
    }
    return "exact";
}

Regime regime_from_string(const std::string& s) {
    if (s == "breuer-major" || s == "breuer_major" || s == "bm") return Regime::BreuerMajor;
    if (s == "critical") return Regime::Critical;
    if (s == "exact") return Regime::Exact;
    throw DomainError("unknown regime '" + s + "' (expected exact, breuer-major or critical)");
}

VariationSpec::VariationSpec(CovarianceModel model, ChaosOrder q, Regime regime)
    : model_(std::move(model)), q_(q), regime_(regime) {
    if (regime_ == Regime::Critical) {
        if (q_.value() < 2) throw RegimeError("critical regime needs q >= 2");
        if (!model_.is_fgn() || std::abs(model_.hurst() - critical_hurst(q_)) > 1e-12) {
            throw RegimeError("critical regime needs fGn with H = 1 - 1/(2q) = " +
                              std::to_string(critical_hurst(q_)) + ", got " + model_.id());
        }
    } else if (regime_ == Regime::BreuerMajor) {
        sigma2_ = breuer_major_sigma2(model_, q_, 1e-10).value;
    }
}

double target_variance(const CovarianceModel& model, ChaosOrder q, Regime regime, std::uint64_t n,
                       std::optional<double> sigma2) {
    if (n == 0) throw DomainError("normalizer requires n >= 1");
    switch (regime) {
        case Regime::Exact: return partial_sum_variance(model, q, n);
        case Regime::BreuerMajor: {
            const double s2 = sigma2 ? *sigma2 : breuer_major_sigma2(model, q, 1e-10).value;
            return s2 * static_cast<double>(n);
        }
        case Regime::Critical: {
            if (n < 2) throw DomainError("critical normalizer needs n >= 2 (log n > 0)");
            const double nd = static_cast<double>(n);
            return critical_variance_constant(q) * nd * std::log(nd);
        }
    }
    throw DomainError("unknown regime");
}

double normalizer(const VariationSpec& spec, std::uint64_t n) {
    return std::sqrt(target_variance(spec.model(), spec.q(), spec.regime(), n, spec.sigma2()));
}

double lil_normalizer(const VariationSpec& spec, std::uint64_t n) {
    if (n < 16) throw DomainError("log log n scaling needs n >= 16");
    const double nd = static_cast<double>(n);
    return normalizer(spec, n) * std::sqrt(2.0 * std::log(std::log(nd)));
}

double variation_statistic(std::span<const double> path, ChaosOrder q, std::size_t n1, std::size_t n2) {
    if (!(n1 < n2 && n2 <= path.size())) {
        throw OutOfRangeError("variation range [" + std::to_string(n1) + "," + std::to_string(n2) +
                              ") invalid for a path of length " + std::to_string(path.size()));
    }
    detail::NeumaierSum sum;
    for (std::size_t k = n1; k < n2; ++k) sum.add(hermite_eval(q.value(), path[k]));
    return sum.value();
}

CarreDuChamp::CarreDuChamp(CovarianceModel model, ChaosOrder q, GammaOptions options)
    : model_(std::move(model)), q_(q), options_(options) {}

CarreDuChamp::~CarreDuChamp() = default;

const detail::ToeplitzOperator& CarreDuChamp::toeplitz(std::size_t order) const {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[order];
    if (!slot) {
        std::vector<double> kernel(order);
        for (std::size_t r = 0; r < order; ++r) kernel[r] = model_.rho(static_cast<std::int64_t>(r));
        slot = std::make_unique<detail::ToeplitzOperator>(kernel);
    }
    return *slot;
}

GammaValue CarreDuChamp::gamma(std::span<const double> path, Block block, double g) const {
    return cross(path, block, block, g, g);
}

GammaValue CarreDuChamp::cross(std::span<const double> path, Block a, Block b, double g_a, double g_b) const {
    if (!(a.begin < a.end && a.end <= path.size() && b.begin < b.end && b.end <= path.size())) {
        throw OutOfRangeError("carre du champ block outside the path");
    }
    if (!(g_a > 0.0 && g_b > 0.0)) throw DomainError("normalizers must be positive");
    const int qm1 = q_.value() - 1;
    const std::size_t lo = std::min(a.begin, b.begin);
    const std::size_t hi = std::max(a.end, b.end);
    const std::size_t span_len = hi - lo;

    std::vector<double> h(span_len);
    for (std::size_t k = 0; k < span_len; ++k) h[k] = hermite_eval(qm1, path[lo + k]);

    using Method = GammaOptions::Method;
    Method method = options_.method;
    if (method == Method::Auto) method = span_len <= 64 ? Method::Direct : Method::Fft;

    double sum = 0.0;
    double bound = 0.0;
    if (method == Method::Fft) {
        std::vector<double> x(span_len, 0.0), y(span_len, 0.0);
        for (std::size_t k = a.begin; k < a.end; ++k) x[k - lo] = h[k - lo];
        for (std::size_t k = b.begin; k < b.end; ++k) y[k - lo] = h[k - lo];
        sum = toeplitz(span_len).bilinear_form(x, y);
    } else {
        const bool banded = method == Method::Banded;
        if (!banded && (a.size() > options_.direct_cap || b.size() > options_.direct_cap)) {
            throw CostCapError("direct carre du champ over " + std::to_string(std::max(a.size(), b.size())) +
                               " lags exceeds the cap of " + std::to_string(options_.direct_cap) +
                               "; use the FFT or banded method");
        }
        const std::size_t band = banded ? options_.bandwidth : span_len;
        std::vector<double> rho(std::min(band, span_len - 1) + 1);
        for (std::size_t r = 0; r < rho.size(); ++r) rho[r] = model_.rho(static_cast<std::int64_t>(r));
        detail::NeumaierSum acc;
        for (std::size_t k = a.begin; k < a.end; ++k) {
            const std::size_t l0 = std::max(b.begin, k >= band ? k - band : 0);
            const std::size_t l1 = std::min(b.end, k + band + 1);
            for (std::size_t l = l0; l < l1; ++l) {
                const std::size_t lag = k > l ? k - l : l - k;
                acc.add(h[k - lo] * h[l - lo] * rho[lag]);
            }
        }
        sum = acc.value();
        if (banded && band + 1 < span_len) {
            double tail = 0.0;
            for (std::size_t r = band + 1; r < span_len; ++r) tail += std::abs(model_.rho(static_cast<std::int64_t>(r)));
            double na = 0.0, nb = 0.0;
            for (std::size_t k = a.begin; k < a.end; ++k) na += h[k - lo] * h[k - lo];
            for (std::size_t k = b.begin; k < b.end; ++k) nb += h[k - lo] * h[k - lo];
            bound = q_.value() * (na + nb) * tail / (g_a * g_b);
        }
    }
    return GammaValue{q_.value() * sum / (g_a * g_b), bound};
}

GammaValue carre_du_champ(std::span<const double> path, ChaosOrder q, std::size_t n1, std::size_t n2,
                          const CovarianceModel& model, double g, const GammaOptions& options) {
    CarreDuChamp engine(model, q, options);
    return engine.gamma(path, Block{n1, n2}, g);
}

Block BlockingSubsequence::block(int i) const {
    if (i < 1 || i > d) throw OutOfRangeError("block index out of range");
    return Block{static_cast<std::size_t>(indices[2 * i - 2]), static_cast<std::size_t>(indices[2 * i - 1])};
}

BlockingSubsequence blocking_subsequence(double q_ratio, double alpha, int m, int d) {
    if (!(q_ratio > 1.0)) throw DomainError("blocking ratio must exceed 1");
    if (!(alpha > 0.0)) throw DomainError("blocking alpha must be positive");
    if (m < 1 || d < 1) throw DomainError("blocking needs m >= 1 and d >= 1");
    const long double log_ratio = std::log(static_cast<long double>(q_ratio));
    const long double limit = 62.0L * std::log(2.0L);
    BlockingSubsequence sub{q_ratio, alpha, m, d, {}};
    sub.indices.reserve(2 * static_cast<std::size_t>(d));
    for (int i = 1; i <= 2 * d; ++i) {
        const long double exponent =
            std::pow(static_cast<long double>(m + i), 1.0L + static_cast<long double>(alpha)) * log_ratio;
        if (exponent > limit) {
            throw OverflowError("blocking index " + std::to_string(i) + " exceeds 2^62 (log index " +
                                std::to_string(static_cast<double>(exponent)) + ")");
        }
        const auto index = static_cast<std::uint64_t>(std::floor(std::exp(exponent)));
        if (!sub.indices.empty() && index <= sub.indices.back()) {
            throw DomainError("blocking indices n_" + std::to_string(i - 1) + " and n_" + std::to_string(i) +
                              " coincide at " + std::to_string(index) + "; increase m or q_ratio");
        }
        sub.indices.push_back(index);
    }
    return sub;
}

std::vector<double> increment_vector(std::span<const double> path, const BlockingSubsequence& sub,
                                     const VariationSpec& spec) {
    if (path.size() < sub.last_index()) {
        throw OutOfRangeError("path of length " + std::to_string(path.size()) + " is shorter than n_2d = " +
                              std::to_string(sub.last_index()));
    }
    std::vector<double> y(static_cast<std::size_t>(sub.d));
    for (int i = 1; i <= sub.d; ++i) {
        const Block b = sub.block(i);
        y[i - 1] = variation_statistic(path, spec.q(), b.begin, b.end) / normalizer(spec, b.size());
    }
    return y;
}

}  // namespace steinlil
