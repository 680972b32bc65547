#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steinlil/covariance.hpp"

namespace steinlil {

namespace detail {
class ToeplitzOperator;
}

/// Probabilists' Hermite polynomial H_q(x) by the three-term recurrence
/// H_{q+1}(x) = x H_q(x) - q H_{q-1}(x).
double hermite_eval(int q, double x);

/// How X_n is normalised.
enum class Regime {
    BreuerMajor,  // g(n)^2 = sigma_q^2 n
    Critical,     // g(n)^2 = c_q n log n
    Exact,        // g(n)^2 = E[X_n^2]
};

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Model, chaos order and normalisation of a Hermite variation.
class VariationSpec {
public:
    /// Validates the regime: Critical needs fGn at H = 1 - 1/(2q), BreuerMajor
    /// a summable sum |rho|^q.
    VariationSpec(CovarianceModel model, ChaosOrder q, Regime regime);

    const CovarianceModel& model() const noexcept { return model_; }
    ChaosOrder q() const noexcept { return q_; }
    Regime regime() const noexcept { return regime_; }
    /// sigma_q^2 when the regime is BreuerMajor.
    std::optional<double> sigma2() const noexcept { return sigma2_; }

private:
    CovarianceModel model_;
    ChaosOrder q_;
    Regime regime_;
    std::optional<double> sigma2_;
};

/// g(n)^2 under `regime` without checking that the model belongs to it;
/// audits use this to test a variance law against an arbitrary model.
/// `sigma2` must be supplied for BreuerMajor.
double target_variance(const CovarianceModel& model, ChaosOrder q, Regime regime, std::uint64_t n,
                       std::optional<double> sigma2 = std::nullopt);

/// g(n) for a validated spec. Critical requires n >= 2.
double normalizer(const VariationSpec& spec, std::uint64_t n);

/// g(n) sqrt(2 log log n); requires n >= 16.
double lil_normalizer(const VariationSpec& spec, std::uint64_t n);

/// sum_{k=n1}^{n2-1} H_q(Z_k).
double variation_statistic(std::span<const double> path, ChaosOrder q, std::size_t n1, std::size_t n2);

struct GammaOptions {
    enum class Method { Auto, Direct, Fft, Banded };
    Method method = Method::Auto;
    /// Banded only: keep lags |k-l| <= bandwidth.
    std::size_t bandwidth = 0;
    /// Direct only: largest block length evaluated by the O(L^2) double sum.
    std::size_t direct_cap = 4096;
};

struct GammaValue {
    double value = 0.0;
    /// Pathwise bound on |exact - value|; zero for the exact methods.
    double truncation_bound = 0.0;
};

struct Block {
    std::size_t begin;
    std::size_t end;
    std::size_t size() const noexcept { return end - begin; }
};

/// Carre du champ of normalised q-th chaos blocks:
///   A(a, b) = q sum_{k in a, l in b} H_{q-1}(Z_k) H_{q-1}(Z_l) rho(k-l) / (g_a g_b),
/// i.e. <DY_a, DY_b>/q. For a == b this is Gamma, whose conditional
/// expectation given Y_a is the Stein factor of Y_a.
///
/// Exact evaluation goes through an FFT Toeplitz product (O(L log L)); the
/// direct double sum is kept for small blocks and as a cross-check.
/// Instances cache one Toeplitz operator per span length and may be shared
/// between threads.
class CarreDuChamp {
public:
    CarreDuChamp(CovarianceModel model, ChaosOrder q, GammaOptions options = {});
    ~CarreDuChamp();
    CarreDuChamp(const CarreDuChamp&) = delete;
    CarreDuChamp& operator=(const CarreDuChamp&) = delete;

    GammaValue gamma(std::span<const double> path, Block block, double g) const;
    GammaValue cross(std::span<const double> path, Block a, Block b, double g_a, double g_b) const;

private:
    const detail::ToeplitzOperator& toeplitz(std::size_t order) const;

    CovarianceModel model_;
    ChaosOrder q_;
    GammaOptions options_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::unique_ptr<detail::ToeplitzOperator>> cache_;
};

/// One-shot form of CarreDuChamp::gamma over [n1, n2).
GammaValue carre_du_champ(std::span<const double> path, ChaosOrder q, std::size_t n1, std::size_t n2,
                          const CovarianceModel& model, double g, const GammaOptions& options = {});

/// Indices n_i = floor(q_ratio^{(m+i)^{1+alpha}}), i = 1..2d; block i is
/// [n_{2i-1}, n_{2i}).
struct BlockingSubsequence {
    double q_ratio;
    double alpha;
    int m;
    int d;
    std::vector<std::uint64_t> indices;

    /// Block i in 1..d.
    Block block(int i) const;
    std::uint64_t block_length(int i) const { return block(i).size(); }
    std::uint64_t last_index() const { return indices.back(); }
};

/// Throws OverflowError if an index would exceed 2^62 and DomainError if
/// two floors coincide (indices must be strictly increasing).
BlockingSubsequence blocking_subsequence(double q_ratio, double alpha, int m, int d);

/// Y_i = (X_{n_{2i}} - X_{n_{2i-1}}) / g(n_{2i} - n_{2i-1}), i = 1..d.
std::vector<double> increment_vector(std::span<const double> path, const BlockingSubsequence& sub,
                                     const VariationSpec& spec);

}  // namespace steinlil
