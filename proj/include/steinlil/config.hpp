#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steinlil/covariance.hpp"
#include "steinlil/hermite.hpp"

namespace steinlil {

/// `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Lists are comma separated. Later assignments override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::uint64_t> get_u64s(const std::string& key, const std::vector<std::uint64_t>& fallback) const;

private:
    std::map<std::string, std::string> values_;
};

/// Every knob of the audits. Defaults reproduce the q=2, H=0.75 critical case.
struct ExperimentConfig {
    // model
    std::string model = "fgn";  // fgn | white | explicit
    double hurst = 0.75;
    std::vector<double> rho;    // explicit only, from lag 0
    std::optional<double> tail_exponent;
    bool zero_beyond = false;
    int q = 2;
    Regime regime = Regime::Exact;          // variance law tested by the variance table
    Regime normalizer = Regime::Exact;      // g(n) for statistics, blocks, Gamma and records
    double series_tol = 1e-8;

    // Monte Carlo
    std::uint64_t seed = 1;
    std::size_t replicates = 2000;
    unsigned threads = 1;

    // variance table
    int n_min_log2 = 10;
    int n_max_log2 = 22;
    double variance_C = 4.0;

    // distance decay and (A2) moments
    std::vector<std::uint64_t> n_list{256, 2048, 16384};
    std::vector<double> theta_list{2.0, 4.0, 6.0};

    // blocking subsequence
    double q_ratio = 1.2;
    double alpha = 0.3;
    int m_min = 4;
    int m_max = 8;
    int d = 3;
    double cross_C = 3.0;
    std::size_t stein_replicates = 400;

    // comparison
    std::vector<std::uint64_t> d_list{1, 2, 3};
    int block_m = 6;
    std::size_t samples = 256;
    std::size_t repetitions = 20;
    double comparison_slack = 0.15;
    double min_pass_fraction = 0.95;

    // shared tolerances
    double k_sigma = 4.0;
    double abs_slack = 0.0;
    double stability_factor = 3.0;

    // lil trajectory
    std::uint64_t lil_n_max = 1u << 16;
    double lil_grid_ratio = 1.5;
    std::size_t lil_replicates = 8;

    // simulate
    std::size_t n = 64;

    // Carre du champ evaluation
    std::string gamma_method = "auto";  // auto | direct | fft | banded
    std::size_t bandwidth = 0;

    CovarianceModel covariance_model() const;
    ChaosOrder chaos_order() const { return ChaosOrder(q); }
    GammaOptions gamma_options() const;

    /// Throws DomainError on unknown keys or out-of-range values.
    static ExperimentConfig from(const KeyValueConfig& kv);
    void validate() const;

    /// Canonical `key = value` listing of every field, one per line.
    std::string dump() const;
};

}  // namespace steinlil
