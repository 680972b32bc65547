#include "steinlil/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "steinlil/error.hpp"

namespace steinlil {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw DomainError("config key '" + key + "': cannot parse '" + text + "'");
    }
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>) {
            out += fmt(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "model", "hurst", "rho", "tail_exponent", "zero_beyond", "q", "regime", "normalizer", "series_tol",
        "seed", "replicates", "threads", "n_min_log2", "n_max_log2", "variance_C", "n_list",
        "theta_list", "q_ratio", "alpha", "m_min", "m_max", "d", "cross_C", "stein_replicates",
        "d_list", "block_m", "samples", "repetitions", "comparison_slack", "min_pass_fraction",
        "k_sigma", "abs_slack", "stability_factor", "lil_n_max", "lil_grid_ratio", "lil_replicates",
        "n", "gamma_method", "bandwidth"};
    return keys;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    return parse(in);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<double>(key, it->second);
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<std::int64_t>(key, it->second);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DomainError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_number<double>(key, item));
    return out;
}

std::vector<std::uint64_t> KeyValueConfig::get_u64s(const std::string& key,
                                                    const std::vector<std::uint64_t>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_number<std::uint64_t>(key, item));
    return out;
}

CovarianceModel ExperimentConfig::covariance_model() const {
    if (model == "fgn") return CovarianceModel::fgn(hurst);
    if (model == "white") return CovarianceModel::white_noise();
    if (model == "explicit") return CovarianceModel::explicit_values(rho, tail_exponent, zero_beyond);
    throw DomainError("unknown model '" + model + "' (expected fgn, white or explicit)");
}

GammaOptions ExperimentConfig::gamma_options() const {
    GammaOptions o;
    if (gamma_method == "auto") {
        o.method = GammaOptions::Method::Auto;
    } else if (gamma_method == "direct") {
        o.method = GammaOptions::Method::Direct;
    } else if (gamma_method == "fft") {
        o.method = GammaOptions::Method::Fft;
    } else if (gamma_method == "banded") {
        o.method = GammaOptions::Method::Banded;
    } else {
        throw DomainError("unknown gamma_method '" + gamma_method + "'");
    }
    o.bandwidth = bandwidth;
    return o;
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& kv) {
    for (const auto& [key, value] : kv.values()) {
        if (!known_keys().count(key)) throw DomainError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    c.model = kv.get_string("model", c.model);
    c.hurst = kv.get_double("hurst", c.hurst);
    c.rho = kv.get_doubles("rho", c.rho);
    if (kv.has("tail_exponent")) c.tail_exponent = kv.get_double("tail_exponent", 0.0);
    c.zero_beyond = kv.get_bool("zero_beyond", c.zero_beyond);
    c.q = static_cast<int>(kv.get_int("q", c.q));
    c.regime = regime_from_string(kv.get_string("regime", to_string(c.regime)));
    c.normalizer = regime_from_string(kv.get_string("normalizer", to_string(c.normalizer)));
    c.series_tol = kv.get_double("series_tol", c.series_tol);
    c.seed = kv.get_u64("seed", c.seed);
    c.replicates = kv.get_u64("replicates", c.replicates);
    c.threads = static_cast<unsigned>(kv.get_u64("threads", c.threads));
    c.n_min_log2 = static_cast<int>(kv.get_int("n_min_log2", c.n_min_log2));
    c.n_max_log2 = static_cast<int>(kv.get_int("n_max_log2", c.n_max_log2));
    c.variance_C = kv.get_double("variance_C", c.variance_C);
    c.n_list = kv.get_u64s("n_list", c.n_list);
    c.theta_list = kv.get_doubles("theta_list", c.theta_list);
    c.q_ratio = kv.get_double("q_ratio", c.q_ratio);
    c.alpha = kv.get_double("alpha", c.alpha);
    c.m_min = static_cast<int>(kv.get_int("m_min", c.m_min));
    c.m_max = static_cast<int>(kv.get_int("m_max", c.m_max));
    c.d = static_cast<int>(kv.get_int("d", c.d));
    c.cross_C = kv.get_double("cross_C", c.cross_C);
    c.stein_replicates = kv.get_u64("stein_replicates", c.stein_replicates);
    c.d_list = kv.get_u64s("d_list", c.d_list);
    c.block_m = static_cast<int>(kv.get_int("block_m", c.block_m));
    c.samples = kv.get_u64("samples", c.samples);
    c.repetitions = kv.get_u64("repetitions", c.repetitions);
    c.comparison_slack = kv.get_double("comparison_slack", c.comparison_slack);
    c.min_pass_fraction = kv.get_double("min_pass_fraction", c.min_pass_fraction);
    c.k_sigma = kv.get_double("k_sigma", c.k_sigma);
    c.abs_slack = kv.get_double("abs_slack", c.abs_slack);
    c.stability_factor = kv.get_double("stability_factor", c.stability_factor);
    c.lil_n_max = kv.get_u64("lil_n_max", c.lil_n_max);
    c.lil_grid_ratio = kv.get_double("lil_grid_ratio", c.lil_grid_ratio);
    c.lil_replicates = kv.get_u64("lil_replicates", c.lil_replicates);
    c.n = kv.get_u64("n", c.n);
    c.gamma_method = kv.get_string("gamma_method", c.gamma_method);
    c.bandwidth = kv.get_u64("bandwidth", c.bandwidth);
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw DomainError("invalid config: " + what);
    };
    (void)covariance_model();
    (void)chaos_order();
    (void)gamma_options();
    require(series_tol > 0.0, "series_tol must be positive");
    require(replicates >= 1, "replicates must be >= 1");
    require(threads >= 1, "threads must be >= 1");
    require(n_min_log2 >= 1 && n_min_log2 <= n_max_log2 && n_max_log2 <= 40, "need 1 <= n_min_log2 <= n_max_log2 <= 40");
    require(variance_C > 0.0 && cross_C > 0.0, "constants must be positive");
    require(!n_list.empty(), "n_list must not be empty");
    for (auto v : n_list) require(v >= 2, "n_list entries must be >= 2");
    require(!theta_list.empty(), "theta_list must not be empty");
    for (auto t : theta_list) require(t >= 1.0, "theta_list entries must be >= 1");
    require(q_ratio > 1.0, "q_ratio must exceed 1");
    require(alpha > 0.0, "alpha must be positive");
    require(m_min >= 0 && m_min <= m_max, "need 0 <= m_min <= m_max");
    require(d >= 1, "d must be >= 1");
    require(!d_list.empty(), "d_list must not be empty");
    for (auto v : d_list) require(v >= 1 && v <= 4, "d_list entries must lie in 1..4");
    require(block_m >= 0, "block_m must be >= 0");
    require(samples >= 1 && repetitions >= 1, "samples and repetitions must be >= 1");
    require(comparison_slack >= 0.0 && abs_slack >= 0.0 && k_sigma >= 0.0, "slacks must be nonnegative");
    require(min_pass_fraction >= 0.0 && min_pass_fraction <= 1.0, "min_pass_fraction must lie in [0, 1]");
    require(stability_factor >= 1.0, "stability_factor must be >= 1");
    require(lil_n_max >= 16, "lil_n_max must be >= 16");
    require(lil_grid_ratio > 1.0, "lil_grid_ratio must exceed 1");
    require(lil_replicates >= 1, "lil_replicates must be >= 1");
    require(n >= 1, "n must be >= 1");
}

std::string ExperimentConfig::dump() const {
    std::ostringstream os;
    os << "model = " << model << "\n";
    os << "hurst = " << fmt(hurst) << "\n";
    if (!rho.empty()) os << "rho = " << join(rho) << "\n";
    if (tail_exponent) os << "tail_exponent = " << fmt(*tail_exponent) << "\n";
    os << "zero_beyond = " << (zero_beyond ? "true" : "false") << "\n";
    os << "q = " << q << "\n";
    os << "regime = " << to_string(regime) << "\n";
    os << "normalizer = " << to_string(normalizer) << "\n";
    os << "series_tol = " << fmt(series_tol) << "\n";
    os << "seed = " << seed << "\n";
    os << "replicates = " << replicates << "\n";
    os << "n_min_log2 = " << n_min_log2 << "\n";
    os << "n_max_log2 = " << n_max_log2 << "\n";
    os << "variance_C = " << fmt(variance_C) << "\n";
    os << "n_list = " << join(n_list) << "\n";
    os << "theta_list = " << join(theta_list) << "\n";
    os << "q_ratio = " << fmt(q_ratio) << "\n";
    os << "alpha = " << fmt(alpha) << "\n";
    os << "m_min = " << m_min << "\n";
    os << "m_max = " << m_max << "\n";
    os << "d = " << d << "\n";
    os << "cross_C = " << fmt(cross_C) << "\n";
    os << "stein_replicates = " << stein_replicates << "\n";
    os << "d_list = " << join(d_list) << "\n";
    os << "block_m = " << block_m << "\n";
    os << "samples = " << samples << "\n";
    os << "repetitions = " << repetitions << "\n";
    os << "comparison_slack = " << fmt(comparison_slack) << "\n";
    os << "min_pass_fraction = " << fmt(min_pass_fraction) << "\n";
    os << "k_sigma = " << fmt(k_sigma) << "\n";
    os << "abs_slack = " << fmt(abs_slack) << "\n";
    os << "stability_factor = " << fmt(stability_factor) << "\n";
    os << "lil_n_max = " << lil_n_max << "\n";
    os << "lil_grid_ratio = " << fmt(lil_grid_ratio) << "\n";
    os << "lil_replicates = " << lil_replicates << "\n";
    os << "n = " << n << "\n";
    os << "gamma_method = " << gamma_method << "\n";
    os << "bandwidth = " << bandwidth << "\n";
    return os.str();
}

}  // namespace steinlil
