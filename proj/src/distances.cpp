#include "steinlil/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>

#include "steinlil/error.hpp"
#include "summation.hpp"

namespace steinlil {

namespace {

// Table over axes 1..d-1 holding orthant sums; add_dominated adds w to every
// cell whose multi-index dominates `start` componentwise.
class OrthantTable {
public:
    explicit OrthantTable(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        std::size_t total = 1;
        strides_.resize(dims_.size());
        for (std::size_t a = dims_.size(); a-- > 0;) {
            strides_[a] = total;
            total *= dims_[a];
        }
        data_.assign(total, 0.0);
    }

    std::size_t size() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }

    void add_dominated(std::span<const std::size_t> start, double w) {
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            if (start[a] >= dims_[a]) return;
        }
        std::vector<std::size_t> idx(start.begin(), start.end());
        const std::size_t axes = dims_.size();
        if (axes == 0) {
            data_[0] += w;
            return;
        }
        // Iterate the box [start, dims) with the last axis contiguous.
        while (true) {
            std::size_t base = 0;
            for (std::size_t a = 0; a + 1 < axes; ++a) base += idx[a] * strides_[a];
            for (std::size_t k = start[axes - 1]; k < dims_[axes - 1]; ++k) data_[base + k] += w;
            std::size_t a = axes - 1;
            bool done = true;
            while (a-- > 0) {
                if (++idx[a] < dims_[a]) {
                    done = false;
                    break;
                }
                idx[a] = start[a];
            }
            if (done) return;
        }
    }

    // Multi-index of a flat position.
    void unflatten(std::size_t flat, std::vector<std::size_t>& idx) const {
        idx.resize(dims_.size());
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            idx[a] = flat / strides_[a];
            flat %= strides_[a];
        }
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

std::vector<double> choose_anchors(std::vector<double> coords, const AnchorPolicy& policy, bool& subsampled) {
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    if (policy.mode == AnchorPolicy::Mode::FullGrid || coords.size() <= policy.anchors_per_axis) return coords;
    subsampled = true;
    const std::size_t k = std::max<std::size_t>(1, policy.anchors_per_axis);
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = coords[(j + 1) * coords.size() / k - 1];
    return out;
}

std::size_t anchor_index(const std::vector<double>& anchors, double v) {
    return static_cast<std::size_t>(std::lower_bound(anchors.begin(), anchors.end(), v) - anchors.begin());
}

void check_cells(const std::vector<std::vector<double>>& anchors, std::size_t extra, const AnchorPolicy& policy) {
    double cells = 1.0;
    for (const auto& a : anchors) cells *= static_cast<double>(a.size() + extra);
    if (cells > static_cast<double>(policy.max_cells)) {
        throw CostCapError("Kolmogorov grid of " + std::to_string(cells) + " cells exceeds the cap of " +
                           std::to_string(policy.max_cells) + "; subsample the anchors");
    }
}

double binomial_se(double f, std::size_t m) { return m == 0 ? 0.0 : std::sqrt(std::max(f * (1.0 - f), 0.0) / static_cast<double>(m)); }

}  // namespace

std::string to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Kolmogorov1d: return "kolmogorov_1d";
        case DistanceKind::KolmogorovMultid: return "kolmogorov_multid";
        case DistanceKind::WassersteinSorted: return "wasserstein_sorted";
        case DistanceKind::WassersteinAssignment: return "wasserstein_assignment";
    }
    return "unknown";
}

std::string to_json(const DistanceReport& r) {
    nlohmann::ordered_json j{{"kind", to_string(r.kind)}, {"d", r.d},          {"value", r.value},
                             {"m", r.m},                  {"std_error", r.std_error}, {"exact", r.exact}};
    if (r.m_reference != 0) j["m_reference"] = r.m_reference;
    return j.dump();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

PointCloud::PointCloud(int d, std::vector<double> coords) : d_(d), coords_(std::move(coords)) {
    if (d < 1) throw DomainError("point cloud dimension must be >= 1");
    if (coords_.size() % static_cast<std::size_t>(d) != 0) throw DomainError("coordinates are not a whole number of points");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DomainError("empty point cloud");
    const std::size_t d = rows.front().size();
    std::vector<double> coords;
    coords.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (r.size() != d) throw DomainError("ragged point cloud");
        coords.insert(coords.end(), r.begin(), r.end());
    }
    return PointCloud(static_cast<int>(d), std::move(coords));
}

DistanceReport kolmogorov_1d_vs_gaussian(std::span<const double> sample) {
    if (sample.empty()) throw DomainError("Kolmogorov distance of an empty sample");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double m = static_cast<double>(x.size());
    double best = 0.0, best_f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double phi = normal_cdf(x[i]);
        const double above = (static_cast<double>(i) + 1.0) / m - phi;  // right limit
        const double below = phi - static_cast<double>(i) / m;          // left limit
        if (above > best) {
            best = above;
            best_f = (static_cast<double>(i) + 1.0) / m;
        }
        if (below > best) {
            best = below;
            best_f = static_cast<double>(i) / m;
        }
    }
    return DistanceReport{DistanceKind::Kolmogorov1d, std::min(best, 1.0), 1, x.size(), 0,
                          binomial_se(best_f, x.size()), true};
}

DistanceReport kolmogorov_multid(const PointCloud& x, const PointCloud& y, const AnchorPolicy& policy) {
    if (x.dim() != y.dim()) throw DomainError("Kolmogorov samples differ in dimension");
    if (x.size() == 0 || y.size() == 0) throw DomainError("Kolmogorov distance of an empty sample");
    const int d = x.dim();
    if (d > 4 && policy.mode == AnchorPolicy::Mode::FullGrid) {
        throw CostCapError("full-grid Kolmogorov distance is limited to d <= 4; pass a subsampling policy");
    }
    bool subsampled = false;
    std::vector<std::vector<double>> anchors(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        std::vector<double> coords;
        coords.reserve(x.size() + y.size());
        for (std::size_t i = 0; i < x.size(); ++i) coords.push_back(x.at(i, a));
        for (std::size_t i = 0; i < y.size(); ++i) coords.push_back(y.at(i, a));
        anchors[a] = choose_anchors(std::move(coords), policy, subsampled);
    }
    check_cells(anchors, 0, policy);

    struct Entry {
        std::vector<std::size_t> cell;
        double w_diff;
        double w_x;
    };
    const double wx = 1.0 / static_cast<double>(x.size());
    const double wy = 1.0 / static_cast<double>(y.size());
    std::vector<std::vector<Entry>> by_first(anchors[0].size());
    auto place = [&](const PointCloud& cloud, std::size_t i, double w_diff, double w_x) {
        std::vector<std::size_t> cell(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            cell[a] = anchor_index(anchors[a], cloud.at(i, a));
            if (cell[a] == anchors[a].size()) return;  // above every anchor on this axis
        }
        const std::size_t first = cell[0];
        by_first[first].push_back(Entry{std::vector<std::size_t>(cell.begin() + 1, cell.end()), w_diff, w_x});
    };
    for (std::size_t i = 0; i < x.size(); ++i) place(x, i, wx, wx);
    for (std::size_t i = 0; i < y.size(); ++i) place(y, i, -wy, 0.0);

    std::vector<std::size_t> dims;
    for (int a = 1; a < d; ++a) dims.push_back(anchors[a].size());
    OrthantTable diff(dims), fx(dims);
    double best = 0.0, best_fx = 0.0, best_fy = 0.0;
    for (std::size_t t = 0; t < anchors[0].size(); ++t) {
        for (const auto& e : by_first[t]) {
            diff.add_dominated(e.cell, e.w_diff);
            if (e.w_x != 0.0) fx.add_dominated(e.cell, e.w_x);
        }
        for (std::size_t c = 0; c < diff.size(); ++c) {
            const double v = std::abs(diff[c]);
            if (v > best) {
                best = v;
                best_fx = fx[c];
                best_fy = fx[c] - diff[c];
            }
        }
    }
    const double se = std::sqrt(std::pow(binomial_se(best_fx, x.size()), 2) + std::pow(binomial_se(best_fy, y.size()), 2));
    return DistanceReport{DistanceKind::KolmogorovMultid, std::min(best, 1.0), d, x.size(), y.size(), se, !subsampled};
}

DistanceReport kolmogorov_multid_vs_gaussian(const PointCloud& x, const AnchorPolicy& policy) {
    if (x.size() == 0) throw DomainError("Kolmogorov distance of an empty sample");
    const int d = x.dim();
    if (d > 4 && policy.mode == AnchorPolicy::Mode::FullGrid) {
        throw CostCapError("full-grid Kolmogorov distance is limited to d <= 4; pass a subsampling policy");
    }
    bool subsampled = false;
    std::vector<std::vector<double>> anchors(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        std::vector<double> coords(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) coords[i] = x.at(i, a);
        anchors[a] = choose_anchors(std::move(coords), policy, subsampled);
    }
    check_cells(anchors, 1, policy);

    // Cell i on an axis is [A_{i-1}, A_i) with A_{-1} = -inf and A_N = +inf.
    std::vector<std::vector<double>> lower(static_cast<std::size_t>(d)), upper(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const std::size_t n = anchors[a].size();
        lower[a].resize(n + 1);
        upper[a].resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            lower[a][i] = i == 0 ? 0.0 : normal_cdf(anchors[a][i - 1]);
            upper[a][i] = i == n ? 1.0 : normal_cdf(anchors[a][i]);
        }
    }

    std::vector<std::size_t> dims;
    for (int a = 1; a < d; ++a) dims.push_back(anchors[a].size() + 1);
    OrthantTable ecdf(dims);
    std::vector<double> low_prod(ecdf.size()), high_prod(ecdf.size());
    {
        std::vector<std::size_t> idx;
        for (std::size_t c = 0; c < ecdf.size(); ++c) {
            ecdf.unflatten(c, idx);
            double lo = 1.0, hi = 1.0;
            for (std::size_t a = 0; a < idx.size(); ++a) {
                lo *= lower[a + 1][idx[a]];
                hi *= upper[a + 1][idx[a]];
            }
            low_prod[c] = lo;
            high_prod[c] = hi;
        }
    }

    // A point with anchor index c is counted in cells i >= c + 1.
    const double w = 1.0 / static_cast<double>(x.size());
    std::vector<std::vector<std::vector<std::size_t>>> by_first(anchors[0].size() + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<std::size_t> cell(static_cast<std::size_t>(d));
        bool inside = true;
        for (int a = 0; a < d && inside; ++a) {
            cell[a] = anchor_index(anchors[a], x.at(i, a)) + 1;
            inside = cell[a] <= anchors[a].size();
        }
        if (!inside) continue;
        by_first[cell[0]].push_back(std::vector<std::size_t>(cell.begin() + 1, cell.end()));
    }

    double best = 0.0, best_f = 0.0;
    for (std::size_t t = 0; t <= anchors[0].size(); ++t) {
        for (const auto& cell : by_first[t]) ecdf.add_dominated(cell, w);
        for (std::size_t c = 0; c < ecdf.size(); ++c) {
            const double f = ecdf[c];
            const double v = std::max(f - lower[0][t] * low_prod[c], upper[0][t] * high_prod[c] - f);
            if (v > best) {
                best = v;
                best_f = f;
            }
        }
    }
    return DistanceReport{DistanceKind::KolmogorovMultid, std::min(best, 1.0), d, x.size(), 0,
                          binomial_se(best_f, x.size()), !subsampled};
}

DistanceReport wasserstein_sorted(std::span<const double> a, std::span<const double> b, double theta) {
    if (a.size() != b.size()) throw DomainError("sorted coupling needs equal sample sizes");
    if (a.empty()) throw DomainError("Wasserstein distance of empty samples");
    if (!(theta >= 1.0)) throw DomainError("theta must be >= 1");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double gap = std::abs(x[i] - y[i]);
        terms[i] = theta == 1.0 ? gap : theta == 2.0 ? gap * gap : std::pow(gap, theta);
    }
    detail::NeumaierSum sum;
    for (double t : terms) sum.add(t);
    const double m = static_cast<double>(x.size());
    const double mean = sum.value() / m;
    const double value = theta == 1.0 ? mean : theta == 2.0 ? std::sqrt(mean) : std::pow(mean, 1.0 / theta);
    double var = 0.0;
    for (double t : terms) var += (t - mean) * (t - mean);
    const double se_mean = x.size() > 1 ? std::sqrt(var / (m - 1.0) / m) : 0.0;
    const double se = value > 0.0 ? se_mean * value / (theta * mean) : 0.0;
    return DistanceReport{DistanceKind::WassersteinSorted, value, 1, x.size(), y.size(), se, true};
}

Assignment solve_assignment(std::span<const double> cost, std::size_t m) {
    if (cost.size() != m * m) throw DomainError("cost matrix is not m x m");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual start of each augmentation.
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), min_slack(m + 1);
    std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (std::size_t row = 1; row <= m; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r0 = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t c = 1; c <= m; ++c) {
                if (used[c]) continue;
                const double reduced = cost[(r0 - 1) * m + (c - 1)] - u[r0] - v[c];
                if (reduced < min_slack[c]) {
                    min_slack[c] = reduced;
                    way[c] = col0;
                }
                if (min_slack[c] < delta) {
                    delta = min_slack[c];
                    col1 = c;
                }
            }
            for (std::size_t c = 0; c <= m; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    min_slack[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    Assignment out;
    out.column_of_row.assign(m, 0);
    for (std::size_t c = 1; c <= m; ++c) out.column_of_row[match[c] - 1] = c - 1;
    detail::NeumaierSum total;
    for (std::size_t r = 0; r < m; ++r) total.add(cost[r * m + out.column_of_row[r]]);
    out.total_cost = total.value();
    return out;
}

DistanceReport wasserstein_assignment(const PointCloud& a, const PointCloud& b, std::size_t cost_cap) {
    if (a.dim() != b.dim()) throw DomainError("point clouds differ in dimension");
    if (a.size() != b.size()) throw DomainError("assignment W1 needs equal sample sizes");
    if (a.size() == 0) throw DomainError("Wasserstein distance of empty samples");
    const std::size_t m = a.size();
    if (m > cost_cap) {
        throw CostCapError("assignment over " + std::to_string(m) + " points exceeds the cap of " +
                           std::to_string(cost_cap));
    }
    std::vector<double> cost(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto p = a.point(i);
        for (std::size_t j = 0; j < m; ++j) {
            const auto q = b.point(j);
            double s = 0.0;
            for (int k = 0; k < a.dim(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
            cost[i * m + j] = std::sqrt(s);
        }
    }
    const Assignment assignment = solve_assignment(cost, m);
    const double md = static_cast<double>(m);
    const double mean = assignment.total_cost / md;
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double c = cost[i * m + assignment.column_of_row[i]];
        var += (c - mean) * (c - mean);
    }
    const double se = m > 1 ? std::sqrt(var / (md - 1.0) / md) : 0.0;
    return DistanceReport{DistanceKind::WassersteinAssignment, mean, a.dim(), m, m, se, true};
}

double comparison_rhs(int d, double w1) {
    if (d < 1) throw DomainError("dimension must be >= 1");
    if (!(w1 >= 0.0)) throw DomainError("W1 must be nonnegative");
    return 3.0 * std::pow(std::log(static_cast<double>(d) + 1.0), 0.25) * std::sqrt(w1);
}

double theta_recursion_step(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi) + t * normal_cdf(t);
}

std::vector<double> theta_bound_sequence(std::size_t dmax) {
    if (dmax < 1) throw DomainError("dmax must be >= 1");
    std::vector<double> b(dmax);
    b[0] = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 1; i < dmax; ++i) b[i] = theta_recursion_step(b[i - 1]);
    return b;
}

double gaussian_abs_moment(double theta) {
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    const double log_moment =
        0.5 * theta * std::log(2.0) + std::lgamma(0.5 * (theta + 1.0)) - 0.5 * std::log(std::numbers::pi);
    return std::exp(log_moment / theta);
}

double stein_wasserstein_constant(int d, double theta) {
    if (d < 1) throw DomainError("dimension must be >= 1");
    if (!(theta >= 1.0)) throw DomainError("theta must be >= 1");
    const double exponent = theta < 2.0 ? 1.0 - 1.0 / theta : 1.0 - 2.0 / theta;
    return gaussian_abs_moment(theta) * std::pow(static_cast<double>(d), exponent);
}

double stein_wasserstein_bound(int d, double theta, double moment_sum) {
    if (!(moment_sum >= 0.0)) throw DomainError("moment sum must be nonnegative");
    return stein_wasserstein_constant(d, theta) * std::pow(moment_sum, 1.0 / theta);
}

double stein_kolmogorov_bound(double abs_dev) {
    if (!(abs_dev >= 0.0)) throw DomainError("E|tau - 1| must be nonnegative");
    return abs_dev;
}

double stein_w1_bound(double second_moment_sum) {
    if (!(second_moment_sum >= 0.0)) throw DomainError("second-moment sum must be nonnegative");
    return std::sqrt(second_moment_sum);
}

}  // namespace steinlil
