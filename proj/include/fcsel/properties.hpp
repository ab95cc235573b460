#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/mackinnon_table.hpp"
#include "fcsel/models.hpp"

namespace fcsel {

inline constexpr double kAdfSignificance = 0.05;
inline constexpr std::size_t kAdfMinLength = 20;
inline constexpr std::size_t kDefaultAcfLags = 20;

struct DecompositionResult {
    std::vector<std::optional<double>> trend;     // undefined for the first/last period/2 points
    std::array<double, kSeasonPeriod> seasonal_effects{};  // by calendar month, January first
    std::vector<double> seasonal;                 // effects expanded along the series
    std::vector<std::optional<double>> residual;  // defined where trend is
    int period = kSeasonPeriod;
};

struct AcfResult {
    std::vector<double> r;  // lags 0..max_lag
    double ci_halfwidth = 0.0;

    std::size_t max_lag() const { return r.empty() ? 0 : r.size() - 1; }
};

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lag_order = 0;
    std::size_t nobs = 0;
    bool stationary = false;
};

inline bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

/// Additive decomposition with period 12. `first_month` is the calendar month
/// (1..12) of x[0]. Trend is the centred 2x12 moving average; the seasonal
/// effect of a calendar month is the mean detrended value for that month,
/// re-centred to sum to zero.
inline DecompositionResult decompose_additive(std::span<const double> x, int first_month = 1) {
    constexpr std::size_t m = kSeasonPeriod;
    constexpr std::size_t half = m / 2;
    const std::size_t n = x.size();
    if (n < 2 * m) throw Error(ErrorCode::insufficient_history, "series too short for seasonal decomposition");

    DecompositionResult out;
    out.trend.assign(n, std::nullopt);
    out.residual.assign(n, std::nullopt);
    for (std::size_t t = half; t + half < n; ++t) {
        double s = 0.5 * x[t - half] + 0.5 * x[t + half];
        for (std::size_t j = t - half + 1; j < t + half; ++j) s += x[j];
        out.trend[t] = s / static_cast<double>(m);
    }

    auto calendar = [&](std::size_t t) { return (static_cast<std::size_t>(first_month - 1) + t) % m; };
    std::array<double, m> sum{};
    std::array<int, m> count{};
    for (std::size_t t = 0; t < n; ++t) {
        if (!out.trend[t]) continue;
        sum[calendar(t)] += x[t] - *out.trend[t];
        ++count[calendar(t)];
    }
    double centre = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        out.seasonal_effects[c] = sum[c] / count[c];
        centre += out.seasonal_effects[c];
    }
    centre /= static_cast<double>(m);
    for (auto& e : out.seasonal_effects) e -= centre;

    out.seasonal.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.seasonal[t] = out.seasonal_effects[calendar(t)];
        if (out.trend[t]) out.residual[t] = x[t] - *out.trend[t] - out.seasonal[t];
    }
    return out;
}

inline DecompositionResult decompose_additive(const DemandSeries& series) {
    return decompose_additive(series.view(), series.start.month);
}

/// Sample autocorrelation (biased estimator, divisor n at every lag) with the
/// 95% white-noise band 1.96/sqrt(n).
inline AcfResult acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (n < max_lag + 2) throw Error(ErrorCode::insufficient_history, "series too short for requested ACF lags");
    if (is_constant(x)) throw Error(ErrorCode::degenerate, "zero variance");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> dev(n);
    for (std::size_t t = 0; t < n; ++t) dev[t] = x[t] - mean;
    double denom = 0.0;
    for (double d : dev) denom += d * d;
    if (!(denom > 0.0)) throw Error(ErrorCode::degenerate, "zero variance");

    AcfResult out;
    out.r.resize(max_lag + 1);
    out.r[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) num += dev[t] * dev[t + k];
        out.r[k] = std::clamp(num / denom, -1.0, 1.0);
    }
    out.ci_halfwidth = 1.96 / std::sqrt(static_cast<double>(n));
    return out;
}

inline AcfResult acf(const DemandSeries& series, std::size_t max_lag) { return acf(series.view(), max_lag); }

/// Asymptotic p-value for a constant-only Dickey-Fuller tau statistic, by
/// linear interpolation in the MacKinnon table; clamps outside it.
inline double mackinnon_p_value(double stat) {
    const auto& table = detail::kTauConstantTable;
    if (stat <= table.front().statistic) return table.front().p_value;
    if (stat >= table.back().statistic) return table.back().p_value;
    auto hi = std::upper_bound(table.begin(), table.end(), stat,
                               [](double s, const detail::TauPoint& p) { return s < p.statistic; });
    auto lo = hi - 1;
    double w = (stat - lo->statistic) / (hi->statistic - lo->statistic);
    return lo->p_value + w * (hi->p_value - lo->p_value);
}

/// Schwert's rule floor(12 (n/100)^(1/4)), reduced until at least 10
/// regression observations and one residual degree of freedom remain.
inline int adf_lag_order(std::size_t n) {
    int p = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    auto nobs = [&](int lags) { return static_cast<long>(n) - 1 - lags; };
    while (p > 0 && (nobs(p) < 10 || nobs(p) - (p + 2) < 1)) --p;
    return p;
}

/// Augmented Dickey-Fuller test with a constant and no trend:
///   dx_t = c + g x_{t-1} + sum_{i=1..p} d_i dx_{t-i} + e_t
/// The statistic is the t-ratio of g. Regressors are centred, which is the
/// same fit as an explicit constant column.
inline AdfResult adf_test(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < kAdfMinLength)
        throw Error(ErrorCode::insufficient_history,
                    "ADF needs at least " + std::to_string(kAdfMinLength) + " observations");
    if (is_constant(x)) throw Error(ErrorCode::degenerate, "zero variance");

    const int p = adf_lag_order(n);
    std::vector<double> dx(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) dx[t] = x[t + 1] - x[t];

    const auto lags = static_cast<std::size_t>(p);
    const auto nobs = static_cast<Eigen::Index>(dx.size() - lags);
    const Eigen::Index k = p + 1;  // excluding the constant
    Eigen::MatrixXd design(nobs, k);
    Eigen::VectorXd y(nobs);
    for (Eigen::Index r = 0; r < nobs; ++r) {
        const std::size_t t = lags + static_cast<std::size_t>(r);
        y(r) = dx[t];
        design(r, 0) = x[t];
        for (std::size_t i = 1; i <= lags; ++i) design(r, static_cast<Eigen::Index>(i)) = dx[t - i];
    }
    design.rowwise() -= design.colwise().mean();
    y.array() -= y.mean();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw Error(ErrorCode::degenerate, "degenerate regression");
    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - design * beta;
    const double sse = resid.squaredNorm();
    const auto dof = static_cast<double>(nobs - k - 1);
    if (!(sse > 1e-24 * std::max(y.squaredNorm(), 1.0)) || dof < 1)
        throw Error(ErrorCode::degenerate, "degenerate regression");

    Eigen::MatrixXd xtx = design.transpose() * design;
    Eigen::VectorXd e0 = Eigen::VectorXd::Unit(k, 0);
    const double var0 = (sse / dof) * xtx.ldlt().solve(e0)(0);
    if (!(var0 > 0.0) || !std::isfinite(var0)) throw Error(ErrorCode::degenerate, "degenerate regression");

    AdfResult out;
    out.statistic = beta(0) / std::sqrt(var0);
    if (!std::isfinite(out.statistic)) throw Error(ErrorCode::degenerate, "degenerate regression");
    out.p_value = mackinnon_p_value(out.statistic);
    out.lag_order = p;
    out.nobs = static_cast<std::size_t>(nobs);
    out.stationary = out.p_value < kAdfSignificance;
    return out;
}

inline AdfResult adf_test(const DemandSeries& series) { return adf_test(series.view()); }

/// A property that may be absent, with the reason when it is.
template <typename T>
struct Component {
    std::optional<T> value;
    std::string reason;

    bool present() const { return value.has_value(); }
};

struct SeriesProperties {
    std::string product_id;
    Component<DecompositionResult> decomposition;
    Component<AcfResult> acf;
    Component<AdfResult> adf;
};

namespace detail {

template <typename F>
auto attempt_component(F&& f) -> Component<decltype(f())> {
    try {
        return {f(), {}};
    } catch (const Error& e) {
        return {std::nullopt, e.what()};
    }
}

}  // namespace detail

/// Trend/seasonality, ACF and ADF for one series. A component whose
/// preconditions fail is absent with a reason; this never throws for a
/// non-empty series. ACF uses up to kDefaultAcfLags lags.
inline SeriesProperties extract_properties(const DemandSeries& series) {
    SeriesProperties out;
    out.product_id = series.product_id;
    out.decomposition = detail::attempt_component([&] { return decompose_additive(series); });
    out.acf = detail::attempt_component([&] {
        if (series.size() < 3) throw Error(ErrorCode::insufficient_history, "series too short for ACF");
        return acf(series.view(), std::min(kDefaultAcfLags, series.size() - 2));
    });
    out.adf = detail::attempt_component([&] { return adf_test(series.view()); });
    return out;
}

}  // namespace fcsel
