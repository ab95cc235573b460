#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/month.hpp"

namespace fcsel {

enum class ModelFamily { classical, machine_learning };

/// The algorithm behind a registry entry. Several entries may share a kind
/// with different hyperparameters (e.g. "ar3" and "ar6").
enum class ModelKind { naive, seasonal_naive, drift, ses, holt, holt_winters, ar, knn_lag, ridge_lag };

inline constexpr int kSeasonPeriod = 12;

inline std::string_view to_string(ModelFamily f) {
    return f == ModelFamily::classical ? "classical" : "machine_learning";
}

inline std::optional<ModelFamily> family_from_string(std::string_view s) {
    if (s == "classical") return ModelFamily::classical;
    if (s == "machine_learning") return ModelFamily::machine_learning;
    return std::nullopt;
}

inline std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::naive: return "naive";
        case ModelKind::seasonal_naive: return "snaive12";
        case ModelKind::drift: return "drift";
        case ModelKind::ses: return "ses";
        case ModelKind::holt: return "holt";
        case ModelKind::holt_winters: return "hw_add";
        case ModelKind::ar: return "ar";
        case ModelKind::knn_lag: return "knn_lag";
        case ModelKind::ridge_lag: return "ridge_lag";
    }
    return "naive";
}

inline std::optional<ModelKind> kind_from_string(std::string_view s) {
    for (auto k : {ModelKind::naive, ModelKind::seasonal_naive, ModelKind::drift, ModelKind::ses,
                   ModelKind::holt, ModelKind::holt_winters, ModelKind::ar, ModelKind::knn_lag,
                   ModelKind::ridge_lag})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline ModelFamily default_family(ModelKind k) {
    return (k == ModelKind::knn_lag || k == ModelKind::ridge_lag) ? ModelFamily::machine_learning
                                                                   : ModelFamily::classical;
}

struct ModelSpec {
    std::string model_id;
    ModelKind kind = ModelKind::naive;
    ModelFamily family = ModelFamily::classical;
    std::map<std::string, double> hyperparameters;
    int display_color_key = 0;

    double param(const std::string& name, double fallback) const {
        auto it = hyperparameters.find(name);
        return it == hyperparameters.end() ? fallback : it->second;
    }
    std::optional<double> fixed(const std::string& name) const {
        auto it = hyperparameters.find(name);
        if (it == hyperparameters.end()) return std::nullopt;
        return it->second;
    }
    bool seasonal() const {
        return kind == ModelKind::seasonal_naive || kind == ModelKind::holt_winters;
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline ModelSpec make_spec(std::string id, ModelKind kind, std::map<std::string, double> hp = {}) {
    return ModelSpec{std::move(id), kind, default_family(kind), std::move(hp), 0};
}

struct RegistryConfig {
    std::vector<ModelSpec> models;
    bool include_seasonal = true;
};

/// The shipped zoo, in display order.
inline RegistryConfig default_registry_config() {
    RegistryConfig cfg;
    cfg.models = {
        make_spec("naive", ModelKind::naive),
        make_spec("snaive12", ModelKind::seasonal_naive),
        make_spec("drift", ModelKind::drift),
        make_spec("ses", ModelKind::ses),
        make_spec("holt", ModelKind::holt),
        make_spec("hw_add", ModelKind::holt_winters),
        make_spec("ar", ModelKind::ar, {{"p", 6}}),
        make_spec("knn_lag", ModelKind::knn_lag, {{"lags", 12}, {"k", 3}}),
        make_spec("ridge_lag", ModelKind::ridge_lag, {{"lags", 12}, {"lambda", 1.0}}),
    };
    for (std::size_t i = 0; i < cfg.models.size(); ++i)
        cfg.models[i].display_color_key = static_cast<int>(i);
    return cfg;
}

namespace detail {

inline bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

inline void check_hyperparameters(const ModelSpec& spec) {
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::validation, "model '" + spec.model_id + "': " + what);
    };
    std::set<std::string> allowed;
    switch (spec.kind) {
        case ModelKind::naive:
        case ModelKind::seasonal_naive:
        case ModelKind::drift: break;
        case ModelKind::ses: allowed = {"alpha"}; break;
        case ModelKind::holt: allowed = {"alpha", "beta"}; break;
        case ModelKind::holt_winters: allowed = {"alpha", "beta", "gamma"}; break;
        case ModelKind::ar: allowed = {"p"}; break;
        case ModelKind::knn_lag: allowed = {"lags", "k"}; break;
        case ModelKind::ridge_lag: allowed = {"lags", "lambda"}; break;
    }
    for (const auto& [name, value] : spec.hyperparameters) {
        if (!allowed.contains(name)) fail("unknown hyperparameter '" + name + "'");
        if (!std::isfinite(value)) fail("hyperparameter '" + name + "' is not finite");
        if (name == "alpha" || name == "beta" || name == "gamma") {
            if (!(value > 0.0 && value <= 1.0)) fail(name + " must lie in (0, 1]");
        } else if (name == "p" || name == "lags") {
            if (!is_whole(value) || value < 1 || value > 36) fail(name + " must be an integer in [1, 36]");
        } else if (name == "k") {
            if (!is_whole(value) || value < 1 || value > 50) fail("k must be an integer in [1, 50]");
        } else if (name == "lambda") {
            if (!(value > 0.0)) fail("lambda must be positive");
        }
    }
}

}  // namespace detail

/// Validated, ordered model list. Seasonal kinds are dropped when the config
/// disables them.
inline std::vector<ModelSpec> list_models(const RegistryConfig& config) {
    std::vector<ModelSpec> out;
    std::set<std::string> seen;
    for (const auto& spec : config.models) {
        if (spec.model_id.empty()) throw Error(ErrorCode::validation, "empty model_id in registry");
        if (!seen.insert(spec.model_id).second)
            throw Error(ErrorCode::validation, "duplicate model_id '" + spec.model_id + "'");
        detail::check_hyperparameters(spec);
        if (!config.include_seasonal && spec.seasonal()) continue;
        out.push_back(spec);
    }
    return out;
}

inline std::vector<ModelSpec> default_models() { return list_models(default_registry_config()); }

/// Smallest history each model can be fitted on.
inline std::size_t min_history(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::naive: return 1;
        case ModelKind::drift:
        case ModelKind::ses:
        case ModelKind::holt: return 2;
        case ModelKind::seasonal_naive:
        case ModelKind::holt_winters: return 2 * kSeasonPeriod;
        case ModelKind::ar: {
            auto p = static_cast<std::size_t>(spec.param("p", 6));
            return 2 * p + 2;  // p + 2 usable lag windows
        }
        case ModelKind::knn_lag:
        case ModelKind::ridge_lag: {
            auto lags = static_cast<std::size_t>(spec.param("lags", 12));
            return 2 * lags + 2;
        }
    }
    return 1;
}

/// Fitted parameters. `state` layout depends on the kind:
///   naive        [last]
///   snaive12     [value one season back]
///   drift        [slope]
///   ses          [alpha, level]
///   holt         [alpha, beta, level, trend]
///   hw_add       [alpha, beta, gamma, level, trend, s_1..s_12 (upcoming order)]
///   ar           [intercept, phi_1..phi_p]
///   knn_lag      [k, lags]
///   ridge_lag    [intercept, w_1..w_lags]
/// With `naive_fallback` set, the regression could not be identified and the
/// model forecasts the last observation.
struct FittedModel {
    ModelSpec spec;
    std::string product_id;
    std::vector<double> state;
    bool naive_fallback = false;
    MonthIndex train_start;
    MonthIndex train_end;
    std::size_t train_length = 0;
};

struct ForecastResult {
    std::string product_id;
    MonthIndex target_month;
    std::string model_id;
    double value = 0.0;

    friend bool operator==(const ForecastResult&, const ForecastResult&) = default;
};

namespace detail {

/// Smoothing-parameter grid {0.05, 0.10, ..., 1.00}, as i/20.
inline std::vector<double> smoothing_grid(std::optional<double> fixed) {
    if (fixed) return {*fixed};
    std::vector<double> g;
    for (int i = 1; i <= 20; ++i) g.push_back(i / 20.0);
    return g;
}

struct SesRun {
    double level;
    double sse;
};

inline SesRun run_ses(std::span<const double> y, double alpha) {
    double level = y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        double e = y[t] - level;
        sse += e * e;
        level = alpha * y[t] + (1.0 - alpha) * level;
    }
    return {level, sse};
}

struct HoltRun {
    double level;
    double trend;
    double sse;
};

inline HoltRun run_holt(std::span<const double> y, double alpha, double beta) {
    double level = y[0];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        double e = y[t] - (level + trend);
        sse += e * e;
        double next = alpha * y[t] + (1.0 - alpha) * (level + trend);
        trend = beta * (next - level) + (1.0 - beta) * trend;
        level = next;
    }
    return {level, trend, sse};
}

struct HwRun {
    double level;
    double trend;
    std::array<double, kSeasonPeriod> season;  // ring indexed by t mod period
    double sse;
};

/// Additive Holt-Winters. Initial level/trend from the first two seasons,
/// initial seasonal effects from the first season's deviations.
inline HwRun run_holt_winters(std::span<const double> y, double alpha, double beta, double gamma) {
    constexpr std::size_t m = kSeasonPeriod;
    double first = 0.0, second = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        first += y[i];
        second += y[m + i];
    }
    first /= m;
    second /= m;
    // The first-season mean sits mid-season; carry it to the season's last month.
    const double trend = (second - first) / m;
    const double mid = (m - 1) / 2.0;
    HwRun r{first + trend * mid, trend, {}, 0.0};
    for (std::size_t i = 0; i < m; ++i) r.season[i] = y[i] - (first + trend * (static_cast<double>(i) - mid));
    for (std::size_t t = m; t < y.size(); ++t) {
        double& s = r.season[t % m];
        double e = y[t] - (r.level + r.trend + s);
        r.sse += e * e;
        double next = alpha * (y[t] - s) + (1.0 - alpha) * (r.level + r.trend);
        r.trend = beta * (next - r.level) + (1.0 - beta) * r.trend;
        s = gamma * (y[t] - next) + (1.0 - gamma) * s;
        r.level = next;
    }
    return r;
}

inline bool is_constant(std::span<const double> y) {
    return std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
}

/// Design matrix of lag features: row r holds y[t-1..t-lags] for t = lags + r.
inline Eigen::MatrixXd lag_design(std::span<const double> y, std::size_t lags, bool intercept) {
    const auto rows = static_cast<Eigen::Index>(y.size() - lags);
    const auto offset = intercept ? 1 : 0;
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(lags) + offset);
    for (Eigen::Index r = 0; r < rows; ++r) {
        std::size_t t = lags + static_cast<std::size_t>(r);
        if (intercept) x(r, 0) = 1.0;
        for (std::size_t j = 1; j <= lags; ++j) x(r, static_cast<Eigen::Index>(j - 1) + offset) = y[t - j];
    }
    return x;
}

inline Eigen::VectorXd lag_target(std::span<const double> y, std::size_t lags) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(y.size() - lags));
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = y[lags + static_cast<std::size_t>(r)];
    return v;
}

inline double knn_predict(std::span<const double> y, std::size_t lags, std::size_t k) {
    const std::size_t n = y.size();
    std::vector<std::pair<double, std::size_t>> dist;  // (squared distance, successor index)
    dist.reserve(n - lags);
    for (std::size_t t = lags; t < n; ++t) {
        double d = 0.0;
        for (std::size_t j = 1; j <= lags; ++j) {
            double diff = y[t - j] - y[n - j];
            d += diff * diff;
        }
        dist.emplace_back(d, t);
    }
    k = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += y[dist[i].second];
    return sum / static_cast<double>(k);
}

inline double linear_lag_predict(std::span<const double> y, std::span<const double> coef) {
    // coef = [intercept, w_1..w_p]
    double v = coef[0];
    for (std::size_t j = 1; j < coef.size(); ++j) v += coef[j] * y[y.size() - j];
    return v;
}

inline double clamp_forecast(double v, const std::string& model_id) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::degenerate, "model '" + model_id + "' produced a non-finite forecast");
    return std::max(0.0, v);
}

}  // namespace detail

/// Fits `spec` on a history. Throws Error(insufficient_history) when the
/// history is below the model's minimum.
inline FittedModel fit(const ModelSpec& spec, const DemandSeries& history) {
    const std::size_t n = history.size();
    if (n < min_history(spec))
        throw Error(ErrorCode::insufficient_history,
                    "insufficient history: model '" + spec.model_id + "' needs " +
                        std::to_string(min_history(spec)) + " months, got " + std::to_string(n));

    FittedModel fm;
    fm.spec = spec;
    fm.product_id = history.product_id;
    fm.train_start = history.start;
    fm.train_end = history.end();
    fm.train_length = n;
    const auto y = history.view();

    switch (spec.kind) {
        case ModelKind::naive: fm.state = {y[n - 1]}; break;
        case ModelKind::seasonal_naive: fm.state = {y[n - kSeasonPeriod]}; break;
        case ModelKind::drift: fm.state = {(y[n - 1] - y[0]) / static_cast<double>(n - 1)}; break;
        case ModelKind::ses: {
            double best_a = 0.0;
            detail::SesRun best{0.0, std::numeric_limits<double>::infinity()};
            for (double a : detail::smoothing_grid(spec.fixed("alpha"))) {
                auto r = detail::run_ses(y, a);
                if (r.sse < best.sse) best = r, best_a = a;
            }
            fm.state = {best_a, best.level};
            break;
        }
        case ModelKind::holt: {
            double best_a = 0.0, best_b = 0.0;
            detail::HoltRun best{0.0, 0.0, std::numeric_limits<double>::infinity()};
            const auto betas = detail::smoothing_grid(spec.fixed("beta"));
            for (double a : detail::smoothing_grid(spec.fixed("alpha")))
                for (double b : betas) {
                    auto r = detail::run_holt(y, a, b);
                    if (r.sse < best.sse) best = r, best_a = a, best_b = b;
                }
            fm.state = {best_a, best_b, best.level, best.trend};
            break;
        }
        case ModelKind::holt_winters: {
            double best_a = 0.0, best_b = 0.0, best_g = 0.0;
            double best_sse = std::numeric_limits<double>::infinity();
            detail::HwRun best{};
            const auto betas = detail::smoothing_grid(spec.fixed("beta"));
            const auto gammas = detail::smoothing_grid(spec.fixed("gamma"));
            for (double a : detail::smoothing_grid(spec.fixed("alpha")))
                for (double b : betas)
                    for (double g : gammas) {
                        auto r = detail::run_holt_winters(y, a, b, g);
                        if (r.sse < best_sse) best_sse = r.sse, best = r, best_a = a, best_b = b, best_g = g;
                    }
            fm.state = {best_a, best_b, best_g, best.level, best.trend};
            for (std::size_t i = 0; i < kSeasonPeriod; ++i) fm.state.push_back(best.season[(n + i) % kSeasonPeriod]);
            break;
        }
        case ModelKind::ar: {
            const auto p = static_cast<std::size_t>(spec.param("p", 6));
            if (detail::is_constant(y)) {
                fm.naive_fallback = true;
                break;
            }
            Eigen::MatrixXd x = detail::lag_design(y, p, true);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
            if (qr.rank() < x.cols()) {
                fm.naive_fallback = true;
                break;
            }
            Eigen::VectorXd coef = qr.solve(detail::lag_target(y, p));
            fm.state.assign(coef.data(), coef.data() + coef.size());
            break;
        }
        case ModelKind::knn_lag:
            fm.state = {spec.param("k", 3), spec.param("lags", 12)};
            break;
        case ModelKind::ridge_lag: {
            const auto lags = static_cast<std::size_t>(spec.param("lags", 12));
            const double lambda = spec.param("lambda", 1.0);
            if (detail::is_constant(y)) {
                fm.naive_fallback = true;
                break;
            }
            Eigen::MatrixXd x = detail::lag_design(y, lags, false);
            Eigen::VectorXd target = detail::lag_target(y, lags);
            Eigen::RowVectorXd mean_x = x.colwise().mean();
            double mean_y = target.mean();
            x.rowwise() -= mean_x;
            target.array() -= mean_y;
            Eigen::MatrixXd gram = x.transpose() * x;
            gram.diagonal().array() += lambda;
            Eigen::VectorXd w = gram.ldlt().solve(x.transpose() * target);
            fm.state.push_back(mean_y - mean_x.dot(w));
            fm.state.insert(fm.state.end(), w.data(), w.data() + w.size());
            break;
        }
    }
    for (double v : fm.state)
        if (!std::isfinite(v)) fm.naive_fallback = true;
    if (fm.naive_fallback) fm.state = {y[n - 1]};
    return fm;
}

/// One-step-ahead forecast for the month after `history` ends. `history` must
/// be the fitted series or an extension of it; filters are replayed over it
/// with the fitted parameters.
inline ForecastResult forecast_one(const FittedModel& model, const DemandSeries& history) {
    if (!model.product_id.empty() && history.product_id != model.product_id)
        throw Error(ErrorCode::validation, "history belongs to '" + history.product_id +
                                               "', model was fitted on '" + model.product_id + "'");
    if (history.size() < model.train_length || history.start != model.train_start)
        throw Error(ErrorCode::validation, "history is shorter than the fitting span");

    const auto y = history.view();
    const std::size_t n = y.size();
    const auto& s = model.state;
    double v = 0.0;
    if (model.naive_fallback) {
        v = y[n - 1];
    } else {
        switch (model.spec.kind) {
            case ModelKind::naive: v = y[n - 1]; break;
            case ModelKind::seasonal_naive: v = y[n - kSeasonPeriod]; break;
            case ModelKind::drift: v = y[n - 1] + (y[n - 1] - y[0]) / static_cast<double>(n - 1); break;
            case ModelKind::ses: v = detail::run_ses(y, s[0]).level; break;
            case ModelKind::holt: {
                auto r = detail::run_holt(y, s[0], s[1]);
                v = r.level + r.trend;
                break;
            }
            case ModelKind::holt_winters: {
                auto r = detail::run_holt_winters(y, s[0], s[1], s[2]);
                v = r.level + r.trend + r.season[n % kSeasonPeriod];
                break;
            }
            case ModelKind::ar:
            case ModelKind::ridge_lag: v = detail::linear_lag_predict(y, s); break;
            case ModelKind::knn_lag:
                v = detail::knn_predict(y, static_cast<std::size_t>(s[1]), static_cast<std::size_t>(s[0]));
                break;
        }
    }
    return {history.product_id, history.end().next(), model.spec.model_id,
            detail::clamp_forecast(v, model.spec.model_id)};
}

}  // namespace fcsel
