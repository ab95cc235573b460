#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/models.hpp"
#include "fcsel/month.hpp"

namespace fcsel {

struct BacktestConfig {
    /// Month to forecast. Unset means the month after the dataset ends.
    std::optional<MonthIndex> target_month;
    int window_w = 10;
    int top_k = 5;
    double abnormal_multiplier = 3.0;
    double accuracy_floor_epsilon = 1.0;
};

inline void check_config(const BacktestConfig& cfg, std::size_t model_count) {
    if (cfg.window_w < 1) throw Error(ErrorCode::validation, "window_w must be >= 1");
    if (cfg.top_k < 1 || static_cast<std::size_t>(cfg.top_k) > model_count)
        throw Error(ErrorCode::validation,
                    "top_k must lie in [1, " + std::to_string(model_count) + "]");
    if (!(cfg.abnormal_multiplier > 0.0) || !std::isfinite(cfg.abnormal_multiplier))
        throw Error(ErrorCode::validation, "abnormal_multiplier must be positive");
    if (!(cfg.accuracy_floor_epsilon > 0.0) || !std::isfinite(cfg.accuracy_floor_epsilon))
        throw Error(ErrorCode::validation, "accuracy_floor_epsilon must be positive");
}

struct BacktestRecord {
    std::string product_id;
    std::string model_id;
    MonthIndex month;
    double forecast = 0.0;
    double actual = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const BacktestRecord&, const BacktestRecord&) = default;
};

struct BacktestResult {
    MonthIndex target_month;
    int window_w = 0;
    std::vector<std::string> model_ids;  // registry order
    std::vector<BacktestRecord> records;  // product, registry model, month order
    std::vector<ForecastResult> target_forecasts;
};

struct IndicatorSummary {
    std::string model_id;
    double mean_accuracy = 0.0;
    double accuracy_variance = 0.0;
    int applicability_count = 0;
    int product_count = 0;

    friend bool operator==(const IndicatorSummary&, const IndicatorSummary&) = default;
};

struct RankingWeights {
    double accuracy = 1.0;
    double variance = 1.0;
    double applicability = 1.0;

    /// Weights rescaled to sum 1. Throws on negative, non-finite or all-zero input.
    RankingWeights normalized() const {
        for (double w : {accuracy, variance, applicability})
            if (!(w >= 0.0) || !std::isfinite(w))
                throw Error(ErrorCode::validation, "ranking weights must be finite and >= 0");
        double sum = accuracy + variance + applicability;
        if (!(sum > 0.0)) throw Error(ErrorCode::validation, "at least one ranking weight must be > 0");
        return {accuracy / sum, variance / sum, applicability / sum};
    }
};

struct RankedModel {
    std::string model_id;
    double score = 0.0;
    int rank = 0;
    bool in_top_k = false;
    IndicatorSummary summary;
};

/// 1 - relative absolute error, floored at 0; `epsilon` guards zero actuals.
inline double accuracy(double forecast, double actual, double epsilon = 1.0) {
    double acc = 1.0 - std::abs(forecast - actual) / std::max(actual, epsilon);
    return std::max(0.0, acc);
}

inline MonthIndex resolve_target(const Dataset& dataset, const BacktestConfig& cfg) {
    if (dataset.empty()) throw Error(ErrorCode::unprocessable, "dataset has no series");
    MonthIndex target = cfg.target_month.value_or(dataset.global_end->next());
    if (target <= *dataset.global_start)
        throw Error(ErrorCode::validation, "target_month " + target.to_string() + " precedes any usable history");
    if (target > dataset.global_end->next())
        throw Error(ErrorCode::validation, "target_month " + target.to_string() + " is beyond the month after the dataset ends");
    return target;
}

namespace detail {

struct ProductBacktest {
    std::vector<BacktestRecord> records;
    std::vector<ForecastResult> forecasts;
};

inline ProductBacktest backtest_product(const DemandSeries& series, std::span<const ModelSpec> specs,
                                        MonthIndex target, int window_w, double epsilon) {
    ProductBacktest out;
    auto attempt = [&](const ModelSpec& spec, MonthIndex m) -> std::optional<ForecastResult> {
        if (m <= series.start) return std::nullopt;
        auto history = slice_history(series, m);
        if (history.size() < min_history(spec)) return std::nullopt;
        auto fitted = fit(spec, history);
        auto f = forecast_one(fitted, history);
        if (f.target_month != m) return std::nullopt;  // history ended before m
        return f;
    };
    for (const auto& spec : specs) {
        for (int back = window_w; back >= 1; --back) {
            MonthIndex m = target.plus(-back);
            auto actual = series.at(m);
            if (!actual) continue;
            if (auto f = attempt(spec, m))
                out.records.push_back({series.product_id, spec.model_id, m, f->value, *actual,
                                       accuracy(f->value, *actual, epsilon)});
        }
        if (auto f = attempt(spec, target)) out.forecasts.push_back(*f);
    }
    return out;
}

}  // namespace detail

/// Rolling-origin backtest. For each product, model and month m in the
/// window_w months before the target: fit on the history before m, forecast
/// m, score against the actual. Also forecasts the target month itself.
/// Models whose preconditions fail on a (product, month) produce nothing.
/// Products are processed on `threads` workers (0 = hardware concurrency);
/// output order is fixed regardless.
inline BacktestResult run_backtest(const Dataset& dataset, std::span<const ModelSpec> specs,
                                   const BacktestConfig& cfg, unsigned threads = 0) {
    if (specs.empty()) throw Error(ErrorCode::validation, "empty model list");
    check_config(cfg, specs.size());
    BacktestResult result;
    result.target_month = resolve_target(dataset, cfg);
    result.window_w = cfg.window_w;
    for (const auto& s : specs) result.model_ids.push_back(s.model_id);

    std::vector<const DemandSeries*> series;
    for (const auto& [id, s] : dataset.series) series.push_back(&s);
    std::vector<detail::ProductBacktest> per_product(series.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, series.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < series.size(); i = next++)
            per_product[i] = detail::backtest_product(*series[i], specs, result.target_month, cfg.window_w,
                                                      cfg.accuracy_floor_epsilon);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (auto& p : per_product) {
        result.records.insert(result.records.end(), std::make_move_iterator(p.records.begin()),
                              std::make_move_iterator(p.records.end()));
        result.target_forecasts.insert(result.target_forecasts.end(), std::make_move_iterator(p.forecasts.begin()),
                                       std::make_move_iterator(p.forecasts.end()));
    }
    return result;
}

/// Per-model indicators over a product subset.
///
/// mean_accuracy pools every record of the model; accuracy_variance is the
/// population variance of the model's per-month mean accuracy (months where it
/// has records); applicability_count counts products where the model is among
/// the top_k by per-product mean accuracy (ties by model_id, so exactly
/// min(top_k, models with records) are credited per product). Models with no
/// records in the subset are omitted. Output is sorted by model_id.
/// `target_forecasts` is accepted for interface symmetry with the record set;
/// forecasts without actuals do not influence any indicator.
inline std::vector<IndicatorSummary> compute_indicators(std::span<const BacktestRecord> records,
                                                        std::span<const ForecastResult> target_forecasts,
                                                        std::span<const std::string> product_subset,
                                                        const BacktestConfig& cfg) {
    (void)target_forecasts;
    if (product_subset.empty()) throw Error(ErrorCode::validation, "empty selection");
    if (cfg.top_k < 1) throw Error(ErrorCode::validation, "top_k must be >= 1");
    std::unordered_set<std::string> subset(product_subset.begin(), product_subset.end());

    std::vector<const BacktestRecord*> selected;
    for (const auto& r : records)
        if (subset.contains(r.product_id)) selected.push_back(&r);
    std::sort(selected.begin(), selected.end(), [](const BacktestRecord* a, const BacktestRecord* b) {
        return std::tie(a->model_id, a->product_id, a->month) < std::tie(b->model_id, b->product_id, b->month);
    });

    // Neumaier-compensated sum, so constant input averages back to itself.
    struct Acc {
        double sum = 0.0;
        double comp = 0.0;
        int count = 0;

        void add(double x) {
            const double t = sum + x;
            comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
            sum = t;
            ++count;
        }
        double mean() const { return (sum + comp) / count; }
    };
    struct ModelAcc {
        Acc pooled;
        std::map<MonthIndex, Acc> by_month;
        std::map<std::string, Acc> by_product;
    };
    std::map<std::string, ModelAcc> models;
    for (const auto* r : selected) {
        auto& m = models[r->model_id];
        m.pooled.add(r->accuracy);
        m.by_month[r->month].add(r->accuracy);
        m.by_product[r->product_id].add(r->accuracy);
    }

    // product -> [(mean accuracy, model_id)]
    std::map<std::string, std::vector<std::pair<double, std::string>>> per_product;
    for (const auto& [mid, m] : models)
        for (const auto& [pid, a] : m.by_product) per_product[pid].emplace_back(a.mean(), mid);
    std::map<std::string, int> credits;
    for (auto& [pid, list] : per_product) {
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k), list.size());
        for (std::size_t i = 0; i < k; ++i) ++credits[list[i].second];
    }

    std::vector<IndicatorSummary> out;
    for (const auto& [mid, m] : models) {
        IndicatorSummary s;
        s.model_id = mid;
        s.mean_accuracy = m.pooled.mean();
        Acc monthly;
        for (const auto& [month, a] : m.by_month) monthly.add(a.mean());
        double var = 0.0;
        for (const auto& [month, a] : m.by_month) {
            double d = a.mean() - monthly.mean();
            var += d * d;
        }
        s.accuracy_variance = var / static_cast<double>(m.by_month.size());
        s.applicability_count = credits[mid];
        s.product_count = static_cast<int>(m.by_product.size());
        out.push_back(std::move(s));
    }
    return out;
}

/// Weighted ranking over min-max normalized indicators. A constant indicator
/// column normalizes to 0.5 for every model. Lower variance scores higher.
/// Order: score desc, then mean_accuracy desc, then model_id asc.
inline std::vector<RankedModel> rank_models(std::span<const IndicatorSummary> summaries,
                                            const RankingWeights& weights, int top_k) {
    if (summaries.empty()) throw Error(ErrorCode::validation, "no models to rank");
    const RankingWeights w = weights.normalized();

    auto normalizer = [&](auto field) {
        double lo = field(summaries[0]), hi = lo;
        for (const auto& s : summaries) {
            lo = std::min(lo, field(s));
            hi = std::max(hi, field(s));
        }
        return [lo, hi, field](const IndicatorSummary& s) {
            return hi > lo ? (field(s) - lo) / (hi - lo) : 0.5;
        };
    };
    auto n_acc = normalizer([](const IndicatorSummary& s) { return s.mean_accuracy; });
    auto n_var = normalizer([](const IndicatorSummary& s) { return s.accuracy_variance; });
    auto n_app = normalizer([](const IndicatorSummary& s) { return static_cast<double>(s.applicability_count); });

    std::vector<RankedModel> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) {
        double score = w.accuracy * n_acc(s) + w.variance * (1.0 - n_var(s)) + w.applicability * n_app(s);
        out.push_back({s.model_id, std::clamp(score, 0.0, 1.0), 0, false, s});
    }
    std::sort(out.begin(), out.end(), [](const RankedModel& a, const RankedModel& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.summary.mean_accuracy != b.summary.mean_accuracy)
            return a.summary.mean_accuracy > b.summary.mean_accuracy;
        return a.model_id < b.model_id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = static_cast<int>(i) + 1;
        out[i].in_top_k = out[i].rank <= top_k;
    }
    return out;
}

/// True iff the forecast exceeds `multiplier` times the historical maximum.
/// An all-zero history gives threshold 0, so any positive forecast flags.
inline bool flag_abnormal(const ForecastResult& forecast, const DemandSeries& history, double multiplier) {
    if (history.empty()) throw Error(ErrorCode::insufficient_history, "empty history");
    double peak = *std::max_element(history.values.begin(), history.values.end());
    return forecast.value > multiplier * peak;
}

}  // namespace fcsel
