#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fcsel/backtest.hpp"
#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/json_io.hpp"
#include "fcsel/models.hpp"
#include "fcsel/properties.hpp"
#include "fcsel/similarity.hpp"

namespace fcsel::service {

/// Bins of the accuracy histogram sent for the density margin of product glyphs.
inline constexpr int kAccuracyHistogramBins = 16;

struct SessionConfig {
    BacktestConfig backtest;
    RegistryConfig registry = default_registry_config();
    RankingWeights weights;
    unsigned threads = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Backtest fields at top level, plus optional "weights" ({w_accuracy, ...}),
/// "registry" (inline registry document) or "registry_path".
inline SessionConfig session_config_from_json(const json& j) {
    SessionConfig cfg;
    if (j.is_null()) return cfg;
    cfg.backtest = backtest_config_from_json(j);
    if (j.contains("weights")) cfg.weights = weights_from_json(j["weights"]);
    if (j.contains("registry")) {
        cfg.registry = registry_from_json(j["registry"]);
    } else if (j.contains("registry_path")) {
        auto path = detail::get_as<std::string>(j, "registry_path");
        try {
            cfg.registry = registry_from_json(json::parse(read_file(path)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::validation, "registry '" + path + "': " + e.what());
        }
    }
    if (j.contains("threads")) cfg.threads = detail::get_as<unsigned>(j, "threads");
    return cfg;
}

inline json session_config_to_json(const SessionConfig& cfg) {
    json j = cfg.backtest;
    j["weights"] = cfg.weights;
    j["registry"] = registry_to_json(cfg.registry);
    return j;
}

struct ProductModelStats {
    double mean_accuracy = 0.0;
    double accuracy_variance = 0.0;  // population, across the product's window months
    int months = 0;
};

/// Everything derived from the dataset at session creation. Immutable.
struct SessionAnalytics {
    Dataset dataset;
    ValidationReport report;
    std::vector<ModelSpec> models;
    BacktestResult backtest;
    SimilarityUniverse universe;
    std::vector<ProjectionPoint> projection;
    std::map<std::string, SeriesProperties> properties;
    std::map<std::string, std::vector<std::size_t>> records_by_product;  // indices into backtest.records
    std::map<std::string, std::map<std::string, ForecastResult>> target_by_product;
    std::map<std::string, std::map<std::string, ProductModelStats>> stats_by_product;

    std::vector<MonthIndex> window_months() const {
        std::vector<MonthIndex> out;
        for (int back = backtest.window_w; back >= 1; --back) out.push_back(backtest.target_month.plus(-back));
        return out;
    }

    PointRole role_of(const DemandSeries& s) const {
        return s.end() >= backtest.target_month.prev() ? PointRole::to_forecast : PointRole::forecasted_before;
    }

    const ModelSpec* spec(const std::string& model_id) const {
        for (const auto& m : models)
            if (m.model_id == model_id) return &m;
        return nullptr;
    }
};

inline std::shared_ptr<const SessionAnalytics> build_analytics(Dataset dataset, ValidationReport report,
                                                               const SessionConfig& cfg) {
    auto a = std::make_shared<SessionAnalytics>();
    a->dataset = std::move(dataset);
    a->report = std::move(report);
    if (a->dataset.empty()) throw Error(ErrorCode::unprocessable, "dataset has zero valid products");
    a->models = list_models(cfg.registry);
    a->backtest = run_backtest(a->dataset, a->models, cfg.backtest, cfg.threads);

    for (std::size_t i = 0; i < a->backtest.records.size(); ++i)
        a->records_by_product[a->backtest.records[i].product_id].push_back(i);
    for (const auto& f : a->backtest.target_forecasts) a->target_by_product[f.product_id][f.model_id] = f;
    for (const auto& [pid, idx] : a->records_by_product) {
        std::map<std::string, std::vector<double>> accs;
        for (auto i : idx) accs[a->backtest.records[i].model_id].push_back(a->backtest.records[i].accuracy);
        for (const auto& [mid, v] : accs) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            a->stats_by_product[pid][mid] = {mean, var / static_cast<double>(v.size()), static_cast<int>(v.size())};
        }
    }

    std::vector<NormalizedSeries> normalized;
    for (const auto& [id, s] : a->dataset.series) normalized.push_back(z_normalize(s));
    a->universe = build_universe(std::move(normalized));
    if (a->universe.members.size() >= 2) {
        a->projection = mds_project(distance_matrix(a->universe.members));
    } else {
        for (const auto& m : a->universe.members) a->projection.push_back({m.product_id, 0.0, 0.0, {}});
    }
    for (auto& p : a->projection) p.role = a->role_of(a->dataset.at(p.product_id));

    for (const auto& [id, s] : a->dataset.series) a->properties.emplace(id, extract_properties(s));
    return a;
}

/// One analyst's working state over a dataset. Reads take a shared lock;
/// mutations take the exclusive lock and are applied one at a time in arrival
/// order, each appended to a replayable log.
class Session {
public:
    Session(std::string id, SessionConfig cfg, std::shared_ptr<const SessionAnalytics> analytics)
        : id_(std::move(id)), cfg_(std::move(cfg)), a_(std::move(analytics)) {
        weights_ = cfg_.weights;
        top_k_ = cfg_.backtest.top_k;
        cluster_ = a_->dataset.ids();
        recompute();
    }

    const std::string& id() const { return id_; }
    const SessionAnalytics& analytics() const { return *a_; }

    json summary() const {
        std::shared_lock lock(mu_);
        return json{{"session_id", id_},
                    {"product_count", a_->dataset.size()},
                    {"target_month", a_->backtest.target_month.to_string()},
                    {"window_w", a_->backtest.window_w},
                    {"top_k", top_k_},
                    {"record_count", a_->backtest.records.size()},
                    {"validation", a_->report}};
    }

    json projection() const {
        return json{{"points", a_->projection}, {"excluded_pairs", a_->universe.excluded}};
    }

    json models() const {
        std::shared_lock lock(mu_);
        return json{{"models", a_->models},
                    {"weights", weights_},
                    {"top_k", top_k_},
                    {"cluster_size", cluster_.size()},
                    {"ranking", ranking_}};
    }

    std::vector<RankedModel> ranking() const {
        std::shared_lock lock(mu_);
        return ranking_;
    }

    std::vector<IndicatorSummary> indicators() const {
        std::shared_lock lock(mu_);
        return indicators_;
    }

    json set_cluster(std::vector<std::string> ids) {
        std::unique_lock lock(mu_);
        if (ids.empty()) throw Error(ErrorCode::validation, "empty selection");
        std::vector<std::string> unknown;
        for (const auto& id : ids)
            if (!a_->dataset.contains(id)) unknown.push_back(id);
        if (!unknown.empty()) throw Error(ErrorCode::validation, "unknown product ids in cluster", std::move(unknown));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        cluster_ = std::move(ids);
        recompute();
        log_.push_back(json{{"op", "set_cluster"}, {"product_ids", cluster_}});
        return panel_locked();
    }

    json panel() const {
        std::shared_lock lock(mu_);
        return panel_locked();
    }

    json set_weights(const RankingWeights& w, std::optional<int> top_k) {
        std::unique_lock lock(mu_);
        w.normalized();
        if (top_k && (*top_k < 1 || static_cast<std::size_t>(*top_k) > a_->models.size()))
            throw Error(ErrorCode::validation, "top_k must lie in [1, " + std::to_string(a_->models.size()) + "]");
        weights_ = w;
        if (top_k && *top_k != top_k_) {
            top_k_ = *top_k;
            recompute();
        } else {
            ranking_ = rank_models(indicators_, weights_, top_k_);
        }
        json entry{{"op", "set_weights"}, {"weights", weights_}, {"top_k", top_k_}};
        log_.push_back(entry);
        return json{{"weights", weights_}, {"top_k", top_k_}, {"ranking", ranking_}};
    }

    json product_detail(const std::string& pid) const {
        std::shared_lock lock(mu_);
        const auto& series = a_->dataset.at(pid);
        auto months = a_->window_months();
        json month_axis = json::array();
        json actual = json::array();
        for (const auto& m : months) {
            month_axis.push_back(m.to_string());
            actual.push_back(detail::optional_to_json(series.at(m)));
        }
        month_axis.push_back(a_->backtest.target_month.to_string());
        actual.push_back(nullptr);

        std::map<std::pair<std::string, MonthIndex>, const BacktestRecord*> by_key;
        if (auto it = a_->records_by_product.find(pid); it != a_->records_by_product.end())
            for (auto i : it->second) {
                const auto& r = a_->backtest.records[i];
                by_key[{r.model_id, r.month}] = &r;
            }

        json models = json::array();
        for (const auto& rm : ranking_) {
            if (!rm.in_top_k) continue;
            json acc = json::array(), fc = json::array();
            for (const auto& m : months) {
                auto it = by_key.find({rm.model_id, m});
                acc.push_back(it == by_key.end() ? json(nullptr) : json(it->second->accuracy));
                fc.push_back(it == by_key.end() ? json(nullptr) : json(it->second->forecast));
            }
            auto tf = target_forecast(pid, rm.model_id);
            fc.push_back(tf ? json(tf->value) : json(nullptr));
            models.push_back(json{{"model_id", rm.model_id},
                                  {"rank", rm.rank},
                                  {"display_color_key", color_key(rm.model_id)},
                                  {"accuracy", std::move(acc)},
                                  {"forecast", std::move(fc)}});
        }
        return json{{"product_id", pid},
                    {"product_type", series.product_type},
                    {"role", to_string(a_->role_of(series))},
                    {"months", std::move(month_axis)},
                    {"actual", std::move(actual)},
                    {"history", series},
                    {"models", std::move(models)}};
    }

    json risk_view(const std::string& pid, std::size_t n) const {
        std::shared_lock lock(mu_);
        return risk_locked(pid, n, json::array());
    }

    json remove_similar(const std::string& focus, const std::string& removed, std::size_t n) {
        std::unique_lock lock(mu_);
        a_->dataset.at(focus);
        if (removed == focus) throw Error(ErrorCode::validation, "cannot remove the focus product from its own similar list");
        json warnings = json::array();
        auto current = similar_ids(focus, n);
        if (std::find(current.begin(), current.end(), removed) == current.end()) {
            warnings.push_back("product '" + removed + "' is not in the similar list of '" + focus + "'; nothing removed");
        } else {
            removed_[focus].insert(removed);
            log_.push_back(json{{"op", "remove_similar"}, {"focus", focus}, {"removed", removed}, {"n", n}});
        }
        return risk_locked(focus, n, std::move(warnings));
    }

    /// Dataset, config and mutation log; replaying it reproduces this session.
    json snapshot() const {
        std::shared_lock lock(mu_);
        return json{{"version", 1},
                    {"dataset", a_->dataset},
                    {"config", session_config_to_json(cfg_)},
                    {"mutations", log_}};
    }

    /// Re-applies one logged mutation.
    void replay(const json& m) {
        const auto op = detail::get_as<std::string>(m, "op");
        if (op == "set_cluster") {
            set_cluster(detail::get_as<std::vector<std::string>>(m, "product_ids"));
        } else if (op == "set_weights") {
            set_weights(weights_from_json(detail::require(m, "weights")), detail::get_as<int>(m, "top_k"));
        } else if (op == "remove_similar") {
            remove_similar(detail::get_as<std::string>(m, "focus"), detail::get_as<std::string>(m, "removed"),
                           detail::get_as<std::size_t>(m, "n"));
        } else {
            throw Error(ErrorCode::validation, "unknown mutation '" + op + "'");
        }
    }

private:
    void recompute() {
        indicators_ = compute_indicators(a_->backtest.records, a_->backtest.target_forecasts, cluster_,
                                         with_top_k(cfg_.backtest, top_k_));
        if (indicators_.empty()) {
            ranking_.clear();
            return;
        }
        ranking_ = rank_models(indicators_, weights_, top_k_);
    }

    static BacktestConfig with_top_k(BacktestConfig c, int k) {
        c.top_k = k;
        return c;
    }

    int color_key(const std::string& mid) const {
        const auto* s = a_->spec(mid);
        return s ? s->display_color_key : -1;
    }

    std::optional<ForecastResult> target_forecast(const std::string& pid, const std::string& mid) const {
        auto it = a_->target_by_product.find(pid);
        if (it == a_->target_by_product.end()) return std::nullopt;
        auto jt = it->second.find(mid);
        if (jt == it->second.end()) return std::nullopt;
        return jt->second;
    }

    const ProductModelStats* stats(const std::string& pid, const std::string& mid) const {
        auto it = a_->stats_by_product.find(pid);
        if (it == a_->stats_by_product.end()) return nullptr;
        auto jt = it->second.find(mid);
        return jt == it->second.end() ? nullptr : &jt->second;
    }

    json per_model_locked(const std::string& pid) const {
        json out = json::array();
        for (const auto& rm : ranking_) {
            if (!rm.in_top_k) continue;
            const auto* s = stats(pid, rm.model_id);
            out.push_back(json{{"model_id", rm.model_id},
                               {"mean_accuracy", s ? json(s->mean_accuracy) : json(nullptr)},
                               {"accuracy_variance", s ? json(s->accuracy_variance) : json(nullptr)}});
        }
        return out;
    }

    json panel_locked() const {
        json products = json::array();
        for (const auto& pid : cluster_) {
            const auto& series = a_->dataset.at(pid);
            std::optional<DemandSeries> history;
            if (a_->backtest.target_month > series.start) history = slice_history(series, a_->backtest.target_month);
            json top = json::array();
            for (const auto& rm : ranking_) {
                if (!rm.in_top_k) continue;
                auto f = target_forecast(pid, rm.model_id);
                const auto* s = stats(pid, rm.model_id);
                bool abnormal = f && history && flag_abnormal(*f, *history, cfg_.backtest.abnormal_multiplier);
                top.push_back(json{{"model_id", rm.model_id},
                                   {"rank", rm.rank},
                                   {"display_color_key", color_key(rm.model_id)},
                                   {"forecast", f ? json(f->value) : json(nullptr)},
                                   {"abnormal", abnormal},
                                   {"mean_accuracy", s ? json(s->mean_accuracy) : json(nullptr)},
                                   {"accuracy_variance", s ? json(s->accuracy_variance) : json(nullptr)}});
            }
            json others = json::array();
            std::vector<int> hist(kAccuracyHistogramBins, 0);
            for (const auto& rm : ranking_) {
                if (rm.in_top_k) continue;
                const auto* s = stats(pid, rm.model_id);
                if (!s) continue;
                others.push_back(json{{"model_id", rm.model_id}, {"mean_accuracy", s->mean_accuracy}});
                int bin = std::min(kAccuracyHistogramBins - 1,
                                   static_cast<int>(s->mean_accuracy * kAccuracyHistogramBins));
                ++hist[static_cast<std::size_t>(std::max(bin, 0))];
            }
            products.push_back(json{{"product_id", pid},
                                    {"role", to_string(a_->role_of(series))},
                                    {"top_models", std::move(top)},
                                    {"other_models", std::move(others)},
                                    {"other_accuracy_histogram", std::move(hist)}});
        }
        return json{{"cluster", cluster_},
                    {"top_k", top_k_},
                    {"weights", weights_},
                    {"ranking", ranking_},
                    {"products", std::move(products)}};
    }

    const NormalizedSeries* normalized(const std::string& pid) const {
        for (const auto& m : a_->universe.members)
            if (m.product_id == pid) return &m;
        return nullptr;
    }

    std::vector<std::pair<std::string, double>> similar_locked(const std::string& focus, std::size_t n) const {
        if (!normalized(focus))
            throw Error(ErrorCode::unprocessable,
                        "product '" + focus + "' has fewer than " + std::to_string(kMinOverlapMonths) +
                            " months and is outside the similarity universe");
        const auto rit = removed_.find(focus);
        const std::set<std::string> none;
        const auto& removed = rit == removed_.end() ? none : rit->second;
        auto all = nearest_similar(focus, a_->universe.members, a_->universe.members.size());
        std::vector<std::pair<std::string, double>> out;
        for (auto& [id, d] : all) {
            if (out.size() == n) break;
            if (!removed.contains(id)) out.emplace_back(id, d);
        }
        return out;
    }

    std::vector<std::string> similar_ids(const std::string& focus, std::size_t n) const {
        std::vector<std::string> ids;
        for (auto& [id, d] : similar_locked(focus, n)) ids.push_back(id);
        return ids;
    }

    json risk_locked(const std::string& pid, std::size_t n, json warnings) const {
        a_->dataset.at(pid);
        if (n < 1) throw Error(ErrorCode::validation, "n must be >= 1");
        json rows = json::array();
        for (const auto& [id, d] : similar_locked(pid, n))
            rows.push_back(json{{"product_id", id},
                                {"distance_to_focus", d},
                                {"properties", a_->properties.at(id)},
                                {"per_model", per_model_locked(id)}});
        json removed = json::array();
        if (auto it = removed_.find(pid); it != removed_.end())
            for (const auto& r : it->second) removed.push_back(r);
        json top = json::array();
        for (const auto& rm : ranking_)
            if (rm.in_top_k) top.push_back(rm.model_id);
        return json{{"focus",
                     json{{"product_id", pid},
                          {"properties", a_->properties.at(pid)},
                          {"per_model", per_model_locked(pid)}}},
                    {"n", n},
                    {"top_models", std::move(top)},
                    {"rows", std::move(rows)},
                    {"removed", std::move(removed)},
                    {"warnings", std::move(warnings)}};
    }

    std::string id_;
    SessionConfig cfg_;
    std::shared_ptr<const SessionAnalytics> a_;

    mutable std::shared_mutex mu_;
    RankingWeights weights_;
    int top_k_ = 5;
    std::vector<std::string> cluster_;
    std::map<std::string, std::set<std::string>> removed_;
    std::vector<IndicatorSummary> indicators_;
    std::vector<RankedModel> ranking_;
    std::vector<json> log_;
};

/// Owns the live sessions.
class SessionStore {
public:
    /// Parses, validates and analyses the dataset at `dataset_path`.
    std::shared_ptr<Session> create(const std::string& dataset_path, const SessionConfig& cfg) {
        auto parsed = parse_dataset(read_file(dataset_path));
        return create_from(std::move(parsed.dataset), std::move(parsed.report), cfg);
    }

    std::shared_ptr<Session> create_from(Dataset dataset, ValidationReport report, const SessionConfig& cfg) {
        if (dataset.empty()) throw Error(ErrorCode::unprocessable, "dataset has zero valid products");
        auto analytics = build_analytics(std::move(dataset), std::move(report), cfg);
        auto session = std::make_shared<Session>(next_id(), cfg, std::move(analytics));
        std::unique_lock lock(mu_);
        sessions_.emplace(session->id(), session);
        return session;
    }

    /// Rebuilds a session from snapshot() output.
    std::shared_ptr<Session> restore(const json& snap) {
        auto dataset = dataset_from_json(detail::require(snap, "dataset"));
        auto report = validate(dataset);
        if (!report.ok()) throw Error(ErrorCode::validation, "snapshot dataset fails validation");
        auto session = create_from(std::move(dataset), std::move(report),
                                   session_config_from_json(detail::require(snap, "config")));
        if (snap.contains("mutations"))
            for (const auto& m : snap["mutations"]) session->replay(m);
        return session;
    }

    std::shared_ptr<Session> get(const std::string& id) const {
        std::shared_lock lock(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + id + "'");
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return sessions_.size();
    }

private:
    std::string next_id() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(++counter_));
        return buf;
    }

    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::atomic<unsigned long long> counter_{0};
};

}  // namespace fcsel::service
