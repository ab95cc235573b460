#pragma once

// JSON forms of the public types. Months are "YYYY-MM" strings and absent
// values are explicit nulls.

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcsel/backtest.hpp"
#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/models.hpp"
#include "fcsel/month.hpp"
#include "fcsel/properties.hpp"
#include "fcsel/similarity.hpp"

namespace fcsel {

using json = nlohmann::json;

namespace detail {

inline MonthIndex month_from_json(const json& j, std::string_view field) {
    if (!j.is_string()) throw Error(ErrorCode::validation, std::string(field) + " must be a YYYY-MM string");
    auto m = MonthIndex::parse(j.get<std::string>());
    if (!m) throw Error(ErrorCode::validation, std::string(field) + " is not a valid YYYY-MM month");
    return *m;
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::validation, std::string("missing field '") + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace detail

inline void to_json(json& j, const MonthIndex& m) { j = m.to_string(); }

inline void to_json(json& j, const DemandSeries& s) {
    j = json{{"product_id", s.product_id},
             {"product_type", s.product_type},
             {"start", s.start.to_string()},
             {"values", s.values}};
}

inline void to_json(json& j, const Dataset& d) {
    json series = json::array();
    for (const auto& [id, s] : d.series) series.push_back(s);
    j = json{{"global_start", d.global_start ? json(d.global_start->to_string()) : json(nullptr)},
             {"global_end", d.global_end ? json(d.global_end->to_string()) : json(nullptr)},
             {"series", std::move(series)}};
}

/// Reads a canonical snapshot. Structural problems throw; value-level
/// invariants are left to validate().
inline Dataset dataset_from_json(const json& j) {
    Dataset d;
    const auto& series = detail::require(j, "series");
    if (!series.is_array()) throw Error(ErrorCode::validation, "'series' must be an array");
    for (const auto& s : series) {
        DemandSeries ds;
        ds.product_id = detail::get_as<std::string>(s, "product_id");
        ds.product_type = detail::get_as<std::string>(s, "product_type");
        ds.start = detail::month_from_json(detail::require(s, "start"), "start");
        ds.values = detail::get_as<std::vector<double>>(s, "values");
        if (d.contains(ds.product_id))
            throw Error(ErrorCode::validation, "duplicate product_id '" + ds.product_id + "' in snapshot");
        d.insert(std::move(ds));
    }
    if (j.contains("global_start") && !j["global_start"].is_null())
        d.global_start = std::min(*d.global_start, detail::month_from_json(j["global_start"], "global_start"));
    if (j.contains("global_end") && !j["global_end"].is_null())
        d.global_end = std::max(*d.global_end, detail::month_from_json(j["global_end"], "global_end"));
    return d;
}

inline void to_json(json& j, const RowError& e) {
    j = json{{"product_id", e.product_id},
             {"month", e.month ? json(e.month->to_string()) : json(nullptr)},
             {"line", e.line},
             {"reason", e.reason}};
}

inline void to_json(json& j, const Warning& w) { j = json{{"product_id", w.product_id}, {"reason", w.reason}}; }

inline void to_json(json& j, const ValidationReport& r) {
    j = json{{"errors", r.errors}, {"warnings", r.warnings}, {"accepted_count", r.accepted_count}};
}

inline void to_json(json& j, const ModelSpec& s) {
    j = json{{"model_id", s.model_id},
             {"kind", to_string(s.kind)},
             {"family", to_string(s.family)},
             {"hyperparameters", s.hyperparameters},
             {"display_color_key", s.display_color_key}};
}

/// `kind` defaults to `model_id`, `family` to the kind's natural family and
/// `display_color_key` to the entry's position.
inline ModelSpec model_spec_from_json(const json& j, int position = 0) {
    ModelSpec s;
    s.model_id = detail::get_as<std::string>(j, "model_id");
    std::string kind = j.contains("kind") ? detail::get_as<std::string>(j, "kind") : s.model_id;
    auto k = kind_from_string(kind);
    if (!k) throw Error(ErrorCode::validation, "model '" + s.model_id + "': unknown kind '" + kind + "'");
    s.kind = *k;
    s.family = default_family(s.kind);
    if (j.contains("family")) {
        auto f = family_from_string(detail::get_as<std::string>(j, "family"));
        if (!f) throw Error(ErrorCode::validation, "model '" + s.model_id + "': unknown family");
        s.family = *f;
    }
    if (j.contains("hyperparameters")) s.hyperparameters = detail::get_as<std::map<std::string, double>>(j, "hyperparameters");
    s.display_color_key = j.contains("display_color_key") ? detail::get_as<int>(j, "display_color_key") : position;
    return s;
}

/// Accepts {"version": 1, "include_seasonal": bool, "models": [...]} or a bare
/// array of model entries.
inline RegistryConfig registry_from_json(const json& j) {
    RegistryConfig cfg;
    const json* models = &j;
    if (j.is_object()) {
        if (j.contains("version") && j["version"] != 1)
            throw Error(ErrorCode::validation, "unsupported registry version");
        if (j.contains("include_seasonal")) cfg.include_seasonal = detail::get_as<bool>(j, "include_seasonal");
        models = &detail::require(j, "models");
    }
    if (!models->is_array()) throw Error(ErrorCode::validation, "registry 'models' must be an array");
    int pos = 0;
    for (const auto& m : *models) {
        if (m.contains("enabled") && !m["enabled"].get<bool>()) {
            ++pos;
            continue;
        }
        cfg.models.push_back(model_spec_from_json(m, pos++));
    }
    return cfg;
}

inline json registry_to_json(const RegistryConfig& cfg) {
    return json{{"version", 1}, {"include_seasonal", cfg.include_seasonal}, {"models", cfg.models}};
}

inline void to_json(json& j, const ForecastResult& f) {
    j = json{{"product_id", f.product_id},
             {"target_month", f.target_month.to_string()},
             {"model_id", f.model_id},
             {"value", f.value}};
}

inline ForecastResult forecast_from_json(const json& j) {
    return {detail::get_as<std::string>(j, "product_id"),
            detail::month_from_json(detail::require(j, "target_month"), "target_month"),
            detail::get_as<std::string>(j, "model_id"), detail::get_as<double>(j, "value")};
}

inline void to_json(json& j, const BacktestRecord& r) {
    j = json{{"product_id", r.product_id}, {"model_id", r.model_id}, {"month", r.month.to_string()},
             {"forecast", r.forecast},     {"actual", r.actual},     {"accuracy", r.accuracy}};
}

inline BacktestRecord record_from_json(const json& j) {
    return {detail::get_as<std::string>(j, "product_id"), detail::get_as<std::string>(j, "model_id"),
            detail::month_from_json(detail::require(j, "month"), "month"), detail::get_as<double>(j, "forecast"),
            detail::get_as<double>(j, "actual"), detail::get_as<double>(j, "accuracy")};
}

/// One record per line.
inline std::string records_to_jsonl(std::span<const BacktestRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += json(r).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<BacktestRecord> records_from_jsonl(std::string_view text) {
    std::vector<BacktestRecord> out;
    std::size_t lineno = 0;
    for (auto line : detail::split(text, '\n')) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::validation, "records line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void to_json(json& j, const BacktestConfig& c) {
    j = json{{"target_month", c.target_month ? json(c.target_month->to_string()) : json(nullptr)},
             {"window_w", c.window_w},
             {"top_k", c.top_k},
             {"abnormal_multiplier", c.abnormal_multiplier},
             {"accuracy_floor_epsilon", c.accuracy_floor_epsilon}};
}

/// Missing fields keep their defaults.
inline BacktestConfig backtest_config_from_json(const json& j) {
    BacktestConfig c;
    if (!j.is_object()) throw Error(ErrorCode::validation, "config must be a JSON object");
    if (j.contains("target_month") && !j["target_month"].is_null())
        c.target_month = detail::month_from_json(j["target_month"], "target_month");
    if (j.contains("window_w")) c.window_w = detail::get_as<int>(j, "window_w");
    if (j.contains("top_k")) c.top_k = detail::get_as<int>(j, "top_k");
    if (j.contains("abnormal_multiplier")) c.abnormal_multiplier = detail::get_as<double>(j, "abnormal_multiplier");
    if (j.contains("accuracy_floor_epsilon"))
        c.accuracy_floor_epsilon = detail::get_as<double>(j, "accuracy_floor_epsilon");
    return c;
}

inline void to_json(json& j, const RankingWeights& w) {
    j = json{{"w_accuracy", w.accuracy}, {"w_variance", w.variance}, {"w_applicability", w.applicability}};
}

inline RankingWeights weights_from_json(const json& j) {
    RankingWeights w;
    if (!j.is_object()) throw Error(ErrorCode::validation, "weights must be a JSON object");
    if (j.contains("w_accuracy")) w.accuracy = detail::get_as<double>(j, "w_accuracy");
    if (j.contains("w_variance")) w.variance = detail::get_as<double>(j, "w_variance");
    if (j.contains("w_applicability")) w.applicability = detail::get_as<double>(j, "w_applicability");
    w.normalized();  // validates
    return w;
}

inline void to_json(json& j, const IndicatorSummary& s) {
    j = json{{"model_id", s.model_id},
             {"mean_accuracy", s.mean_accuracy},
             {"accuracy_variance", s.accuracy_variance},
             {"applicability_count", s.applicability_count},
             {"product_count", s.product_count}};
}

inline void to_json(json& j, const RankedModel& r) {
    j = json{{"model_id", r.model_id}, {"score", r.score}, {"rank", r.rank}, {"in_top_k", r.in_top_k},
             {"summary", r.summary}};
}

inline void to_json(json& j, const ProjectionPoint& p) {
    j = json{{"product_id", p.product_id}, {"x", p.x}, {"y", p.y}, {"role", to_string(p.role)}};
}

inline void to_json(json& j, const ExcludedPair& e) {
    j = json{{"id_a", e.id_a}, {"id_b", e.id_b}, {"reason", e.reason}};
}

inline void to_json(json& j, const SeriesProperties& p) {
    j = json::object();
    j["product_id"] = p.product_id;
    json reasons = json::object();
    auto reason = [](const auto& c) { return c.present() ? json(nullptr) : json(c.reason); };
    if (const auto& d = p.decomposition.value) {
        json trend = json::array();
        for (const auto& t : d->trend) trend.push_back(detail::optional_to_json(t));
        j["trend"] = std::move(trend);
        j["seasonal_effects"] = d->seasonal_effects;
        j["seasonal"] = d->seasonal;
    } else {
        j["trend"] = nullptr;
        j["seasonal_effects"] = nullptr;
        j["seasonal"] = nullptr;
    }
    reasons["decomposition"] = reason(p.decomposition);
    j["acf"] = p.acf.value ? json{{"r", p.acf.value->r}, {"ci", p.acf.value->ci_halfwidth}} : json(nullptr);
    reasons["acf"] = reason(p.acf);
    j["adf"] = p.adf.value ? json{{"stat", p.adf.value->statistic},
                                  {"p", p.adf.value->p_value},
                                  {"stationary", p.adf.value->stationary},
                                  {"lag_order", p.adf.value->lag_order}}
                           : json(nullptr);
    reasons["adf"] = reason(p.adf);
    j["reasons"] = std::move(reasons);
}

inline json error_payload(ErrorCode code, const std::string& message, json details = json::object()) {
    return json{{"code", to_string(code)}, {"message", message}, {"details", std::move(details)}};
}

}  // namespace fcsel
