#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcsel/error.hpp"
#include "fcsel/month.hpp"

namespace fcsel {

/// Seasonal models need two full years; shorter series are flagged.
inline constexpr std::size_t kShortHistoryMonths = 24;

/// One product's contiguous monthly demand history.
struct DemandSeries {
    std::string product_id;
    std::string product_type;
    MonthIndex start;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    MonthIndex month_at(std::size_t i) const { return start.plus(static_cast<long>(i)); }
    /// Last month with data. Undefined for an empty series.
    MonthIndex end() const { return start.plus(static_cast<long>(values.size()) - 1); }
    std::span<const double> view() const { return values; }

    std::optional<double> at(MonthIndex m) const {
        long off = months_between(start, m);
        if (off < 0 || off >= static_cast<long>(values.size())) return std::nullopt;
        return values[static_cast<std::size_t>(off)];
    }

    friend bool operator==(const DemandSeries&, const DemandSeries&) = default;
};

struct Dataset {
    std::map<std::string, DemandSeries> series;  // keyed by product_id
    std::optional<MonthIndex> global_start;
    std::optional<MonthIndex> global_end;

    std::size_t size() const { return series.size(); }
    bool empty() const { return series.empty(); }

    bool contains(std::string_view id) const { return series.find(std::string(id)) != series.end(); }

    const DemandSeries& at(std::string_view id) const {
        auto it = series.find(std::string(id));
        if (it == series.end())
            throw Error(ErrorCode::not_found, "unknown product_id '" + std::string(id) + "'");
        return it->second;
    }

    /// Inserts or replaces a series and widens the global span to cover it.
    void insert(DemandSeries s) {
        if (!s.empty()) {
            if (!global_start || s.start < *global_start) global_start = s.start;
            if (!global_end || s.end() > *global_end) global_end = s.end();
        }
        auto id = s.product_id;
        series.insert_or_assign(std::move(id), std::move(s));
    }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(series.size());
        for (const auto& [id, s] : series) out.push_back(id);
        return out;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct RowError {
    std::string product_id;
    std::optional<MonthIndex> month;
    std::size_t line = 0;  // 1-based, header is line 1; 0 when not tied to a row
    std::string reason;
};

struct Warning {
    std::string product_id;
    std::string reason;
};

struct ValidationReport {
    std::vector<RowError> errors;
    std::vector<Warning> warnings;
    std::size_t accepted_count = 0;

    bool ok() const { return errors.empty(); }

    std::set<std::string> rejected_products() const {
        std::set<std::string> ids;
        for (const auto& e : errors) ids.insert(e.product_id);
        return ids;
    }
};

struct ParseResult {
    Dataset dataset;
    ValidationReport report;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

inline std::optional<double> parse_decimal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Re-checks every series invariant. Never throws; findings go in the report.
inline ValidationReport validate(const Dataset& dataset) {
    ValidationReport report;
    for (const auto& [id, s] : dataset.series) {
        std::size_t before = report.errors.size();
        if (id != s.product_id)
            report.errors.push_back({id, std::nullopt, 0, "map key does not match product_id"});
        if (s.empty()) {
            report.errors.push_back({id, std::nullopt, 0, "empty series"});
        } else {
            for (std::size_t i = 0; i < s.size(); ++i) {
                double v = s.values[i];
                if (!std::isfinite(v))
                    report.errors.push_back({id, s.month_at(i), 0, "non-finite demand"});
                else if (v < 0.0)
                    report.errors.push_back({id, s.month_at(i), 0, "negative demand"});
            }
            if ((dataset.global_start && s.start < *dataset.global_start) ||
                (dataset.global_end && s.end() > *dataset.global_end))
                report.errors.push_back({id, std::nullopt, 0, "series span outside dataset span"});
            if (s.size() < kShortHistoryMonths)
                report.warnings.push_back({id, "short history"});
        }
        if (report.errors.size() == before) ++report.accepted_count;
    }
    return report;
}

/// Parses `product_id,product_type,month,demand` CSV text.
///
/// Rows are grouped per product and sorted by month. Interior gaps are filled
/// with zero demand (and a warning); leading/trailing absence just shortens the
/// span. A product with any row error is rejected as a whole and every bad row
/// is listed in the report. Fields are not quoted; commas inside identifiers
/// are unsupported. Throws Error(validation) only for a missing/wrong header.
inline ParseResult parse_dataset(std::string_view csv_text) {
    static constexpr std::string_view kHeader = "product_id,product_type,month,demand";

    if (csv_text.starts_with("\xEF\xBB\xBF")) csv_text.remove_prefix(3);
    auto lines = detail::split(csv_text, '\n');
    if (lines.empty() || detail::trim(lines.front()) != kHeader)
        throw Error(ErrorCode::validation,
                    "missing or malformed header; expected '" + std::string(kHeader) + "'");

    struct Pending {
        std::string product_type;
        std::map<MonthIndex, double> rows;
    };

    ParseResult result;
    auto& report = result.report;
    std::map<std::string, Pending> pending;
    std::set<std::string> input_products;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto line = detail::trim(lines[li]);
        if (line.empty()) continue;
        const std::size_t lineno = li + 1;
        auto fields = detail::split(line, ',');
        std::string pid(detail::trim(fields.front()));
        input_products.insert(pid);
        if (fields.size() != 4) {
            report.errors.push_back({pid, std::nullopt, lineno, "expected 4 fields"});
            continue;
        }
        if (pid.empty()) {
            report.errors.push_back({pid, std::nullopt, lineno, "empty product_id"});
            continue;
        }
        std::string type(detail::trim(fields[1]));
        auto month = MonthIndex::parse(detail::trim(fields[2]));
        if (!month) {
            report.errors.push_back({pid, std::nullopt, lineno,
                                     "malformed month '" + std::string(detail::trim(fields[2])) + "'"});
            continue;
        }
        auto demand = detail::parse_decimal(detail::trim(fields[3]));
        if (!demand) {
            report.errors.push_back({pid, month, lineno, "non-numeric demand"});
            continue;
        }
        if (*demand < 0.0) {
            report.errors.push_back({pid, month, lineno, "negative demand"});
            continue;
        }
        auto [it, fresh] = pending.try_emplace(pid, Pending{type, {}});
        if (!fresh && it->second.product_type != type) {
            report.errors.push_back({pid, month, lineno, "product_type differs from earlier rows"});
            continue;
        }
        if (!it->second.rows.emplace(*month, *demand).second) {
            report.errors.push_back({pid, month, lineno, "duplicate (product_id, month)"});
            continue;
        }
    }

    const auto rejected = report.rejected_products();
    for (auto& [pid, p] : pending) {
        if (rejected.contains(pid) || p.rows.empty()) continue;
        DemandSeries s{pid, p.product_type, p.rows.begin()->first, {}};
        const MonthIndex last = p.rows.rbegin()->first;
        std::vector<std::string> filled;
        for (MonthIndex m = s.start; m <= last; m = m.next()) {
            auto r = p.rows.find(m);
            if (r == p.rows.end()) {
                filled.push_back(m.to_string());
                s.values.push_back(0.0);
            } else {
                s.values.push_back(r->second);
            }
        }
        if (!filled.empty()) {
            std::string reason = "gap-filled " + std::to_string(filled.size()) + " missing month(s) with 0:";
            for (const auto& f : filled) reason += " " + f;
            report.warnings.push_back({pid, std::move(reason)});
        }
        result.dataset.insert(std::move(s));
    }

    auto checked = validate(result.dataset);
    for (auto& w : checked.warnings) report.warnings.push_back(std::move(w));
    for (auto& e : checked.errors) report.errors.push_back(std::move(e));
    report.accepted_count = input_products.size() - report.rejected_products().size();
    return result;
}

/// Serializes back to the ingestion CSV format (one row per month, shortest
/// round-trip decimal for demand).
inline std::string to_csv(const Dataset& dataset) {
    std::string out = "product_id,product_type,month,demand\n";
    for (const auto& [id, s] : dataset.series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += id;
            out += ',';
            out += s.product_type;
            out += ',';
            out += s.month_at(i).to_string();
            out += ',';
            out += detail::format_double(s.values[i]);
            out += '\n';
        }
    }
    return out;
}

/// Prefix of `series` strictly before `cutoff`, metadata preserved.
inline DemandSeries slice_history(const DemandSeries& series, MonthIndex cutoff) {
    if (cutoff <= series.start)
        throw Error(ErrorCode::insufficient_history, "empty history");
    auto n = std::min<long>(months_between(series.start, cutoff), static_cast<long>(series.size()));
    DemandSeries out{series.product_id, series.product_type, series.start, {}};
    out.values.assign(series.values.begin(), series.values.begin() + n);
    return out;
}

}  // namespace fcsel
