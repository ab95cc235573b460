#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"

namespace fcsel {

/// Series of different lengths are compared over their trailing overlap,
/// which must cover at least this many months.
inline constexpr std::size_t kMinOverlapMonths = 12;

/// Risk-view neighbour count when the caller does not pass one.
inline constexpr std::size_t kDefaultNeighbours = 10;

struct NormalizedSeries {
    std::string product_id;
    std::vector<double> values;
    double source_mean = 0.0;
    double source_std = 0.0;  // population
    bool degenerate = false;  // zero variance; values are all 0
};

inline NormalizedSeries z_normalize(std::string product_id, std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::insufficient_history, "cannot normalize an empty series");
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);

    NormalizedSeries out{std::move(product_id), std::vector<double>(values.size(), 0.0), mean, sd, sd == 0.0};
    if (!out.degenerate)
        for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = (values[i] - mean) / sd;
    return out;
}

inline NormalizedSeries z_normalize(const DemandSeries& series) {
    return z_normalize(series.product_id, series.view());
}

/// Euclidean distance. Equal-length inputs are compared directly; unequal
/// lengths are aligned on their trailing min(len) months, which must be at
/// least kMinOverlapMonths.
inline double euclidean_distance(const NormalizedSeries& a, const NormalizedSeries& b) {
    const std::size_t la = a.values.size(), lb = b.values.size();
    const std::size_t len = std::min(la, lb);
    if (la != lb && len < kMinOverlapMonths)
        throw Error(ErrorCode::validation, "series '" + a.product_id + "' and '" + b.product_id +
                                               "' overlap by " + std::to_string(len) + " months, need " +
                                               std::to_string(kMinOverlapMonths));
    double ss = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        double d = a.values[la - len + i] - b.values[lb - len + i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

struct DistanceMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd d;

    std::size_t size() const { return ids.size(); }
};

inline DistanceMatrix distance_matrix(std::span<const NormalizedSeries> set) {
    if (set.size() < 2) throw Error(ErrorCode::validation, "distance matrix needs at least 2 series");
    const auto n = static_cast<Eigen::Index>(set.size());
    DistanceMatrix dm;
    dm.d = Eigen::MatrixXd::Zero(n, n);
    for (const auto& s : set) dm.ids.push_back(s.product_id);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = euclidean_distance(set[static_cast<std::size_t>(i)], set[static_cast<std::size_t>(j)]);
            dm.d(i, j) = v;
            dm.d(j, i) = v;
        }
    return dm;
}

struct ExcludedPair {
    std::string id_a;
    std::string id_b;
    std::string reason;
};

/// Series eligible for similarity work plus the pairs left out because their
/// overlap is too short. A series shorter than kMinOverlapMonths cannot pair
/// with anything and is left out of the universe entirely.
struct SimilarityUniverse {
    std::vector<NormalizedSeries> members;
    std::vector<ExcludedPair> excluded;
};

inline SimilarityUniverse build_universe(std::vector<NormalizedSeries> all) {
    SimilarityUniverse u;
    std::vector<NormalizedSeries> short_ones;
    for (auto& s : all) {
        if (s.values.size() >= kMinOverlapMonths)
            u.members.push_back(std::move(s));
        else
            short_ones.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < short_ones.size(); ++i) {
        const auto& s = short_ones[i];
        auto note = [&](const NormalizedSeries& other) {
            auto len = std::min(s.values.size(), other.values.size());
            u.excluded.push_back({s.product_id, other.product_id,
                                  "overlap of " + std::to_string(len) + " months is below " +
                                      std::to_string(kMinOverlapMonths)});
        };
        for (const auto& m : u.members) note(m);
        for (std::size_t j = i + 1; j < short_ones.size(); ++j) note(short_ones[j]);
    }
    return u;
}

enum class PointRole { to_forecast, forecasted_before };

inline std::string_view to_string(PointRole r) {
    return r == PointRole::to_forecast ? "to_forecast" : "forecasted_before";
}

struct ProjectionPoint {
    std::string product_id;
    double x = 0.0;
    double y = 0.0;
    PointRole role = PointRole::to_forecast;
};

/// Classical (Torgerson) MDS into 2-D. Double-centres the squared distances,
/// keeps the two leading eigenpairs (negative or numerically zero eigenvalues
/// give a zero axis) and scales eigenvectors by sqrt(eigenvalue). Each axis
/// is oriented so its first non-negligible coordinate is positive.
inline std::vector<ProjectionPoint> mds_project(const DistanceMatrix& dm) {
    const auto n = static_cast<Eigen::Index>(dm.size());
    if (n < 2) throw Error(ErrorCode::validation, "MDS needs at least 2 points");
    if (dm.d.rows() != n || dm.d.cols() != n) throw Error(ErrorCode::validation, "distance matrix shape mismatch");
    if (!dm.d.allFinite()) throw Error(ErrorCode::validation, "distance matrix has non-finite entries");

    Eigen::MatrixXd b = dm.d.array().square().matrix();
    Eigen::VectorXd row_mean = b.rowwise().mean();
    const double grand = row_mean.mean();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = -0.5 * (b(i, j) - row_mean(i) - row_mean(j) + grand);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::degenerate, "MDS eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
    const double top = std::max(values(n - 1), 0.0);
    const double tol = 1e-12 * top;

    std::array<Eigen::VectorXd, 2> axes;
    for (int a = 0; a < 2; ++a) {
        const Eigen::Index col = n - 1 - a;
        axes[a] = Eigen::VectorXd::Zero(n);
        if (col < 0 || values(col) <= 0.0 || values(col) <= tol) continue;
        Eigen::VectorXd v = eig.eigenvectors().col(col);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > 1e-9 * vmax) {
                if (v(i) < 0) v = -v;
                break;
            }
        }
        axes[a] = v * std::sqrt(values(col));
    }

    std::vector<ProjectionPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        out.push_back({dm.ids[static_cast<std::size_t>(i)], axes[0](i), axes[1](i), PointRole::to_forecast});
    return out;
}

/// The `n` candidates closest to `target_id` (target excluded), ascending by
/// distance then product_id. Candidates whose overlap with the target is too
/// short are skipped.
inline std::vector<std::pair<std::string, double>> nearest_similar(const std::string& target_id,
                                                                   std::span<const NormalizedSeries> candidates,
                                                                   std::size_t n) {
    if (n < 1) throw Error(ErrorCode::validation, "neighbour count must be >= 1");
    auto target = std::find_if(candidates.begin(), candidates.end(),
                               [&](const NormalizedSeries& s) { return s.product_id == target_id; });
    if (target == candidates.end())
        throw Error(ErrorCode::not_found, "unknown product_id '" + target_id + "' in similarity universe");

    std::vector<std::pair<std::string, double>> all;
    for (const auto& c : candidates) {
        if (c.product_id == target_id) continue;
        const auto len = std::min(c.values.size(), target->values.size());
        if (c.values.size() != target->values.size() && len < kMinOverlapMonths) continue;
        all.emplace_back(c.product_id, euclidean_distance(*target, c));
    }
    auto less = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    };
    const auto keep = std::min(n, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(keep), all.end(), less);
    all.resize(keep);
    return all;
}

}  // namespace fcsel
