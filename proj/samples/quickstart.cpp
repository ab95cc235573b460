// Backtest the default model zoo on a small CSV and print the leaderboard
// plus the nearest neighbours of the first product.
//
//   ./quickstart [demand.csv]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fcsel/fcsel.hpp"

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : FCSEL_SAMPLE_CSV;
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << '\n';
        return 1;
    }
    std::stringstream text;
    text << in.rdbuf();

    try {
        auto parsed = fcsel::parse_dataset(text.str());
        for (const auto& w : parsed.report.warnings) std::cerr << w.product_id << ": " << w.reason << '\n';
        const auto& data = parsed.dataset;

        fcsel::BacktestConfig cfg;
        auto models = fcsel::default_models();
        auto bt = fcsel::run_backtest(data, models, cfg);
        auto ids = data.ids();
        auto summaries = fcsel::compute_indicators(bt.records, bt.target_forecasts, ids, cfg);
        auto ranked = fcsel::rank_models(summaries, {1, 1, 1}, cfg.top_k);

        std::printf("target %s, %zu records\n", bt.target_month.to_string().c_str(), bt.records.size());
        std::printf("%-4s %-10s %6s %8s %9s %4s\n", "rank", "model", "score", "accuracy", "variance", "app");
        for (const auto& r : ranked)
            std::printf("%-4d %-10s %6.3f %8.3f %9.5f %4d%s\n", r.rank, r.model_id.c_str(), r.score,
                        r.summary.mean_accuracy, r.summary.accuracy_variance, r.summary.applicability_count,
                        r.in_top_k ? "" : "  (gray)");

        std::vector<fcsel::NormalizedSeries> normalized;
        for (const auto& [id, s] : data.series) normalized.push_back(fcsel::z_normalize(s));
        auto universe = fcsel::build_universe(std::move(normalized));
        auto near = fcsel::nearest_similar(ids.front(), universe.members, 3);
        std::printf("\nclosest to %s:\n", ids.front().c_str());
        for (const auto& [id, d] : near) std::printf("  %-8s %.3f\n", id.c_str(), d);
    } catch (const fcsel::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
