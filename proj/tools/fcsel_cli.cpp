// fcsel: batch front end and HTTP service for forecast model selection.
//
//   fcsel ingest     --input demand.csv --output snapshot.json
//   fcsel backtest   --snapshot snapshot.json [--config cfg.json] --output records.jsonl
//   fcsel rank       --records records.jsonl [--config cfg.json] [--weights 1,1,1] [--top-k 5]
//   fcsel properties --snapshot snapshot.json --output properties.json
//   fcsel serve      --port 8080 --dataset demand.csv [--config cfg.json]
//
// Exit codes: 0 ok, 1 validation, 2 runtime.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fcsel/fcsel.hpp"
#include "fcsel/service/api.hpp"
#include "fcsel/service/http.hpp"
#include "fcsel/service/session.hpp"

namespace {

using fcsel::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fcsel::Error(fcsel::ErrorCode::runtime, "cannot write '" + path + "'");
    out << text;
}

json read_json(const std::string& path) {
    try {
        return json::parse(fcsel::service::read_file(path));
    } catch (const json::exception& e) {
        throw fcsel::Error(fcsel::ErrorCode::validation, path + ": " + e.what());
    }
}

fcsel::service::SessionConfig load_config(const std::string& config_path, const std::string& registry_path) {
    fcsel::service::SessionConfig cfg;
    if (!config_path.empty()) cfg = fcsel::service::session_config_from_json(read_json(config_path));
    if (!registry_path.empty()) cfg.registry = fcsel::registry_from_json(read_json(registry_path));
    return cfg;
}

fcsel::Dataset load_snapshot(const std::string& path) {
    auto dataset = fcsel::dataset_from_json(read_json(path));
    auto report = fcsel::validate(dataset);
    if (!report.ok()) {
        std::cerr << json(report).dump(2) << '\n';
        throw fcsel::Error(fcsel::ErrorCode::validation, "snapshot '" + path + "' fails validation");
    }
    return dataset;
}

std::optional<fcsel::RankingWeights> parse_weights(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto parts = fcsel::detail::split(text, ',');
    if (parts.size() != 3) throw fcsel::Error(fcsel::ErrorCode::validation, "--weights expects a,v,p");
    std::vector<double> w;
    for (auto p : parts) {
        auto v = fcsel::detail::parse_decimal(fcsel::detail::trim(p));
        if (!v) throw fcsel::Error(fcsel::ErrorCode::validation, "--weights: '" + std::string(p) + "' is not a number");
        w.push_back(*v);
    }
    fcsel::RankingWeights out{w[0], w[1], w[2]};
    out.normalized();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backtest, rank and inspect demand forecasting models"};
    app.require_subcommand(1);

    std::string input, output, snapshot, config, registry, records, weights, forecasts, report_path, dataset;
    std::string host = "127.0.0.1";
    std::optional<int> top_k;
    int port = 8080;
    unsigned threads = 0;
    std::vector<std::string> products;

    auto* ingest = app.add_subcommand("ingest", "Parse and validate a demand CSV into a dataset snapshot");
    ingest->add_option("--input", input, "CSV with header product_id,product_type,month,demand")->required();
    ingest->add_option("--output", output, "Snapshot JSON path ('-' for stdout)")->required();
    ingest->add_option("--report", report_path, "Write the validation report as JSON");

    auto* backtest = app.add_subcommand("backtest", "Rolling-origin backtest of every registered model");
    backtest->add_option("--snapshot", snapshot, "Dataset snapshot JSON")->required();
    backtest->add_option("--config", config, "Config JSON (BacktestConfig fields, weights, registry)");
    backtest->add_option("--registry", registry, "Model registry JSON (overrides the config's)");
    backtest->add_option("--output", output, "Records JSONL path ('-' for stdout)")->required();
    backtest->add_option("--forecasts", forecasts, "Write target-month forecasts as a JSON array");
    backtest->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* rank = app.add_subcommand("rank", "Rank models from backtest records");
    rank->add_option("--records", records, "Records JSONL")->required();
    rank->add_option("--config", config, "Config JSON (top_k, weights)");
    rank->add_option("--weights", weights, "Weights a,v,p for accuracy, variance, applicability");
    rank->add_option("--top-k", top_k, "Applicability cutoff k");
    rank->add_option("--products", products, "Restrict to these product ids")->delimiter(',');
    rank->add_option("--output", output, "Leaderboard JSON path (default stdout)");

    auto* props = app.add_subcommand("properties", "Trend/seasonality, ACF and ADF per series");
    props->add_option("--snapshot", snapshot, "Dataset snapshot JSON")->required();
    props->add_option("--output", output, "Properties JSON path (default stdout)");

    auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON selection service");
    serve->add_option("--port", port, "Listen port");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--dataset", dataset, "CSV to open as the first session");
    serve->add_option("--config", config, "Config JSON for the first session");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            auto parsed = fcsel::parse_dataset(fcsel::service::read_file(input));
            write_output(output, json(parsed.dataset).dump() + "\n");
            if (!report_path.empty()) write_output(report_path, json(parsed.report).dump(2) + "\n");
            std::cerr << "accepted " << parsed.report.accepted_count << " products, " << parsed.report.errors.size()
                      << " row errors, " << parsed.report.warnings.size() << " warnings\n";
            for (const auto& e : parsed.report.errors)
                std::cerr << "  line " << e.line << " [" << e.product_id << "] " << e.reason << '\n';
            return parsed.report.ok() ? 0 : kExitValidation;
        }
        if (*backtest) {
            auto cfg = load_config(config, registry);
            auto data = load_snapshot(snapshot);
            auto models = fcsel::list_models(cfg.registry);
            auto result = fcsel::run_backtest(data, models, cfg.backtest, threads);
            write_output(output, fcsel::records_to_jsonl(result.records));
            if (!forecasts.empty()) write_output(forecasts, json(result.target_forecasts).dump(2) + "\n");
            std::cerr << result.records.size() << " records, target " << result.target_month.to_string() << '\n';
            return 0;
        }
        if (*rank) {
            auto cfg = load_config(config, "");
            if (auto w = parse_weights(weights)) cfg.weights = *w;
            if (top_k) cfg.backtest.top_k = *top_k;
            auto recs = fcsel::records_from_jsonl(fcsel::service::read_file(records));
            if (products.empty()) {
                std::set<std::string> ids;
                for (const auto& r : recs) ids.insert(r.product_id);
                products.assign(ids.begin(), ids.end());
            }
            auto summaries = fcsel::compute_indicators(recs, {}, products, cfg.backtest);
            auto ranked = fcsel::rank_models(summaries, cfg.weights, cfg.backtest.top_k);
            write_output(output, json(ranked).dump(2) + "\n");
            return 0;
        }
        if (*props) {
            auto data = load_snapshot(snapshot);
            json out = json::array();
            for (const auto& [id, s] : data.series) out.push_back(fcsel::extract_properties(s));
            write_output(output, out.dump() + "\n");
            return 0;
        }
        if (*serve) {
            fcsel::service::SessionStore store;
            if (!dataset.empty()) {
                auto session = store.create(dataset, load_config(config, ""));
                std::cerr << "session " << session->id() << " ready ("
                          << session->analytics().dataset.size() << " products)\n";
            }
            fcsel::service::Api api(store);
            httplib::Server server;
            fcsel::service::mount(server, api);
            std::cerr << "listening on " << host << ':' << port << '\n';
            if (!server.listen(host, port)) {
                std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
                return kExitRuntime;
            }
            return 0;
        }
    } catch (const fcsel::Error& e) {
        std::cerr << "error (" << fcsel::to_string(e.code()) << "): " << e.what() << '\n';
        switch (e.code()) {
            case fcsel::ErrorCode::validation:
            case fcsel::ErrorCode::not_found:
            case fcsel::ErrorCode::unprocessable: return kExitValidation;
            default: return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
