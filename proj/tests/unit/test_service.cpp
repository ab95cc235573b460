#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "fcsel/service/api.hpp"
#include "support/oracles.hpp"
#include "support/schema_check.hpp"
#include "support/synthetic.hpp"

using namespace fcsel;
using namespace fcsel::service;

namespace {

void expect_schema(const std::string& name, const json& body) {
    auto checker = fcsel::testing::SchemaChecker::from_file(std::string(FCSEL_SCHEMA_DIR) + "/" + name + ".schema.json");
    auto errors = checker.check(body);
    EXPECT_TRUE(errors.empty()) << name << ": " << (errors.empty() ? "" : errors.front());
}

SessionConfig small_config() {
    SessionConfig cfg;
    cfg.registry.models = {make_spec("naive", ModelKind::naive), make_spec("drift", ModelKind::drift),
                           make_spec("ses", ModelKind::ses), make_spec("holt", ModelKind::holt),
                           make_spec("snaive12", ModelKind::seasonal_naive)};
    for (std::size_t i = 0; i < cfg.registry.models.size(); ++i)
        cfg.registry.models[i].display_color_key = static_cast<int>(i);
    cfg.backtest.top_k = 3;
    cfg.threads = 1;
    return cfg;
}

Dataset fixture() {
    auto d = fcsel::testing::synthetic_dataset(12, 36, 42);
    // A short product outside the similarity universe and one that stopped early.
    d.insert(fcsel::testing::make_series("short", {4, 5, 6, 7, 8}, {2017, 8}));
    d.insert(fcsel::testing::make_series("old", std::vector<double>(20, 3.0), {2015, 1}));
    return d;
}

std::string write_temp(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / ("fcsel_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        data = fixture();
        session = store.create_from(data, validate(data), small_config());
    }

    Dataset data;
    SessionStore store;
    std::shared_ptr<Session> session;
};

std::vector<oracle::Record> as_oracle(const std::vector<BacktestRecord>& recs) {
    std::vector<oracle::Record> out;
    for (const auto& r : recs) out.push_back({r.product_id, r.model_id, r.month, r.forecast, r.actual, r.accuracy});
    return out;
}

}  // namespace

TEST_F(ServiceTest, SummaryAndReadEndpointsMatchSchemas) {
    auto s = session->summary();
    expect_schema("session", s);
    EXPECT_EQ(s["product_count"], 14);
    EXPECT_EQ(s["target_month"], "2018-01");
    expect_schema("projection", session->projection());
    expect_schema("models", session->models());
    expect_schema("panel", session->panel());
    expect_schema("snapshot", session->snapshot());
}

TEST_F(ServiceTest, ProjectionRolesAndExclusions) {
    auto p = session->projection();
    EXPECT_EQ(p["points"].size(), 13u);  // "short" is excluded
    bool short_pairs = !p["excluded_pairs"].empty();
    for (const auto& e : p["excluded_pairs"]) short_pairs = short_pairs && (e["id_a"] == "short" || e["id_b"] == "short");
    EXPECT_TRUE(short_pairs);
    for (const auto& pt : p["points"]) {
        EXPECT_EQ(pt["role"], pt["product_id"] == "old" ? "forecasted_before" : "to_forecast");
        EXPECT_TRUE(std::isfinite(pt["x"].get<double>()));
    }
}

TEST_F(ServiceTest, ClusterRankingMatchesOracle) {
    std::vector<std::string> cluster{"P00001", "P00004", "P00007", "short"};
    auto panel = session->set_cluster(cluster);
    expect_schema("panel", panel);
    const auto& a = session->analytics();
    auto ind = oracle::indicators(as_oracle(a.backtest.records), {cluster.begin(), cluster.end()}, 3);
    auto expected = oracle::rank(ind, 1, 1, 1);
    ASSERT_EQ(panel["ranking"].size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(panel["ranking"][i]["model_id"], expected[i].model_id);
        EXPECT_NEAR(panel["ranking"][i]["score"].get<double>(), expected[i].score, 1e-12);
    }
    EXPECT_EQ(panel["products"].size(), 4u);
    for (const auto& p : panel["products"]) {
        EXPECT_LE(p["top_models"].size(), 3u);
        int hist_total = 0;
        for (int c : p["other_accuracy_histogram"]) hist_total += c;
        EXPECT_EQ(static_cast<std::size_t>(hist_total), p["other_models"].size());
    }
}

TEST_F(ServiceTest, ClusterErrors) {
    try {
        session->set_cluster({"P00001", "ghost", "phantom"});
        FAIL() << "expected validation error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::validation);
        EXPECT_EQ(e.subjects(), (std::vector<std::string>{"ghost", "phantom"}));
    }
    EXPECT_THROW(session->set_cluster({}), Error);
    EXPECT_EQ(session->panel()["cluster"].size(), 14u);  // unchanged
}

TEST_F(ServiceTest, WeightsReorderWithoutRecomputingIndicators) {
    auto before = session->indicators();
    auto r = session->set_weights({1, 0, 0}, std::nullopt);
    expect_schema("weights", r);
    EXPECT_EQ(session->indicators(), before);
    double prev = 2.0;
    for (const auto& m : r["ranking"]) {
        double acc = m["summary"]["mean_accuracy"];
        EXPECT_LE(acc, prev);
        prev = acc;
    }
    EXPECT_THROW(session->set_weights({0, 0, 0}, std::nullopt), Error);
    EXPECT_THROW(session->set_weights({1, 1, 1}, 99), Error);
}

TEST_F(ServiceTest, TopKChangeRecomputesApplicability) {
    auto total = [](const std::vector<IndicatorSummary>& v) {
        int t = 0;
        for (const auto& s : v) t += s.applicability_count;
        return t;
    };
    const int with3 = total(session->indicators());
    session->set_weights({1, 1, 1}, 1);
    const int with1 = total(session->indicators());
    EXPECT_LT(with1, with3);
    EXPECT_EQ(with1, 13);  // every product except "old" has records in the window
    int top = 0;
    for (const auto& m : session->ranking()) top += m.in_top_k;
    EXPECT_EQ(top, 1);
}

TEST_F(ServiceTest, ProductDetail) {
    auto d = session->product_detail("P00002");
    expect_schema("detail", d);
    ASSERT_EQ(d["months"].size(), 11u);
    EXPECT_EQ(d["months"].back(), "2018-01");
    EXPECT_TRUE(d["actual"].back().is_null());
    const auto& s = data.at("P00002");
    EXPECT_EQ(d["actual"][0].get<double>(), *s.at({2017, 3}));
    for (const auto& m : d["models"]) {
        EXPECT_EQ(m["accuracy"].size(), 10u);
        EXPECT_EQ(m["forecast"].size(), 11u);
    }
    EXPECT_EQ(d["models"].size(), 3u);
    try {
        session->product_detail("ghost");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_found);
    }
}

TEST_F(ServiceTest, RiskViewAndRemovalBackfill) {
    auto r = session->risk_view("P00000", 5);
    expect_schema("risk", r);
    ASSERT_EQ(r["rows"].size(), 5u);
    double prev = -1;
    for (const auto& row : r["rows"]) {
        EXPECT_NE(row["product_id"], "P00000");
        EXPECT_GE(row["distance_to_focus"].get<double>(), prev);
        prev = row["distance_to_focus"];
    }
    EXPECT_EQ(r["focus"]["product_id"], "P00000");
    const std::string second = r["rows"][1]["product_id"];
    const std::string sixth = session->risk_view("P00000", 6)["rows"][5]["product_id"];

    auto after = session->remove_similar("P00000", second, 5);
    expect_schema("risk", after);
    ASSERT_EQ(after["rows"].size(), 5u);
    for (const auto& row : after["rows"]) EXPECT_NE(row["product_id"], second);
    EXPECT_EQ(after["rows"][4]["product_id"], sixth);
    EXPECT_EQ(after["removed"], json::array({second}));

    auto noop = session->remove_similar("P00000", "short", 1);
    EXPECT_EQ(noop["warnings"].size(), 1u);
    EXPECT_THROW(session->remove_similar("P00000", "P00000", 5), Error);
    try {
        session->risk_view("short", 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unprocessable);
    }
}

TEST_F(ServiceTest, SnapshotReplayReproducesResponses) {
    session->set_cluster({"P00003", "P00005", "P00008", "old"});
    session->set_weights({2, 0.5, 1}, 2);
    auto first = session->risk_view("P00003", 4)["rows"][0]["product_id"].get<std::string>();
    session->remove_similar("P00003", first, 4);

    auto restored = store.restore(session->snapshot());
    EXPECT_NE(restored->id(), session->id());
    EXPECT_EQ(restored->panel(), session->panel());
    EXPECT_EQ(restored->models(), session->models());
    EXPECT_EQ(restored->risk_view("P00003", 4), session->risk_view("P00003", 4));
    EXPECT_EQ(restored->product_detail("P00005"), session->product_detail("P00005"));
    EXPECT_EQ(restored->projection(), session->projection());
}

TEST_F(ServiceTest, SessionsAreIsolated) {
    auto other = store.create_from(data, validate(data), small_config());
    auto baseline = other->models();
    session->set_weights({0, 0, 1}, 1);
    session->set_cluster({"P00001"});
    EXPECT_EQ(other->models(), baseline);
    EXPECT_EQ(store.size(), 2u);
}

TEST_F(ServiceTest, ConcurrentReadsAndWrites) {
    std::vector<std::jthread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 20; ++i) {
                try {
                    if (t == 0) {
                        session->set_weights({1.0 + i, 1, 1}, 1 + i % 3);
                    } else {
                        auto p = session->panel();
                        if (p["ranking"].empty()) ++failures;
                        session->risk_view("P00002", 3);
                    }
                } catch (...) {
                    ++failures;
                }
            }
        });
    threads.clear();
    EXPECT_EQ(failures.load(), 0);
}

TEST(Api, RoutesAndErrorPayloads) {
    SessionStore store;
    Api api(store);
    auto data = fixture();
    const auto csv_path = write_temp("api.csv", to_csv(data));
    auto cfg = session_config_to_json(small_config());

    auto created = api.handle({"POST", "/sessions", {}, json{{"dataset_path", csv_path}, {"config", cfg}}.dump()});
    ASSERT_EQ(created.status, 200) << created.body.dump();
    const std::string id = created.body["session_id"];
    const std::string base = "/sessions/" + id;

    EXPECT_EQ(api.handle({"GET", base + "/projection", {}, ""}).status, 200);
    EXPECT_EQ(api.handle({"GET", base + "/models", {}, ""}).status, 200);
    auto risk = api.handle({"GET", base + "/products/P00001/risk", {{"n", "3"}}, ""});
    EXPECT_EQ(risk.status, 200);
    EXPECT_EQ(risk.body["rows"].size(), 3u);

    auto check_error = [&](const ApiResponse& r, int status, const std::string& code) {
        EXPECT_EQ(r.status, status) << r.body.dump();
        EXPECT_EQ(r.body["code"], code);
        expect_schema("error", r.body);
    };
    check_error(api.handle({"GET", "/sessions/s999999/models", {}, ""}), 404, "not_found");
    check_error(api.handle({"GET", base + "/products/ghost", {}, ""}), 404, "not_found");
    check_error(api.handle({"PUT", base + "/cluster", {}, "{not json"}), 400, "validation");
    check_error(api.handle({"POST", base + "/models", {}, ""}), 405, "validation");
    check_error(api.handle({"GET", "/nope", {}, ""}), 404, "not_found");
    check_error(api.handle({"GET", base + "/products/P00001/risk", {{"n", "0"}}, ""}), 400, "validation");
    check_error(api.handle({"GET", base + "/products/short/risk", {}, ""}), 422, "unprocessable");
    check_error(api.handle({"PUT", base + "/weights", {}, R"({"w_accuracy":0,"w_variance":0,"w_applicability":0})"}),
                400, "validation");
    check_error(api.handle({"POST", "/sessions", {}, R"({"dataset_path":"/no/such/file.csv"})"}), 404, "not_found");

    auto bad = api.handle({"PUT", base + "/cluster", {}, R"({"product_ids":["P00001","ghost"]})"});
    check_error(bad, 400, "validation");
    EXPECT_EQ(bad.body["details"]["ids"], json::array({"ghost"}));

    const auto empty_csv = write_temp("empty.csv", "product_id,product_type,month,demand\np,t,2015-01,-1\n");
    check_error(api.handle({"POST", "/sessions", {}, json{{"dataset_path", empty_csv}}.dump()}), 422, "unprocessable");

    auto del = api.handle({"DELETE", base + "/products/P00001/similar/" + risk.body["rows"][0]["product_id"].get<std::string>(),
                           {{"n", "3"}}, ""});
    EXPECT_EQ(del.status, 200);
    EXPECT_EQ(del.body["removed"].size(), 1u);

    auto snap = api.handle({"GET", base + "/snapshot", {}, ""});
    auto restored = api.handle({"POST", "/sessions", {}, json{{"snapshot", snap.body}}.dump()});
    ASSERT_EQ(restored.status, 200);
    auto rbase = "/sessions/" + restored.body["session_id"].get<std::string>();
    EXPECT_EQ(api.handle({"GET", rbase + "/products/P00001/risk", {{"n", "3"}}, ""}).body,
              api.handle({"GET", base + "/products/P00001/risk", {{"n", "3"}}, ""}).body);
}
