#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "fcsel/dataset.hpp"
#include "fcsel/json_io.hpp"
#include "support/synthetic.hpp"

using namespace fcsel;

namespace {

const std::string kHeader = "product_id,product_type,month,demand\n";

}  // namespace

TEST(MonthIndex, OrderingAndSuccessor) {
    MonthIndex dec{2015, 12};
    EXPECT_EQ(dec.next(), (MonthIndex{2016, 1}));
    EXPECT_EQ((MonthIndex{2016, 1}).prev(), dec);
    EXPECT_LT((MonthIndex{2015, 12}), (MonthIndex{2016, 1}));
    EXPECT_LT((MonthIndex{2015, 2}), (MonthIndex{2015, 3}));
    EXPECT_EQ(months_between(MonthIndex{2015, 1}, MonthIndex{2018, 11}), 46);
    EXPECT_EQ((MonthIndex{2015, 1}).plus(-1), (MonthIndex{2014, 12}));
}

TEST(MonthIndex, StrictParser) {
    EXPECT_EQ(MonthIndex::parse("2018-11"), (MonthIndex{2018, 11}));
    for (const char* bad : {"2018-13", "2018-00", "2018-1", "18-11", "2018/11", "2018-11-01", " 2018-11", "abcd-ef"})
        EXPECT_FALSE(MonthIndex::parse(bad)) << bad;
    EXPECT_EQ((MonthIndex{2015, 3}).to_string(), "2015-03");
}

TEST(ParseDataset, ThreeRowsOneProduct) {
    auto r = parse_dataset(kHeader + "p1,type76,2015-01,5\np1,type76,2015-02,6\np1,type76,2015-03,7\n");
    ASSERT_EQ(r.dataset.size(), 1u);
    const auto& s = r.dataset.at("p1");
    EXPECT_EQ(s.start, (MonthIndex{2015, 1}));
    EXPECT_EQ(s.values, (std::vector<double>{5, 6, 7}));
    EXPECT_EQ(s.product_type, "type76");
    EXPECT_TRUE(r.report.ok());
    EXPECT_EQ(r.report.accepted_count, 1u);
}

TEST(ParseDataset, HeaderOnlyIsEmpty) {
    auto r = parse_dataset(kHeader);
    EXPECT_TRUE(r.dataset.empty());
    EXPECT_EQ(r.report.accepted_count, 0u);
    EXPECT_TRUE(r.report.errors.empty());
}

TEST(ParseDataset, InteriorGapFilledWithZeroAndWarned) {
    auto r = parse_dataset(kHeader + "p1,t,2015-03,7\np1,t,2015-01,5\n");
    const auto& s = r.dataset.at("p1");
    EXPECT_EQ(s.values, (std::vector<double>{5, 0, 7}));
    bool warned = false;
    for (const auto& w : r.report.warnings)
        warned = warned || (w.product_id == "p1" && w.reason.find("2015-02") != std::string::npos);
    EXPECT_TRUE(warned);
    EXPECT_TRUE(r.report.ok());
}

TEST(ParseDataset, CrLfLineEndings) {
    auto r = parse_dataset("product_id,product_type,month,demand\r\np1,t,2015-01,1.5\r\np1,t,2015-02,2\r\n");
    EXPECT_EQ(r.dataset.at("p1").values, (std::vector<double>{1.5, 2}));
}

TEST(ParseDataset, RowErrorsRejectTheProduct) {
    auto r = parse_dataset(kHeader +
                           "good,t,2015-01,1\n"
                           "bad_month,t,2015-13,1\n"
                           "neg,t,2015-01,-2\n"
                           "nan,t,2015-01,abc\n"
                           "dup,t,2015-01,1\n"
                           "dup,t,2015-01,2\n"
                           "short,t,2015-01\n");
    EXPECT_EQ(r.dataset.ids(), (std::vector<std::string>{"good"}));
    EXPECT_EQ(r.report.errors.size(), 5u);
    // The duplicate is reported for the later occurrence (line 7).
    bool dup_line7 = false;
    for (const auto& e : r.report.errors) dup_line7 = dup_line7 || (e.product_id == "dup" && e.line == 7);
    EXPECT_TRUE(dup_line7);
    EXPECT_EQ(r.report.accepted_count + r.report.rejected_products().size(), 6u);
}

TEST(ParseDataset, NonFiniteDemandRejected) {
    auto r = parse_dataset(kHeader + "p,t,2015-01,inf\nq,t,2015-01,nan\n");
    EXPECT_TRUE(r.dataset.empty());
    EXPECT_EQ(r.report.errors.size(), 2u);
}

TEST(ParseDataset, MissingHeaderThrows) {
    EXPECT_THROW(parse_dataset("p1,t,2015-01,5\n"), Error);
    EXPECT_THROW(parse_dataset(""), Error);
}

TEST(ParseDataset, ValidationReportCountInvariant) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> tokens = {"2015-01", "2015-02", "2015-13", "x", "2015-03"};
    for (int round = 0; round < 50; ++round) {
        std::string csv = kHeader;
        std::set<std::string> products;
        for (int i = 0; i < 20; ++i) {
            std::string pid = "p" + std::to_string(rng() % 6);
            products.insert(pid);
            csv += pid + ",t," + tokens[rng() % tokens.size()] + "," + std::to_string(static_cast<int>(rng() % 7) - 1) + "\n";
        }
        auto r = parse_dataset(csv);
        EXPECT_EQ(r.report.accepted_count + r.report.rejected_products().size(), products.size());
        EXPECT_TRUE(validate(r.dataset).ok());
        for (const auto& [id, s] : r.dataset.series) EXPECT_GE(s.size(), 1u);
    }
}

TEST(ParseDataset, CsvRoundTripIsFixedPoint) {
    auto data = fcsel::testing::synthetic_dataset(12, 30, 3);
    data.series.at("P00003").values[4] = 12.375;
    auto once = parse_dataset(to_csv(data));
    auto twice = parse_dataset(to_csv(once.dataset));
    EXPECT_EQ(once.dataset, data);
    EXPECT_EQ(twice.dataset, once.dataset);
}

TEST(ParseDataset, JsonSnapshotRoundTrip) {
    auto data = fcsel::testing::synthetic_dataset(5, 26, 11);
    json j = data;
    EXPECT_EQ(dataset_from_json(json::parse(j.dump())), data);
    EXPECT_EQ(j["series"][0]["start"], "2015-01");
}

TEST(SliceHistory, Boundaries) {
    auto s = fcsel::testing::make_series("p", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    EXPECT_EQ(slice_history(s, {2016, 1}).values.size(), 12u);
    auto half = slice_history(s, {2015, 7});
    EXPECT_EQ(half.values, (std::vector<double>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(half.product_id, "p");
    EXPECT_EQ(half.product_type, "type1");
    try {
        slice_history(s, {2015, 1});
        FAIL() << "expected empty history";
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "empty history");
    }
    EXPECT_THROW(slice_history(s, {2014, 6}), Error);
}

TEST(Validate, CleanParseHasNoErrors) {
    auto r = parse_dataset(kHeader + "p1,t,2015-01,5\np1,t,2015-02,6\n");
    auto v = validate(r.dataset);
    EXPECT_TRUE(v.errors.empty());
    EXPECT_EQ(v.accepted_count, 1u);
}

TEST(Validate, ShortHistoryWarning) {
    Dataset d;
    d.insert(fcsel::testing::make_series("p", std::vector<double>(23, 1.0)));
    d.insert(fcsel::testing::make_series("q", std::vector<double>(24, 1.0)));
    auto v = validate(d);
    ASSERT_EQ(v.warnings.size(), 1u);
    EXPECT_EQ(v.warnings[0].product_id, "p");
    EXPECT_EQ(v.warnings[0].reason, "short history");
}

TEST(Validate, NegativeValueIsOneError) {
    Dataset d;
    d.insert(fcsel::testing::make_series("p", {1, -1, 2}));
    auto v = validate(d);
    ASSERT_EQ(v.errors.size(), 1u);
    EXPECT_EQ(v.errors[0].month, (MonthIndex{2015, 2}));
    EXPECT_EQ(v.accepted_count, 0u);
    EXPECT_EQ(validate(d).errors.size(), v.errors.size());  // idempotent
}
