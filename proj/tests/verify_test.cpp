#include <gtest/gtest.h>

#include <set>

#include "msearch/errors.hpp"
#include "msearch/verify.hpp"

using namespace msearch;

TEST(Catalog, CoversEveryCriterion) {
  std::set<std::string> ids;
  std::set<int> criteria;
  for (const CheckInfo& info : check_catalog()) {
    EXPECT_TRUE(ids.insert(info.id).second) << info.id;
    EXPECT_FALSE(info.theorem_ref.empty());
    criteria.insert(info.criterion);
  }
  for (int c = 1; c <= 15; ++c) EXPECT_TRUE(criteria.count(c)) << c;
}

TEST(Catalog, ParseSuite) {
  EXPECT_EQ(parse_suite("fast"), Suite::kFast);
  EXPECT_EQ(parse_suite("full"), Suite::kFull);
  EXPECT_THROW(parse_suite("quick"), InvalidArgument);
  EXPECT_EQ(to_string(Suite::kFull), "full");
}

TEST(RunCheck, CheapChecksPass) {
  VerifyConfig c;
  for (const char* id : {"constants-m2", "space-degenerate-m2", "limit-quantities"}) {
    const CheckReport r = run_check(id, c);
    EXPECT_TRUE(r.pass()) << id << " " << r.message;
    EXPECT_FALSE(r.items.empty());
  }
}

TEST(RunCheck, UnknownId) { EXPECT_THROW(run_check("no-such-check", VerifyConfig{}), InvalidArgument); }

TEST(RunCheck, BudgetExceededIsSkipped) {
  VerifyConfig c;
  c.budget_seconds = 1e-9;
  const CheckReport r = run_check("enum-oracle", c);
  EXPECT_EQ(r.status, CheckStatus::kSkipped);
  EXPECT_FALSE(r.pass());
  EXPECT_NE(r.message.find("budget"), std::string::npos);
}

TEST(Report, DeterministicWithoutTiming) {
  VerifyConfig c;
  c.only = {"constants-m2", "limit-quantities"};
  c.threads = 2;
  const auto a = run_suite(c);
  const auto b = run_suite(c);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].check_id, "constants-m2");
  const std::string ja = verify_report_json(a, c, false);
  EXPECT_EQ(ja, verify_report_json(b, c, false));
  EXPECT_EQ(ja.find("runtime_seconds"), std::string::npos);
  EXPECT_NE(verify_report_json(a, c, true).find("runtime_seconds"), std::string::npos);
  EXPECT_NE(ja.find("\"passed\": 2"), std::string::npos);
}

TEST(Report, FailingItemsAreListed) {
  CheckReport r;
  r.check_id = "x";
  r.items.push_back({"quantity", "abs", "2", "1", "0.5", false});
  r.status = CheckStatus::kFail;
  const std::string j = verify_report_json({r}, VerifyConfig{}, false);
  EXPECT_NE(j.find("\"offending\""), std::string::npos);
  EXPECT_NE(j.find("quantity: 2"), std::string::npos);
  EXPECT_NE(j.find("\"failed\": 1"), std::string::npos);
}
