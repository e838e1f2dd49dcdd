#include <gtest/gtest.h>

#include "fcbgp/scenario.hpp"

using namespace fcbgp;

namespace {

const std::string kFigure3 = std::string(FCBGP_SOURCE_DIR) + "/scenarios/figure3.scn";

bool summary_has(const ScenarioResult& r, const std::string& needle) {
    for (const auto& l : r.summary) {
        if (l.find(needle) != std::string::npos) return true;
    }
    return false;
}

// Line 1 - 2 - 3 - 4 - 5 fully deployed, outsider 9 attached to 3 and 4.
const char* kBindingScenario = R"(seed 3
as 1 prefix=10.1.0.0/16 deployed=1
as 2 deployed=1
as 3 deployed=1
as 4 deployed=1
as 5 prefix=10.5.0.0/16 deployed=1
as 9 prefix=10.9.0.0/16 deployed=0
link 1 2
link 2 3
link 3 4
link 4 5
link 9 3
link 9 4
originate 1 10.1.0.0/16
bind 5 src=10.5.0.0/16 dst=10.1.0.0/16 at=50
packet src=10.5.0.0/16 dst=10.1.0.0/16 at-as=5 at=100
adversary 9 spoof src=10.5.0.0/16 dst=10.1.0.0/16 via=3 at=100
expect-packet 0 status=delivered
expect-packet 1 status=discarded
)";

}  // namespace

TEST(Scenario, ParseErrorsCarryLineNumbers) {
    try {
        parse_scenario("seed 1\n\nfrobnicate 3\n");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kParse);
        EXPECT_EQ(e.line(), 3);
    }
    try {
        parse_scenario("# comment\nseed x\n");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(parse_scenario("as 1 deployed=1 deployed=0\n"), Error);
}

TEST(Scenario, BadDirectiveArgumentsReportLine) {
    const auto sc = parse_scenario("as 1\nlink 1\n");
    try {
        run_scenario(sc);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.line(), 2) << e.what();
    }
}

TEST(Scenario, Figure3HoldsAndIsDeterministic) {
    const auto sc = load_scenario_file(kFigure3);
    EXPECT_EQ(sc.seed, 7u);
    const auto a = run_scenario(sc);
    EXPECT_TRUE(a.violations.empty()) << a.violations.front();
    const auto b = run_scenario(sc);
    EXPECT_EQ(a.trace.digest(), b.trace.digest());
    EXPECT_EQ(a.summary, b.summary);
}

TEST(Scenario, FailedExpectationIsReported) {
    auto text = std::string(kBindingScenario) + "expect 5 10.1.0.0/16 class=Legacy\n";
    const auto r = run_scenario(parse_scenario(text));
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_NE(r.violations[0].find("line 20"), std::string::npos) << r.violations[0];
    EXPECT_NE(r.violations[0].find("expected Legacy, got Trusted"), std::string::npos) << r.violations[0];
}

TEST(Scenario, PacketsAndBindings) {
    const auto r = run_scenario(parse_scenario(kBindingScenario));
    EXPECT_TRUE(r.violations.empty()) << r.violations.front();
    EXPECT_TRUE(summary_has(r, "packet=1 src=10.5.0.0/16 dst=10.1.0.0/16 status=discarded reason=wrong-inbound"));
}

TEST(Scenario, MissingFileIsIoError) {
    try {
        load_scenario_file("/nonexistent/x.scn");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kIo);
    }
}
