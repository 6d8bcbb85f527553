#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "svnet/attribute_expression.hpp"
#include "svnet/common.hpp"

#include "oracles.hpp"

using namespace svn;

namespace {

InvestorAttributes attrs_of(const std::string& id, SectorCode sector,
                            const std::string& location = "Helsinki",
                            Gender gender = Gender::male,
                            const std::string& decade = "1960") {
    return {id, sector, location, gender, decade};
}

// one planted institutional cluster inside a household-dominated network
struct PlantedFixture {
    ClusterSet clusters;
    std::vector<InvestorAttributes> attrs;
};

PlantedFixture planted_sector_fixture() {
    PlantedFixture f;
    f.clusters.network_id = "S:Y1";
    std::vector<std::string> institutional, rest1, rest2;
    for (int i = 0; i < 10; ++i) {
        const std::string id = "f" + std::to_string(i);
        institutional.push_back(id);
        // 9 of 10 financial, one household
        f.attrs.push_back(attrs_of(id, i < 9 ? SectorCode::financial_insurance
                                             : SectorCode::households));
    }
    for (int i = 0; i < 45; ++i) {
        const std::string id = "h" + std::to_string(i);
        (i < 25 ? rest1 : rest2).push_back(id);
        // one stray financial in the background keeps the base rate near 10%
        f.attrs.push_back(attrs_of(id, i == 0 ? SectorCode::financial_insurance
                                              : SectorCode::households));
    }
    for (auto* c : {&institutional, &rest1, &rest2}) std::sort(c->begin(), c->end());
    f.clusters.clusters = {institutional, rest1, rest2};
    return f;
}

}  // namespace

TEST_CASE("overexpression tail base cases") {
    CHECK(overexpression_pvalue(100, 10, 20, 0) == 1.0);
    CHECK(overexpression_pvalue(20, 5, 5, 5) ==
          doctest::Approx(1.0 / 15504.0).epsilon(1e-12));
    // the cluster is the whole network: any value is trivially saturated
    CHECK(overexpression_pvalue(50, 50, 20, 20) == 1.0);
    CHECK_THROWS_AS(overexpression_pvalue(10, 5, 5, 6), DataError);
}

TEST_CASE("underexpression tail base cases") {
    CHECK(underexpression_pvalue(100, 10, 20, 10) == 1.0);  // full support
    CHECK(underexpression_pvalue(20, 5, 15, 0) ==
          doctest::Approx(1.0 / 15504.0).epsilon(1e-12));
}

TEST_CASE("tail complementarity holds exactly") {
    Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.below(200));
        const std::int64_t nc = 1 + static_cast<std::int64_t>(rng.below(n));
        const std::int64_t nq = static_cast<std::int64_t>(rng.below(n + 1));
        const std::int64_t lo = std::max<std::int64_t>(0, nc + nq - n);
        const std::int64_t hi = std::min(nc, nq);
        if (hi < lo + 1) continue;
        const std::int64_t k = lo + 1 + static_cast<std::int64_t>(rng.below(hi - lo));
        const double over = overexpression_pvalue(n, nc, nq, k);
        const double under = underexpression_pvalue(n, nc, nq, k - 1);
        CHECK(over + under == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("planted sector cluster is flagged in both directions") {
    auto f = planted_sector_fixture();
    ExpressionProfile profile = profile_network(f.clusters, f.attrs, {});

    // family sizes: 3 clusters x distinct values present
    std::set<std::string> values;
    for (const auto& a : f.attrs) {
        values.insert(std::string(to_string(a.sector)));
        values.insert(a.location);
        values.insert(std::string(to_string(a.gender)));
        values.insert(a.birth_decade);
    }
    CHECK(profile.n_tests_per_direction == 3 * values.size());
    CHECK(profile.tests.size() == 2 * profile.n_tests_per_direction);

    bool fin_over = false, house_under = false;
    for (const auto& t : profile.tests) {
        if (!t.validated || t.cluster != 0) continue;
        if (t.direction == Direction::over && t.attr_value == "FinancialInsurance")
            fin_over = true;
        if (t.direction == Direction::under && t.attr_value == "Households")
            house_under = true;
    }
    CHECK(fin_over);
    CHECK(house_under);
}

TEST_CASE("uniform attributes never validate") {
    ClusterSet cs;
    cs.network_id = "S:Y1";
    std::vector<InvestorAttributes> attrs;
    std::vector<std::string> c1, c2;
    for (int i = 0; i < 20; ++i) {
        const std::string id = "i" + std::to_string(i);
        (i < 10 ? c1 : c2).push_back(id);
        attrs.push_back(attrs_of(id, SectorCode::households));
    }
    std::sort(c1.begin(), c1.end());
    std::sort(c2.begin(), c2.end());
    cs.clusters = {c1, c2};
    ExpressionProfile profile = profile_network(cs, attrs, {});
    for (const auto& t : profile.tests) CHECK_FALSE(t.validated);
}

TEST_CASE("no value validates in both directions within one run") {
    auto f = planted_sector_fixture();
    ExpressionProfile profile = profile_network(f.clusters, f.attrs, {});
    std::set<std::tuple<std::uint32_t, AttrClass, std::string, Direction>> seen;
    for (const auto& t : profile.tests)
        if (t.validated) seen.insert({t.cluster, t.attr_class, t.attr_value, t.direction});
    for (const auto& [cluster, cls, value, dir] : seen) {
        const Direction other = dir == Direction::over ? Direction::under : Direction::over;
        CHECK_FALSE(seen.count({cluster, cls, value, other}));
    }
}

TEST_CASE("missing attribute record raises an error") {
    ClusterSet cs;
    cs.network_id = "S:Y1";
    cs.clusters = {{"known", "unknown_investor"}};
    std::vector<InvestorAttributes> attrs = {attrs_of("known", SectorCode::households)};
    CHECK_THROWS_AS(profile_network(cs, attrs, FdrConfig{}), DataError);
}

TEST_CASE("sentinel values are testable attribute values") {
    ClusterSet cs;
    cs.network_id = "S:Y1";
    std::vector<InvestorAttributes> attrs;
    std::vector<std::string> noage, rest;
    for (int i = 0; i < 8; ++i) {
        const std::string id = "n" + std::to_string(i);
        noage.push_back(id);
        attrs.push_back({id, SectorCode::non_profit, "Helsinki", Gender::no_gender, "NoAge"});
    }
    for (int i = 0; i < 40; ++i) {
        const std::string id = "r" + std::to_string(i);
        rest.push_back(id);
        attrs.push_back(attrs_of(id, SectorCode::households));
    }
    std::sort(noage.begin(), noage.end());
    std::sort(rest.begin(), rest.end());
    cs.clusters = {noage, rest};
    ExpressionProfile profile = profile_network(cs, attrs, {});
    bool noage_over = false;
    for (const auto& t : profile.tests)
        if (t.validated && t.direction == Direction::over && t.attr_value == "NoAge" &&
            t.cluster == 0)
            noage_over = true;
    CHECK(noage_over);
}

TEST_CASE("similar expressed clusters merge into one group") {
    // two networks, each with one cluster overexpressing GeneralGovernment
    auto members = std::vector<std::string>{"g0", "g1", "g2", "g3", "g4"};
    std::vector<InvestorAttributes> attrs;
    for (const auto& id : members) attrs.push_back(attrs_of(id, SectorCode::general_government));
    for (int i = 0; i < 40; ++i)
        attrs.push_back(attrs_of("h" + std::to_string(i), SectorCode::households));

    auto make_set = [&](const std::string& id) {
        ClusterSet cs;
        cs.network_id = id;
        std::vector<std::string> rest;
        for (int i = 0; i < 40; ++i) rest.push_back("h" + std::to_string(i));
        std::sort(rest.begin(), rest.end());
        cs.clusters = {members, rest};
        return cs;
    };
    ClusterSet a = make_set("A:Y1");
    ClusterSet c = make_set("B:Y1");

    std::vector<ExpressionProfile> profiles = {profile_network(a, attrs, {}),
                                               profile_network(c, attrs, {})};
    std::vector<ClusterSet> year = {a, c};
    std::vector<SimilarityResult> sims = {cross_security(year, {})};

    auto groups = group_expressed_clusters(sims, profiles, Direction::over);
    REQUIRE(!groups.empty());
    // locate the group holding A:Y1 cluster 0 (the planted one)
    const ExpressionGroup* found = nullptr;
    for (const auto& group : groups)
        for (const auto& member : group.members)
            if (member.network_id == "A:Y1" && member.cluster == 0) found = &group;
    REQUIRE(found != nullptr);
    const auto& g = *found;
    CHECK(g.clusters == 2);
    CHECK(g.securities == 2);
    bool gg_tally = false;
    for (const auto& tally : g.tallies)
        if (tally.attr_value == "GeneralGovernment") {
            CHECK(tally.securities == 2);
            CHECK(tally.clusters == 2);
            gg_tally = true;
        }
    CHECK(gg_tally);
    CHECK_FALSE(g.spans_years);
}

TEST_CASE("expressed clusters without similarity edges form singleton groups") {
    auto f = planted_sector_fixture();
    std::vector<ExpressionProfile> profiles = {profile_network(f.clusters, f.attrs, {})};
    auto groups = group_expressed_clusters({}, profiles, Direction::over);
    for (const auto& g : groups) CHECK(g.clusters == 1);
    CHECK(!groups.empty());
}

TEST_CASE("cross-year similarity sets the spans_years flag") {
    auto members = std::vector<std::string>{"g0", "g1", "g2", "g3", "g4"};
    std::vector<InvestorAttributes> attrs;
    for (const auto& id : members) attrs.push_back(attrs_of(id, SectorCode::general_government));
    for (int i = 0; i < 30; ++i)
        attrs.push_back(attrs_of("h" + std::to_string(i), SectorCode::households));

    auto make_set = [&](const std::string& id) {
        ClusterSet cs;
        cs.network_id = id;
        std::vector<std::string> rest;
        for (int i = 0; i < 30; ++i) rest.push_back("h" + std::to_string(i));
        std::sort(rest.begin(), rest.end());
        cs.clusters = {members, rest};
        return cs;
    };
    ClusterSet y1 = make_set("S:Y1");
    ClusterSet y2 = make_set("S:Y2");
    std::vector<ExpressionProfile> profiles = {profile_network(y1, attrs, {}),
                                               profile_network(y2, attrs, {})};
    std::vector<SimilarityResult> sims = {persistence(y1, y2, {})};
    auto groups = group_expressed_clusters(sims, profiles, Direction::over);
    REQUIRE(!groups.empty());
    CHECK(groups.front().spans_years);
}

TEST_CASE("expression CSV emits only validated rows in schema order") {
    auto f = planted_sector_fixture();
    ExpressionProfile profile = profile_network(f.clusters, f.attrs, {});
    std::ostringstream out;
    write_expression_csv(profile, out);
    const std::string text = out.str();
    CHECK(text.rfind("security_id,window,cluster_id,attr_class,attr_value,direction,N,N_C,"
                     "N_Q,N_CQ,p_value\n",
                     0) == 0);
    CHECK(text.find("S,Y1,0,sector,FinancialInsurance,over,55,10,10,9,") !=
          std::string::npos);
}
