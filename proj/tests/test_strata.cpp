#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "stratopt/errors.hpp"
#include "support/fixtures.hpp"

using namespace stratopt;
using namespace testsupport;

namespace {

// Brute-force pooled moments straight from record values.
void expected_moments(const std::vector<double>& values, double& mean, double& sd) {
    mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / values.size());
}

}  // namespace

TEST_CASE("atomic strata cover the full cross product") {
    const Schema schema{"dom", {"Y1"}, {"X1", "X2"}};
    const auto frame = frame_from_csv(
        "dom,Y1,X1,X2\n"
        "d,1,a,u\nd,2,a,v\nd,3,b,u\nd,4,b,v\n",
        schema);
    const auto build = build_atomic_strata(frame);
    CHECK(build.set.items.size() == 4);
    CHECK(build.set.domains() == 1);
    for (const auto& b : build.set.items) CHECK(b.n == 1);
}

TEST_CASE("atomic stratum pools with population sd") {
    const Schema schema{"dom", {"Y1"}, {"X1", "X2"}};
    const auto frame = frame_from_csv("dom,Y1,X1,X2\nd,2,a,u\nd,4,a,u\n", schema);
    const auto build = build_atomic_strata(frame);
    REQUIRE(build.set.items.size() == 1);
    CHECK(build.set.items[0].n == 2);
    CHECK(build.set.items[0].mean[0] == doctest::Approx(3.0));
    CHECK(build.set.items[0].sd[0] == doctest::Approx(1.0));
}

TEST_CASE("atomic id order follows (domain, auxiliary tuple)") {
    const Schema schema{"dom", {"Y1"}, {"X1"}};
    const auto frame = frame_from_csv("dom,Y1,X1\nd,1,b\nd,2,a\nc,3,z\n", schema);
    const auto build = build_atomic_strata(frame);
    REQUIRE(build.set.items.size() == 3);
    // Domain "c" first, then domain "d" with aux "a" before "b".
    CHECK(build.set.items[0].domain == 0);
    CHECK(build.set.items[1].mean[0] == doctest::Approx(2.0));
    CHECK(build.set.items[2].mean[0] == doctest::Approx(1.0));
    CHECK(build.set.items[1].id == 0);
    CHECK(build.set.items[2].id == 1);
}

TEST_CASE("atomic mode requires auxiliaries") {
    const Schema schema{"dom", {"Y1"}, {}};
    const auto frame = frame_from_csv("dom,Y1\nd,1\n", schema);
    CHECK_THROWS_AS(build_atomic_strata(frame), ConfigError);
}

TEST_CASE("atomic membership flattening recovers every record once") {
    Rng rng(5);
    std::string csv = "dom,Y1,X1,X2\n";
    for (int i = 0; i < 60; ++i) {
        csv += "d" + std::to_string(rng.index(3)) + "," + std::to_string(rng.uniform(0, 10)) + ",x" +
               std::to_string(rng.index(4)) + ",y" + std::to_string(rng.index(3)) + "\n";
    }
    const auto frame = frame_from_csv(csv, Schema{"dom", {"Y1"}, {"X1", "X2"}});
    const auto build = build_atomic_strata(frame);
    std::vector<int> seen(frame.records.size(), 0);
    for (const auto& members : build.members) {
        for (int r : members) seen[r]++;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    // Partition property: stratum counts add up to the record count.
    std::int64_t total = 0;
    for (const auto& b : build.set.items) total += b.n;
    CHECK(total == static_cast<std::int64_t>(frame.records.size()));
}

TEST_CASE("continuous strata are one per record") {
    const Schema schema{"dom", {"Y1", "Y2"}, {}};
    const auto frame = frame_from_csv(
        "dom,Y1,Y2\nd,7.0,2.5\nd,1,1\nd,2,2\ne,3,3\ne,4,4\n", schema);
    const auto build = build_continuous_strata(frame);
    CHECK(build.set.items.size() == 5);
    const auto& first = build.set.items[0];
    CHECK(first.n == 1);
    CHECK(first.mean[0] == doctest::Approx(7.0));
    CHECK(first.mean[1] == doctest::Approx(2.5));
    CHECK(first.sd[0] == 0.0);
    CHECK(first.sd[1] == 0.0);
}

TEST_CASE("summarize merges two singletons exactly") {
    const auto set = make_strata({{{1, {2.0}, {0.0}}, {1, {4.0}, {0.0}}}}, 1);
    Stratification s;
    s.labels = {{1, 1}};
    s.h = {1};
    const auto summaries = summarize(set, s, 0);
    REQUIRE(summaries.size() == 1);
    CHECK(summaries[0].n == 2);
    CHECK(summaries[0].mean[0] == doctest::Approx(3.0));
    CHECK(summaries[0].sd[0] == doctest::Approx(1.0));
}

TEST_CASE("summarize identity partition returns the basic strata") {
    Rng rng(9);
    const auto set = random_strata(rng, 2, 6, 2);
    const auto identity = Stratification::identity(set);
    for (int d = 0; d < set.domains(); ++d) {
        const auto summaries = summarize(set, identity, d);
        const auto items = set.domain_items(d);
        REQUIRE(summaries.size() == items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            CHECK(summaries[i].n == items[i].n);
            for (int g = 0; g < 2; ++g) {
                CHECK(summaries[i].mean[g] == doctest::Approx(items[i].mean[g]).epsilon(1e-12));
                CHECK(summaries[i].sd[g] == doctest::Approx(items[i].sd[g]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("summarize merged strata equal brute-force recomputation from records") {
    // 10 basic strata built from known record pools; the merged summary must
    // match pooling the flattened records directly.
    Rng rng(31);
    std::vector<std::vector<double>> pools(10);
    std::vector<std::vector<RawStratum>> raw(1);
    for (auto& pool : pools) {
        const int n = 1 + rng.index(8);
        for (int i = 0; i < n; ++i) pool.push_back(rng.uniform(0.0, 50.0));
        double mean, sd;
        expected_moments(pool, mean, sd);
        raw[0].push_back({static_cast<std::int64_t>(n), {mean}, {sd}});
    }
    const auto set = make_strata(raw, 1);

    Stratification s;
    s.labels = {{1, 2, 1, 2, 1, 2, 1, 1, 2, 1}};
    s.h = {2};
    const auto summaries = summarize(set, s, 0);

    std::vector<double> merged1, merged2;
    for (int i = 0; i < 10; ++i) {
        auto& dst = s.labels[0][i] == 1 ? merged1 : merged2;
        dst.insert(dst.end(), pools[i].begin(), pools[i].end());
    }
    double mean, sd;
    expected_moments(merged1, mean, sd);
    CHECK(summaries[0].n == static_cast<std::int64_t>(merged1.size()));
    CHECK(summaries[0].mean[0] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(summaries[0].sd[0] == doctest::Approx(sd).epsilon(1e-10));
    expected_moments(merged2, mean, sd);
    CHECK(summaries[1].mean[0] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(summaries[1].sd[0] == doctest::Approx(sd).epsilon(1e-10));
}

TEST_CASE("summarize is order-independent within 1e-12") {
    Rng rng(17);
    const auto set = random_strata(rng, 1, 12, 2);
    Stratification s = random_stratification(rng, set, 4);

    // Permute the basic strata (and labels alongside) and rebuild.
    std::vector<int> perm(12);
    for (int i = 0; i < 12; ++i) perm[i] = i;
    for (int i = 11; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

    StrataSet permuted = set;
    Stratification sp = s;
    for (int i = 0; i < 12; ++i) {
        permuted.items[i] = set.items[perm[i]];
        sp.labels[0][i] = s.labels[0][perm[i]];
    }
    const auto a = summarize(set, s, 0);
    const auto b = summarize(permuted, sp, 0);
    REQUIRE(a.size() == b.size());
    for (std::size_t h = 0; h < a.size(); ++h) {
        CHECK(a[h].n == b[h].n);
        for (int g = 0; g < 2; ++g) {
            CHECK(std::abs(a[h].mean[g] - b[h].mean[g]) < 1e-12 * std::max(1.0, std::abs(a[h].mean[g])));
            CHECK(std::abs(a[h].sd[g] - b[h].sd[g]) < 1e-12 * std::max(1.0, a[h].sd[g]));
        }
    }
}

TEST_CASE("partition property: stratum counts preserve domain totals") {
    Rng rng(23);
    const auto set = random_strata(rng, 3, 8, 1);
    const auto s = random_stratification(rng, set, 3);
    for (int d = 0; d < set.domains(); ++d) {
        std::int64_t from_basic = 0;
        for (const auto& b : set.domain_items(d)) from_basic += b.n;
        std::int64_t from_summaries = 0;
        for (const auto& sum : summarize(set, s, d)) from_summaries += sum.n;
        CHECK(from_basic == from_summaries);
    }
}

TEST_CASE("summarize rejects empty labels") {
    const auto set = make_strata({{{1, {1.0}, {0.0}}, {1, {2.0}, {0.0}}}}, 1);
    Stratification s;
    s.labels = {{1, 1}};
    s.h = {2};  // label 2 never used
    CHECK_THROWS_AS(summarize(set, s, 0), InternalError);
}

TEST_CASE("standardize_features matches the two-point z-score") {
    const auto set = make_strata({{{1, {1.0}, {0.0}}, {1, {3.0}, {0.0}}}}, 1);
    const auto m = standardize_features(set, 0);
    REQUIRE(m.rows == 2);
    CHECK(m.data[0] == doctest::Approx(-0.7071067812));
    CHECK(m.data[1] == doctest::Approx(0.7071067812));
}

TEST_CASE("standardize_features zeroes constant columns") {
    const auto set = make_strata({{{1, {5.0, 1.0}, {0.0, 0.0}},
                                   {1, {5.0, 2.0}, {0.0, 0.0}},
                                   {1, {5.0, 3.0}, {0.0, 0.0}}}},
                                 2);
    const auto m = standardize_features(set, 0);
    for (int i = 0; i < 3; ++i) CHECK(m.row(i)[0] == 0.0);
}

TEST_CASE("standardized columns have zero mean") {
    Rng rng(41);
    const auto set = random_strata(rng, 1, 20, 3);
    const auto m = standardize_features(set, 0);
    for (int j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (int i = 0; i < m.rows; ++i) mean += m.row(i)[j];
        CHECK(std::abs(mean / m.rows) < 1e-12);
    }
}

TEST_CASE("single basic stratum is a degenerate domain") {
    const auto set = make_strata({{{3, {1.0}, {0.5}}}}, 1);
    CHECK_THROWS_AS(standardize_features(set, 0), ConfigError);
}

TEST_CASE("accumulator add/remove are inverse") {
    Rng rng(12);
    const auto set = random_strata(rng, 1, 5, 2);
    StratumAccum acc(2);
    for (const auto& b : set.domain_items(0)) acc.add(b);
    const auto before = acc.to_summary();
    const auto& extra = set.items[2];
    acc.add(extra);
    acc.remove(extra);
    const auto after = acc.to_summary();
    CHECK(before.n == after.n);
    for (int g = 0; g < 2; ++g) {
        CHECK(before.mean[g] == doctest::Approx(after.mean[g]).epsilon(1e-12));
        CHECK(before.sd[g] == doctest::Approx(after.sd[g]).epsilon(1e-12));
    }
}
