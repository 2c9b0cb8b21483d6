#include <doctest.h>

#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/infotheory.hpp"

using namespace voter;

TEST_SUITE("infotheory") {
  TEST_CASE("plug-in estimates of fixed tables") {
    PairCounts c{30, 10, 5, 55};
    CHECK(plugin_mutual_information(c) == doctest::Approx(0.3612666954096575).epsilon(1e-12));
    AggregateCounts a(4);
    a.zero = {4, 3, 1, 0};
    a.one = {0, 2, 5, 9};
    CHECK(plugin_mutual_information(a) == doctest::Approx(0.5535088547976783).epsilon(1e-12));
    CHECK(plugin_entropy({5, 5}) == doctest::Approx(1.0));
    CHECK(plugin_entropy({7, 0}) == 0.0);
  }

  TEST_CASE("independent and deterministic tables") {
    CHECK(plugin_mutual_information(PairCounts{25, 25, 25, 25}) == doctest::Approx(0.0));
    bool det = false;
    CHECK(plugin_mutual_information(PairCounts{40, 60, 0, 0}, &det) == 0.0);
    CHECK(det);
    PairCounts copy{50, 0, 0, 50};
    CHECK(plugin_mutual_information(copy) == doctest::Approx(1.0));
    CHECK(plugin_mutual_information(copy) >= 0.0);
  }

  TEST_CASE("noise floor") {
    CHECK(independence_threshold_bits(100000) == doctest::Approx(3.841458820694124 / (2e5 * std::log(2.0))));
  }

  TEST_CASE("sample-based estimators") {
    EnsembleSpec s;
    s.graph = make_line(6);
    s.noise = NoiseResponse(0.05);
    s.forcing = ForcingPlan::single(0);
    s.runs = 4000;
    s.horizon = 12;
    s.retain_times = {8, 9, 10, 11, 12};
    s.record_marginals = false;
    const EnsembleResult r = run_ensemble(s);

    const auto self = delayed_mutual_information(r.samples, 2, 2, 8, 0);
    const PairCounts pc = count_pairs(r.samples, 2, 2, 8, 0);
    CHECK(pc.n01 == 0);
    CHECK(pc.n10 == 0);
    CHECK(self.value_bits == doctest::Approx(plugin_entropy({pc.n00, pc.n11})));

    const auto forced = delayed_mutual_information(r.samples, 0, 3, 8, 2);
    CHECK(forced.deterministic);
    CHECK(forced.value_bits == 0.0);

    const AggregateCounts ac = count_aggregate(r.samples, 1, 8, 1);
    CHECK(ac.zero.size() == 7);
    CHECK(ac.total() == 4000);

    const auto prof = mutual_information_profile(r.samples, 1, 8, 2);
    CHECK(prof.size() == 6);
    for (const auto& p : prof) CHECK(p.j != 1);
    const auto matched = delay_matched_profile(r.samples, 1, 8, 5);
    REQUIRE(matched.size() == 4);
    CHECK(matched[2].j == 4);
    CHECK(matched[2].tau == 3);
    CHECK_THROWS_AS(delayed_mutual_information(r.samples, 1, 2, 8, 7), InvalidArgument);
  }
}
