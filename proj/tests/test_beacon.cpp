#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "poolsim/beacon.hpp"
#include "poolsim/stats.hpp"

using namespace poolsim;

TEST_CASE("draw_randomness is deterministic in (seed, round)") {
    Beacon b{0x1234};
    CHECK(draw_randomness(b, 5) == draw_randomness(b, 5));
    CHECK(draw_randomness(b, 5) != draw_randomness(b, 6));
    CHECK(draw_randomness(Beacon{1}, 5) != draw_randomness(Beacon{2}, 5));
    CHECK_THROWS_AS(draw_randomness(b, -1), std::invalid_argument);
}

TEST_CASE("distinct rounds yield distinct 64-bit values") {
    Beacon b{42};
    std::set<uint64_t> seen;
    for (int64_t r = 0; r < 10; ++r) seen.insert(draw_randomness(b, r));
    CHECK(seen.size() == 10);
}

TEST_CASE("select_pool_for_audit follows rho mod k") {
    std::vector<PoolName> pools{"A", "B", "C"};
    CHECK(select_pool_for_audit(7, pools) == "B");
    CHECK(select_pool_for_audit(0, pools) == "A");
    CHECK(select_pool_for_audit(5, {"solo"}) == "solo");
    CHECK_THROWS_AS(select_pool_for_audit(1, {}), std::invalid_argument);
}

TEST_CASE("selection frequencies stay within the binomial envelope") {
    const int k = 10;
    const int draws = 100000;
    std::vector<PoolName> pools;
    for (int i = 0; i < k; ++i) pools.push_back("P" + std::to_string(i));
    std::vector<uint64_t> counts(k, 0);
    Beacon b{20240901};
    for (int64_t r = 0; r < draws; ++r) {
        uint64_t rho = draw_randomness(b, r);
        counts[rho % k]++;
    }
    const double margin = 3.0 * std::sqrt(draws * 0.1 * 0.9); // ~284.6
    for (int i = 0; i < k; ++i) {
        CHECK(std::fabs(static_cast<double>(counts[i]) - 10000.0) <= margin);
    }
    auto chi = chi_square_uniform(counts);
    CHECK(chi.p_value > 0.01);
}

TEST_CASE("gamma_q matches externally computed reference values") {
    // Reference points computed with an independent implementation of the
    // regularized upper incomplete gamma function.
    CHECK(gamma_q(4.5, 21.665994333461924 / 2) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(gamma_q(4.5, 2.5) == doctest::Approx(0.8343082601934075).epsilon(1e-9));
    CHECK(gamma_q(2.0, 5.0) == doctest::Approx(0.04042768199451279).epsilon(1e-9));
    CHECK(gamma_q(0.5, 3.841458820694124 / 2) == doctest::Approx(0.05).epsilon(1e-7));
}

TEST_CASE("dissolution preserves total stake") {
    LedgerState s = genesis_state({{1, 10}, {2, 20}});
    apply_in_place(s, Register{1, "A", "p"});
    apply_in_place(s, Delegate{1, 10, "A", "n1"});
    apply_in_place(s, Delegate{2, 20, "A", "n2"});
    LedgerState d = dissolve_pool(s, "A");
    Stake total = 0;
    for (const auto& [id, v] : d.stake) total += v;
    CHECK(total == 30);
}
