#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "poolsim/beacon.hpp"
#include "poolsim/incentive.hpp"

#include <cmath>
#include <random>

using namespace poolsim;

namespace {

LedgerState two_player_pool() {
    // operator 1 (stake 20), member 2 (stake 10), pool A
    LedgerState s = genesis_state({{1, 20}, {2, 10}});
    apply_in_place(s, Register{1, "A", ""});
    return s;
}

LedgerState full_pool_30() {
    // pool A holds all 30 units: operator delegates 20, member delegates 10
    LedgerState s = two_player_pool();
    apply_in_place(s, Delegate{1, 20, "A", "op"});
    apply_in_place(s, Delegate{2, 10, "A", "n1"});
    return s;
}

}  // namespace

TEST_CASE("linear model: no delegation earns zero, operators pay cost") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 2, 0};
    CHECK(evaluate_utility(m, 1, s) == doctest::Approx(-2));  // operator, empty pool
    CHECK(evaluate_utility(m, 2, s) == doctest::Approx(0));
}

TEST_CASE("linear model: member holding 10 of a full 30-stake pool earns 30") {
    LedgerState s = full_pool_30();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    CHECK(evaluate_utility(m, 2, s) == doctest::Approx(100.0 * (10.0 / 30.0) * 0.9));
    CHECK(evaluate_utility(m, 2, s) == doctest::Approx(30));
    // operator: margin 10 plus own member share 60
    CHECK(evaluate_utility(m, 1, s) == doctest::Approx(70));
    // pool payments sum to the pool reward
    CHECK(evaluate_utility(m, 1, s) + evaluate_utility(m, 2, s) == doctest::Approx(100));
}

TEST_CASE("table model looks up by state key and errors on a miss") {
    LedgerState s = genesis_state({{1, 10}});
    TableModel t;
    t.entries[{1, state_key(s)}] = 5;
    UtilityModel m = t;
    CHECK(evaluate_utility(m, 1, s) == doctest::Approx(5));
    LedgerState other = apply_transaction(s, PlainMessage{1, "x"});
    CHECK_THROWS_AS(evaluate_utility(m, 1, other), std::out_of_range);
}

TEST_CASE("per-pool margin override via pool params") {
    LedgerState s = genesis_state({{1, 20}, {2, 10}});
    apply_in_place(s, Register{1, "A", "m=0.5"});
    apply_in_place(s, Delegate{2, 10, "A", "n1"});
    UtilityModel m = LinearRewardModel{90, 0.1, 0, 0};
    // T=30, pool reward 90*10/30 = 30, override margin 0.5
    CHECK(evaluate_utility(m, 1, s) == doctest::Approx(15));
    CHECK(evaluate_utility(m, 2, s) == doctest::Approx(15));
}

TEST_CASE("fresh delegation of undelegated stake is strongly incentive consistent") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction d = Delegate{2, 10, "A", "n1"};
    auto r = classify_transaction(m, s, d, {d}, 1);
    CHECK(r.verdict == Classification::STRONGLY_IC);
    CHECK(r.matched_pairs == 1);
    CHECK_FALSE(r.limit_hit);
}

TEST_CASE("plain message is IC but not strongly IC") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction msg = PlainMessage{1, "hello"};
    auto r = classify_transaction(m, s, msg, {msg}, 1);
    CHECK(r.verdict == Classification::IC);
}

TEST_CASE("revoke under positive margin is NOT_IC with the operator dissenting") {
    LedgerState s = two_player_pool();
    apply_in_place(s, Delegate{2, 10, "A", "n1"});
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction rv = Revoke{2, "n1"};
    auto r = classify_transaction(m, s, rv, {rv}, 1);
    CHECK(r.verdict == Classification::NOT_IC);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->player == 1);
    CHECK(r.witness->before > r.witness->after);
}

TEST_CASE("bystander indifference blocks STRONGLY_IC unless participation accrues") {
    LedgerState s = genesis_state({{1, 10}, {2, 10}, {3, 10}});
    apply_in_place(s, Register{1, "A", ""});
    Transaction d = Delegate{2, 10, "A", "n1"};

    UtilityModel base = LinearRewardModel{100, 0.1, 0, 0};
    CHECK(classify_transaction(base, s, d, {d}, 1).verdict == Classification::IC);

    UtilityModel with_part = LinearRewardModel{100, 0.1, 0, 0.6};
    CHECK(classify_transaction(with_part, s, d, {d}, 1).verdict == Classification::STRONGLY_IC);
}

TEST_CASE("node limit truncation reports INDETERMINATE") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction d = Delegate{2, 10, "A", "n1"};
    auto r = classify_transaction(m, s, d, {d}, 1, 1);
    CHECK(r.verdict == Classification::INDETERMINATE);
    CHECK(r.limit_hit);
}

TEST_CASE("a dissent witness found before truncation still wins") {
    LedgerState s = two_player_pool();
    apply_in_place(s, Delegate{2, 10, "A", "n1"});
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction rv = Revoke{2, "n1"};
    std::vector<Transaction> pending = {rv, PlainMessage{1, "a"}, PlainMessage{1, "b"},
                                        PlainMessage{1, "c"}};
    auto r = classify_transaction(m, s, rv, pending, 4, 4);
    CHECK(r.verdict == Classification::NOT_IC);
    CHECK(r.limit_hit);
}

TEST_CASE("a transaction admissible nowhere falls back to IC") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction d = Delegate{2, 10, "Z", "n1"};  // unknown pool
    auto r = classify_transaction(m, s, d, {d}, 2);
    CHECK(r.verdict == Classification::IC);
    CHECK(r.matched_pairs == 0);
}

TEST_CASE("classify validates its inputs") {
    LedgerState s = two_player_pool();
    UtilityModel m = LinearRewardModel{100, 0.1, 0, 0};
    Transaction d = Delegate{2, 10, "A", "n1"};
    CHECK_THROWS_AS(classify_transaction(m, s, d, {d}, 0), std::invalid_argument);
    CHECK_THROWS_AS(classify_transaction(m, s, d, {PlainMessage{1, "x"}}, 1),
                    std::invalid_argument);
}

TEST_CASE("table model matched pairs are order sensitive beyond single steps") {
    LedgerState s = genesis_state({{1, 5}});
    Transaction tx = PlainMessage{1, "x"};
    Transaction a = PlainMessage{1, "y"};

    LedgerState s_a = apply_transaction(s, a);
    LedgerState s_tx = apply_transaction(s, tx);
    LedgerState s_a_tx = apply_transaction(s_a, tx);
    LedgerState s_tx_a = apply_transaction(s_tx, a);

    TableModel t;
    t.entries[{1, state_key(s)}] = 0;
    t.entries[{1, state_key(s_a)}] = 0;
    t.entries[{1, state_key(s_tx)}] = 1;
    t.entries[{1, state_key(s_a_tx)}] = 1;
    t.entries[{1, state_key(s_tx_a)}] = 1;

    SUBCASE("all orderings strictly better: strongly IC") {
        auto r = classify_transaction(UtilityModel{t}, s, tx, {tx, a}, 2);
        CHECK(r.verdict == Classification::STRONGLY_IC);
        CHECK(r.matched_pairs == 3);
    }
    SUBCASE("an early-inclusion ordering that merely ties demotes to IC") {
        t.entries[{1, state_key(s_tx_a)}] = 0;
        auto r = classify_transaction(UtilityModel{t}, s, tx, {tx, a}, 2);
        CHECK(r.verdict == Classification::IC);
    }
    SUBCASE("a hurt single step is NOT_IC") {
        t.entries[{1, state_key(s_a_tx)}] = -1;
        auto r = classify_transaction(UtilityModel{t}, s, tx, {tx, a}, 2);
        CHECK(r.verdict == Classification::NOT_IC);
    }
}

TEST_CASE("incumbency witness under positive margin, none at margin zero") {
    LedgerState s = two_player_pool();
    apply_in_place(s, Delegate{2, 10, "A", "n1"});

    SUBCASE("margin 0.2 yields a revoke witness against the operator") {
        UtilityModel m = LinearRewardModel{100, 0.2, 0, 0};
        auto w = check_incumbency(m, s);
        REQUIRE(w.has_value());
        CHECK(w->operator_id == 1);
        REQUIRE(std::holds_alternative<Revoke>(w->tx));
        CHECK(std::get<Revoke>(w->tx).nonce == "n1");
        CHECK(w->before > w->after);
        // the witness re-evaluates to exactly the reported values
        CHECK(evaluate_utility(m, 1, s) == w->before);
        CHECK(evaluate_utility(m, 1, apply_transaction(s, w->tx)) == w->after);
    }
    SUBCASE("margin 0 and cost 0: operator unaffected, no witness") {
        UtilityModel m = LinearRewardModel{100, 0, 0, 0};
        CHECK_FALSE(check_incumbency(m, s).has_value());
    }
    SUBCASE("dissolved pool earns nothing, no witness") {
        UtilityModel m = LinearRewardModel{100, 0.2, 0, 0};
        dissolve_pool_in_place(s, "A");
        CHECK_FALSE(check_incumbency(m, s).has_value());
    }
}

TEST_CASE("horizon-1 classification agrees with a myopic oracle on random states") {
    std::mt19937_64 rng(20240817);
    UtilityModel m = LinearRewardModel{100, 0.15, 0, 0.3};
    constexpr double eps = 1e-9;

    for (int iter = 0; iter < 300; ++iter) {
        LedgerState s = genesis_state({{1, 20}, {2, 15}, {3, 15}});
        apply_in_place(s, Register{1, "A", ""});
        if (rng() % 2) apply_in_place(s, Register{2, "B", ""});
        if (rng() % 2) apply_in_place(s, Delegate{1, 5 + int64_t(rng() % 10), "A", "a0"});
        if (rng() % 2) apply_in_place(s, Delegate{3, 5 + int64_t(rng() % 10), "A", "a1"});

        std::vector<Transaction> candidates = {
            Delegate{2, 5, "A", "x0"},
            Delegate{3, 50, "A", "big"},  // may exceed stake
            Revoke{3, "a1"},
            Revoke{1, "a0"},
            PlainMessage{2, "m"},
            Delegate{2, 5, "B", "x1"},
        };
        Transaction tx = candidates[rng() % candidates.size()];
        auto r = classify_transaction(m, s, tx, {tx}, 1);

        auto verdict_oracle = [&]() {
            if (!admissible(s, tx).ok) return Classification::IC;
            LedgerState after = apply_transaction(s, tx);
            bool all_strict = true, any_hurt = false;
            for (PlayerId p : {1, 2, 3}) {
                double b = evaluate_utility(m, p, s);
                double a = evaluate_utility(m, p, after);
                if (b > a + eps) any_hurt = true;
                if (!(a > b + eps)) all_strict = false;
            }
            if (any_hurt) return Classification::NOT_IC;
            if (all_strict) return Classification::STRONGLY_IC;
            return Classification::IC;
        };
        CHECK(r.verdict == verdict_oracle());
    }
}

TEST_CASE("pool payments sum to pool rewards across random states") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        LedgerState s = genesis_state({{1, 25}, {2, 25}, {3, 25}, {4, 25}});
        apply_in_place(s, Register{1, "A", ""});
        apply_in_place(s, Register{2, "B", ""});
        int nonce = 0;
        for (PlayerId p : {1, 2, 3, 4}) {
            if (rng() % 3 == 0) continue;
            int64_t amt = 1 + int64_t(rng() % 20);
            std::string pool = (rng() % 2) ? "A" : "B";
            apply_in_place(s, Delegate{p, amt, pool, "n" + std::to_string(nonce++)});
        }
        if (rng() % 4 == 0) dissolve_pool_in_place(s, "B");

        LinearRewardModel lin{100, 0.25, 0, 0};
        UtilityModel m = lin;
        double total = 0;
        for (PlayerId p : {1, 2, 3, 4}) total += evaluate_utility(m, p, s);

        double expected = 0;
        for (const auto& [name, row] : build_pool_table(s)) {
            if (row.dissolved) continue;
            expected += lin.reward * double(row.delegated) / 100.0;
        }
        CHECK(total == doctest::Approx(expected).epsilon(1e-9));
    }
}
