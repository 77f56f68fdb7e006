#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "poolsim/beacon.hpp"
#include "poolsim/sim.hpp"

#include <set>

using namespace poolsim;

namespace {

constexpr Util U = kUtilScale;

// Single audited pool "A" (operator 0, members 2 and 3), a pre-staged rebel
// registration of pool "B" by player 1, and the g2-shaped utility table.
std::string mechanism_json(const std::string& adaptive) {
    return std::string(R"({
  "version": 1,
  "players": {"0": 10, "1": 10, "2": 10, "3": 10},
  "genesis": [
    {"kind": "register", "author": 0, "pool": "A", "params": ""},
    {"kind": "delegate", "author": 0, "amount": 10, "pool": "A", "nonce": "g0"},
    {"kind": "delegate", "author": 2, "amount": 10, "pool": "A", "nonce": "g2"},
    {"kind": "delegate", "author": 3, "amount": 10, "pool": "A", "nonce": "g3"}
  ],
  "game_table": {
    "stakes": {"1": 10, "2": 10, "3": 10},
    "leader_stake": 10,
    "member_utility": {
      "1": {"40": 3, "30": 2.5, "20": 2},
      "2": {"40": 3, "30": 2.5, "20": 2},
      "3": {"40": 3, "30": 2.5, "20": 2}
    },
    "member_revolution": {"1": 7, "2": 7, "3": 7},
    "leader_utility": {"40": 12, "30": 8, "20": 4, "10": 1},
    "leader_revolution": 7
  },
  "pending": [
    {"kind": "compound",
     "delegate": {"author": 1, "amount": 10, "pool": "B", "nonce": "r1"},
     "register": {"author": 1, "pool": "B", "params": "rebel"}}
  ],
  "operators": {"A": {"policy": "rational", "action": "CENSOR", "adaptive": ")") +
           adaptive + R"("}},
  "members": {"2": {"policy": "X"}, "3": {"policy": "X"}},
  "rebel_pool": "B",
  "producer": "audited-leader",
  "audit": true,
  "rounds": 2
})";
}

Transaction rebel_compound() {
    return Compound{Delegate{1, 10, "B", "r1"}, std::nullopt, Register{1, "B", "rebel"}};
}

// Two incumbent pools on the linear model plus a cheaper competitor filing.
std::string static_cartel_json(const std::string& competitor_params,
                               bool with_competitor = true) {
    std::string pending = with_competitor
                              ? std::string(R"([{"kind": "register", "author": 5, "pool": "C",
                                   "params": ")") + competitor_params + R"("}])"
                              : "[]";
    return std::string(R"({
  "version": 1,
  "players": {"1": 10, "2": 10, "3": 10, "4": 10, "5": 0},
  "genesis": [
    {"kind": "register", "author": 1, "pool": "A", "params": ""},
    {"kind": "register", "author": 2, "pool": "B", "params": ""},
    {"kind": "delegate", "author": 1, "amount": 10, "pool": "A", "nonce": "g1"},
    {"kind": "delegate", "author": 2, "amount": 10, "pool": "B", "nonce": "g2"},
    {"kind": "delegate", "author": 3, "amount": 10, "pool": "A", "nonce": "g3"},
    {"kind": "delegate", "author": 4, "amount": 10, "pool": "B", "nonce": "g4"}
  ],
  "utility": {"model": "linear", "R": 100, "margin": 0.2, "cost": 1, "participation": 0},
  "pending": )") +
           pending + R"(,
  "audit": false
})";
}

// Ten pools A..J run by players 1..10; outside players 11..13 delegate in and
// player 11 also files an overpriced pool that only hurts its own author.
std::string experiment_json() {
    std::string genesis = "[";
    for (int i = 0; i < 10; ++i) {
        const char pool = static_cast<char>('A' + i);
        if (i) genesis += ",";
        genesis += "{\"kind\": \"register\", \"author\": " + std::to_string(i + 1) +
                   ", \"pool\": \"" + pool + "\", \"params\": \"\"},";
        genesis += "{\"kind\": \"delegate\", \"author\": " + std::to_string(i + 1) +
                   ", \"amount\": 10, \"pool\": \"" + pool + "\", \"nonce\": \"g" +
                   std::to_string(i + 1) + "\"}";
    }
    genesis += "]";
    std::string players = "{";
    for (int i = 1; i <= 10; ++i) players += "\"" + std::to_string(i) + "\": 20,";
    players += "\"11\": 10, \"12\": 10, \"13\": 10}";
    return std::string(R"({
  "version": 1,
  "players": )") +
           players + R"(,
  "genesis": )" + genesis +
           R"(,
  "utility": {"model": "linear", "R": 100, "margin": 0.1, "cost": 0.5, "participation": 2},
  "pending": [
    {"kind": "delegate", "author": 11, "amount": 10, "pool": "D", "nonce": "p11"},
    {"kind": "delegate", "author": 12, "amount": 10, "pool": "E", "nonce": "p12"},
    {"kind": "delegate", "author": 13, "amount": 10, "pool": "F", "nonce": "p13"},
    {"kind": "register", "author": 11, "pool": "K", "params": "m=0.9,c=5"}
  ],
  "liveness_u": 5,
  "byzantine_threshold": 0.5,
  "producer": "round-robin"
})";
}

void check_ledger_invariants(const LedgerState& st, const std::map<PlayerId, Stake>& players) {
    std::map<PlayerId, Stake> active;
    for (const auto& [nonce, rec] : st.delegations) {
        if (!rec.active) continue;
        auto pit = st.pools.find(rec.pool);
        REQUIRE(pit != st.pools.end());
        CHECK_FALSE(pit->second.dissolved);
        active[rec.author] += rec.amount;
    }
    for (const auto& [id, stake] : players) {
        CHECK(active[id] <= stake);
        CHECK(active[id] + undelegated_stake(st, id) == stake);
    }
}

}  // namespace

TEST_CASE("zero rounds produce an empty trace") {
    const Scenario s = parse_scenario_text(mechanism_json("Y"));
    const SimTrace t = run_rounds(s, 0, 7);
    CHECK(t.rounds.empty());
    CHECK(t.submissions.empty());
    CHECK_FALSE(t.revolution);
    REQUIRE(t.cumulative.size() == 4);
    for (const auto& [id, v] : t.cumulative) CHECK(v == 0);
}

TEST_CASE("audited leader holding out one round is overthrown in the next") {
    const Scenario s = parse_scenario_text(mechanism_json("Y"));
    const SimTrace t = run_rounds(s, 2, 1);
    REQUIRE(t.rounds.size() == 2);

    const TraceRound& r1 = t.rounds[0];
    CHECK(r1.audited == "A");
    CHECK(r1.producer == 0);
    REQUIRE(r1.decisions.size() == 4);
    const std::string rebel_id = transaction_id(rebel_compound());
    CHECK(r1.decisions[0].tx_id == rebel_id);
    CHECK_FALSE(r1.decisions[0].applied);
    for (std::size_t i = 1; i < 4; ++i) CHECK(r1.decisions[i].applied);
    CHECK(r1.utilities.at(0) == 8 * U);
    CHECK(r1.utilities.at(1) == 0);
    CHECK(r1.utilities.at(2) == 5 * U / 2);
    CHECK(r1.utilities.at(3) == 5 * U / 2);
    CHECK_FALSE(r1.pool_table.count("B"));
    CHECK(r1.pool_table.at("A").delegated == 30);

    const TraceRound& r2 = t.rounds[1];
    CHECK(r2.audited == "A");
    REQUIRE(!r2.decisions.empty());
    CHECK(r2.decisions[0].tx_id == rebel_id);
    CHECK(r2.decisions[0].applied);
    for (PlayerId id : {0, 1, 2, 3}) CHECK(r2.utilities.at(id) == 7 * U);
    CHECK(r2.pool_table.at("B").delegated == 30);
    CHECK(r2.pool_table.at("A").delegated == 10);

    CHECK(t.revolution);
    CHECK(t.cumulative.at(0) == 15 * U);
    CHECK(t.cumulative.at(1) == 7 * U);
    CHECK(t.cumulative.at(2) == 19 * U / 2);
    CHECK(t.cumulative.at(3) == 19 * U / 2);
    CHECK(t.submissions.size() == 7);

    CHECK_FALSE(liveness_monitor(t, rebel_id, 1));
    CHECK(liveness_monitor(t, rebel_id, 2));
    CHECK_THROWS_AS(liveness_monitor(t, "no-such-tx", 3), std::invalid_argument);
}

TEST_CASE("an operator that censors forever keeps the lineup unchanged") {
    const Scenario s = parse_scenario_text(mechanism_json("ALWAYS_CENSOR"));
    const SimTrace t = run_rounds(s, 2, 1);
    REQUIRE(t.rounds.size() == 2);

    CHECK_FALSE(t.revolution);
    for (const TraceRound& r : t.rounds) CHECK_FALSE(r.pool_table.count("B"));
    CHECK_FALSE(t.final_state.pools.count("B"));

    // Round 2: rebel censored again; the two follower delegates to the still
    // unregistered pool are inadmissible and stay pending without a decision.
    const TraceRound& r2 = t.rounds[1];
    REQUIRE(r2.decisions.size() == 2);
    CHECK_FALSE(r2.decisions[0].applied);
    CHECK(r2.decisions[1].applied);
    CHECK(r2.utilities.at(0) == 1 * U);
    CHECK(r2.utilities.at(2) == 0);
    CHECK(t.cumulative.at(0) == 9 * U);

    int unapplied = 0;
    for (const SubmissionRecord& sub : t.submissions)
        if (sub.applied_round < 0) ++unapplied;
    CHECK(unapplied == 3);  // the rebel compound and both follower delegates
}

TEST_CASE("cartel check finds the profitable deviation under audits") {
    const Scenario s = parse_scenario_text(mechanism_json("ALWAYS_CENSOR"));
    const CartelReport rep = cartel_equilibrium_check(s);
    CHECK(rep.mechanism);
    CHECK(rep.precondition_ok);
    CHECK(rep.verdict == Verdict::COUNTEREXAMPLE);
    REQUIRE(rep.deviations.size() == 1);
    CHECK(rep.deviations[0].pool == "A");
    CHECK(rep.deviations[0].operator_id == 0);
    CHECK(rep.deviations[0].base == 9 * U);
    CHECK(rep.deviations[0].deviated == 15 * U);
    CHECK(rep.deviations[0].gain == 6 * U);
}

TEST_CASE("static cartel check confirms censorship without the mechanism") {
    const Scenario s = parse_scenario_text(static_cartel_json("m=0.05,c=0"));
    const CartelReport rep = cartel_equilibrium_check(s);
    CHECK_FALSE(rep.mechanism);
    CHECK(rep.precondition_ok);
    CHECK(rep.verdict == Verdict::CONFIRMED);
    REQUIRE(rep.deviations.size() == 2);
    for (const CartelDeviation& d : rep.deviations) {
        CHECK(d.base == 29 * U);
        CHECK(d.deviated == 24 * U);
        CHECK(d.gain == -5 * U);
    }
}

TEST_CASE("static cartel check refuses a competitor that hurts nobody") {
    const Scenario s = parse_scenario_text(static_cartel_json("m=0.2"));
    const CartelReport rep = cartel_equilibrium_check(s);
    CHECK(rep.verdict == Verdict::HYPOTHESIS_FAILURE);
    CHECK_FALSE(rep.precondition_ok);
    CHECK(rep.deviations.empty());
}

TEST_CASE("cartel check refuses when no competitor registration is pending") {
    const Scenario s = parse_scenario_text(static_cartel_json("", false));
    const CartelReport rep = cartel_equilibrium_check(s);
    CHECK(rep.verdict == Verdict::HYPOTHESIS_FAILURE);
    CHECK(rep.detail == "no pending competitor registration");
}

TEST_CASE("liveness window counts rounds from submission to application") {
    const Scenario s = parse_scenario_text(R"({
  "version": 1,
  "players": {"1": 10, "9": 10},
  "genesis": [
    {"kind": "register", "author": 1, "pool": "P", "params": ""},
    {"kind": "delegate", "author": 1, "amount": 10, "pool": "P", "nonce": "g1"}
  ],
  "operators": {"P": {"policy": "scripted",
                      "script": ["CENSOR", "CENSOR", "CENSOR", "NOTCENSOR"]}},
  "pending": [{"kind": "register", "author": 9, "pool": "Q", "params": ""}],
  "audit": false
})");
    const SimTrace t = run_rounds(s, 5, 2);
    const std::string id = transaction_id(Register{9, "Q", ""});
    REQUIRE(t.submissions.size() == 1);
    CHECK(t.submissions[0].submitted_round == 1);
    CHECK(t.submissions[0].applied_round == 4);
    CHECK_FALSE(liveness_monitor(t, id, 3));
    CHECK(liveness_monitor(t, id, 4));
    CHECK(t.revolution);
}

TEST_CASE("round robin rotates producers over the sorted pools") {
    const Scenario s = parse_scenario_text(R"({
  "version": 1,
  "players": {"1": 10, "2": 10},
  "genesis": [
    {"kind": "register", "author": 1, "pool": "A", "params": ""},
    {"kind": "register", "author": 2, "pool": "B", "params": ""},
    {"kind": "delegate", "author": 1, "amount": 10, "pool": "A", "nonce": "g1"},
    {"kind": "delegate", "author": 2, "amount": 10, "pool": "B", "nonce": "g2"}
  ],
  "audit": false
})");
    const uint64_t seed = 11;
    const SimTrace t = run_rounds(s, 4, seed);
    REQUIRE(t.rounds.size() == 4);
    const Beacon b{seed};
    for (int i = 0; i < 4; ++i) {
        CHECK(t.rounds[i].rho == draw_randomness(b, i));
        CHECK(t.rounds[i].audited.empty());
    }
    CHECK(t.rounds[0].producer == 1);
    CHECK(t.rounds[1].producer == 2);
    CHECK(t.rounds[2].producer == 1);
    CHECK(t.rounds[3].producer == 2);
}

TEST_CASE("audit churn preserves stake accounting") {
    const Scenario s = parse_scenario_text(R"({
  "version": 1,
  "players": {"1": 10, "2": 10, "3": 10, "4": 10, "5": 10},
  "genesis": [
    {"kind": "register", "author": 1, "pool": "A", "params": ""},
    {"kind": "register", "author": 2, "pool": "B", "params": ""},
    {"kind": "delegate", "author": 1, "amount": 10, "pool": "A", "nonce": "g1"},
    {"kind": "delegate", "author": 2, "amount": 10, "pool": "B", "nonce": "g2"},
    {"kind": "delegate", "author": 3, "amount": 10, "pool": "A", "nonce": "g3"},
    {"kind": "delegate", "author": 4, "amount": 10, "pool": "B", "nonce": "g4"}
  ],
  "operators": {
    "A": {"policy": "rational", "action": "NOTCENSOR"},
    "B": {"policy": "byzantine", "censors": "registrations"}
  },
  "members": {"3": {"policy": "X"}, "4": {"policy": "X"}, "5": {"policy": "ALWAYS_REBEL"}},
  "rebel_pool": "R",
  "producer": "round-robin",
  "audit": true
})");
    const SimTrace t = run_rounds(s, 6, 3);
    REQUIRE(t.rounds.size() == 6);
    check_ledger_invariants(t.final_state, s.players);
    Stake total = 0;
    for (const auto& [id, st] : s.players) total += st;
    for (const TraceRound& r : t.rounds) {
        Stake delegated = 0;
        for (const auto& [pool, row] : r.pool_table) delegated += row.delegated;
        CHECK(delegated <= total);
    }
    std::set<std::string> ids;
    for (const SubmissionRecord& sub : t.submissions) CHECK(ids.insert(sub.tx_id).second);
}

TEST_CASE("identical runs serialize identically") {
    const Scenario s = parse_scenario_text(mechanism_json("Y"));
    const SimTrace a = run_rounds(s, 6, 42);
    const SimTrace b = run_rounds(s, 6, 42);
    CHECK(trace_to_csv(a) == trace_to_csv(b));
    CHECK(trace_summary(a) == trace_summary(b));
    CHECK(pool_table_csv(a) == pool_table_csv(b));
    CHECK(history_digest(a.final_state) == history_digest(b.final_state));
}

TEST_CASE("trace csv carries the decision log and cumulative utility columns") {
    const Scenario s = parse_scenario_text(mechanism_json("Y"));
    const SimTrace t = run_rounds(s, 2, 1);
    const std::string csv = trace_to_csv(t);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "round,rho,audited_pool,producer,tx_id,tx_kind,decision,u_0,u_1,u_2,u_3");
    std::size_t rows = 0, applied = 0, censored = 0, pos = 0;
    while ((pos = csv.find('\n', pos)) != std::string::npos) {
        ++pos;
        ++rows;
    }
    std::size_t expect = 1;  // header
    for (const TraceRound& r : t.rounds) expect += std::max<std::size_t>(1, r.decisions.size());
    CHECK(rows == expect);
    pos = 0;
    while ((pos = csv.find(",applied,", pos)) != std::string::npos) ++applied, ++pos;
    pos = 0;
    while ((pos = csv.find(",censored,", pos)) != std::string::npos) ++censored, ++pos;
    CHECK(applied + censored == t.submissions.size() + 1);  // rebel judged twice

    const std::string table = pool_table_csv(t);
    CHECK(table.rfind("round,pool,operator,stake,members\n", 0) == 0);
    const std::string summary = trace_summary(t);
    CHECK(summary.find("revolution yes") != std::string::npos);
}

TEST_CASE("rounds without pools still log randomness") {
    const Scenario s = parse_scenario_text(R"({
  "version": 1,
  "players": {"1": 10},
  "audit": true
})");
    const SimTrace t = run_rounds(s, 3, 9);
    REQUIRE(t.rounds.size() == 3);
    for (const TraceRound& r : t.rounds) {
        CHECK(r.audited.empty());
        CHECK(r.producer == -1);
        CHECK(r.decisions.empty());
    }
    const std::string csv = trace_to_csv(t);
    std::size_t rows = 0, pos = 0;
    while ((pos = csv.find('\n', pos)) != std::string::npos) ++pos, ++rows;
    CHECK(rows == 4);
}

TEST_CASE("scenario validation rejects dangling references") {
    Scenario s = parse_scenario_text(mechanism_json("Y"));
    SUBCASE("unknown operator pool") {
        s.operators["Z"] = OperatorPolicy{};
        CHECK_THROWS_AS(run_rounds(s, 1, 1), ScenarioError);
    }
    SUBCASE("unknown member agent") {
        s.members[99] = MemberAgent{};
        CHECK_THROWS_AS(run_rounds(s, 1, 1), ScenarioError);
    }
    SUBCASE("classification needs a model") {
        s.classify_submissions = true;
        CHECK_THROWS_AS(run_rounds(s, 1, 1), ScenarioError);
    }
    SUBCASE("negative rounds") {
        CHECK_THROWS_AS(run_rounds(s, -1, 1), ScenarioError);
    }
}

TEST_CASE("liveness experiment: strongly consistent traffic survives a byzantine minority") {
    const Scenario s = parse_scenario_text(experiment_json());
    const Theorem1Report rep = theorem1_experiment(s, 0.3, 12, 5);

    CHECK(rep.byzantine_pools == std::vector<PoolName>{"A", "B", "C"});
    CHECK(rep.rounds == 12);
    REQUIRE(rep.liveness.size() == 4);

    int in_scope = 0;
    for (const LivenessEntry& e : rep.liveness) {
        if (e.kind == "register") {
            CHECK_FALSE(e.in_scope);  // the overpriced pool is not strongly consistent
            CHECK(e.applied_round == -1);
        } else {
            CHECK(e.in_scope);
            CHECK(e.live);
            ++in_scope;
        }
    }
    CHECK(in_scope == 3);
    CHECK(rep.all_live);

    CHECK(rep.deviations.size() == 21);  // 7 rational operators x 3 applied txs
    bool some_strict_loss = false;
    for (const DeviationAuditEntry& d : rep.deviations) {
        CHECK(d.gain <= 0);
        if (d.gain < 0) some_strict_loss = true;
    }
    CHECK(some_strict_loss);
    CHECK(rep.no_positive_gain);
}

TEST_CASE("liveness experiment with no byzantine pools applies everything at once") {
    const Scenario s = parse_scenario_text(experiment_json());
    const Theorem1Report rep = theorem1_experiment(s, 0.0, 8, 5);
    CHECK(rep.byzantine_pools.empty());
    for (const LivenessEntry& e : rep.liveness)
        if (e.in_scope) CHECK(e.applied_round == 1);
    CHECK(rep.all_live);
    CHECK(rep.no_positive_gain);
}

TEST_CASE("liveness experiment refuses a byzantine share at the threshold") {
    const Scenario s = parse_scenario_text(experiment_json());
    CHECK_THROWS_AS(theorem1_experiment(s, 0.5, 5, 1), ScenarioError);
}
