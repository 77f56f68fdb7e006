#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "poolsim/games.hpp"

#include <random>

using namespace poolsim;

namespace {

constexpr Util U = kUtilScale;

UtilityTable g1_table() {
    UtilityTable t;
    t.stakes = {{1, 10}, {2, 10}};
    t.leader_stake = 10;
    for (PlayerId i : {1, 2}) {
        t.member_in_pool[i] = {{30, 3 * U}, {20, 2 * U}};
        t.member_revolution[i] = 5 * U;
    }
    t.leader_in_pool = {{30, 9 * U}, {20, 5 * U}, {10, 2 * U}};
    t.leader_revolution = 6 * U;
    return t;
}

UtilityTable g2_table() {
    UtilityTable t;
    t.stakes = {{1, 10}, {2, 10}, {3, 10}};
    t.leader_stake = 10;
    for (PlayerId i : {1, 2, 3}) {
        t.member_in_pool[i] = {{40, 3 * U}, {30, 2500000}, {20, 2 * U}};
        t.member_revolution[i] = 7 * U;
    }
    t.leader_in_pool = {{40, 12 * U}, {30, 8 * U}, {20, 4 * U}, {10, 1 * U}};
    t.leader_revolution = 7 * U;
    return t;
}

TwoPoolGame tp_game() {
    TwoPoolGame g;
    g.pool1 = g1_table();
    for (PlayerId i : {1, 2}) g.pool1.member_revolution[i] = 7 * U;  // forfeit threshold holds
    UtilityTable p2;
    p2.stakes = {{21, 10}, {22, 10}};
    p2.leader_stake = 10;
    for (PlayerId i : {21, 22}) {
        p2.member_in_pool[i] = {{30, 3 * U}, {20, 2 * U}};
        p2.member_revolution[i] = 5 * U;
    }
    p2.leader_in_pool = {{30, 9 * U}, {20, 5 * U}, {10, 2 * U}};
    p2.leader_revolution = 6 * U;
    g.pool2 = p2;
    return g;
}

StrategyProfile profile(MemberAction a1, MemberAction a2, LeaderAction l) {
    return StrategyProfile{l, {{1, a1}, {2, a2}}};
}

constexpr MemberAction CAP = MemberAction::CAPITULATE;
constexpr MemberAction REB = MemberAction::REBEL;
constexpr LeaderAction CEN = LeaderAction::CENSOR;
constexpr LeaderAction NOT = LeaderAction::NOTCENSOR;

}  // namespace

TEST_CASE("utility table basics") {
    auto t = g1_table();
    CHECK(t.total() == 30);
    CHECK(t.member_at(1, 20) == 2 * U);
    CHECK(t.leader_at(10) == 2 * U);
    CHECK_THROWS_AS(t.member_at(1, 15), std::out_of_range);
    CHECK_THROWS_AS(t.leader_at(99), std::out_of_range);
    CHECK(leader_levels(t) == std::set<Stake>{10, 20, 30});
    CHECK(member_levels(t, 1) == std::set<Stake>{20, 30});
    auto t2 = g2_table();
    CHECK(leader_levels(t2) == std::set<Stake>{10, 20, 30, 40});
    CHECK(member_levels(t2, 2) == std::set<Stake>{20, 30, 40});
}

TEST_CASE("single-round leader utilities") {
    SingleRoundGame g{g1_table()};
    CHECK(leader_utility(g, profile(CAP, CAP, CEN)) == 9 * U);
    CHECK(leader_utility(g, profile(REB, REB, NOT)) == 6 * U);
    CHECK(leader_utility(g, profile(CAP, CAP, NOT)) == 9 * U);
    CHECK(leader_utility(g, profile(REB, CAP, CEN)) == 5 * U);
    CHECK(leader_utility(g, profile(REB, REB, CEN)) == 2 * U);
}

TEST_CASE("single-round member utilities") {
    SingleRoundGame g{g1_table()};
    CHECK(member_utility(g, profile(REB, CAP, CEN), 1) == 0);
    CHECK(member_utility(g, profile(REB, CAP, CEN), 2) == 2 * U);
    CHECK(member_utility(g, profile(REB, CAP, NOT), 1) == 5 * U);
    CHECK(member_utility(g, profile(CAP, CAP, CEN), 1) == 3 * U);
    CHECK(member_utility(g, profile(CAP, CAP, NOT), 2) == 3 * U);
    CHECK_THROWS_AS(member_utility(g, profile(CAP, CAP, CEN), 9), std::invalid_argument);
    StrategyProfile missing{CEN, {{1, CAP}}};
    CHECK_THROWS_AS(member_utility(g, missing, 1), std::invalid_argument);
}

TEST_CASE("exactly one branch applies across the whole profile space") {
    SingleRoundGame g{g1_table()};
    for (auto l : {CEN, NOT})
        for (auto a1 : {CAP, REB})
            for (auto a2 : {CAP, REB}) {
                auto p = profile(a1, a2, l);
                CHECK_NOTHROW(leader_utility(g, p));
                CHECK_NOTHROW(member_utility(g, p, 1));
                CHECK_NOTHROW(member_utility(g, p, 2));
            }
}

TEST_CASE("multi-round with one round equals the single-round game") {
    MultiRoundGame g{g1_table(), 1};
    SingleRoundGame s{g1_table()};
    for (auto l : {CEN, NOT})
        for (auto a1 : {CAP, REB})
            for (auto a2 : {CAP, REB}) {
                MultiRoundProfile mp{{l}, {{1, {a1}}, {2, {a2}}}};
                auto p = profile(a1, a2, l);
                CHECK(multi_round_leader_utility(g, mp) == leader_utility(s, p));
                CHECK(multi_round_member_utility(g, mp, 1) == member_utility(s, p, 1));
                CHECK(multi_round_member_utility(g, mp, 2) == member_utility(s, p, 2));
            }
}

TEST_CASE("two-round utilities accumulate per round") {
    MultiRoundGame g{g1_table(), 2};

    MultiRoundProfile all_cap{{CEN, CEN}, {{1, {CAP, CAP}}, {2, {CAP, CAP}}}};
    CHECK(multi_round_member_utility(g, all_cap, 1) == 6 * U);

    MultiRoundProfile late_rev{{CEN, NOT}, {{1, {REB, REB}}, {2, {CAP, CAP}}}};
    CHECK(multi_round_member_utility(g, late_rev, 1) == 5 * U);  // 0 then revolution
    CHECK(multi_round_member_utility(g, late_rev, 2) == 7 * U);  // 2 then revolution
    CHECK(multi_round_leader_utility(g, late_rev) == 11 * U);    // 5 then revolution

    MultiRoundProfile early_rev{{NOT, NOT}, {{1, {REB, REB}}, {2, {CAP, CAP}}}};
    CHECK(multi_round_member_utility(g, early_rev, 1) == 10 * U);
    auto out = multi_round_outcome(g, early_rev);
    CHECK(out.revolution);
    CHECK(out.revolution_round == 1);
}

TEST_CASE("commitment rule violations are rejected") {
    MultiRoundGame g{g1_table(), 2};
    MultiRoundProfile unrebel{{CEN, CEN}, {{1, {REB, CAP}}, {2, {CAP, CAP}}}};
    CHECK_THROWS_AS(multi_round_outcome(g, unrebel), std::invalid_argument);
    MultiRoundProfile recensor{{NOT, CEN}, {{1, {CAP, CAP}}, {2, {CAP, CAP}}}};
    CHECK_THROWS_AS(multi_round_outcome(g, recensor), std::invalid_argument);
    MultiRoundProfile short_leader{{CEN}, {{1, {CAP, CAP}}, {2, {CAP, CAP}}}};
    CHECK_THROWS_AS(multi_round_outcome(g, short_leader), std::invalid_argument);
}

TEST_CASE("inherited revolution pays the revolution branch from the first round") {
    MultiRoundGame g{g1_table(), 2};
    MultiRoundProfile all_cap{{CEN, CEN}, {{1, {CAP, CAP}}, {2, {CAP, CAP}}}};
    auto out = multi_round_outcome(g, all_cap, true);
    CHECK(out.leader == 12 * U);
    CHECK(out.members.at(1) == 10 * U);
}

TEST_CASE("adaptive: a first-round rebel flips X and Y policies") {
    MultiRoundGame g{g2_table(), 2};
    AdaptiveProfile p;
    p.leader_first = CEN;
    p.leader_policy = LeaderPolicy::Y;
    p.members[1] = {REB, MemberPolicy::ALWAYS_REBEL};
    p.members[2] = {CAP, MemberPolicy::X};
    p.members[3] = {CAP, MemberPolicy::X};

    auto out = resolve_adaptive(g, p);
    CHECK(out.realized.leader == std::vector<LeaderAction>{CEN, NOT});
    CHECK(out.realized.members.at(2) == std::vector<MemberAction>{CAP, REB});
    CHECK(out.utilities.members.at(1) == 7 * U);   // 0 + 7
    CHECK(out.utilities.leader == 15 * U);         // 8 + 7
    CHECK(out.utilities.members.at(2) == 9500000); // 2.5 + 7
    CHECK(out.utilities.revolution_round == 2);
}

TEST_CASE("adaptive: without a rebel, X capitulates and Y censors") {
    MultiRoundGame g{g2_table(), 2};
    AdaptiveProfile p;
    p.leader_first = CEN;
    p.leader_policy = LeaderPolicy::Y;
    for (PlayerId i : {1, 2, 3}) p.members[i] = {CAP, MemberPolicy::X};
    auto out = resolve_adaptive(g, p);
    CHECK(out.utilities.members.at(1) == 6 * U);  // 3 + 3
    CHECK(out.utilities.leader == 24 * U);
    CHECK_FALSE(out.utilities.revolution);
}

TEST_CASE("adaptive: a leader who keeps censoring faces a full second-round rebellion") {
    MultiRoundGame g{g2_table(), 2};
    AdaptiveProfile p;
    p.leader_first = CEN;
    p.leader_policy = LeaderPolicy::ALWAYS_CENSOR;
    p.members[1] = {REB, MemberPolicy::ALWAYS_REBEL};
    p.members[2] = {CAP, MemberPolicy::X};
    p.members[3] = {CAP, MemberPolicy::X};
    auto out = resolve_adaptive(g, p);
    CHECK(out.utilities.members.at(1) == 0);
    // round 2 leaves the leader alone at stake 10: 8 + 1
    CHECK(out.utilities.leader == 9 * U);
    CHECK(out.utilities.members.at(2) == 2500000);  // 2.5 + 0
}

TEST_CASE("adaptive ALWAYS policies reproduce the literal multi-round profile") {
    MultiRoundGame g{g1_table(), 2};
    for (auto l1 : {CEN, NOT})
        for (auto lp : {LeaderPolicy::ALWAYS_CENSOR, LeaderPolicy::ALWAYS_NOTCENSOR})
            for (auto a1 : {CAP, REB})
                for (auto p1 : {MemberPolicy::ALWAYS_CAPITULATE, MemberPolicy::ALWAYS_REBEL})
                    for (auto a2 : {CAP, REB})
                        for (auto p2 : {MemberPolicy::ALWAYS_CAPITULATE,
                                        MemberPolicy::ALWAYS_REBEL}) {
                            AdaptiveProfile ap;
                            ap.leader_first = l1;
                            ap.leader_policy = lp;
                            ap.members[1] = {a1, p1};
                            ap.members[2] = {a2, p2};
                            auto out = resolve_adaptive(g, ap);
                            // the realized profile is commitment-clamped, so
                            // evaluating it literally must agree
                            auto direct = multi_round_outcome(g, out.realized);
                            CHECK(out.utilities.leader == direct.leader);
                            CHECK(out.utilities.members == direct.members);
                        }
}

TEST_CASE("realization clamps to the commitment rule") {
    KRoundProfile p;
    p.rounds = 2;
    p.leader = {{NOT}, LeaderPolicy::ALWAYS_CENSOR};
    p.members[1] = {{REB}, MemberPolicy::ALWAYS_CAPITULATE};
    p.members[2] = {{CAP}, MemberPolicy::ALWAYS_CAPITULATE};
    auto realized = realize_kround(p);
    CHECK(realized.leader == std::vector<LeaderAction>{NOT, NOT});
    CHECK(realized.members.at(1) == std::vector<MemberAction>{REB, REB});
    CHECK(realized.members.at(2) == std::vector<MemberAction>{CAP, CAP});
}

TEST_CASE("k-round policies fire only on sustained rebellion through the script window") {
    KRoundProfile p;
    p.rounds = 3;
    p.leader = {{CEN, CEN}, LeaderPolicy::Y};  // Y_2: watches rounds 1..2
    p.members[1] = {{REB, REB, REB}, MemberPolicy::ALWAYS_CAPITULATE};
    p.members[2] = {{CAP, CAP}, MemberPolicy::X};  // X_2
    auto realized = realize_kround(p);
    CHECK(realized.members.at(2) == std::vector<MemberAction>{CAP, CAP, REB});
    CHECK(realized.leader == std::vector<LeaderAction>{CEN, CEN, NOT});

    // a rebellion abandoned after round 1 does not satisfy X_2
    KRoundProfile q = p;
    q.members[1] = {{CAP, REB, REB}, MemberPolicy::ALWAYS_CAPITULATE};
    auto r2 = realize_kround(q);
    CHECK(r2.members.at(2) == std::vector<MemberAction>{CAP, CAP, CAP});
    CHECK(r2.leader == std::vector<LeaderAction>{CEN, CEN, CEN});
}

TEST_CASE("k-round outcome evaluates the realized play") {
    MultiRoundGame g{g1_table(), 3};
    KRoundProfile p;
    p.rounds = 3;
    p.leader = {{CEN}, LeaderPolicy::Y};  // Y_1
    p.members[1] = {{REB}, MemberPolicy::ALWAYS_REBEL};
    p.members[2] = {{CAP}, MemberPolicy::X};  // X_1
    auto out = resolve_kround(g, p);
    // round 1: censored rebel; rounds 2,3: revolution
    CHECK(out.utilities.members.at(1) == 10 * U);
    CHECK(out.utilities.leader == (5 + 6 + 6) * U);
    CHECK(out.utilities.revolution_round == 2);
    CHECK_THROWS_AS(resolve_kround(MultiRoundGame{g1_table(), 2}, p), std::invalid_argument);
}

TEST_CASE("two-pool: quiet play pays two rounds of in-pool utility") {
    TwoPoolGame g = tp_game();
    TwoPoolProfile p;
    p.leader1 = CEN;
    p.members1 = {{1, CAP}, {2, CAP}};
    p.leader2 = LeaderPolicy::Y;
    p.members2 = {{21, MemberPolicy::X}, {22, MemberPolicy::X}};
    auto out = two_pool_utility(g, p);
    CHECK_FALSE(out.trigger);
    CHECK_FALSE(out.pool1_revolution);
    CHECK_FALSE(out.pool2_revolution);
    CHECK(out.leader1 == 18 * U);
    CHECK(out.leader2 == 18 * U);
    for (PlayerId i : {1, 2, 21, 22}) CHECK(out.members.at(i) == 6 * U);
}

TEST_CASE("two-pool: a censored rebel with the threshold met sparks the second pool") {
    TwoPoolGame g = tp_game();
    TwoPoolProfile p;
    p.leader1 = CEN;
    p.members1 = {{1, REB}, {2, CAP}};
    p.leader2 = LeaderPolicy::Y;
    p.members2 = {{21, MemberPolicy::X}, {22, MemberPolicy::X}};
    auto out = two_pool_utility(g, p);
    CHECK(out.trigger);
    CHECK(out.pool2_revolution);
    CHECK_FALSE(out.pool1_revolution);
    CHECK(out.members.at(1) == 7 * U);       // 0 + revolution utility
    CHECK(out.members.at(2) == 9 * U);       // 2 + 7
    CHECK(out.leader1 == 11 * U);            // 5 + 6
    CHECK(out.members.at(21) == 8 * U);      // 3 + 5
    CHECK(out.leader2 == 15 * U);            // 9 + 6
}

TEST_CASE("two-pool: a first-pool revolution pays the second pool regardless of actions") {
    TwoPoolGame g = tp_game();
    TwoPoolProfile p;
    p.leader1 = NOT;
    p.members1 = {{1, REB}, {2, CAP}};
    p.leader2 = LeaderPolicy::ALWAYS_CENSOR;
    p.members2 = {{21, MemberPolicy::ALWAYS_CAPITULATE}, {22, MemberPolicy::ALWAYS_CAPITULATE}};
    auto out = two_pool_utility(g, p);
    CHECK(out.pool1_revolution);
    CHECK(out.members.at(21) == 8 * U);  // 3 + 5 despite capitulating under a censor
    CHECK(out.leader2 == 15 * U);
    CHECK(out.members.at(1) == 14 * U);  // 7 + 7
    CHECK(out.leader1 == 12 * U);        // 6 + 6
}

TEST_CASE("two-pool: no trigger when the rebel's threshold fails") {
    TwoPoolGame g = tp_game();
    for (PlayerId i : {1, 2}) g.pool1.member_revolution[i] = 5 * U;  // 5 < 2*3
    CHECK_FALSE(two_pool_event_d(g, 1));
    TwoPoolProfile p;
    p.leader1 = CEN;
    p.members1 = {{1, REB}, {2, CAP}};
    p.leader2 = LeaderPolicy::Y;
    p.members2 = {{21, MemberPolicy::X}, {22, MemberPolicy::X}};
    auto out = two_pool_utility(g, p);
    CHECK_FALSE(out.trigger);
    CHECK_FALSE(out.pool2_revolution);
    CHECK(out.members.at(1) == 3 * U);  // 0 + full-pool round 2
}

TEST_CASE("two-pool profiles are validated") {
    TwoPoolGame g = tp_game();
    TwoPoolProfile p;
    p.members1 = {{1, CAP}, {2, CAP}};
    p.members2 = {{21, MemberPolicy::X}};
    CHECK_THROWS_AS(two_pool_utility(g, p), std::invalid_argument);
    p.members2 = {{21, MemberPolicy::X}, {7, MemberPolicy::X}};
    CHECK_THROWS_AS(two_pool_utility(g, p), std::invalid_argument);
}

TEST_CASE("fixed-point rendering") {
    CHECK(util_to_string(2500000) == "2.5");
    CHECK(util_to_string(-250000) == "-0.25");
    CHECK(util_to_string(3 * U) == "3");
    CHECK(util_to_string(0) == "0");
    CHECK(util_to_string(-9 * U) == "-9");
    CHECK(util_to_string(1) == "0.000001");
}

TEST_CASE("absorption holds along random realized plays") {
    std::mt19937_64 rng(99);
    MultiRoundGame g{g1_table(), 4};
    for (int iter = 0; iter < 500; ++iter) {
        KRoundProfile p;
        p.rounds = 4;
        auto rand_member = [&]() {
            int j = 1 + int(rng() % 4);
            KRoundMemberStrategy st;
            for (int t = 0; t < j; ++t)
                st.script.push_back(rng() % 2 ? REB : CAP);
            st.policy = static_cast<MemberPolicy>(rng() % 3);
            return st;
        };
        p.members[1] = rand_member();
        p.members[2] = rand_member();
        int jl = 1 + int(rng() % 4);
        for (int t = 0; t < jl; ++t)
            p.leader.script.push_back(rng() % 2 ? NOT : CEN);
        p.leader.policy = static_cast<LeaderPolicy>(rng() % 3);

        auto out = resolve_kround(g, p);
        if (!out.utilities.revolution) continue;
        int r = out.utilities.revolution_round;
        REQUIRE(r >= 1);
        // from round r on, the realized play must stay in the revolution branch
        for (int t = r - 1; t < 4; ++t) {
            CHECK(out.realized.leader[t] == NOT);
            bool rebel = false;
            for (const auto& [id, acts] : out.realized.members)
                rebel = rebel || acts[t] == REB;
            CHECK(rebel);
        }
    }
}
