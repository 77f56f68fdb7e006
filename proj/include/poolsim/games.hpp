#pragma once

#include "ledger.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace poolsim {

// Game-side utilities are exact fixed-point values with six fractional
// digits, so equilibrium comparisons never hinge on float rounding.
using Util = std::int64_t;
constexpr Util kUtilScale = 1000000;

std::string util_to_string(Util v);

struct UtilityTable {
    std::map<PlayerId, Stake> stakes;  // member stakes s_i
    Stake leader_stake = 0;            // s_P

    std::map<PlayerId, std::map<Stake, Util>> member_in_pool;  // u^i_x
    std::map<PlayerId, Util> member_revolution;                // u'_i
    std::map<Stake, Util> leader_in_pool;                      // u^P_x
    Util leader_revolution = 0;                                // u'^P

    Stake total() const;  // y, all member stakes plus the leader's
    Util member_at(PlayerId i, Stake x) const;
    Util member_rev(PlayerId i) const;
    Util leader_at(Stake x) const;
};

// Stake levels reachable in play: the leader sees every subset sum of member
// stakes plus s_P; member i only levels whose subset includes i.
std::set<Stake> leader_levels(const UtilityTable& table);
std::set<Stake> member_levels(const UtilityTable& table, PlayerId i);

enum class LeaderAction { CENSOR, NOTCENSOR };
enum class MemberAction { CAPITULATE, REBEL };
enum class LeaderPolicy { ALWAYS_CENSOR, ALWAYS_NOTCENSOR, Y };
enum class MemberPolicy { ALWAYS_CAPITULATE, ALWAYS_REBEL, X };

const char* to_string(LeaderAction a);
const char* to_string(MemberAction a);
const char* to_string(LeaderPolicy p);
const char* to_string(MemberPolicy p);

struct SingleRoundGame {
    UtilityTable table;
};

struct StrategyProfile {
    LeaderAction leader = LeaderAction::CENSOR;
    std::map<PlayerId, MemberAction> members;
};

// Effective pool stake for utility lookups: the leader's stake plus every
// capitulating member's stake.
Stake profile_alpha(const UtilityTable& table, const StrategyProfile& profile);

Util leader_utility(const SingleRoundGame& game, const StrategyProfile& profile);
Util member_utility(const SingleRoundGame& game, const StrategyProfile& profile, PlayerId i);

struct MultiRoundGame {
    UtilityTable table;
    int rounds = 1;
};

struct MultiRoundProfile {
    std::vector<LeaderAction> leader;                      // one action per round
    std::map<PlayerId, std::vector<MemberAction>> members;
};

struct MultiRoundOutcome {
    Util leader = 0;
    std::map<PlayerId, Util> members;
    bool revolution = false;
    int revolution_round = 0;  // 1-based round the revolution branch first paid, 0 if never
};

// Throws std::invalid_argument if a player reverses NOTCENSOR or REBEL.
void validate_commitment(const MultiRoundGame& game, const MultiRoundProfile& profile);

// Sum of per-round utilities; `inherited_revolution` treats the profile as a
// tail of a longer play in which the revolution already happened.
MultiRoundOutcome multi_round_outcome(const MultiRoundGame& game, const MultiRoundProfile& profile,
                                      bool inherited_revolution = false);
Util multi_round_leader_utility(const MultiRoundGame& game, const MultiRoundProfile& profile);
Util multi_round_member_utility(const MultiRoundGame& game, const MultiRoundProfile& profile,
                                PlayerId i);

// Two-round adaptive strategies: a literal first action plus a policy for the
// second round. X rebels iff some member rebelled in round 1, Y stops
// censoring on the same trigger; censored rebels are still observed.
struct AdaptiveProfile {
    LeaderAction leader_first = LeaderAction::CENSOR;
    LeaderPolicy leader_policy = LeaderPolicy::Y;
    std::map<PlayerId, std::pair<MemberAction, MemberPolicy>> members;
};

// k-round extension: a script for rounds 1..j, then a policy. X_j rebels iff
// some member rebelled in every round 1..j; Y_j likewise stops censoring.
struct KRoundMemberStrategy {
    std::vector<MemberAction> script;
    MemberPolicy policy = MemberPolicy::ALWAYS_CAPITULATE;
};

struct KRoundLeaderStrategy {
    std::vector<LeaderAction> script;
    LeaderPolicy policy = LeaderPolicy::ALWAYS_CENSOR;
};

struct KRoundProfile {
    int rounds = 2;
    KRoundLeaderStrategy leader;
    std::map<PlayerId, KRoundMemberStrategy> members;
};

// Realizes policies round by round against observed play, clamping to the
// commitment rule (REBEL and NOTCENSOR are absorbing).
MultiRoundProfile realize_kround(const KRoundProfile& profile);

struct AdaptiveOutcome {
    MultiRoundProfile realized;
    MultiRoundOutcome utilities;
};

AdaptiveOutcome resolve_adaptive(const MultiRoundGame& game, const AdaptiveProfile& profile);
AdaptiveOutcome resolve_kround(const MultiRoundGame& game, const KRoundProfile& profile);

// Two pools, pool 1 active in round 1 and pool 2 in round 2. Pool-2 policies
// key on an observed pool-1 rebel whose forfeit threshold u'_i >= 2 u^i_{y1}
// holds (event D for that rebel).
struct TwoPoolGame {
    UtilityTable pool1;
    UtilityTable pool2;
};

struct TwoPoolProfile {
    LeaderAction leader1 = LeaderAction::CENSOR;
    std::map<PlayerId, MemberAction> members1;
    LeaderPolicy leader2 = LeaderPolicy::Y;
    std::map<PlayerId, MemberPolicy> members2;
};

struct TwoPoolOutcome {
    Util leader1 = 0;
    Util leader2 = 0;
    std::map<PlayerId, Util> members;  // both pools; ids are disjoint
    bool trigger = false;              // pool-1 rebel observed with D
    bool pool1_revolution = false;
    bool pool2_revolution = false;
    LeaderAction leader2_realized = LeaderAction::CENSOR;
    std::map<PlayerId, MemberAction> members2_realized;
};

bool two_pool_event_d(const TwoPoolGame& game, PlayerId pool1_member);
TwoPoolOutcome two_pool_utility(const TwoPoolGame& game, const TwoPoolProfile& profile);

}  // namespace poolsim
