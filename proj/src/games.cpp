#include "poolsim/games.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace poolsim {

std::string util_to_string(Util v) {
    std::ostringstream out;
    Util whole = v / kUtilScale;
    Util frac = v % kUtilScale;
    if (v < 0 && whole == 0) out << '-';
    out << whole;
    if (frac != 0) {
        if (frac < 0) frac = -frac;
        std::string digits = std::to_string(frac);
        digits.insert(0, 6 - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out << '.' << digits;
    }
    return out.str();
}

Stake UtilityTable::total() const {
    Stake y = leader_stake;
    for (const auto& [id, s] : stakes) y += s;
    return y;
}

Util UtilityTable::member_at(PlayerId i, Stake x) const {
    auto it = member_in_pool.find(i);
    if (it != member_in_pool.end()) {
        auto lv = it->second.find(x);
        if (lv != it->second.end()) return lv->second;
    }
    throw std::out_of_range("no utility level for member " + std::to_string(i) + " at stake " +
                            std::to_string(x));
}

Util UtilityTable::member_rev(PlayerId i) const {
    auto it = member_revolution.find(i);
    if (it == member_revolution.end())
        throw std::out_of_range("no revolution utility for member " + std::to_string(i));
    return it->second;
}

Util UtilityTable::leader_at(Stake x) const {
    auto it = leader_in_pool.find(x);
    if (it == leader_in_pool.end())
        throw std::out_of_range("no leader utility at stake " + std::to_string(x));
    return it->second;
}

std::set<Stake> leader_levels(const UtilityTable& table) {
    std::set<Stake> sums{0};
    for (const auto& [id, s] : table.stakes) {
        std::set<Stake> next = sums;
        for (Stake v : sums) next.insert(v + s);
        sums = std::move(next);
    }
    std::set<Stake> levels;
    for (Stake v : sums) levels.insert(v + table.leader_stake);
    return levels;
}

std::set<Stake> member_levels(const UtilityTable& table, PlayerId i) {
    auto it = table.stakes.find(i);
    if (it == table.stakes.end())
        throw std::invalid_argument("unknown member " + std::to_string(i));
    std::set<Stake> sums{0};
    for (const auto& [id, s] : table.stakes) {
        if (id == i) continue;
        std::set<Stake> next = sums;
        for (Stake v : sums) next.insert(v + s);
        sums = std::move(next);
    }
    std::set<Stake> levels;
    for (Stake v : sums) levels.insert(v + it->second + table.leader_stake);
    return levels;
}

const char* to_string(LeaderAction a) {
    return a == LeaderAction::CENSOR ? "CENSOR" : "NOTCENSOR";
}

const char* to_string(MemberAction a) {
    return a == MemberAction::CAPITULATE ? "CAPITULATE" : "REBEL";
}

const char* to_string(LeaderPolicy p) {
    switch (p) {
        case LeaderPolicy::ALWAYS_CENSOR: return "ALWAYS_CENSOR";
        case LeaderPolicy::ALWAYS_NOTCENSOR: return "ALWAYS_NOTCENSOR";
        case LeaderPolicy::Y: return "Y";
    }
    return "?";
}

const char* to_string(MemberPolicy p) {
    switch (p) {
        case MemberPolicy::ALWAYS_CAPITULATE: return "ALWAYS_CAPITULATE";
        case MemberPolicy::ALWAYS_REBEL: return "ALWAYS_REBEL";
        case MemberPolicy::X: return "X";
    }
    return "?";
}

namespace {

void require_member_actions(const UtilityTable& table,
                            const std::map<PlayerId, MemberAction>& members) {
    if (members.size() != table.stakes.size())
        throw std::invalid_argument("profile must assign an action to every member");
    for (const auto& [id, a] : members)
        if (!table.stakes.count(id))
            throw std::invalid_argument("unknown member " + std::to_string(id));
}

bool any_rebel(const std::map<PlayerId, MemberAction>& members) {
    for (const auto& [id, a] : members)
        if (a == MemberAction::REBEL) return true;
    return false;
}

}  // namespace

Stake profile_alpha(const UtilityTable& table, const StrategyProfile& profile) {
    Stake alpha = table.leader_stake;
    for (const auto& [id, a] : profile.members)
        if (a == MemberAction::CAPITULATE) alpha += table.stakes.at(id);
    return alpha;
}

Util leader_utility(const SingleRoundGame& game, const StrategyProfile& profile) {
    require_member_actions(game.table, profile.members);
    if (profile.leader == LeaderAction::CENSOR)
        return game.table.leader_at(profile_alpha(game.table, profile));
    if (any_rebel(profile.members)) return game.table.leader_revolution;
    return game.table.leader_at(game.table.total());
}

Util member_utility(const SingleRoundGame& game, const StrategyProfile& profile, PlayerId i) {
    require_member_actions(game.table, profile.members);
    auto it = profile.members.find(i);
    if (it == profile.members.end())
        throw std::invalid_argument("unknown member " + std::to_string(i));
    if (profile.leader == LeaderAction::CENSOR) {
        if (it->second == MemberAction::REBEL) return 0;
        return game.table.member_at(i, profile_alpha(game.table, profile));
    }
    if (any_rebel(profile.members)) return game.table.member_rev(i);
    return game.table.member_at(i, game.table.total());
}

void validate_commitment(const MultiRoundGame& game, const MultiRoundProfile& profile) {
    if (game.rounds < 1) throw std::invalid_argument("game must have at least one round");
    if (static_cast<int>(profile.leader.size()) != game.rounds)
        throw std::invalid_argument("leader must act in every round");
    if (profile.members.size() != game.table.stakes.size())
        throw std::invalid_argument("profile must assign actions to every member");
    for (const auto& [id, actions] : profile.members) {
        if (!game.table.stakes.count(id))
            throw std::invalid_argument("unknown member " + std::to_string(id));
        if (static_cast<int>(actions.size()) != game.rounds)
            throw std::invalid_argument("member " + std::to_string(id) +
                                        " must act in every round");
        for (std::size_t j = 1; j < actions.size(); ++j)
            if (actions[j - 1] == MemberAction::REBEL && actions[j] != MemberAction::REBEL)
                throw std::invalid_argument("commitment rule violated: member " +
                                            std::to_string(id) + " un-rebelled in round " +
                                            std::to_string(j + 1));
    }
    for (std::size_t j = 1; j < profile.leader.size(); ++j)
        if (profile.leader[j - 1] == LeaderAction::NOTCENSOR &&
            profile.leader[j] != LeaderAction::NOTCENSOR)
            throw std::invalid_argument("commitment rule violated: leader resumed censoring in round " +
                                        std::to_string(j + 1));
}

MultiRoundOutcome multi_round_outcome(const MultiRoundGame& game, const MultiRoundProfile& profile,
                                      bool inherited_revolution) {
    validate_commitment(game, profile);
    MultiRoundOutcome out;
    out.revolution = inherited_revolution;
    for (const auto& [id, s] : game.table.stakes) out.members[id] = 0;

    SingleRoundGame single{game.table};
    for (int j = 0; j < game.rounds; ++j) {
        if (out.revolution) {
            out.leader += game.table.leader_revolution;
            for (auto& [id, u] : out.members) u += game.table.member_rev(id);
            continue;
        }
        StrategyProfile round;
        round.leader = profile.leader[j];
        for (const auto& [id, actions] : profile.members) round.members[id] = actions[j];
        out.leader += leader_utility(single, round);
        for (auto& [id, u] : out.members) u += member_utility(single, round, id);
        if (round.leader == LeaderAction::NOTCENSOR && any_rebel(round.members)) {
            out.revolution = true;
            out.revolution_round = j + 1;
        }
    }
    return out;
}

Util multi_round_leader_utility(const MultiRoundGame& game, const MultiRoundProfile& profile) {
    return multi_round_outcome(game, profile).leader;
}

Util multi_round_member_utility(const MultiRoundGame& game, const MultiRoundProfile& profile,
                                PlayerId i) {
    auto out = multi_round_outcome(game, profile);
    auto it = out.members.find(i);
    if (it == out.members.end()) throw std::invalid_argument("unknown member " + std::to_string(i));
    return it->second;
}

MultiRoundProfile realize_kround(const KRoundProfile& profile) {
    const int k = profile.rounds;
    if (k < 1) throw std::invalid_argument("profile must cover at least one round");
    if (profile.leader.script.empty() || static_cast<int>(profile.leader.script.size()) > k)
        throw std::invalid_argument("leader script must cover rounds 1..j with 1 <= j <= rounds");
    for (const auto& [id, st] : profile.members)
        if (st.script.empty() || static_cast<int>(st.script.size()) > k)
            throw std::invalid_argument("member " + std::to_string(id) +
                                        " script must cover rounds 1..j with 1 <= j <= rounds");

    MultiRoundProfile realized;
    realized.leader.reserve(k);
    for (const auto& [id, st] : profile.members) realized.members[id] = {};

    // Did some member rebel in every round 1..j of the realized play?
    auto sustained_rebel = [&](int j) {
        for (const auto& [id, acts] : realized.members) {
            bool all = true;
            for (int t = 0; t < j; ++t)
                if (acts[t] != MemberAction::REBEL) {
                    all = false;
                    break;
                }
            if (all) return true;
        }
        return false;
    };

    for (int t = 0; t < k; ++t) {
        for (auto& [id, acts] : realized.members) {
            const auto& st = profile.members.at(id);
            const int j = static_cast<int>(st.script.size());
            MemberAction a;
            if (t < j) {
                a = st.script[t];
            } else {
                switch (st.policy) {
                    case MemberPolicy::ALWAYS_CAPITULATE: a = MemberAction::CAPITULATE; break;
                    case MemberPolicy::ALWAYS_REBEL: a = MemberAction::REBEL; break;
                    case MemberPolicy::X:
                        a = sustained_rebel(j) ? MemberAction::REBEL : MemberAction::CAPITULATE;
                        break;
                    default: a = MemberAction::CAPITULATE;
                }
            }
            if (t > 0 && acts[t - 1] == MemberAction::REBEL) a = MemberAction::REBEL;
            acts.push_back(a);
        }
        {
            const int j = static_cast<int>(profile.leader.script.size());
            LeaderAction a;
            if (t < j) {
                a = profile.leader.script[t];
            } else {
                switch (profile.leader.policy) {
                    case LeaderPolicy::ALWAYS_CENSOR: a = LeaderAction::CENSOR; break;
                    case LeaderPolicy::ALWAYS_NOTCENSOR: a = LeaderAction::NOTCENSOR; break;
                    case LeaderPolicy::Y:
                        a = sustained_rebel(j) ? LeaderAction::NOTCENSOR : LeaderAction::CENSOR;
                        break;
                    default: a = LeaderAction::CENSOR;
                }
            }
            if (t > 0 && realized.leader[t - 1] == LeaderAction::NOTCENSOR)
                a = LeaderAction::NOTCENSOR;
            realized.leader.push_back(a);
        }
    }
    return realized;
}

AdaptiveOutcome resolve_kround(const MultiRoundGame& game, const KRoundProfile& profile) {
    if (profile.rounds != game.rounds)
        throw std::invalid_argument("profile round count must match the game");
    AdaptiveOutcome out;
    out.realized = realize_kround(profile);
    out.utilities = multi_round_outcome(game, out.realized);
    return out;
}

AdaptiveOutcome resolve_adaptive(const MultiRoundGame& game, const AdaptiveProfile& profile) {
    KRoundProfile kr;
    kr.rounds = 2;
    kr.leader.script = {profile.leader_first};
    kr.leader.policy = profile.leader_policy;
    for (const auto& [id, st] : profile.members)
        kr.members[id] = KRoundMemberStrategy{{st.first}, st.second};
    return resolve_kround(game, kr);
}

bool two_pool_event_d(const TwoPoolGame& game, PlayerId pool1_member) {
    return game.pool1.member_rev(pool1_member) >=
           2 * game.pool1.member_at(pool1_member, game.pool1.total());
}

TwoPoolOutcome two_pool_utility(const TwoPoolGame& game, const TwoPoolProfile& profile) {
    require_member_actions(game.pool1, profile.members1);
    if (profile.members2.size() != game.pool2.stakes.size())
        throw std::invalid_argument("profile must assign a policy to every pool-2 member");
    for (const auto& [id, p] : profile.members2) {
        if (!game.pool2.stakes.count(id))
            throw std::invalid_argument("unknown pool-2 member " + std::to_string(id));
        if (game.pool1.stakes.count(id))
            throw std::invalid_argument("pools must have disjoint members");
    }

    TwoPoolOutcome out;
    const Stake y1 = game.pool1.total();
    const Stake y2 = game.pool2.total();

    // Round 1: pool 1 plays the single-round game, pool 2 sits at full stake.
    SingleRoundGame g1{game.pool1};
    StrategyProfile r1{profile.leader1, profile.members1};
    out.leader1 = leader_utility(g1, r1);
    for (const auto& [id, a] : profile.members1) out.members[id] = member_utility(g1, r1, id);
    out.leader2 = game.pool2.leader_at(y2);
    for (const auto& [id, s] : game.pool2.stakes) out.members[id] = game.pool2.member_at(id, y2);

    out.pool1_revolution = profile.leader1 == LeaderAction::NOTCENSOR && any_rebel(profile.members1);

    // Policies fire on an observed pool-1 rebel whose forfeit threshold holds.
    for (const auto& [id, a] : profile.members1)
        if (a == MemberAction::REBEL && two_pool_event_d(game, id)) out.trigger = true;

    // Round 2: realize pool-2 actions.
    for (const auto& [id, p] : profile.members2) {
        MemberAction a = MemberAction::CAPITULATE;
        if (p == MemberPolicy::ALWAYS_REBEL) a = MemberAction::REBEL;
        if (p == MemberPolicy::X) a = out.trigger ? MemberAction::REBEL : MemberAction::CAPITULATE;
        out.members2_realized[id] = a;
    }
    out.leader2_realized = LeaderAction::CENSOR;
    if (profile.leader2 == LeaderPolicy::ALWAYS_NOTCENSOR) out.leader2_realized = LeaderAction::NOTCENSOR;
    if (profile.leader2 == LeaderPolicy::Y)
        out.leader2_realized = out.trigger ? LeaderAction::NOTCENSOR : LeaderAction::CENSOR;

    out.pool2_revolution = out.leader2_realized == LeaderAction::NOTCENSOR &&
                           any_rebel(out.members2_realized);

    // Pool-2 round-2 utilities: the single-round rules, except a pool-1
    // revolution pays everyone the revolution utility outright.
    if (out.pool1_revolution) {
        out.leader2 += game.pool2.leader_revolution;
        for (const auto& [id, s] : game.pool2.stakes) out.members[id] += game.pool2.member_rev(id);
    } else {
        SingleRoundGame g2{game.pool2};
        StrategyProfile r2{out.leader2_realized, out.members2_realized};
        out.leader2 += leader_utility(g2, r2);
        for (const auto& [id, s] : game.pool2.stakes)
            out.members[id] += member_utility(g2, r2, id);
    }

    // Pool-1 round-2 utilities: full-pool values unless a revolution in
    // either pool pays the revolution utility instead.
    bool pool1_round2_rev = out.pool1_revolution || out.pool2_revolution;
    out.leader1 += pool1_round2_rev ? game.pool1.leader_revolution : game.pool1.leader_at(y1);
    for (const auto& [id, s] : game.pool1.stakes)
        out.members[id] += pool1_round2_rev ? game.pool1.member_rev(id)
                                            : game.pool1.member_at(id, y1);
    return out;
}

}  // namespace poolsim
