#include "poolsim/equilibrium.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

namespace poolsim {

namespace {

template <typename A>
std::string join_actions(const std::vector<A>& v) {
    std::string s;
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (t) s += ',';
        s += to_string(v[t]);
    }
    return s;
}

std::vector<PlayerId> member_ids(const UtilityTable& table) {
    std::vector<PlayerId> ids;
    ids.reserve(table.stakes.size());
    for (const auto& [id, stake] : table.stakes) ids.push_back(id);
    return ids;
}

// Leader plays NOTCENSOR from round `s` on; s = m+1 means never. Members
// mirror this with REBEL. Commitment-respecting strategies are exactly these
// switch vectors.
std::vector<LeaderAction> leader_from(int m, int s) {
    std::vector<LeaderAction> v(m, LeaderAction::CENSOR);
    for (int t = s; t <= m; ++t) v[t - 1] = LeaderAction::NOTCENSOR;
    return v;
}

std::vector<MemberAction> member_from(int m, int s) {
    std::vector<MemberAction> v(m, MemberAction::CAPITULATE);
    for (int t = s; t <= m; ++t) v[t - 1] = MemberAction::REBEL;
    return v;
}

MultiScan multi_scan(const MultiRoundGame& game, const MultiRoundProfile& profile,
                     bool inherited_revolution, bool leader_locked,
                     const std::set<PlayerId>& locked_members) {
    MultiScan out;
    const MultiRoundOutcome base = multi_round_outcome(game, profile, inherited_revolution);
    const int m = game.rounds;
    auto classify = [&out](MultiDeviation d) {
        if (d.gain > 0)
            out.violations.push_back(std::move(d));
        else if (d.gain == 0)
            out.indifferences.push_back(std::move(d));
    };
    if (!leader_locked) {
        for (int s = 1; s <= m + 1; ++s) {
            std::vector<LeaderAction> vec = leader_from(m, s);
            if (vec == profile.leader) continue;
            MultiRoundProfile d = profile;
            d.leader = std::move(vec);
            MultiDeviation dev;
            dev.leader = true;
            dev.gain = multi_round_outcome(game, d, inherited_revolution).leader - base.leader;
            dev.label = s <= m ? "leader NOTCENSOR from round " + std::to_string(s)
                               : std::string("leader never NOTCENSOR");
            dev.deviated = std::move(d);
            classify(std::move(dev));
        }
    }
    for (const auto& [id, current] : profile.members) {
        if (locked_members.count(id)) continue;
        for (int s = 1; s <= m + 1; ++s) {
            std::vector<MemberAction> vec = member_from(m, s);
            if (vec == current) continue;
            MultiRoundProfile d = profile;
            d.members[id] = std::move(vec);
            MultiDeviation dev;
            dev.member = id;
            dev.gain =
                multi_round_outcome(game, d, inherited_revolution).members.at(id) - base.members.at(id);
            dev.label = "member " + std::to_string(id) +
                        (s <= m ? " REBEL from round " + std::to_string(s) : " never REBEL");
            dev.deviated = std::move(d);
            classify(std::move(dev));
        }
    }
    return out;
}

CheckItem leader_monotone_check(const UtilityTable& table, const std::string& name) {
    CheckItem c{name, true, ""};
    bool first = true;
    Stake px = 0;
    Util pv = 0;
    for (Stake x : leader_levels(table)) {
        Util v = table.leader_at(x);
        if (!first && v < pv) {
            c.passed = false;
            c.detail = "u^P drops from " + util_to_string(pv) + " at stake " + std::to_string(px) +
                       " to " + util_to_string(v) + " at stake " + std::to_string(x);
            return c;
        }
        first = false;
        px = x;
        pv = v;
    }
    c.detail = "non-decreasing across all leader levels";
    return c;
}

CheckItem members_monotone_check(const UtilityTable& table, const std::string& name) {
    CheckItem c{name, true, ""};
    for (const auto& [id, stake] : table.stakes) {
        bool first = true;
        Stake px = 0;
        Util pv = 0;
        for (Stake x : member_levels(table, id)) {
            Util v = table.member_at(id, x);
            if (!first && v < pv) {
                c.passed = false;
                c.detail = "member " + std::to_string(id) + ": u drops from " + util_to_string(pv) +
                           " at stake " + std::to_string(px) + " to " + util_to_string(v) +
                           " at stake " + std::to_string(x);
                return c;
            }
            first = false;
            px = x;
            pv = v;
        }
    }
    c.detail = "non-decreasing across all member levels";
    return c;
}

CheckItem members_nonneg_check(const UtilityTable& table, const std::string& name) {
    CheckItem c{name, true, ""};
    for (const auto& [id, stake] : table.stakes) {
        for (Stake x : member_levels(table, id)) {
            Util v = table.member_at(id, x);
            if (v < 0) {
                c.passed = false;
                c.detail = "member " + std::to_string(id) + " has " + util_to_string(v) +
                           " at stake " + std::to_string(x);
                return c;
            }
        }
    }
    c.detail = "nonnegative at all member levels";
    return c;
}

CheckItem members_positive_check(const UtilityTable& table, const std::string& name) {
    CheckItem c{name, true, ""};
    for (const auto& [id, stake] : table.stakes) {
        for (Stake x : member_levels(table, id)) {
            Util v = table.member_at(id, x);
            if (v <= 0) {
                c.passed = false;
                c.detail = "member " + std::to_string(id) + " has " + util_to_string(v) +
                           " at stake " + std::to_string(x);
                return c;
            }
        }
    }
    c.detail = "strictly positive at all member levels";
    return c;
}

std::set<Stake> member_subset_sums(const UtilityTable& table) {
    std::set<Stake> sums{0};
    for (const auto& [id, stake] : table.stakes) {
        std::set<Stake> next = sums;
        for (Stake s : sums) next.insert(s + stake);
        sums = std::move(next);
    }
    return sums;
}

KRoundProfile adaptive_to_kround(const AdaptiveProfile& p) {
    KRoundProfile k;
    k.rounds = 2;
    k.leader.script = {p.leader_first};
    k.leader.policy = p.leader_policy;
    for (const auto& [id, sp] : p.members) k.members[id] = {{sp.first}, sp.second};
    return k;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::CONFIRMED: return "CONFIRMED";
        case Verdict::COUNTEREXAMPLE: return "COUNTEREXAMPLE";
        case Verdict::HYPOTHESIS_FAILURE: return "HYPOTHESIS_FAILURE";
    }
    return "UNKNOWN";
}

bool all_passed(const std::vector<CheckItem>& items) {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

std::string to_string(const StrategyProfile& p) {
    std::ostringstream os;
    os << "leader=" << to_string(p.leader);
    for (const auto& [id, a] : p.members) os << " " << id << "=" << to_string(a);
    return os.str();
}

std::string to_string(const MultiRoundProfile& p) {
    std::ostringstream os;
    os << "leader=" << join_actions(p.leader);
    for (const auto& [id, v] : p.members) os << " " << id << "=" << join_actions(v);
    return os.str();
}

std::string to_string(const KRoundProfile& p) {
    std::ostringstream os;
    os << "leader=[" << join_actions(p.leader.script) << "]/" << to_string(p.leader.policy);
    for (const auto& [id, s] : p.members)
        os << " " << id << "=[" << join_actions(s.script) << "]/" << to_string(s.policy);
    return os.str();
}

std::string to_string(const TwoPoolProfile& p) {
    std::ostringstream os;
    os << "P1=" << to_string(p.leader1);
    for (const auto& [id, a] : p.members1) os << " " << id << "=" << to_string(a);
    os << " P2=" << to_string(p.leader2);
    for (const auto& [id, pol] : p.members2) os << " " << id << "=" << to_string(pol);
    return os.str();
}

// ---------------------------------------------------------------- single --

SingleScan best_response_scan(const SingleRoundGame& game, const StrategyProfile& profile) {
    SingleScan out;
    auto classify = [&out](SingleDeviation d) {
        if (d.gain > 0)
            out.violations.push_back(std::move(d));
        else if (d.gain == 0)
            out.indifferences.push_back(std::move(d));
    };
    const Util base_leader = leader_utility(game, profile);
    {
        StrategyProfile d = profile;
        d.leader = profile.leader == LeaderAction::CENSOR ? LeaderAction::NOTCENSOR
                                                          : LeaderAction::CENSOR;
        SingleDeviation dev;
        dev.leader = true;
        dev.gain = leader_utility(game, d) - base_leader;
        dev.label = std::string("leader -> ") + to_string(d.leader);
        dev.deviated = std::move(d);
        classify(std::move(dev));
    }
    for (const auto& [id, act] : profile.members) {
        StrategyProfile d = profile;
        d.members[id] = act == MemberAction::CAPITULATE ? MemberAction::REBEL
                                                        : MemberAction::CAPITULATE;
        SingleDeviation dev;
        dev.member = id;
        dev.gain = member_utility(game, d, id) - member_utility(game, profile, id);
        dev.label = "member " + std::to_string(id) + " -> " + to_string(d.members.at(id));
        dev.deviated = std::move(d);
        classify(std::move(dev));
    }
    return out;
}

std::vector<SingleDeviation> best_response_violations(const SingleRoundGame& game,
                                                      const StrategyProfile& profile) {
    return best_response_scan(game, profile).violations;
}

std::vector<StrategyProfile> enumerate_pure_nash(const SingleRoundGame& game, std::size_t limit) {
    const std::vector<PlayerId> ids = member_ids(game.table);
    const std::size_t n = ids.size();
    if (n >= 62 || (std::size_t{2} << n) > limit)
        throw std::length_error("enumerate_pure_nash: single-round profile space exceeds limit");
    std::vector<StrategyProfile> out;
    for (int lead = 0; lead < 2; ++lead) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            StrategyProfile p;
            p.leader = lead ? LeaderAction::NOTCENSOR : LeaderAction::CENSOR;
            for (std::size_t b = 0; b < n; ++b)
                p.members[ids[b]] =
                    (mask >> b) & 1 ? MemberAction::REBEL : MemberAction::CAPITULATE;
            if (best_response_violations(game, p).empty()) out.push_back(std::move(p));
        }
    }
    std::sort(out.begin(), out.end(), [](const StrategyProfile& a, const StrategyProfile& b) {
        return to_string(a) < to_string(b);
    });
    return out;
}

// ----------------------------------------------------------------- multi --

MultiScan best_response_scan(const MultiRoundGame& game, const MultiRoundProfile& profile) {
    return multi_scan(game, profile, false, false, {});
}

std::vector<MultiDeviation> best_response_violations(const MultiRoundGame& game,
                                                     const MultiRoundProfile& profile) {
    return best_response_scan(game, profile).violations;
}

std::vector<MultiRoundProfile> enumerate_pure_nash(const MultiRoundGame& game, std::size_t limit) {
    const std::vector<PlayerId> ids = member_ids(game.table);
    const std::size_t n = ids.size();
    const int m = game.rounds;
    std::size_t space = 1;
    for (std::size_t slot = 0; slot < n + 1; ++slot) {
        if (space > limit / static_cast<std::size_t>(m + 1))
            throw std::length_error("enumerate_pure_nash: multi-round profile space exceeds limit");
        space *= static_cast<std::size_t>(m + 1);
    }
    std::vector<MultiRoundProfile> out;
    std::vector<int> digits(n + 1, 1);  // switch rounds, m+1 = never
    while (true) {
        MultiRoundProfile p;
        p.leader = leader_from(m, digits[0]);
        for (std::size_t b = 0; b < n; ++b) p.members[ids[b]] = member_from(m, digits[b + 1]);
        if (best_response_violations(game, p).empty()) out.push_back(std::move(p));
        std::size_t slot = 0;
        while (slot < digits.size() && ++digits[slot] > m + 1) digits[slot++] = 1;
        if (slot == digits.size()) break;
    }
    std::sort(out.begin(), out.end(), [](const MultiRoundProfile& a, const MultiRoundProfile& b) {
        return to_string(a) < to_string(b);
    });
    return out;
}

SpneResult check_spne(const MultiRoundGame& game, const MultiRoundProfile& profile) {
    multi_round_outcome(game, profile);  // validates shape and commitment
    const int m = game.rounds;
    // Backward-induction order: the deepest subgame is checked first, so the
    // reported failure is the latest point in the game where play unravels.
    for (int r = m - 1; r >= 0; --r) {
        MultiRoundGame tail_game{game.table, m - r};
        MultiRoundProfile tail;
        tail.leader.assign(profile.leader.begin() + r, profile.leader.end());
        for (const auto& [id, vec] : profile.members)
            tail.members[id].assign(vec.begin() + r, vec.end());
        bool leader_locked = false;
        bool revolution = false;
        std::set<PlayerId> locked;
        for (int t = 0; t < r; ++t) {
            bool any_rebel = false;
            for (const auto& [id, vec] : profile.members) {
                if (vec[static_cast<std::size_t>(t)] == MemberAction::REBEL) {
                    locked.insert(id);
                    any_rebel = true;
                }
            }
            if (profile.leader[static_cast<std::size_t>(t)] == LeaderAction::NOTCENSOR) {
                leader_locked = true;
                if (any_rebel) revolution = true;
            }
        }
        MultiScan scan = multi_scan(tail_game, tail, revolution, leader_locked, locked);
        if (!scan.violations.empty())
            return {false, SubgameFailure{r, std::move(scan.violations.front())}};
    }
    return {true, std::nullopt};
}

// ---------------------------------------------------------------- kround --

KRoundScan best_response_scan(const MultiRoundGame& game, const KRoundProfile& profile) {
    KRoundScan out;
    const AdaptiveOutcome base = resolve_kround(game, profile);
    const int k = game.rounds;
    auto classify = [&out](KRoundDeviation d) {
        if (d.gain > 0)
            out.violations.push_back(std::move(d));
        else if (d.gain == 0)
            out.indifferences.push_back(std::move(d));
    };
    {
        // Full scripts realize every adaptive strategy's behaviour at the
        // deviation's own realized history; duplicates collapse after
        // commitment clamping.
        std::set<std::vector<LeaderAction>> seen{base.realized.leader};
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            KRoundProfile d = profile;
            d.leader.script.clear();
            for (int t = 0; t < k; ++t)
                d.leader.script.push_back((mask >> t) & 1 ? LeaderAction::NOTCENSOR
                                                          : LeaderAction::CENSOR);
            d.leader.policy = LeaderPolicy::ALWAYS_CENSOR;  // script covers every round
            AdaptiveOutcome res = resolve_kround(game, d);
            if (!seen.insert(res.realized.leader).second) continue;
            KRoundDeviation dev;
            dev.leader = true;
            dev.gain = res.utilities.leader - base.utilities.leader;
            dev.label = "leader script " + join_actions(res.realized.leader);
            dev.deviated = std::move(d);
            classify(std::move(dev));
        }
    }
    for (const auto& [id, strat] : profile.members) {
        std::set<std::vector<MemberAction>> seen{base.realized.members.at(id)};
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            KRoundProfile d = profile;
            KRoundMemberStrategy ds;
            for (int t = 0; t < k; ++t)
                ds.script.push_back((mask >> t) & 1 ? MemberAction::REBEL
                                                    : MemberAction::CAPITULATE);
            ds.policy = MemberPolicy::ALWAYS_CAPITULATE;  // script covers every round
            d.members[id] = std::move(ds);
            AdaptiveOutcome res = resolve_kround(game, d);
            if (!seen.insert(res.realized.members.at(id)).second) continue;
            KRoundDeviation dev;
            dev.member = id;
            dev.gain = res.utilities.members.at(id) - base.utilities.members.at(id);
            dev.label = "member " + std::to_string(id) + " script " +
                        join_actions(res.realized.members.at(id));
            dev.deviated = std::move(d);
            classify(std::move(dev));
        }
    }
    return out;
}

std::vector<KRoundDeviation> best_response_violations(const MultiRoundGame& game,
                                                      const KRoundProfile& profile) {
    return best_response_scan(game, profile).violations;
}

std::vector<KRoundProfile> enumerate_adaptive_profiles(const MultiRoundGame& game,
                                                       std::size_t limit) {
    if (game.rounds != 2)
        throw std::invalid_argument("enumerate_adaptive_profiles: game must have 2 rounds");
    const std::vector<PlayerId> ids = member_ids(game.table);
    const std::size_t n = ids.size();
    std::size_t space = 1;
    for (std::size_t slot = 0; slot < n + 1; ++slot) {
        if (space > limit / 6)
            throw std::length_error("enumerate_adaptive_profiles: profile space exceeds limit");
        space *= 6;
    }
    const LeaderAction lacts[2] = {LeaderAction::CENSOR, LeaderAction::NOTCENSOR};
    const LeaderPolicy lpols[3] = {LeaderPolicy::ALWAYS_CENSOR, LeaderPolicy::ALWAYS_NOTCENSOR,
                                   LeaderPolicy::Y};
    const MemberAction macts[2] = {MemberAction::CAPITULATE, MemberAction::REBEL};
    const MemberPolicy mpols[3] = {MemberPolicy::ALWAYS_CAPITULATE, MemberPolicy::ALWAYS_REBEL,
                                   MemberPolicy::X};
    std::vector<KRoundProfile> out;
    out.reserve(space);
    std::vector<int> digits(n + 1, 0);  // each in 0..5, action-major
    while (true) {
        KRoundProfile p;
        p.rounds = 2;
        p.leader.script = {lacts[digits[0] / 3]};
        p.leader.policy = lpols[digits[0] % 3];
        for (std::size_t b = 0; b < n; ++b) {
            p.members[ids[b]] = {{macts[digits[b + 1] / 3]}, mpols[digits[b + 1] % 3]};
        }
        out.push_back(std::move(p));
        std::size_t slot = 0;
        while (slot < digits.size() && ++digits[slot] > 5) digits[slot++] = 0;
        if (slot == digits.size()) break;
    }
    return out;
}

std::vector<KRoundProfile> enumerate_pure_nash_adaptive(const MultiRoundGame& game,
                                                        std::size_t limit) {
    std::vector<KRoundProfile> out;
    for (const KRoundProfile& p : enumerate_adaptive_profiles(game, limit))
        if (best_response_violations(game, p).empty()) out.push_back(p);
    std::sort(out.begin(), out.end(), [](const KRoundProfile& a, const KRoundProfile& b) {
        return to_string(a) < to_string(b);
    });
    return out;
}

// --------------------------------------------------------------- twopool --

TwoPoolScan best_response_scan(const TwoPoolGame& game, const TwoPoolProfile& profile) {
    TwoPoolScan out;
    const TwoPoolOutcome base = two_pool_utility(game, profile);
    auto classify = [&out](TwoPoolDeviation d) {
        if (d.gain > 0)
            out.violations.push_back(std::move(d));
        else if (d.gain == 0)
            out.indifferences.push_back(std::move(d));
    };
    {
        TwoPoolProfile d = profile;
        d.leader1 = profile.leader1 == LeaderAction::CENSOR ? LeaderAction::NOTCENSOR
                                                            : LeaderAction::CENSOR;
        TwoPoolDeviation dev;
        dev.pool = 1;
        dev.leader = true;
        dev.gain = two_pool_utility(game, d).leader1 - base.leader1;
        dev.label = std::string("pool-1 leader -> ") + to_string(d.leader1);
        dev.deviated = std::move(d);
        classify(std::move(dev));
    }
    for (const auto& [id, act] : profile.members1) {
        TwoPoolProfile d = profile;
        d.members1[id] = act == MemberAction::CAPITULATE ? MemberAction::REBEL
                                                         : MemberAction::CAPITULATE;
        TwoPoolDeviation dev;
        dev.pool = 1;
        dev.member = id;
        dev.gain = two_pool_utility(game, d).members.at(id) - base.members.at(id);
        dev.label = "pool-1 member " + std::to_string(id) + " -> " + to_string(d.members1.at(id));
        dev.deviated = std::move(d);
        classify(std::move(dev));
    }
    for (LeaderPolicy pol : {LeaderPolicy::ALWAYS_CENSOR, LeaderPolicy::ALWAYS_NOTCENSOR,
                             LeaderPolicy::Y}) {
        if (pol == profile.leader2) continue;
        TwoPoolProfile d = profile;
        d.leader2 = pol;
        TwoPoolDeviation dev;
        dev.pool = 2;
        dev.leader = true;
        dev.gain = two_pool_utility(game, d).leader2 - base.leader2;
        dev.label = std::string("pool-2 leader -> ") + to_string(pol);
        dev.deviated = std::move(d);
        classify(std::move(dev));
    }
    for (const auto& [id, current] : profile.members2) {
        for (MemberPolicy pol : {MemberPolicy::ALWAYS_CAPITULATE, MemberPolicy::ALWAYS_REBEL,
                                 MemberPolicy::X}) {
            if (pol == current) continue;
            TwoPoolProfile d = profile;
            d.members2[id] = pol;
            TwoPoolDeviation dev;
            dev.pool = 2;
            dev.member = id;
            dev.gain = two_pool_utility(game, d).members.at(id) - base.members.at(id);
            dev.label = "pool-2 member " + std::to_string(id) + " -> " + to_string(pol);
            dev.deviated = std::move(d);
            classify(std::move(dev));
        }
    }
    return out;
}

std::vector<TwoPoolDeviation> best_response_violations(const TwoPoolGame& game,
                                                       const TwoPoolProfile& profile) {
    return best_response_scan(game, profile).violations;
}

// ------------------------------------------------------------- verifiers --

Theorem2Report verify_theorem2(const SingleRoundGame& game) {
    Theorem2Report rep;
    const UtilityTable& t = game.table;
    const Stake y = t.total();

    CheckItem pref{"some member strictly prefers the fresh pool", false,
                   "no member gains from the revolution"};
    for (const auto& [id, stake] : t.stakes) {
        if (t.member_rev(id) > t.member_at(id, y)) {
            pref.passed = true;
            pref.detail = "member " + std::to_string(id) + ": " + util_to_string(t.member_rev(id)) +
                          " > " + util_to_string(t.member_at(id, y));
            break;
        }
    }
    rep.hypotheses = {
        members_positive_check(t, "member utilities strictly positive at reachable levels"), pref};
    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }

    rep.enumerated = enumerate_pure_nash(game);

    const std::vector<PlayerId> ids = member_ids(t);
    const std::size_t n = ids.size();
    {
        StrategyProfile b;
        b.leader = LeaderAction::CENSOR;
        for (PlayerId id : ids) b.members[id] = MemberAction::CAPITULATE;
        rep.characterized.push_back(std::move(b));
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        StrategyProfile p;
        p.leader = LeaderAction::NOTCENSOR;
        Stake alpha = t.leader_stake;
        std::vector<PlayerId> rebels;
        for (std::size_t b = 0; b < n; ++b) {
            if ((mask >> b) & 1) {
                p.members[ids[b]] = MemberAction::REBEL;
                rebels.push_back(ids[b]);
            } else {
                p.members[ids[b]] = MemberAction::CAPITULATE;
                alpha += t.stakes.at(ids[b]);
            }
        }
        const bool leader_ok = t.leader_revolution >= t.leader_at(alpha);
        const bool rebels_ok =
            rebels.size() >= 2 || t.member_rev(rebels[0]) >= t.member_at(rebels[0], y);
        if (leader_ok && rebels_ok) rep.characterized.push_back(std::move(p));
    }
    std::sort(rep.characterized.begin(), rep.characterized.end(),
              [](const StrategyProfile& a, const StrategyProfile& b) {
                  return to_string(a) < to_string(b);
              });

    std::set<std::string> ckeys, ekeys;
    for (const auto& p : rep.characterized) ckeys.insert(to_string(p));
    for (const auto& p : rep.enumerated) ekeys.insert(to_string(p));
    for (const auto& p : rep.characterized)
        if (!ekeys.count(to_string(p))) rep.only_characterized.push_back(p);
    for (const auto& p : rep.enumerated)
        if (!ckeys.count(to_string(p))) rep.only_enumerated.push_back(p);
    rep.verdict = rep.only_characterized.empty() && rep.only_enumerated.empty()
                      ? Verdict::CONFIRMED
                      : Verdict::COUNTEREXAMPLE;
    return rep;
}

Theorem3Report verify_theorem3_family(const MultiRoundGame& game, int l) {
    if (l < 1 || l > game.rounds)
        throw std::invalid_argument("verify_theorem3_family: l must be in 1..rounds");
    Theorem3Report rep;
    const UtilityTable& t = game.table;
    const Stake y = t.total();
    CheckItem lead{"leader weakly prefers the full pool to the fresh pool",
                   t.leader_revolution <= t.leader_at(y),
                   "u'^P=" + util_to_string(t.leader_revolution) +
                       " vs u^P_y=" + util_to_string(t.leader_at(y))};
    rep.hypotheses = {
        members_positive_check(t, "member utilities strictly positive at reachable levels"), lead};
    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }

    const int m = game.rounds;
    const std::vector<PlayerId> ids = member_ids(t);
    const std::size_t n = ids.size();
    if (n >= 20) throw std::length_error("verify_theorem3_family: too many members to enumerate");

    bool failed = false;
    auto run = [&](const MultiRoundProfile& p) {
        ++rep.family_size;
        SpneResult r = check_spne(game, p);
        if (!r.ok) {
            failed = true;
            rep.failing_profile = p;
            rep.failure = r.failure;
        }
        return !failed;
    };

    if (l == m) {
        MultiRoundProfile p;
        p.leader = leader_from(m, m + 1);
        for (PlayerId id : ids) p.members[id] = member_from(m, m + 1);
        run(p);
    } else {
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n) && !failed; ++mask) {
            Stake alpha = t.leader_stake;
            std::vector<PlayerId> rebels;
            for (std::size_t b = 0; b < n; ++b) {
                if ((mask >> b) & 1)
                    rebels.push_back(ids[b]);
                else
                    alpha += t.stakes.at(ids[b]);
            }
            if (t.leader_revolution < t.leader_at(alpha)) continue;
            if (rebels.size() == 1 && t.member_rev(rebels[0]) < t.member_at(rebels[0], y)) continue;
            MultiRoundProfile p;
            p.leader = leader_from(m, l + 1);
            for (std::size_t b = 0; b < n; ++b)
                p.members[ids[b]] = member_from(m, (mask >> b) & 1 ? l + 1 : m + 1);
            run(p);
        }
    }
    rep.verdict = failed ? Verdict::COUNTEREXAMPLE : Verdict::CONFIRMED;
    return rep;
}

Theorem4Report verify_theorem4(const MultiRoundGame& game, const AdaptiveProfile& profile,
                               const Theorem4Options& options) {
    if (game.rounds != 2) throw std::invalid_argument("verify_theorem4: game must have 2 rounds");
    Theorem4Report rep;
    const UtilityTable& t = game.table;
    const Stake y = t.total();
    rep.hypotheses = {leader_monotone_check(t, "leader utilities non-decreasing in pool stake"),
                      members_monotone_check(t, "member utilities non-decreasing in pool stake"),
                      members_nonneg_check(t, "member utilities nonnegative")};

    const bool shape = profile.leader_first == LeaderAction::CENSOR &&
                       profile.leader_policy == LeaderPolicy::Y;
    rep.conditions.push_back({"leader censors first and reacts to rebellion", shape,
                              std::string("leader plays (") + to_string(profile.leader_first) +
                                  ", " + to_string(profile.leader_policy) + ")"});

    Stake l = 0;
    int reactive = 0;
    std::vector<PlayerId> rebels;
    for (const auto& [id, sp] : profile.members) {
        if (sp.second == MemberPolicy::X) {
            l += t.stakes.at(id);
            ++reactive;
        }
        if (sp.first == MemberAction::REBEL) rebels.push_back(id);
    }
    rep.conditions.push_back(
        {"leader prefers the fresh pool to censoring the reactive members",
         t.leader_revolution >= t.leader_at(y - l),
         "u'^P=" + util_to_string(t.leader_revolution) + " vs u^P at stake " +
             std::to_string(y - l) + " = " + util_to_string(t.leader_at(y - l))});
    rep.conditions.push_back({"unique round-one rebel", rebels.size() == 1,
                              std::to_string(rebels.size()) + " rebel(s)"});
    rep.conditions.push_back({"at least two reactive member policies", reactive >= 2,
                              std::to_string(reactive) + " reactive member(s)"});
    for (PlayerId i : rebels) {
        rep.conditions.push_back(
            {"rebel " + std::to_string(i) + ": leader cannot profit by censoring them out",
             t.leader_revolution <= t.leader_at(y - t.stakes.at(i)),
             "u'^P=" + util_to_string(t.leader_revolution) + " vs u^P at stake " +
                 std::to_string(y - t.stakes.at(i)) + " = " +
                 util_to_string(t.leader_at(y - t.stakes.at(i)))});
        CheckItem thr;
        if (options.literal_threshold_reading) {
            thr.name = "rebel " + std::to_string(i) + ": own-stake threshold (literal reading)";
            try {
                const Util v = t.member_at(i, t.stakes.at(i));
                thr.passed = v >= 2 * t.member_at(i, y);
                thr.detail = "u at own stake = " + util_to_string(v) + " vs 2*u_y = " +
                             util_to_string(2 * t.member_at(i, y));
            } catch (const std::out_of_range&) {
                thr.passed = false;
                thr.detail = "table lacks the member's own-stake level; condition unevaluable";
            }
        } else {
            thr.name = "rebel " + std::to_string(i) + ": fresh pool beats two captive rounds";
            thr.passed = t.member_rev(i) >= 2 * t.member_at(i, y);
            thr.detail = "u'=" + util_to_string(t.member_rev(i)) + " vs 2*u_y = " +
                         util_to_string(2 * t.member_at(i, y));
        }
        rep.conditions.push_back(std::move(thr));
    }

    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }
    KRoundScan scan = best_response_scan(game, adaptive_to_kround(profile));
    rep.violations = std::move(scan.violations);
    rep.verdict = rep.violations.empty() ? Verdict::CONFIRMED : Verdict::COUNTEREXAMPLE;
    return rep;
}

Theorem5Report verify_theorem5(const MultiRoundGame& game) {
    if (game.rounds != 2) throw std::invalid_argument("verify_theorem5: game must have 2 rounds");
    Theorem5Report rep;
    const UtilityTable& t = game.table;
    const Stake y = t.total();
    rep.part1.name = "no equilibrium keeps censoring against a rebellion";
    rep.part2.name = "equilibria that end open pay dissenters the fresh-pool utility";
    rep.hypotheses = {leader_monotone_check(t, "leader utilities non-decreasing in pool stake"),
                      members_monotone_check(t, "member utilities non-decreasing in pool stake")};
    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }

    std::vector<KRoundProfile> equilibria;
    for (const KRoundProfile& p : enumerate_adaptive_profiles(game))
        if (best_response_violations(game, p).empty()) equilibria.push_back(p);
    rep.equilibria = equilibria.size();

    auto reactive_stake = [&t](const KRoundProfile& p) {
        Stake l = 0;
        for (const auto& [id, s] : p.members)
            if (s.policy == MemberPolicy::X) l += t.stakes.at(id);
        return l;
    };

    // Part I: the premise must be reachable at all before asserting over it.
    bool p1_sat = false;
    if (!t.stakes.empty())
        for (Stake l : member_subset_sums(t))
            if (t.leader_revolution > t.leader_at(y - l)) p1_sat = true;
    rep.part1.checks.push_back(
        {"some reactive set makes censoring strictly worse than the fresh pool", p1_sat,
         "u'^P=" + util_to_string(t.leader_revolution)});
    if (!p1_sat) {
        rep.part1.verdict = Verdict::HYPOTHESIS_FAILURE;
    } else {
        for (const KRoundProfile& e : equilibria) {
            bool rebel1 = false;
            for (const auto& [id, s] : e.members)
                if (s.script.at(0) == MemberAction::REBEL) rebel1 = true;
            if (!rebel1) continue;
            if (t.leader_revolution <= t.leader_at(y - reactive_stake(e))) continue;
            const AdaptiveOutcome o = resolve_kround(game, e);
            if (e.leader.script.at(0) == LeaderAction::CENSOR &&
                o.realized.leader.at(1) == LeaderAction::CENSOR)
                rep.part1.witnesses.push_back(e);
        }
        rep.part1.checks.push_back({"every gated equilibrium stops censoring in round two",
                                    rep.part1.witnesses.empty(),
                                    std::to_string(rep.part1.witnesses.size()) + " witness(es)"});
        rep.part1.verdict =
            rep.part1.witnesses.empty() ? Verdict::CONFIRMED : Verdict::COUNTEREXAMPLE;
    }

    // Part II.
    std::vector<PlayerId> keen;
    for (const auto& [id, stake] : t.stakes)
        if (t.member_rev(id) > 2 * t.member_at(id, y)) keen.push_back(id);
    rep.part2.checks.push_back(
        {"some member strictly prefers the fresh pool to two captive rounds", !keen.empty(),
         std::to_string(keen.size()) + " member(s)"});
    if (keen.empty()) {
        rep.part2.verdict = Verdict::HYPOTHESIS_FAILURE;
    } else {
        const SingleRoundGame sg{t};
        for (const KRoundProfile& e : equilibria) {
            bool has_reactive = false;
            for (const auto& [id, s] : e.members)
                if (s.policy == MemberPolicy::X) has_reactive = true;
            if (!has_reactive) continue;
            const AdaptiveOutcome o = resolve_kround(game, e);
            if (o.realized.leader.at(1) != LeaderAction::NOTCENSOR) continue;
            StrategyProfile r1;
            r1.leader = o.realized.leader.at(0);
            for (const auto& [id, vec] : o.realized.members) r1.members[id] = vec.at(0);
            for (PlayerId i : keen) {
                const Util second = o.utilities.members.at(i) - member_utility(sg, r1, i);
                if (second != t.member_rev(i)) {
                    rep.part2.witnesses.push_back(e);
                    break;
                }
            }
        }
        rep.part2.checks.push_back(
            {"gated equilibria pay the fresh-pool utility in round two",
             rep.part2.witnesses.empty(),
             std::to_string(rep.part2.witnesses.size()) + " witness(es)"});
        rep.part2.verdict =
            rep.part2.witnesses.empty() ? Verdict::CONFIRMED : Verdict::COUNTEREXAMPLE;
    }

    if (rep.part1.verdict == Verdict::COUNTEREXAMPLE ||
        rep.part2.verdict == Verdict::COUNTEREXAMPLE)
        rep.verdict = Verdict::COUNTEREXAMPLE;
    else if (rep.part1.verdict == Verdict::HYPOTHESIS_FAILURE ||
             rep.part2.verdict == Verdict::HYPOTHESIS_FAILURE)
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
    else
        rep.verdict = Verdict::CONFIRMED;
    return rep;
}

Theorem6Report verify_theorem6(const TwoPoolGame& game, const TwoPoolProfile& profile) {
    Theorem6Report rep;
    const Stake y1 = game.pool1.total();
    const Stake y2 = game.pool2.total();
    rep.hypotheses = {
        leader_monotone_check(game.pool1, "pool-1 leader utilities non-decreasing"),
        members_monotone_check(game.pool1, "pool-1 member utilities non-decreasing"),
        members_nonneg_check(game.pool1, "pool-1 member utilities nonnegative"),
        leader_monotone_check(game.pool2, "pool-2 leader utilities non-decreasing"),
        members_monotone_check(game.pool2, "pool-2 member utilities non-decreasing"),
        members_nonneg_check(game.pool2, "pool-2 member utilities nonnegative")};

    const bool shape = profile.leader1 == LeaderAction::CENSOR &&
                       profile.leader2 == LeaderPolicy::Y;
    rep.conditions.push_back({"pool-1 leader censors, pool-2 leader reacts", shape,
                              std::string("(") + to_string(profile.leader1) + ", " +
                                  to_string(profile.leader2) + ")"});
    std::vector<PlayerId> rebels;
    for (const auto& [id, act] : profile.members1)
        if (act == MemberAction::REBEL) rebels.push_back(id);
    rep.conditions.push_back({"unique pool-1 rebel", rebels.size() == 1,
                              std::to_string(rebels.size()) + " rebel(s)"});
    Stake l = 0;
    int reactive = 0;
    for (const auto& [id, pol] : profile.members2) {
        if (pol == MemberPolicy::X) {
            l += game.pool2.stakes.at(id);
            ++reactive;
        }
    }
    rep.conditions.push_back({"at least two reactive pool-2 members", reactive >= 2,
                              std::to_string(reactive) + " reactive member(s)"});
    rep.conditions.push_back(
        {"pool-2 leader prefers the fresh pool to censoring the reactive members",
         game.pool2.leader_revolution >= game.pool2.leader_at(y2 - l),
         "u'^P2=" + util_to_string(game.pool2.leader_revolution) + " vs u^P2 at stake " +
             std::to_string(y2 - l) + " = " + util_to_string(game.pool2.leader_at(y2 - l))});
    for (PlayerId i : rebels) {
        rep.conditions.push_back(
            {"rebel " + std::to_string(i) + ": pool-1 leader cannot profit by censoring them out",
             game.pool1.leader_revolution <= game.pool1.leader_at(y1 - game.pool1.stakes.at(i)),
             "u'^P1=" + util_to_string(game.pool1.leader_revolution) + " vs u^P1 at stake " +
                 std::to_string(y1 - game.pool1.stakes.at(i)) + " = " +
                 util_to_string(game.pool1.leader_at(y1 - game.pool1.stakes.at(i)))});
        rep.conditions.push_back(
            {"rebel " + std::to_string(i) + ": forfeits enough to be credible",
             two_pool_event_d(game, i),
             "u'=" + util_to_string(game.pool1.member_rev(i)) + " vs 2*u_y1 = " +
                 util_to_string(2 * game.pool1.member_at(i, y1))});
    }

    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }
    TwoPoolScan scan = best_response_scan(game, profile);
    rep.violations = std::move(scan.violations);
    rep.verdict = rep.violations.empty() ? Verdict::CONFIRMED : Verdict::COUNTEREXAMPLE;
    return rep;
}

KRoundReport verify_kround_extension(const MultiRoundGame& game, int j,
                                     const KRoundProfile& profile) {
    const int k = game.rounds;
    if (profile.rounds != k)
        throw std::invalid_argument("verify_kround_extension: profile round count mismatch");
    if (j < 1 || j >= k)
        throw std::invalid_argument("verify_kround_extension: j must satisfy 1 <= j < rounds");
    KRoundReport rep;
    const UtilityTable& t = game.table;
    const Stake y = t.total();
    rep.hypotheses = {leader_monotone_check(t, "leader utilities non-decreasing in pool stake"),
                      members_monotone_check(t, "member utilities non-decreasing in pool stake"),
                      members_nonneg_check(t, "member utilities nonnegative")};

    const AdaptiveOutcome o = resolve_kround(game, profile);

    bool leader_shape = profile.leader.script.size() == static_cast<std::size_t>(j) &&
                        profile.leader.policy == LeaderPolicy::Y;
    for (LeaderAction a : profile.leader.script)
        if (a != LeaderAction::CENSOR) leader_shape = false;
    rep.conditions.push_back({"leader censors for the holdout rounds then reacts", leader_shape,
                              "script [" + join_actions(profile.leader.script) + "] policy " +
                                  to_string(profile.leader.policy)});

    std::vector<PlayerId> sustained;
    for (const auto& [id, vec] : o.realized.members) {
        bool all_rebel = true;
        for (int r = 0; r < j; ++r)
            if (vec.at(static_cast<std::size_t>(r)) != MemberAction::REBEL) all_rebel = false;
        if (all_rebel) sustained.push_back(id);
    }
    rep.conditions.push_back({"unique sustained rebel", sustained.size() == 1,
                              std::to_string(sustained.size()) + " sustained rebel(s)"});

    Stake l = 0;
    int reactive = 0;
    for (const auto& [id, s] : profile.members) {
        if (s.policy == MemberPolicy::X) {
            l += t.stakes.at(id);
            ++reactive;
        }
    }
    rep.conditions.push_back({"at least two reactive member policies", reactive >= 2,
                              std::to_string(reactive) + " reactive member(s)"});
    rep.conditions.push_back(
        {"leader prefers the fresh pool to censoring the reactive members",
         t.leader_revolution >= t.leader_at(y - l),
         "u'^P=" + util_to_string(t.leader_revolution) + " vs u^P at stake " +
             std::to_string(y - l) + " = " + util_to_string(t.leader_at(y - l))});
    for (PlayerId i : sustained) {
        rep.conditions.push_back(
            {"rebel " + std::to_string(i) + ": leader cannot profit by censoring them out",
             t.leader_revolution <= t.leader_at(y - t.stakes.at(i)),
             "u'^P=" + util_to_string(t.leader_revolution) + " vs u^P at stake " +
                 std::to_string(y - t.stakes.at(i)) + " = " +
                 util_to_string(t.leader_at(y - t.stakes.at(i)))});
        // Scaled threshold u'_i >= (k/(k-j)) u^i_y, compared exactly by cross
        // multiplication.
        const Util lhs = static_cast<Util>(k - j) * t.member_rev(i);
        const Util rhs = static_cast<Util>(k) * t.member_at(i, y);
        rep.conditions.push_back(
            {"rebel " + std::to_string(i) + ": fresh pool beats the holdout forfeit",
             lhs >= rhs,
             "(k-j)*u' = " + util_to_string(lhs) + " vs k*u_y = " + util_to_string(rhs)});
    }

    if (!all_passed(rep.hypotheses)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        return rep;
    }
    KRoundScan scan = best_response_scan(game, profile);
    rep.violations = std::move(scan.violations);
    rep.verdict = rep.violations.empty() ? Verdict::CONFIRMED : Verdict::COUNTEREXAMPLE;
    return rep;
}

}  // namespace poolsim
