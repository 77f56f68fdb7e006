#include "poolsim/sim.hpp"

#include "poolsim/beacon.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace poolsim {

namespace {

constexpr double kEps = 1e-9;

PlayerId tx_author(const Transaction& tx) {
    return std::visit([](const auto& t) -> PlayerId {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Compound>) return t.delegate_part.author;
        else return t.author;
    }, tx);
}

const Register* register_part(const Transaction& tx) {
    if (const auto* g = std::get_if<Register>(&tx)) return g;
    if (const auto* c = std::get_if<Compound>(&tx))
        return c->register_part ? &*c->register_part : nullptr;
    return nullptr;
}

bool carries_revoke(const Transaction& tx) {
    if (std::holds_alternative<Revoke>(tx)) return true;
    if (const auto* c = std::get_if<Compound>(&tx)) return c->revoke_part.has_value();
    return false;
}

const Delegate* delegate_part(const Transaction& tx) {
    if (const auto* d = std::get_if<Delegate>(&tx)) return d;
    if (const auto* c = std::get_if<Compound>(&tx)) return &c->delegate_part;
    return nullptr;
}

struct PendingEntry {
    Transaction tx;
    std::string id;
    std::string kind;
    PlayerId author = 0;
    bool reg = false;
    bool rev = false;
    bool rebel_reg = false;  // registers a pool outside the genesis lineup
    std::size_t sub_index = 0;
};

struct RunContext {
    const Scenario& s;
    std::optional<ProducerDeviation> deviation;
    LedgerState state;
    std::vector<PendingEntry> queue;
    SimTrace trace;
    std::set<PoolName> genesis_pools;
    std::map<PlayerId, PoolName> last_pool;
    std::map<PoolName, Stake> self_restore;  // operator stake to restore on re-registration
    int64_t first_rebel_round = -1;
    uint64_t nonce_counter = 0;
    PoolName game_pool;
    PlayerId game_leader = -1;
};

bool has_active_delegation(const LedgerState& state, PlayerId player) {
    for (const auto& [nonce, rec] : state.delegations)
        if (rec.active && rec.author == player) return true;
    return false;
}

bool pending_registers_pool(const std::vector<PendingEntry>& queue, const PoolName& pool) {
    for (const PendingEntry& e : queue) {
        const Register* g = register_part(e.tx);
        if (g && g->pool == pool) return true;
    }
    return false;
}

void submit(RunContext& c, const Transaction& tx, int64_t round) {
    PendingEntry e;
    e.tx = tx;
    e.id = transaction_id(tx);
    e.kind = transaction_kind(tx);
    e.author = tx_author(tx);
    const Register* g = register_part(tx);
    e.reg = g != nullptr;
    e.rev = carries_revoke(tx);
    e.rebel_reg = g && !c.genesis_pools.count(g->pool);
    e.sub_index = c.trace.submissions.size();

    SubmissionRecord rec;
    rec.tx_id = e.id;
    rec.kind = e.kind;
    rec.author = e.author;
    rec.submitted_round = round;
    c.queue.push_back(e);
    if (c.s.classify_submissions) {
        std::vector<Transaction> pending;
        pending.reserve(c.queue.size());
        for (const PendingEntry& p : c.queue) pending.push_back(p.tx);
        rec.classified = true;
        rec.classification =
            classify_transaction(*c.s.model, c.state, tx, pending, c.s.horizon).verdict;
    }
    c.trace.submissions.push_back(rec);
    if (e.rebel_reg && c.first_rebel_round < 0) c.first_rebel_round = round;
}

LeaderAction rational_stance(const OperatorPolicy& pol, int64_t round, int64_t first_rebel_round) {
    if (round <= 1) return pol.first;
    switch (pol.policy) {
        case LeaderPolicy::ALWAYS_CENSOR: return LeaderAction::CENSOR;
        case LeaderPolicy::ALWAYS_NOTCENSOR: return LeaderAction::NOTCENSOR;
        case LeaderPolicy::Y:
            return (first_rebel_round >= 0 && first_rebel_round < round) ? LeaderAction::NOTCENSOR
                                                                         : pol.first;
    }
    return pol.first;
}

bool producer_censors(const RunContext& c, const OperatorPolicy& pol, const PendingEntry& e,
                      PlayerId producer_player, const PoolName& producer_pool,
                      const PoolName& audited, int64_t round) {
    if (c.deviation && c.deviation->operator_id == producer_player && c.deviation->tx_id == e.id)
        return true;
    if (e.author == producer_player) return false;
    // Worst case: every non-audited operator blocks competitor registrations.
    if (c.s.others_block && e.rebel_reg && producer_pool != audited) return true;

    const bool regrev = e.reg || e.rev;
    switch (pol.kind) {
        case OperatorPolicy::Kind::BYZANTINE:
            switch (pol.censors) {
                case CensorTarget::REGISTRATIONS: return e.reg;
                case CensorTarget::REVOCATIONS: return e.rev;
                case CensorTarget::REGISTRATIONS_AND_REVOCATIONS: return regrev;
                case CensorTarget::ALL: return true;
            }
            return true;
        case OperatorPolicy::Kind::SCRIPTED: {
            if (!regrev) return false;
            if (pol.script.empty()) return false;
            const std::size_t idx =
                std::min<std::size_t>(static_cast<std::size_t>(round), pol.script.size());
            return pol.script[idx - 1] == LeaderAction::CENSOR;
        }
        case OperatorPolicy::Kind::RATIONAL: {
            if (regrev)
                return rational_stance(pol, round, c.first_rebel_round) == LeaderAction::CENSOR;
            // Self-interest: censor only what strictly lowers the producer's
            // own utility; strongly incentive-consistent transactions never do.
            if (c.s.model && admissible(c.state, e.tx).ok) {
                try {
                    const double before = evaluate_utility(*c.s.model, producer_player, c.state);
                    const double after =
                        evaluate_utility(*c.s.model, producer_player,
                                         apply_transaction(c.state, e.tx));
                    if (after < before - kEps) return true;
                } catch (const std::out_of_range&) {
                    // table model gap: no opinion, include
                }
            }
            return false;
        }
    }
    return false;
}

MemberAction agent_action(const MemberAgent& a, int64_t round, int64_t first_rebel_round) {
    if (round <= static_cast<int64_t>(a.script.size()))
        return a.script[static_cast<std::size_t>(round - 1)];
    switch (a.policy) {
        case MemberPolicy::ALWAYS_CAPITULATE: return MemberAction::CAPITULATE;
        case MemberPolicy::ALWAYS_REBEL: return MemberAction::REBEL;
        case MemberPolicy::X:
            return (first_rebel_round >= 0 && first_rebel_round < round) ? MemberAction::REBEL
                                                                         : MemberAction::CAPITULATE;
    }
    return MemberAction::CAPITULATE;
}

std::string fresh_nonce(RunContext& c, int64_t round) {
    std::ostringstream os;
    os << "sim-" << round << "-" << c.nonce_counter++;
    return os.str();
}

Util game_round_utility(const RunContext& c, const PoolTable& pt, PlayerId player) {
    const UtilityTable& t = *c.s.game_table;
    if (player == c.game_leader) {
        if (c.trace.revolution) return t.leader_revolution;
        auto it = pt.find(c.game_pool);
        if (it == pt.end() || it->second.dissolved) return 0;
        try {
            return t.leader_at(it->second.delegated);
        } catch (const std::out_of_range&) {
            return 0;
        }
    }
    if (!t.stakes.count(player)) return 0;
    if (c.trace.revolution) {
        try {
            return t.member_rev(player);
        } catch (const std::out_of_range&) {
            return 0;
        }
    }
    bool delegated = false;
    for (const auto& [nonce, rec] : c.state.delegations)
        if (rec.active && rec.author == player && rec.pool == c.game_pool) {
            delegated = true;
            break;
        }
    if (!delegated) return 0;
    auto it = pt.find(c.game_pool);
    if (it == pt.end() || it->second.dissolved) return 0;
    try {
        return t.member_at(player, it->second.delegated);
    } catch (const std::out_of_range&) {
        return 0;
    }
}

void validate_scenario(const Scenario& s, const LedgerState& genesis) {
    for (const auto& [pool, pol] : s.operators)
        if (!genesis.pools.count(pool))
            throw ScenarioError("operator policy for unknown pool '" + pool + "'");
    for (const auto& [id, agent] : s.members)
        if (!s.players.count(id))
            throw ScenarioError("member agent for unknown player " + std::to_string(id));
    if (s.game_table) {
        if (s.operators.size() != 1)
            throw ScenarioError("a game-shaped scenario needs exactly one operator policy");
        for (const auto& [id, st] : s.game_table->stakes)
            if (!s.players.count(id))
                throw ScenarioError("game table member " + std::to_string(id) +
                                    " is not a scenario player");
    }
    if (s.classify_submissions && !s.model)
        throw ScenarioError("submission classification requires a utility model");
}

}  // namespace

SimTrace run_rounds(const Scenario& s, int64_t rounds, uint64_t seed,
                    const std::optional<ProducerDeviation>& deviation) {
    if (rounds < 0) throw ScenarioError("negative round count");

    RunContext c{s, deviation, scenario_genesis(s), {}, {}, {}, {}, {}, -1, 0, {}, -1};
    validate_scenario(s, c.state);

    for (const auto& [pool, rec] : c.state.pools)
        if (!rec.dissolved) c.genesis_pools.insert(pool);
    for (const auto& [nonce, rec] : c.state.delegations)
        if (rec.active) c.last_pool[rec.author] = rec.pool;
    if (s.game_table) {
        c.game_pool = s.operators.begin()->first;
        c.game_leader = c.state.pools.at(c.game_pool).operator_id;
    }

    for (const auto& [id, st] : s.players) c.trace.cumulative[id] = 0;

    const Beacon beacon{seed};
    for (int64_t r = 1; r <= rounds; ++r) {
        TraceRound round;
        round.round = r;
        round.rho = draw_randomness(beacon, r - 1);

        std::vector<PoolName> candidates;
        for (const auto& [pool, rec] : c.state.pools)
            if (!rec.dissolved) candidates.push_back(pool);

        if (s.audit && !candidates.empty()) {
            round.audited = select_pool_for_audit(round.rho, candidates);
            Stake self = 0;
            const PlayerId op = c.state.pools.at(round.audited).operator_id;
            for (const auto& [nonce, rec] : c.state.delegations)
                if (rec.active && rec.pool == round.audited && rec.author == op)
                    self += rec.amount;
            c.self_restore[round.audited] = self;
            dissolve_pool_in_place(c.state, round.audited);
        }

        if (r == 1)
            for (const Transaction& tx : s.pending) submit(c, tx, r);

        // Operators stand dissolved pools back up (original parameters kept).
        for (const auto& [pool, rec] : c.state.pools) {
            if (!rec.dissolved || pending_registers_pool(c.queue, pool)) continue;
            const Register reg{rec.operator_id, pool, rec.params};
            const Stake amount = c.self_restore.count(pool) ? c.self_restore.at(pool) : 0;
            if (amount > 0 && amount <= undelegated_stake(c.state, rec.operator_id)) {
                const Delegate d{rec.operator_id, amount, pool, fresh_nonce(c, r)};
                submit(c, Compound{d, std::nullopt, reg}, r);
            } else {
                submit(c, reg, r);
            }
        }

        // Dissolved-pool members act per their scripts and policies.
        for (const auto& [id, agent] : s.members) {
            if (has_active_delegation(c.state, id)) continue;
            const Stake und = undelegated_stake(c.state, id);
            if (und <= 0) continue;
            bool busy = false;
            for (const PendingEntry& e : c.queue)
                if (e.author == id) busy = true;
            if (busy) continue;

            const MemberAction act = agent_action(agent, r, c.first_rebel_round);
            if (act == MemberAction::CAPITULATE) {
                auto it = c.last_pool.find(id);
                if (it == c.last_pool.end()) continue;
                submit(c, Delegate{id, und, it->second, fresh_nonce(c, r)}, r);
            } else {
                const auto pit = c.state.pools.find(s.rebel_pool);
                const bool registered = pit != c.state.pools.end() && !pit->second.dissolved;
                const Delegate d{id, und, s.rebel_pool, fresh_nonce(c, r)};
                if (registered || pending_registers_pool(c.queue, s.rebel_pool))
                    submit(c, d, r);
                else
                    submit(c, Compound{d, std::nullopt, Register{id, s.rebel_pool, "rebel"}}, r);
            }
        }

        // The round's producer applies its filter in submission order.
        PoolName producer_pool;
        if (s.producer == ProducerMode::AUDITED_LEADER && !round.audited.empty())
            producer_pool = round.audited;
        else if (!candidates.empty())
            producer_pool = candidates[static_cast<std::size_t>((r - 1) %
                                                                static_cast<int64_t>(candidates.size()))];

        if (!producer_pool.empty()) {
            const PlayerId producer = c.state.pools.at(producer_pool).operator_id;
            round.producer = producer;
            static const OperatorPolicy kDefaultPolicy{};
            const auto pit = s.operators.find(producer_pool);
            const OperatorPolicy& pol = pit != s.operators.end() ? pit->second : kDefaultPolicy;

            std::vector<PendingEntry> next;
            for (PendingEntry& e : c.queue) {
                if (producer_censors(c, pol, e, producer, producer_pool, round.audited, r)) {
                    round.decisions.push_back({e.id, e.kind, e.author, false});
                    next.push_back(std::move(e));
                    continue;
                }
                if (apply_in_place(c.state, e.tx)) {
                    round.decisions.push_back({e.id, e.kind, e.author, true});
                    c.trace.submissions[e.sub_index].applied_round = r;
                    if (e.rebel_reg) c.trace.revolution = true;
                    if (const Delegate* d = delegate_part(e.tx)) c.last_pool[d->author] = d->pool;
                } else {
                    next.push_back(std::move(e));  // inadmissible now: stays pending
                }
            }
            c.queue = std::move(next);
        }

        c.state.round = r;
        round.pool_table = build_pool_table(c.state);
        for (const auto& [id, st] : s.players) {
            Util v = 0;
            if (s.game_table) v = game_round_utility(c, round.pool_table, id);
            else if (s.model) v = util_from_double(evaluate_utility(*s.model, id, c.state));
            round.utilities[id] = v;
            c.trace.cumulative[id] += v;
        }
        c.trace.rounds.push_back(std::move(round));
    }

    c.trace.final_state = std::move(c.state);
    return std::move(c.trace);
}

bool liveness_monitor(const SimTrace& trace, const std::string& tx_id, int64_t u) {
    for (const SubmissionRecord& rec : trace.submissions) {
        if (rec.tx_id != tx_id) continue;
        return rec.applied_round >= 0 && rec.applied_round - rec.submitted_round < u;
    }
    throw std::invalid_argument("transaction never submitted: " + tx_id);
}

Theorem1Report theorem1_experiment(const Scenario& s, double byzantine_fraction, int64_t rounds,
                                   uint64_t seed) {
    if (!(byzantine_fraction < s.byzantine_threshold))
        throw ScenarioError("byzantine fraction is not below the scenario threshold");
    if (!s.model) throw ScenarioError("the experiment requires a utility model");

    const LedgerState genesis = scenario_genesis(s);
    std::vector<PoolName> pools;
    for (const auto& [pool, rec] : genesis.pools)
        if (!rec.dissolved) pools.push_back(pool);
    if (pools.empty()) throw ScenarioError("the experiment requires at least one pool");

    const std::size_t byz =
        static_cast<std::size_t>(std::floor(byzantine_fraction * static_cast<double>(pools.size())));

    Scenario run = s;
    run.audit = false;  // the liveness result concerns plain production, not audits
    run.producer = ProducerMode::ROUND_ROBIN;
    run.classify_submissions = true;
    run.operators.clear();

    Theorem1Report rep;
    rep.rounds = rounds;
    rep.byzantine_fraction = byzantine_fraction;
    std::set<PlayerId> rational_ops;
    for (std::size_t i = 0; i < pools.size(); ++i) {
        OperatorPolicy pol;
        if (i < byz) {
            pol.kind = OperatorPolicy::Kind::BYZANTINE;
            pol.censors = CensorTarget::ALL;
            rep.byzantine_pools.push_back(pools[i]);
        } else {
            pol.kind = OperatorPolicy::Kind::RATIONAL;
            pol.first = LeaderAction::CENSOR;  // incumbent stance on registrations/revocations
            pol.policy = LeaderPolicy::ALWAYS_CENSOR;
            rational_ops.insert(genesis.pools.at(pools[i]).operator_id);
        }
        run.operators[pools[i]] = pol;
    }

    const SimTrace base = run_rounds(run, rounds, seed);
    rep.all_live = true;
    for (const SubmissionRecord& sub : base.submissions) {
        LivenessEntry e;
        e.tx_id = sub.tx_id;
        e.kind = sub.kind;
        e.submitted_round = sub.submitted_round;
        e.applied_round = sub.applied_round;
        e.in_scope = sub.classification == Classification::STRONGLY_IC;
        e.live = sub.applied_round >= 0 && sub.applied_round - sub.submitted_round < s.liveness_u;
        if (e.in_scope && !e.live) rep.all_live = false;
        rep.liveness.push_back(e);
    }

    rep.no_positive_gain = true;
    for (PlayerId op : rational_ops) {
        for (const SubmissionRecord& sub : base.submissions) {
            if (sub.classification != Classification::STRONGLY_IC || sub.applied_round < 0)
                continue;
            const SimTrace dev = run_rounds(run, rounds, seed, ProducerDeviation{op, sub.tx_id});
            DeviationAuditEntry entry;
            entry.operator_id = op;
            entry.tx_id = sub.tx_id;
            entry.base = base.cumulative.at(op);
            entry.deviated = dev.cumulative.at(op);
            entry.gain = entry.deviated - entry.base;
            if (entry.gain > 0) rep.no_positive_gain = false;
            rep.deviations.push_back(entry);
        }
    }
    return rep;
}

CartelReport cartel_equilibrium_check(const Scenario& s, uint64_t seed) {
    CartelReport rep;
    const LedgerState genesis = scenario_genesis(s);
    const PoolTable table = build_pool_table(genesis);

    std::vector<PoolName> incumbents;
    for (const auto& [pool, row] : table)
        if (!row.dissolved) incumbents.push_back(pool);
    if (incumbents.empty()) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        rep.detail = "no incumbent pool";
        return rep;
    }

    const Transaction* competitor = nullptr;
    const Register* competitor_reg = nullptr;
    for (const Transaction& tx : s.pending) {
        if (const Register* g = register_part(tx)) {
            competitor = &tx;
            competitor_reg = g;
            break;
        }
    }
    if (!competitor) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        rep.detail = "no pending competitor registration";
        return rep;
    }

    rep.mechanism = s.audit && s.game_table.has_value();
    if (rep.mechanism) {
        if (incumbents.size() != 1 || s.operators.size() != 1) {
            rep.verdict = Verdict::HYPOTHESIS_FAILURE;
            rep.detail = "the mechanism check expects a single incumbent pool";
            return rep;
        }
        const UtilityTable& t = *s.game_table;
        Util full = 0;
        try {
            full = t.leader_at(t.total());
        } catch (const std::out_of_range&) {
            rep.verdict = Verdict::HYPOTHESIS_FAILURE;
            rep.detail = "game table lacks the full-pool level";
            return rep;
        }
        if (!(t.leader_revolution < full)) {
            rep.verdict = Verdict::HYPOTHESIS_FAILURE;
            rep.detail = "competitor inclusion does not strictly lower the operator";
            return rep;
        }
        rep.precondition_ok = true;

        const PoolName pool = incumbents.front();
        const PlayerId op = table.at(pool).operator_id;
        Scenario censor_forever = s;
        censor_forever.operators[pool] = {OperatorPolicy::Kind::RATIONAL, CensorTarget::ALL,
                                          {}, LeaderAction::CENSOR, LeaderPolicy::ALWAYS_CENSOR};
        Scenario stop_once_audited = s;
        stop_once_audited.operators[pool] = {OperatorPolicy::Kind::RATIONAL, CensorTarget::ALL,
                                             {}, LeaderAction::CENSOR, LeaderPolicy::Y};
        const int64_t rounds = s.default_rounds;
        const SimTrace base = run_rounds(censor_forever, rounds, seed);
        const SimTrace dev = run_rounds(stop_once_audited, rounds, seed);

        CartelDeviation d;
        d.pool = pool;
        d.operator_id = op;
        d.label = "stop censoring once audited";
        d.base = base.cumulative.at(op);
        d.deviated = dev.cumulative.at(op);
        d.gain = d.deviated - d.base;
        rep.deviations.push_back(d);
        rep.verdict = d.gain > 0 ? Verdict::COUNTEREXAMPLE : Verdict::CONFIRMED;
        rep.detail = d.gain > 0 ? "the audited operator profits by not censoring"
                                : "censoring remains an equilibrium";
        return rep;
    }

    if (!s.model || !std::holds_alternative<LinearRewardModel>(*s.model)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        rep.detail = "the static check requires the linear reward model";
        return rep;
    }
    const LinearRewardModel& lin = std::get<LinearRewardModel>(*s.model);

    double comp_margin = lin.margin, comp_cost = lin.cost;
    parse_pool_overrides(competitor_reg->params, comp_margin, comp_cost);

    std::map<PoolName, double> margins;
    for (const PoolName& pool : incumbents) {
        double m = lin.margin, cost = lin.cost;
        parse_pool_overrides(genesis.pools.at(pool).params, m, cost);
        margins[pool] = m;
    }

    LedgerState after = genesis;
    if (!apply_in_place(after, *competitor)) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        rep.detail = "competitor registration inadmissible: " +
                     admissible(genesis, *competitor).reason;
        return rep;
    }
    // Rational migration: members move to a strictly cheaper pool.
    uint64_t mig = 0;
    for (const auto& [nonce, rec] : genesis.delegations) {
        if (!rec.active) continue;
        auto pit = table.find(rec.pool);
        if (pit == table.end() || pit->second.dissolved) continue;
        if (rec.author == pit->second.operator_id) continue;
        if (!(comp_margin < margins.at(rec.pool) - 1e-12)) continue;
        apply_in_place(after, Revoke{rec.author, nonce});
        apply_in_place(after,
                       Delegate{rec.author, rec.amount, competitor_reg->pool,
                                "migration-" + std::to_string(mig++)});
    }

    bool all_lower = true;
    PoolName slack;
    for (const PoolName& pool : incumbents) {
        const PlayerId op = table.at(pool).operator_id;
        const double before = evaluate_utility(*s.model, op, genesis);
        const double deviated = evaluate_utility(*s.model, op, after);
        CartelDeviation d;
        d.pool = pool;
        d.operator_id = op;
        d.label = "include the competitor registration";
        d.base = util_from_double(before);
        d.deviated = util_from_double(deviated);
        d.gain = d.deviated - d.base;
        rep.deviations.push_back(d);
        if (!(deviated < before - kEps)) {
            all_lower = false;
            slack = pool;
        }
    }
    if (!all_lower) {
        rep.verdict = Verdict::HYPOTHESIS_FAILURE;
        rep.detail = "competitor is not strictly harmful to the operator of pool '" + slack + "'";
        rep.deviations.clear();
        return rep;
    }
    rep.precondition_ok = true;
    rep.verdict = Verdict::CONFIRMED;
    for (const CartelDeviation& d : rep.deviations)
        if (d.gain > 0) rep.verdict = Verdict::COUNTEREXAMPLE;
    rep.detail = rep.verdict == Verdict::CONFIRMED
                     ? "no operator gains by including the registration"
                     : "an operator gains by including the registration";
    return rep;
}

std::string trace_to_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "round,rho,audited_pool,producer,tx_id,tx_kind,decision";
    for (const auto& [id, v] : trace.cumulative) os << ",u_" << id;
    os << "\n";
    for (const TraceRound& r : trace.rounds) {
        const auto row_prefix = [&](std::ostringstream& line) {
            line << r.round << "," << r.rho << "," << r.audited << ",";
            if (r.producer >= 0) line << r.producer;
            line << ",";
        };
        const auto row_suffix = [&](std::ostringstream& line) {
            for (const auto& [id, v] : trace.cumulative) {
                auto it = r.utilities.find(id);
                line << "," << util_to_string(it != r.utilities.end() ? it->second : 0);
            }
            line << "\n";
        };
        if (r.decisions.empty()) {
            std::ostringstream line;
            row_prefix(line);
            line << ",,";
            row_suffix(line);
            os << line.str();
            continue;
        }
        for (const TraceDecisionRow& d : r.decisions) {
            std::ostringstream line;
            row_prefix(line);
            line << d.tx_id << "," << d.kind << "," << (d.applied ? "applied" : "censored");
            row_suffix(line);
            os << line.str();
        }
    }
    return os.str();
}

std::string trace_summary(const SimTrace& trace) {
    std::ostringstream os;
    os << "rounds " << trace.rounds.size() << "\n";
    os << "revolution " << (trace.revolution ? "yes" : "no") << "\n";
    for (const auto& [id, v] : trace.cumulative)
        os << "player " << id << " cumulative " << util_to_string(v) << "\n";
    const PoolTable table = build_pool_table(trace.final_state);
    for (const auto& [pool, row] : table) {
        os << "pool " << pool << " operator " << row.operator_id << " stake " << row.delegated
           << " members";
        for (PlayerId id : row.members) os << " " << id;
        if (row.dissolved) os << " dissolved";
        os << "\n";
    }
    std::size_t applied = 0;
    for (const SubmissionRecord& sub : trace.submissions)
        if (sub.applied_round >= 0) ++applied;
    os << "submissions " << trace.submissions.size() << " applied " << applied << "\n";
    return os.str();
}

std::string pool_table_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "round,pool,operator,stake,members\n";
    for (const TraceRound& r : trace.rounds) {
        for (const auto& [pool, row] : r.pool_table) {
            os << r.round << "," << pool << "," << row.operator_id << "," << row.delegated << ",";
            bool first = true;
            for (PlayerId id : row.members) {
                if (!first) os << " ";
                os << id;
                first = false;
            }
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace poolsim
