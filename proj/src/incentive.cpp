#include "poolsim/incentive.hpp"

#include "poolsim/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace poolsim {

void parse_pool_overrides(const std::string& params, double& margin, double& cost) {
    std::size_t pos = 0;
    while (pos < params.size()) {
        std::size_t end = params.find(',', pos);
        if (end == std::string::npos) end = params.size();
        std::string item = params.substr(pos, end - pos);
        std::size_t eq = item.find('=');
        if (eq != std::string::npos) {
            std::string key = item.substr(0, eq);
            std::string val = item.substr(eq + 1);
            try {
                if (key == "m") margin = std::stod(val);
                else if (key == "c") cost = std::stod(val);
            } catch (const std::exception&) {
                // unknown or malformed entries are ignored
            }
        }
        pos = end + 1;
    }
}

namespace {

constexpr double kUtilityEps = 1e-9;

double evaluate_linear(const LinearRewardModel& m, PlayerId player, const LedgerState& state) {
    double total_stake = 0;
    for (const auto& [id, s] : state.stake) total_stake += static_cast<double>(s);

    // Active delegations per pool.
    std::map<PoolName, double> pool_delegated;
    std::map<PoolName, std::map<PlayerId, double>> pool_members;
    for (const auto& [nonce, rec] : state.delegations) {
        if (!rec.active) continue;
        auto pit = state.pools.find(rec.pool);
        if (pit == state.pools.end() || pit->second.dissolved) continue;
        pool_delegated[rec.pool] += static_cast<double>(rec.amount);
        pool_members[rec.pool][rec.author] += static_cast<double>(rec.amount);
    }

    double u = 0;
    double total_delegated = 0;
    for (const auto& [pname, x_p] : pool_delegated) total_delegated += x_p;

    for (const auto& [pname, rec] : state.pools) {
        if (rec.dissolved) continue;
        double margin = m.margin;
        double cost = m.cost;
        parse_pool_overrides(rec.params, margin, cost);
        double x_p = 0;
        auto dit = pool_delegated.find(pname);
        if (dit != pool_delegated.end()) x_p = dit->second;
        double reward = total_stake > 0 ? m.reward * x_p / total_stake : 0.0;
        if (rec.operator_id == player) u += margin * reward - cost;
        if (x_p > 0) {
            auto mit = pool_members.find(pname);
            if (mit != pool_members.end()) {
                auto sit = mit->second.find(player);
                if (sit != mit->second.end()) u += (1.0 - margin) * reward * (sit->second / x_p);
            }
        }
    }

    if (m.participation != 0 && total_stake > 0)
        u += m.participation * total_delegated / total_stake;
    return u;
}

}  // namespace

std::uint64_t state_key(const LedgerState& state) {
    return std::stoull(history_digest(state), nullptr, 16);
}

double evaluate_utility(const UtilityModel& model, PlayerId player, const LedgerState& state) {
    if (std::holds_alternative<LinearRewardModel>(model))
        return evaluate_linear(std::get<LinearRewardModel>(model), player, state);
    const auto& table = std::get<TableModel>(model);
    auto it = table.entries.find({player, state_key(state)});
    if (it == table.entries.end())
        throw std::out_of_range("table model: no entry for player " + std::to_string(player));
    return it->second;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::STRONGLY_IC: return "STRONGLY_IC";
        case Classification::IC: return "IC";
        case Classification::NOT_IC: return "NOT_IC";
        case Classification::INDETERMINATE: return "INDETERMINATE";
    }
    return "?";
}

namespace {

struct ClassifyNode {
    LedgerState state;
    std::vector<std::uint64_t> applied;  // sorted tx digests along the path
    std::string multiset_key;
    bool has_tx = false;
    int depth = 0;
    std::vector<double> utils;
    std::vector<int> children;
};

std::string multiset_key_of(const std::vector<std::uint64_t>& applied) {
    std::string key;
    for (auto d : applied) {
        key += hex64(d);
        key += '.';
    }
    return key;
}

}  // namespace

ClassifyResult classify_transaction(const UtilityModel& model, const LedgerState& state,
                                    const Transaction& tx, const std::vector<Transaction>& pending,
                                    int horizon, std::size_t node_limit) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const std::string tx_ser = serialize_transaction(tx);
    const std::uint64_t tx_digest = fnv1a(tx_ser);
    bool tx_in_pending = false;
    std::vector<std::string> pending_ser;
    std::vector<std::uint64_t> pending_digest;
    pending_ser.reserve(pending.size());
    for (const auto& p : pending) {
        pending_ser.push_back(serialize_transaction(p));
        pending_digest.push_back(fnv1a(pending_ser.back()));
        if (pending_ser.back() == tx_ser) tx_in_pending = true;
    }
    if (!tx_in_pending) throw std::invalid_argument("tx must be part of pending");

    std::vector<PlayerId> players;
    for (const auto& [id, s] : state.stake) players.push_back(id);

    ClassifyResult result;
    std::vector<ClassifyNode> nodes;
    bool aborted = false;

    auto eval_all = [&](const LedgerState& s) {
        std::vector<double> utils;
        utils.reserve(players.size());
        for (auto p : players) utils.push_back(evaluate_utility(model, p, s));
        return utils;
    };

    // Depth-first expansion over orderings of the pending multiset. Only
    // admissible applications create edges; a transaction inadmissible along
    // the whole tree simply never appears.
    std::function<int(LedgerState, std::vector<std::uint64_t>, bool, int, std::vector<bool>)> build =
        [&](LedgerState s, std::vector<std::uint64_t> applied, bool has_tx, int depth,
            std::vector<bool> used) -> int {
        if (nodes.size() >= node_limit) {
            aborted = true;
            return -1;
        }
        int index = static_cast<int>(nodes.size());
        ClassifyNode node;
        node.applied = applied;
        node.multiset_key = multiset_key_of(applied);
        node.has_tx = has_tx;
        node.depth = depth;
        node.utils = eval_all(s);
        node.state = s;
        nodes.push_back(std::move(node));

        if (depth >= horizon) return index;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (used[i]) continue;
            if (aborted) break;
            auto verdict = admissible(nodes[index].state, pending[i]);
            if (!verdict.ok) continue;
            LedgerState next = apply_transaction(nodes[index].state, pending[i]);
            auto next_applied = nodes[index].applied;
            next_applied.insert(
                std::upper_bound(next_applied.begin(), next_applied.end(), pending_digest[i]),
                pending_digest[i]);
            auto next_used = used;
            next_used[i] = true;
            bool next_has_tx = has_tx || pending_ser[i] == tx_ser;
            int child = build(std::move(next), std::move(next_applied), next_has_tx, depth + 1,
                              std::move(next_used));
            if (child < 0) break;
            nodes[index].children.push_back(child);

            // Single-step check: applying tx at a state that lacked it.
            if (!has_tx && pending_ser[i] == tx_ser && !result.witness) {
                for (std::size_t pi = 0; pi < players.size(); ++pi) {
                    if (nodes[index].utils[pi] > nodes[child].utils[pi] + kUtilityEps) {
                        DissentWitness w;
                        w.player = players[pi];
                        w.before = nodes[index].utils[pi];
                        w.after = nodes[child].utils[pi];
                        w.context = nodes[index].multiset_key.empty() ? "genesis"
                                                                      : nodes[index].multiset_key;
                        result.witness = w;
                        break;
                    }
                }
            }
        }
        return index;
    };

    build(state, {}, false, 0, std::vector<bool>(pending.size(), false));
    result.nodes = nodes.size();
    result.limit_hit = aborted;

    if (result.witness) {
        result.verdict = Classification::NOT_IC;
        return result;
    }
    if (aborted) {
        result.verdict = Classification::INDETERMINATE;
        return result;
    }

    // Endpoint identities reachable from each node (children always have
    // larger indices, so a reverse sweep sees children first).
    std::vector<std::set<std::string>> reach(nodes.size());
    for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
        reach[i].insert(content_digest(nodes[i].state) + "#" + nodes[i].multiset_key);
        for (int c : nodes[i].children)
            reach[i].insert(reach[c].begin(), reach[c].end());
    }

    // Matched pairs: x1 lacks tx, x2 applied the same multiset plus tx, and a
    // common endpoint is reachable from both.
    std::map<std::string, std::vector<int>> without_tx, with_tx;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].has_tx)
            with_tx[nodes[i].multiset_key].push_back(static_cast<int>(i));
        else
            without_tx[nodes[i].multiset_key].push_back(static_cast<int>(i));
    }

    bool all_strict = true;
    for (const auto& [key1, xs1] : without_tx) {
        // key of the matching with-tx multiset
        std::vector<std::uint64_t> plus;
        if (!xs1.empty()) plus = nodes[xs1.front()].applied;
        plus.insert(std::upper_bound(plus.begin(), plus.end(), tx_digest), tx_digest);
        auto it = with_tx.find(multiset_key_of(plus));
        if (it == with_tx.end()) continue;
        for (int a : xs1) {
            for (int b : it->second) {
                bool common = false;
                for (const auto& id : reach[b]) {
                    if (reach[a].count(id)) {
                        common = true;
                        break;
                    }
                }
                if (!common) continue;
                ++result.matched_pairs;
                for (std::size_t pi = 0; pi < players.size(); ++pi) {
                    if (!(nodes[b].utils[pi] > nodes[a].utils[pi] + kUtilityEps)) {
                        all_strict = false;
                        break;
                    }
                }
            }
        }
    }

    result.verdict = (result.matched_pairs > 0 && all_strict) ? Classification::STRONGLY_IC
                                                              : Classification::IC;
    return result;
}

std::optional<IncumbencyWitness> check_incumbency(const UtilityModel& model,
                                                  const LedgerState& state,
                                                  const IncumbencyOptions& opts) {
    // Candidate competitor pool name: first unused q, q1, q2, ...
    auto fresh_pool_name = [&]() {
        std::string name = "q";
        int suffix = 0;
        while (state.pools.count(name))
            name = "q" + std::to_string(++suffix);
        return name;
    };

    for (const auto& [pname, pool] : state.pools) {
        if (pool.dissolved) continue;
        PlayerId op = pool.operator_id;
        double before = evaluate_utility(model, op, state);

        // Revokes of active delegations, canonical nonce order.
        for (const auto& [nonce, rec] : state.delegations) {
            if (!rec.active) continue;
            Revoke rv{rec.author, nonce};
            Transaction tx = rv;
            if (!admissible(state, tx).ok) continue;
            double after = evaluate_utility(model, op, apply_transaction(state, tx));
            if (before > after) return IncumbencyWitness{op, tx, before, after};
        }

        // A competitor registration, parameterized cheaper than the incumbent.
        double inc_margin = 0, inc_cost = 0;
        if (std::holds_alternative<LinearRewardModel>(model)) {
            const auto& lin = std::get<LinearRewardModel>(model);
            inc_margin = lin.margin;
            inc_cost = lin.cost;
            parse_pool_overrides(pool.params, inc_margin, inc_cost);
        }
        double comp_margin = opts.competitor_margin.value_or(inc_margin / 2);
        PlayerId author = -1;
        for (const auto& [id, s] : state.stake) {
            if (id != op) {
                author = id;
                break;
            }
        }
        if (author >= 0) {
            std::ostringstream params;
            params << "m=" << comp_margin << ",c=" << opts.competitor_cost;
            Register rg{author, fresh_pool_name(), params.str()};
            Transaction tx = rg;
            if (admissible(state, tx).ok) {
                double after = evaluate_utility(model, op, apply_transaction(state, tx));
                if (before > after) return IncumbencyWitness{op, tx, before, after};
            }
        }
    }
    return std::nullopt;
}

}  // namespace poolsim
