#pragma once

#include "ledger.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace poolsim {

// Per-round reward R scaled by delegated fraction, split per pool after the
// operator margin, minus a fixed cost per operated pool. `participation` pays
// every player a share of total delegated stake (0 disables it, making a
// player with no delegation and no pool earn exactly zero).
struct LinearRewardModel {
    double reward = 0;
    double margin = 0;
    double cost = 0;
    double participation = 0;
};

// Explicit (player, state key) -> value table for enumerated toy state spaces.
// Keys come from state_key() below.
struct TableModel {
    std::map<std::pair<PlayerId, std::uint64_t>, double> entries;
};

using UtilityModel = std::variant<LinearRewardModel, TableModel>;

// Key used by TableModel: FNV-1a over the canonical event history.
std::uint64_t state_key(const LedgerState& state);

// Pool params may override the model margin/cost, e.g. "m=0.05,c=1".
// Unknown or malformed entries are ignored.
void parse_pool_overrides(const std::string& params, double& margin, double& cost);

// Throws std::out_of_range on a TableModel miss.
double evaluate_utility(const UtilityModel& model, PlayerId player, const LedgerState& state);

enum class Classification { STRONGLY_IC, IC, NOT_IC, INDETERMINATE };

const char* to_string(Classification c);

struct DissentWitness {
    PlayerId player = 0;
    double before = 0;
    double after = 0;
    std::string context;  // applied-transaction multiset at the dissent point
};

struct ClassifyResult {
    Classification verdict = Classification::INDETERMINATE;
    std::size_t nodes = 0;
    std::size_t matched_pairs = 0;
    bool limit_hit = false;
    std::optional<DissentWitness> witness;  // present for NOT_IC
};

// Bounded Definition-style check over orderings of the pending multiset.
// tx must occur in pending; horizon >= 1.
ClassifyResult classify_transaction(const UtilityModel& model, const LedgerState& state,
                                    const Transaction& tx, const std::vector<Transaction>& pending,
                                    int horizon, std::size_t node_limit = 20000);

struct IncumbencyWitness {
    PlayerId operator_id = 0;
    Transaction tx;
    double before = 0;
    double after = 0;
};

struct IncumbencyOptions {
    // Margin of the candidate competitor pool; defaults to half the incumbent's.
    std::optional<double> competitor_margin;
    double competitor_cost = 0;
};

// Scans single Revokes of active delegations plus one parameterized competitor
// Register per pool; returns the first operator strictly hurt, in canonical
// (pool name, nonce) order.
std::optional<IncumbencyWitness> check_incumbency(const UtilityModel& model,
                                                  const LedgerState& state,
                                                  const IncumbencyOptions& opts = {});

}  // namespace poolsim
