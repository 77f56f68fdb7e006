#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace poolsim {

using PlayerId = int64_t;
using PoolName = std::string;
using Nonce = std::string;
using Stake = int64_t;

struct Delegate {
    PlayerId author = 0;
    Stake amount = 0;
    PoolName pool;
    Nonce nonce;
};

struct Revoke {
    PlayerId author = 0;
    Nonce nonce;
};

struct Register {
    PlayerId author = 0;
    PoolName pool;
    std::string params;
};

struct PlainMessage {
    PlayerId author = 0;
    std::string body;
};

// Inner revoke, if present, is applied before the delegate; inner register is
// applied between them so the delegate may target the pool it registers.
struct Compound {
    Delegate delegate_part;
    std::optional<Revoke> revoke_part;
    std::optional<Register> register_part;
};

using Transaction = std::variant<Delegate, Revoke, Register, Compound, PlainMessage>;

// Audit dissolutions change derived tables without being one of the five
// transaction kinds, so history stores events: applied transactions plus
// dissolution records. Replaying events from genesis reproduces the tables.
struct Dissolution {
    PoolName pool;
};

using LedgerEvent = std::variant<Transaction, Dissolution>;

struct DelegationRecord {
    PlayerId author = 0;
    Stake amount = 0;
    PoolName pool;
    bool active = false;
};

struct PoolRecord {
    PlayerId operator_id = 0;
    std::string params;
    bool dissolved = false;
};

struct LedgerState {
    std::vector<LedgerEvent> history;
    std::map<PlayerId, Stake> stake;
    std::map<Nonce, DelegationRecord> delegations;
    std::map<PoolName, PoolRecord> pools;
    int64_t round = 0;
};

struct Admissibility {
    bool ok = false;
    std::string reason; // empty when ok
};

struct PoolTableRow {
    PlayerId operator_id = 0;
    Stake delegated = 0;
    std::set<PlayerId> members;
    bool dissolved = false;

    bool operator==(const PoolTableRow&) const = default;
};

using PoolTable = std::map<PoolName, PoolTableRow>;

LedgerState genesis_state(const std::map<PlayerId, Stake>& stakes);

Stake undelegated_stake(const LedgerState& state, PlayerId player);

Admissibility admissible(const LedgerState& state, const Transaction& tx);

// Pure transition: identity state on an inadmissible tx.
LedgerState apply_transaction(const LedgerState& state, const Transaction& tx);

// Same transition in place; returns whether the tx was applied. Used by the
// simulation loop to avoid copying the history on every step.
bool apply_in_place(LedgerState& state, const Transaction& tx);

Compound compose_compound(const Delegate& d, const std::optional<Revoke>& r,
                          const std::optional<Register>& g); // throws std::invalid_argument
std::tuple<Delegate, std::optional<Revoke>, std::optional<Register>>
decompose_compound(const Compound& c);

PoolTable build_pool_table(const LedgerState& state);

bool check_extension(const LedgerState& x, const LedgerState& x_prime,
                     const std::vector<Transaction>& witness);

// Canonical line-oriented serialization. Field order fixed, integers decimal,
// strings percent-encoded; byte-stable across runs.
std::string serialize_transaction(const Transaction& tx);
std::string serialize_event(const LedgerEvent& ev);
std::string serialize_state(const LedgerState& state);

// Derived-table serialization (stake + delegations + pools, no history); the
// basis for content digests used when matching states semantically.
std::string serialize_content(const LedgerState& state);

std::string content_digest(const LedgerState& state);
std::string history_digest(const LedgerState& state);
std::string transaction_id(const Transaction& tx);

std::string transaction_kind(const Transaction& tx);

// Applies any event (transaction or dissolution) in place; returns whether the
// state changed. Dissolutions of unknown or already-dissolved pools are no-ops
// here; audit-level validation lives in dissolve_pool.
bool apply_event_in_place(LedgerState& state, const LedgerEvent& ev);

// Replays events from a stake-only genesis; used by tests and invariants.
LedgerState replay_events(const std::map<PlayerId, Stake>& stakes,
                          const std::vector<LedgerEvent>& events);

} // namespace poolsim
