#include "poolsim/ledger.hpp"

#include <sstream>
#include <stdexcept>

#include "poolsim/common.hpp"

namespace poolsim {

LedgerState genesis_state(const std::map<PlayerId, Stake>& stakes) {
    LedgerState s;
    s.stake = stakes;
    return s;
}

Stake undelegated_stake(const LedgerState& state, PlayerId player) {
    auto it = state.stake.find(player);
    if (it == state.stake.end()) return 0;
    Stake used = 0;
    for (const auto& [nonce, rec] : state.delegations) {
        (void)nonce;
        if (rec.active && rec.author == player) used += rec.amount;
    }
    return it->second - used;
}

namespace {

Admissibility fail(std::string reason) { return {false, std::move(reason)}; }

Admissibility check_author(const LedgerState& state, PlayerId author) {
    if (!state.stake.count(author)) return fail("unknown player");
    return {true, {}};
}

Admissibility admissible_delegate(const LedgerState& state, const Delegate& d) {
    if (auto a = check_author(state, d.author); !a.ok) return a;
    if (d.amount <= 0) return fail("non-positive amount");
    if (state.delegations.count(d.nonce)) return fail("duplicate nonce");
    auto p = state.pools.find(d.pool);
    if (p == state.pools.end()) return fail("unknown pool");
    if (p->second.dissolved) return fail("dissolved pool");
    if (undelegated_stake(state, d.author) < d.amount)
        return fail("insufficient undelegated stake");
    return {true, {}};
}

Admissibility admissible_revoke(const LedgerState& state, const Revoke& r) {
    if (auto a = check_author(state, r.author); !a.ok) return a;
    auto it = state.delegations.find(r.nonce);
    if (it == state.delegations.end()) return fail("unknown nonce");
    if (!it->second.active) return fail("inactive nonce");
    if (it->second.author != r.author) return fail("author mismatch");
    return {true, {}};
}

Admissibility admissible_register(const LedgerState& state, const Register& g) {
    if (auto a = check_author(state, g.author); !a.ok) return a;
    auto it = state.pools.find(g.pool);
    if (it != state.pools.end() && !it->second.dissolved) return fail("duplicate pool");
    return {true, {}};
}

void apply_delegate(LedgerState& state, const Delegate& d) {
    state.delegations[d.nonce] = DelegationRecord{d.author, d.amount, d.pool, true};
}

void apply_revoke(LedgerState& state, const Revoke& r) {
    state.delegations[r.nonce].active = false;
}

void apply_register(LedgerState& state, const Register& g) {
    state.pools[g.pool] = PoolRecord{g.author, g.params, false};
}

// Evaluates the compound parts in order revoke -> register -> delegate against
// a scratch copy; all-or-nothing.
Admissibility admissible_compound(const LedgerState& state, const Compound& c) {
    if (c.revoke_part && c.revoke_part->author != c.delegate_part.author)
        return fail("compound author mismatch");
    LedgerState scratch = state;
    if (c.revoke_part) {
        if (auto a = admissible_revoke(scratch, *c.revoke_part); !a.ok)
            return fail("revoke: " + a.reason);
        apply_revoke(scratch, *c.revoke_part);
    }
    if (c.register_part) {
        if (auto a = admissible_register(scratch, *c.register_part); !a.ok)
            return fail("register: " + a.reason);
        apply_register(scratch, *c.register_part);
    }
    if (auto a = admissible_delegate(scratch, c.delegate_part); !a.ok)
        return fail("delegate: " + a.reason);
    return {true, {}};
}

} // namespace

Admissibility admissible(const LedgerState& state, const Transaction& tx) {
    return std::visit(
        [&](const auto& t) -> Admissibility {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Delegate>) return admissible_delegate(state, t);
            else if constexpr (std::is_same_v<T, Revoke>) return admissible_revoke(state, t);
            else if constexpr (std::is_same_v<T, Register>) return admissible_register(state, t);
            else if constexpr (std::is_same_v<T, Compound>) return admissible_compound(state, t);
            else return check_author(state, t.author);
        },
        tx);
}

bool apply_in_place(LedgerState& state, const Transaction& tx) {
    if (!admissible(state, tx).ok) return false;
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Delegate>) {
                apply_delegate(state, t);
            } else if constexpr (std::is_same_v<T, Revoke>) {
                apply_revoke(state, t);
            } else if constexpr (std::is_same_v<T, Register>) {
                apply_register(state, t);
            } else if constexpr (std::is_same_v<T, Compound>) {
                if (t.revoke_part) apply_revoke(state, *t.revoke_part);
                if (t.register_part) apply_register(state, *t.register_part);
                apply_delegate(state, t.delegate_part);
            }
            // PlainMessage only records itself in history.
        },
        tx);
    state.history.emplace_back(tx);
    return true;
}

LedgerState apply_transaction(const LedgerState& state, const Transaction& tx) {
    LedgerState next = state;
    apply_in_place(next, tx);
    return next;
}

bool apply_event_in_place(LedgerState& state, const LedgerEvent& ev) {
    if (const auto* tx = std::get_if<Transaction>(&ev)) return apply_in_place(state, *tx);
    const auto& d = std::get<Dissolution>(ev);
    auto it = state.pools.find(d.pool);
    if (it == state.pools.end() || it->second.dissolved) return false;
    it->second.dissolved = true;
    for (auto& [nonce, rec] : state.delegations) {
        (void)nonce;
        if (rec.active && rec.pool == d.pool) rec.active = false;
    }
    state.history.emplace_back(d);
    return true;
}

Compound compose_compound(const Delegate& d, const std::optional<Revoke>& r,
                          const std::optional<Register>& g) {
    if (r && r->author != d.author)
        throw std::invalid_argument("compound revoke author must match delegate author");
    return Compound{d, r, g};
}

std::tuple<Delegate, std::optional<Revoke>, std::optional<Register>>
decompose_compound(const Compound& c) {
    return {c.delegate_part, c.revoke_part, c.register_part};
}

PoolTable build_pool_table(const LedgerState& state) {
    PoolTable table;
    for (const auto& [name, rec] : state.pools)
        table[name] = PoolTableRow{rec.operator_id, 0, {}, rec.dissolved};
    for (const auto& [nonce, rec] : state.delegations) {
        (void)nonce;
        if (!rec.active) continue;
        auto& row = table[rec.pool];
        row.delegated += rec.amount;
        row.members.insert(rec.author);
    }
    return table;
}

bool check_extension(const LedgerState& x, const LedgerState& x_prime,
                     const std::vector<Transaction>& witness) {
    LedgerState cur = x;
    for (const auto& tx : witness) {
        if (!admissible(cur, tx).ok) return false;
        apply_in_place(cur, tx);
    }
    return serialize_state(cur) == serialize_state(x_prime);
}

namespace {

void write_tx(std::ostringstream& out, const Transaction& tx);

void write_delegate(std::ostringstream& out, const Delegate& d) {
    out << "D|" << d.author << '|' << d.amount << '|' << encode_field(d.pool) << '|'
        << encode_field(d.nonce);
}

void write_revoke(std::ostringstream& out, const Revoke& r) {
    out << "R|" << r.author << '|' << encode_field(r.nonce);
}

void write_register(std::ostringstream& out, const Register& g) {
    out << "G|" << g.author << '|' << encode_field(g.pool) << '|' << encode_field(g.params);
}

void write_tx(std::ostringstream& out, const Transaction& tx) {
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Delegate>) {
                write_delegate(out, t);
            } else if constexpr (std::is_same_v<T, Revoke>) {
                write_revoke(out, t);
            } else if constexpr (std::is_same_v<T, Register>) {
                write_register(out, t);
            } else if constexpr (std::is_same_v<T, Compound>) {
                out << "C";
                if (t.revoke_part) {
                    out << '&';
                    write_revoke(out, *t.revoke_part);
                }
                if (t.register_part) {
                    out << '&';
                    write_register(out, *t.register_part);
                }
                out << '&';
                write_delegate(out, t.delegate_part);
            } else {
                out << "M|" << t.author << '|' << encode_field(t.body);
            }
        },
        tx);
}

} // namespace

std::string serialize_transaction(const Transaction& tx) {
    std::ostringstream out;
    write_tx(out, tx);
    return out.str();
}

std::string serialize_event(const LedgerEvent& ev) {
    if (const auto* tx = std::get_if<Transaction>(&ev)) return serialize_transaction(*tx);
    return "A|" + encode_field(std::get<Dissolution>(ev).pool);
}

std::string serialize_content(const LedgerState& state) {
    std::ostringstream out;
    for (const auto& [id, v] : state.stake) out << "stake|" << id << '|' << v << '\n';
    for (const auto& [nonce, rec] : state.delegations)
        out << "deleg|" << encode_field(nonce) << '|' << rec.author << '|' << rec.amount << '|'
            << encode_field(rec.pool) << '|' << (rec.active ? 1 : 0) << '\n';
    for (const auto& [name, rec] : state.pools)
        out << "pool|" << encode_field(name) << '|' << rec.operator_id << '|'
            << encode_field(rec.params) << '|' << (rec.dissolved ? 1 : 0) << '\n';
    return out.str();
}

std::string serialize_state(const LedgerState& state) {
    std::ostringstream out;
    out << "round|" << state.round << '\n';
    for (const auto& [id, v] : state.stake) out << "stake|" << id << '|' << v << '\n';
    for (const auto& ev : state.history) out << "event|" << serialize_event(ev) << '\n';
    return out.str();
}

std::string content_digest(const LedgerState& state) {
    return hex64(fnv1a(serialize_content(state)));
}

std::string history_digest(const LedgerState& state) {
    std::ostringstream out;
    for (const auto& ev : state.history) out << serialize_event(ev) << '\n';
    return hex64(fnv1a(out.str()));
}

std::string transaction_id(const Transaction& tx) {
    return hex64(fnv1a(serialize_transaction(tx)));
}

std::string transaction_kind(const Transaction& tx) {
    return std::visit(
        [](const auto& t) -> std::string {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Delegate>) return "delegate";
            else if constexpr (std::is_same_v<T, Revoke>) return "revoke";
            else if constexpr (std::is_same_v<T, Register>) return "register";
            else if constexpr (std::is_same_v<T, Compound>) return "compound";
            else return "message";
        },
        tx);
}

LedgerState replay_events(const std::map<PlayerId, Stake>& stakes,
                          const std::vector<LedgerEvent>& events) {
    LedgerState s = genesis_state(stakes);
    for (const auto& ev : events) apply_event_in_place(s, ev);
    return s;
}

} // namespace poolsim
