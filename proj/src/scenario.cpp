#include "poolsim/scenario.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace poolsim {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ScenarioError(what + ": malformed JSON");
    return j;
}

void require_version(const json& j, const std::string& what) {
    if (!j.is_object()) throw ScenarioError(what + ": expected a JSON object");
    if (!j.contains("version")) throw ScenarioError(what + ": missing schema version");
    const json& v = j["version"];
    if (!v.is_number_integer() || v.get<int>() != 1)
        throw ScenarioError(what + ": unsupported schema version");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int64_t integer_key(const std::string& key, const std::string& what) {
    try {
        std::size_t used = 0;
        int64_t v = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ScenarioError(what + ": bad integer key '" + key + "'");
    }
}

Util util_field(const json& j, const std::string& what) {
    if (!j.is_number()) throw ScenarioError(what + ": expected a number");
    return util_from_double(j.get<double>());
}

std::string string_field(const json& j, const char* name, const std::string& what) {
    if (!j.contains(name) || !j[name].is_string())
        throw ScenarioError(what + ": missing string field '" + name + "'");
    return j[name].get<std::string>();
}

int64_t int_field(const json& j, const char* name, const std::string& what) {
    if (!j.contains(name) || !j[name].is_number_integer())
        throw ScenarioError(what + ": missing integer field '" + name + "'");
    return j[name].get<int64_t>();
}

// ---- utility tables ------------------------------------------------------

UtilityTable parse_table(const json& j, const std::string& what) {
    if (!j.is_object()) throw ScenarioError(what + ": expected an object");
    for (const char* f : {"stakes", "leader_stake", "member_utility", "member_revolution",
                          "leader_utility", "leader_revolution"})
        if (!j.contains(f)) throw ScenarioError(what + ": missing field '" + std::string(f) + "'");

    UtilityTable t;
    t.leader_stake = int_field(j, "leader_stake", what);
    if (t.leader_stake < 0) throw ScenarioError(what + ": negative leader stake");

    for (const auto& [key, val] : j["stakes"].items()) {
        PlayerId id = integer_key(key, what);
        if (!val.is_number_integer() || val.get<int64_t>() <= 0)
            throw ScenarioError(what + ": stakes must be positive integers");
        t.stakes[id] = val.get<int64_t>();
    }
    if (t.stakes.empty()) throw ScenarioError(what + ": no members");

    for (const auto& [key, val] : j["member_utility"].items()) {
        PlayerId id = integer_key(key, what);
        if (!t.stakes.count(id))
            throw ScenarioError(what + ": member utility for unknown player " + key);
        for (const auto& [lvl, num] : val.items())
            t.member_in_pool[id][integer_key(lvl, what)] = util_field(num, what);
    }
    for (const auto& [key, val] : j["member_revolution"].items()) {
        PlayerId id = integer_key(key, what);
        if (!t.stakes.count(id))
            throw ScenarioError(what + ": revolution utility for unknown player " + key);
        t.member_revolution[id] = util_field(val, what);
    }
    for (const auto& [lvl, num] : j["leader_utility"].items())
        t.leader_in_pool[integer_key(lvl, what)] = util_field(num, what);
    t.leader_revolution = util_field(j["leader_revolution"], what);

    // Exact level coverage: reject missing and unreachable levels alike.
    const std::set<Stake> lvl_leader = leader_levels(t);
    for (Stake s : lvl_leader)
        if (!t.leader_in_pool.count(s))
            throw ScenarioError(what + ": leader utility missing stake level " +
                                std::to_string(s));
    for (const auto& [s, v] : t.leader_in_pool)
        if (!lvl_leader.count(s))
            throw ScenarioError(what + ": leader utility at unreachable stake level " +
                                std::to_string(s));
    for (const auto& [id, stake] : t.stakes) {
        if (!t.member_revolution.count(id))
            throw ScenarioError(what + ": member " + std::to_string(id) +
                                " lacks a revolution utility");
        const std::set<Stake> lvls = member_levels(t, id);
        auto it = t.member_in_pool.find(id);
        if (it == t.member_in_pool.end())
            throw ScenarioError(what + ": member " + std::to_string(id) + " lacks utilities");
        for (Stake s : lvls)
            if (!it->second.count(s))
                throw ScenarioError(what + ": member " + std::to_string(id) +
                                    " utility missing stake level " + std::to_string(s));
        for (const auto& [s, v] : it->second)
            if (!lvls.count(s))
                throw ScenarioError(what + ": member " + std::to_string(id) +
                                    " utility at unreachable stake level " + std::to_string(s));
    }
    return t;
}

void enforce_hypothesis(const UtilityTable& t, const std::string& name, const std::string& what) {
    if (name == "member-positive" || name == "member-nonnegative") {
        const Util bound = 0;
        for (const auto& [id, lvls] : t.member_in_pool)
            for (const auto& [s, v] : lvls) {
                bool bad = name == "member-positive" ? v <= bound : v < bound;
                if (bad)
                    throw ScenarioError(what + ": hypothesis '" + name + "' fails for member " +
                                        std::to_string(id) + " at stake " + std::to_string(s));
            }
    } else if (name == "member-monotone") {
        for (const auto& [id, lvls] : t.member_in_pool) {
            Util prev = 0;
            bool have = false;
            for (const auto& [s, v] : lvls) {
                if (have && v < prev)
                    throw ScenarioError(what + ": hypothesis 'member-monotone' fails for member " +
                                        std::to_string(id) + " at stake " + std::to_string(s));
                prev = v;
                have = true;
            }
        }
    } else if (name == "leader-monotone") {
        Util prev = 0;
        bool have = false;
        for (const auto& [s, v] : t.leader_in_pool) {
            if (have && v < prev)
                throw ScenarioError(what + ": hypothesis 'leader-monotone' fails at stake " +
                                    std::to_string(s));
            prev = v;
            have = true;
        }
    } else {
        throw ScenarioError(what + ": unknown hypothesis '" + name + "'");
    }
}

// ---- transactions ---------------------------------------------------------

Delegate delegate_from_json(const json& j, const std::string& what) {
    Delegate d;
    d.author = int_field(j, "author", what);
    d.amount = int_field(j, "amount", what);
    d.pool = string_field(j, "pool", what);
    d.nonce = string_field(j, "nonce", what);
    return d;
}

Revoke revoke_from_json(const json& j, const std::string& what) {
    Revoke r;
    r.author = int_field(j, "author", what);
    r.nonce = string_field(j, "nonce", what);
    return r;
}

Register register_from_json(const json& j, const std::string& what) {
    Register g;
    g.author = int_field(j, "author", what);
    g.pool = string_field(j, "pool", what);
    g.params = j.value("params", std::string{});
    return g;
}

Transaction tx_from_json(const json& j, const std::string& what) {
    const std::string kind = string_field(j, "kind", what);
    if (kind == "delegate") return delegate_from_json(j, what);
    if (kind == "revoke") return revoke_from_json(j, what);
    if (kind == "register") return register_from_json(j, what);
    if (kind == "message") {
        PlainMessage m;
        m.author = int_field(j, "author", what);
        m.body = j.value("body", std::string{});
        return m;
    }
    if (kind == "compound") {
        if (!j.contains("delegate"))
            throw ScenarioError(what + ": compound without a delegate part");
        Compound c;
        c.delegate_part = delegate_from_json(j["delegate"], what);
        if (j.contains("revoke") && !j["revoke"].is_null())
            c.revoke_part = revoke_from_json(j["revoke"], what);
        if (j.contains("register") && !j["register"].is_null())
            c.register_part = register_from_json(j["register"], what);
        return c;
    }
    throw ScenarioError(what + ": unknown transaction kind '" + kind + "'");
}

std::vector<Transaction> tx_list(const json& j, const char* name, const std::string& what) {
    std::vector<Transaction> out;
    if (!j.contains(name)) return out;
    if (!j[name].is_array()) throw ScenarioError(what + ": '" + name + "' must be an array");
    for (const json& e : j[name]) out.push_back(tx_from_json(e, what));
    return out;
}

// ---- utility models --------------------------------------------------------

UtilityModel model_from_json(const json& j, const std::string& what) {
    const std::string kind = string_field(j, "model", what);
    if (kind == "linear") {
        LinearRewardModel m;
        m.reward = j.contains("R") ? j["R"].get<double>() : j.value("reward", 0.0);
        m.margin = j.value("margin", 0.0);
        m.cost = j.value("cost", 0.0);
        m.participation = j.value("participation", 0.0);
        if (m.margin < 0 || m.margin > 1)
            throw ScenarioError(what + ": margin must lie in [0,1]");
        if (m.cost < 0) throw ScenarioError(what + ": negative cost");
        return m;
    }
    if (kind == "table") {
        TableModel m;
        if (!j.contains("entries") || !j["entries"].is_array())
            throw ScenarioError(what + ": table model without entries");
        for (const json& e : j["entries"]) {
            PlayerId player = int_field(e, "player", what);
            const std::string key = string_field(e, "state", what);
            std::uint64_t state = 0;
            try {
                state = std::stoull(key, nullptr, 16);
            } catch (const std::exception&) {
                throw ScenarioError(what + ": bad state key '" + key + "'");
            }
            if (!e.contains("value") || !e["value"].is_number())
                throw ScenarioError(what + ": table entry without a numeric value");
            m.entries[{player, state}] = e["value"].get<double>();
        }
        return m;
    }
    throw ScenarioError(what + ": unknown utility model '" + kind + "'");
}

}  // namespace

Util util_from_double(double v) {
    if (!std::isfinite(v) || std::fabs(v) > 1e12)
        throw ScenarioError("utility value out of range");
    return static_cast<Util>(std::llround(v * 1e6));
}

Transaction parse_transaction_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("transaction: ") + e.what());
    }
    return tx_from_json(j, "transaction");
}

LeaderAction parse_leader_action(const std::string& s) {
    if (s == "CENSOR") return LeaderAction::CENSOR;
    if (s == "NOTCENSOR") return LeaderAction::NOTCENSOR;
    throw ScenarioError("unknown leader action '" + s + "'");
}

MemberAction parse_member_action(const std::string& s) {
    if (s == "CAPITULATE") return MemberAction::CAPITULATE;
    if (s == "REBEL") return MemberAction::REBEL;
    throw ScenarioError("unknown member action '" + s + "'");
}

LeaderPolicy parse_leader_policy(const std::string& s) {
    if (s == "ALWAYS_CENSOR") return LeaderPolicy::ALWAYS_CENSOR;
    if (s == "ALWAYS_NOTCENSOR") return LeaderPolicy::ALWAYS_NOTCENSOR;
    if (s == "Y") return LeaderPolicy::Y;
    throw ScenarioError("unknown leader policy '" + s + "'");
}

MemberPolicy parse_member_policy(const std::string& s) {
    if (s == "ALWAYS_CAPITULATE") return MemberPolicy::ALWAYS_CAPITULATE;
    if (s == "ALWAYS_REBEL") return MemberPolicy::ALWAYS_REBEL;
    if (s == "X") return MemberPolicy::X;
    throw ScenarioError("unknown member policy '" + s + "'");
}

GameFile parse_game_text(const std::string& text) {
    const std::string what = "game file";
    json j = parse_json(text, what);
    require_version(j, what);
    const std::string kind = string_field(j, "kind", what);

    GameFile g;
    if (kind == "single" || kind == "multi") {
        g.kind = kind == "single" ? GameKind::SINGLE : GameKind::MULTI;
        g.table = parse_table(j, what);
        if (kind == "multi") {
            g.rounds = static_cast<int>(int_field(j, "rounds", what));
            if (g.rounds < 1) throw ScenarioError(what + ": rounds must be at least 1");
        }
    } else if (kind == "twopool") {
        g.kind = GameKind::TWOPOOL;
        if (!j.contains("pool1") || !j.contains("pool2"))
            throw ScenarioError(what + ": twopool requires pool1 and pool2");
        TwoPoolGame tp{parse_table(j["pool1"], what + " pool1"),
                       parse_table(j["pool2"], what + " pool2")};
        for (const auto& [id, s] : tp.pool1.stakes)
            if (tp.pool2.stakes.count(id))
                throw ScenarioError(what + ": player " + std::to_string(id) + " in both pools");
        g.two_pool = tp;
        g.table = g.two_pool->pool1;
    } else {
        throw ScenarioError(what + ": unknown game kind '" + kind + "'");
    }

    if (j.contains("enforce")) {
        if (!j["enforce"].is_array()) throw ScenarioError(what + ": 'enforce' must be an array");
        for (const json& e : j["enforce"]) {
            const std::string name = e.get<std::string>();
            if (g.two_pool) {
                enforce_hypothesis(g.two_pool->pool1, name, what + " pool1");
                enforce_hypothesis(g.two_pool->pool2, name, what + " pool2");
            } else {
                enforce_hypothesis(g.table, name, what);
            }
        }
    }
    return g;
}

GameFile load_game_file(const std::string& path) { return parse_game_text(read_file(path)); }

AnyProfile parse_profile_text(const std::string& text) {
    const std::string what = "profile file";
    json j = parse_json(text, what);
    require_version(j, what);
    const std::string kind = string_field(j, "kind", what);

    if (kind == "single") {
        StrategyProfile p;
        p.leader = parse_leader_action(string_field(j, "leader", what));
        const json members_obj = j.value("members", json::object());
        for (const auto& [key, val] : members_obj.items())
            p.members[integer_key(key, what)] = parse_member_action(val.get<std::string>());
        return p;
    }
    if (kind == "multi") {
        MultiRoundProfile p;
        if (!j.contains("leader") || !j["leader"].is_array())
            throw ScenarioError(what + ": multi profile needs a leader action array");
        for (const json& a : j["leader"]) p.leader.push_back(parse_leader_action(a));
        const json members_obj = j.value("members", json::object());
        for (const auto& [key, val] : members_obj.items()) {
            std::vector<MemberAction> acts;
            for (const json& a : val) acts.push_back(parse_member_action(a));
            p.members[integer_key(key, what)] = acts;
        }
        return p;
    }
    if (kind == "adaptive") {
        AdaptiveProfile p;
        const json& l = j.at("leader");
        p.leader_first = parse_leader_action(string_field(l, "action", what));
        p.leader_policy = parse_leader_policy(string_field(l, "policy", what));
        const json members_obj = j.value("members", json::object());
        for (const auto& [key, val] : members_obj.items())
            p.members[integer_key(key, what)] = {
                parse_member_action(string_field(val, "action", what)),
                parse_member_policy(string_field(val, "policy", what))};
        return p;
    }
    if (kind == "kround") {
        KRoundProfile p;
        p.rounds = static_cast<int>(int_field(j, "rounds", what));
        const json& l = j.at("leader");
        for (const json& a : l.at("script")) p.leader.script.push_back(parse_leader_action(a));
        p.leader.policy = parse_leader_policy(string_field(l, "policy", what));
        const json members_obj = j.value("members", json::object());
        for (const auto& [key, val] : members_obj.items()) {
            KRoundMemberStrategy s;
            for (const json& a : val.at("script")) s.script.push_back(parse_member_action(a));
            s.policy = parse_member_policy(string_field(val, "policy", what));
            p.members[integer_key(key, what)] = s;
        }
        return p;
    }
    if (kind == "twopool") {
        TwoPoolProfile p;
        p.leader1 = parse_leader_action(string_field(j, "leader1", what));
        const json members1_obj = j.value("members1", json::object());
        for (const auto& [key, val] : members1_obj.items())
            p.members1[integer_key(key, what)] = parse_member_action(val.get<std::string>());
        p.leader2 = parse_leader_policy(string_field(j, "leader2", what));
        const json members2_obj = j.value("members2", json::object());
        for (const auto& [key, val] : members2_obj.items())
            p.members2[integer_key(key, what)] = parse_member_policy(val.get<std::string>());
        return p;
    }
    throw ScenarioError(what + ": unknown profile kind '" + kind + "'");
}

AnyProfile load_profile_file(const std::string& path) {
    return parse_profile_text(read_file(path));
}

Scenario parse_scenario_text(const std::string& text) {
    const std::string what = "scenario file";
    json j = parse_json(text, what);
    require_version(j, what);

    Scenario s;
    if (!j.contains("players") || !j["players"].is_object() || j["players"].empty())
        throw ScenarioError(what + ": missing players");
    for (const auto& [key, val] : j["players"].items()) {
        if (!val.is_number_integer() || val.get<int64_t>() < 0)
            throw ScenarioError(what + ": stakes must be non-negative integers");
        s.players[integer_key(key, what)] = val.get<int64_t>();
    }

    s.genesis = tx_list(j, "genesis", what);
    s.pending = tx_list(j, "pending", what);
    if (j.contains("utility")) s.model = model_from_json(j["utility"], what);
    if (j.contains("game_table")) s.game_table = parse_table(j["game_table"], what);

    const json operators_obj = j.value("operators", json::object());
    for (const auto& [pool, val] : operators_obj.items()) {
        OperatorPolicy p;
        const std::string kind = string_field(val, "policy", what);
        if (kind == "rational") {
            p.kind = OperatorPolicy::Kind::RATIONAL;
            p.first = val.contains("action")
                          ? parse_leader_action(val["action"].get<std::string>())
                          : LeaderAction::NOTCENSOR;
            p.policy = val.contains("adaptive")
                           ? parse_leader_policy(val["adaptive"].get<std::string>())
                           : (p.first == LeaderAction::CENSOR ? LeaderPolicy::ALWAYS_CENSOR
                                                              : LeaderPolicy::ALWAYS_NOTCENSOR);
        } else if (kind == "byzantine") {
            p.kind = OperatorPolicy::Kind::BYZANTINE;
            const std::string t = val.value("censors", std::string{"all"});
            if (t == "registrations") p.censors = CensorTarget::REGISTRATIONS;
            else if (t == "revocations") p.censors = CensorTarget::REVOCATIONS;
            else if (t == "registrations-and-revocations")
                p.censors = CensorTarget::REGISTRATIONS_AND_REVOCATIONS;
            else if (t == "all") p.censors = CensorTarget::ALL;
            else throw ScenarioError(what + ": unknown censor target '" + t + "'");
        } else if (kind == "scripted") {
            p.kind = OperatorPolicy::Kind::SCRIPTED;
            if (!val.contains("script") || !val["script"].is_array() || val["script"].empty())
                throw ScenarioError(what + ": scripted operator needs a non-empty script");
            for (const json& a : val["script"]) p.script.push_back(parse_leader_action(a));
        } else {
            throw ScenarioError(what + ": unknown operator policy '" + kind + "'");
        }
        s.operators[pool] = p;
    }

    const json members_obj = j.value("members", json::object());
    for (const auto& [key, val] : members_obj.items()) {
        MemberAgent a;
        if (val.contains("script"))
            for (const json& act : val["script"]) a.script.push_back(parse_member_action(act));
        if (val.contains("policy")) a.policy = parse_member_policy(val["policy"].get<std::string>());
        s.members[integer_key(key, what)] = a;
    }

    s.rebel_pool = j.value("rebel_pool", s.rebel_pool);
    s.liveness_u = j.value("liveness_u", s.liveness_u);
    s.byzantine_threshold = j.value("byzantine_threshold", s.byzantine_threshold);
    s.audit = j.value("audit", s.audit);
    s.others_block = j.value("others_block", s.others_block);
    s.horizon = j.value("horizon", s.horizon);
    s.default_rounds = j.value("rounds", s.default_rounds);
    if (j.contains("producer")) {
        const std::string p = j["producer"].get<std::string>();
        if (p == "round-robin") s.producer = ProducerMode::ROUND_ROBIN;
        else if (p == "audited-leader") s.producer = ProducerMode::AUDITED_LEADER;
        else throw ScenarioError(what + ": unknown producer mode '" + p + "'");
    }
    if (s.liveness_u < 1) throw ScenarioError(what + ": liveness_u must be at least 1");
    if (s.horizon < 1) throw ScenarioError(what + ": horizon must be at least 1");
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    return parse_scenario_text(read_file(path));
}

LedgerState scenario_genesis(const Scenario& s) {
    LedgerState state = genesis_state(s.players);
    for (const Transaction& tx : s.genesis) {
        const Admissibility a = admissible(state, tx);
        if (!a.ok)
            throw ScenarioError("inadmissible genesis transaction (" + a.reason +
                                "): " + serialize_transaction(tx));
        apply_in_place(state, tx);
    }
    return state;
}

}  // namespace poolsim
