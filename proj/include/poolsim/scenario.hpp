#pragma once

#include "poolsim/games.hpp"
#include "poolsim/incentive.hpp"
#include "poolsim/ledger.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace poolsim {

// Raised on malformed, inconsistent or unsupported input files.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Utility values in files are decimal numbers with at most six fractional
// digits; they convert exactly to fixed-point micro units.
Util util_from_double(double v);

LeaderAction parse_leader_action(const std::string& s);
MemberAction parse_member_action(const std::string& s);
LeaderPolicy parse_leader_policy(const std::string& s);
MemberPolicy parse_member_policy(const std::string& s);

// ---- game files --------------------------------------------------------

enum class GameKind { SINGLE, MULTI, TWOPOOL };

struct GameFile {
    GameKind kind = GameKind::SINGLE;
    int rounds = 1;                       // multi
    UtilityTable table;                   // single / multi
    std::optional<TwoPoolGame> two_pool;  // twopool
};

// Tables must cover exactly the reachable stake levels (every subset sum of
// member stakes plus the leader's); missing or extra levels are rejected.
GameFile parse_game_text(const std::string& text);
GameFile load_game_file(const std::string& path);

// ---- profile files -----------------------------------------------------

using AnyProfile = std::variant<StrategyProfile, MultiRoundProfile, AdaptiveProfile,
                                KRoundProfile, TwoPoolProfile>;

AnyProfile parse_profile_text(const std::string& text);
AnyProfile load_profile_file(const std::string& path);

// Single transaction from the same JSON form scenario files use for pending
// and genesis lists.
Transaction parse_transaction_text(const std::string& text);

// ---- simulation scenarios ------------------------------------------------

enum class ProducerMode { ROUND_ROBIN, AUDITED_LEADER };

enum class CensorTarget { REGISTRATIONS, REVOCATIONS, REGISTRATIONS_AND_REVOCATIONS, ALL };

// Operator behaviour when producing a block. Rational operators include any
// transaction that does not strictly lower their own utility and treat
// registration/revocation carriers per the supplied game stance (first-round
// action plus an adaptive policy for later rounds). Byzantine operators censor
// everything matching their target. Scripted operators follow a fixed
// per-round censor/notcensor sequence (last entry persists).
struct OperatorPolicy {
    enum class Kind { RATIONAL, BYZANTINE, SCRIPTED };
    Kind kind = Kind::RATIONAL;
    CensorTarget censors = CensorTarget::ALL;
    std::vector<LeaderAction> script;
    LeaderAction first = LeaderAction::NOTCENSOR;
    LeaderPolicy policy = LeaderPolicy::ALWAYS_NOTCENSOR;
};

// Dissolved-pool member behaviour: per-round script, then the policy
// (X capitulates until a rebel registration was observed in a prior round).
struct MemberAgent {
    std::vector<MemberAction> script;
    MemberPolicy policy = MemberPolicy::ALWAYS_CAPITULATE;
};

struct Scenario {
    std::map<PlayerId, Stake> players;
    std::vector<Transaction> genesis;
    std::optional<UtilityModel> model;
    std::optional<UtilityTable> game_table;
    std::vector<Transaction> pending;
    std::map<PoolName, OperatorPolicy> operators;
    std::map<PlayerId, MemberAgent> members;
    PoolName rebel_pool = "newpool";
    int64_t liveness_u = 1;
    double byzantine_threshold = 0.5;
    ProducerMode producer = ProducerMode::ROUND_ROBIN;
    bool audit = true;
    bool others_block = false;
    int horizon = 2;
    int default_rounds = 2;
    bool classify_submissions = false;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Players' stakes installed, then genesis transactions applied in order.
// Throws ScenarioError when a genesis transaction is inadmissible.
LedgerState scenario_genesis(const Scenario& s);

}  // namespace poolsim
