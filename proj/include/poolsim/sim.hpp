#pragma once

#include "poolsim/equilibrium.hpp"
#include "poolsim/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace poolsim {

struct TraceDecisionRow {
    std::string tx_id;
    std::string kind;
    PlayerId author = 0;
    bool applied = false;  // false: censored by the producer
};

struct TraceRound {
    int64_t round = 0;  // 1-based
    uint64_t rho = 0;
    PoolName audited;     // empty when no audit happened
    PlayerId producer = -1;
    std::vector<TraceDecisionRow> decisions;
    std::map<PlayerId, Util> utilities;
    PoolTable pool_table;  // end-of-round snapshot
};

struct SubmissionRecord {
    std::string tx_id;
    std::string kind;
    PlayerId author = 0;
    int64_t submitted_round = 0;
    int64_t applied_round = -1;  // -1: never applied
    bool classified = false;
    Classification classification = Classification::INDETERMINATE;
};

struct SimTrace {
    std::vector<TraceRound> rounds;
    std::map<PlayerId, Util> cumulative;
    std::vector<SubmissionRecord> submissions;
    LedgerState final_state;
    bool revolution = false;  // a member-authored registration reached the ledger
};

// A single producer postponing a single transaction; used by the paired
// deviation audit.
struct ProducerDeviation {
    PlayerId operator_id = 0;
    std::string tx_id;
};

// Round loop: draw rho, audit (if enabled), agents submit, the round's
// producer filters pending transactions, utilities accrue on the end-of-round
// state. Policies are carried by the scenario. Deterministic in
// (scenario, rounds, seed).
SimTrace run_rounds(const Scenario& s, int64_t rounds, uint64_t seed,
                    const std::optional<ProducerDeviation>& deviation = {});

// True iff the transaction was applied within u rounds of its submission.
// Throws std::invalid_argument when the id was never submitted in the trace.
bool liveness_monitor(const SimTrace& trace, const std::string& tx_id, int64_t u);

struct LivenessEntry {
    std::string tx_id;
    std::string kind;
    int64_t submitted_round = 0;
    int64_t applied_round = -1;
    bool in_scope = false;  // classified STRONGLY_IC
    bool live = false;
};

struct DeviationAuditEntry {
    PlayerId operator_id = 0;
    std::string tx_id;
    Util base = 0;
    Util deviated = 0;
    Util gain = 0;
};

struct Theorem1Report {
    bool all_live = false;
    bool no_positive_gain = false;
    int64_t rounds = 0;
    double byzantine_fraction = 0;
    std::vector<PoolName> byzantine_pools;
    std::vector<LivenessEntry> liveness;
    std::vector<DeviationAuditEntry> deviations;
};

// Assigns the first floor(fraction * k) operators (pool-name order) a
// censor-all byzantine policy and the rest the rational includer, runs the
// scenario without audits, checks liveness of every strongly
// incentive-consistent submission and audits paired postponement deviations.
// Throws ScenarioError when the fraction is not below the scenario threshold.
Theorem1Report theorem1_experiment(const Scenario& s, double byzantine_fraction, int64_t rounds,
                                   uint64_t seed);

struct CartelDeviation {
    PoolName pool;
    PlayerId operator_id = 0;
    std::string label;
    Util base = 0;
    Util deviated = 0;
    Util gain = 0;
};

struct CartelReport {
    Verdict verdict = Verdict::CONFIRMED;
    bool precondition_ok = false;
    bool mechanism = false;  // audits + game-table utilities active
    std::string detail;
    std::vector<CartelDeviation> deviations;
};

// Checks whether censoring the pending competitor registration is an
// equilibrium for the incumbent operators. Without the audit mechanism the
// check is static (include plus rational member migration); with audits and a
// game table it replays the censor-forever strategy against the stop-once-
// audited deviation. Precondition failures yield HYPOTHESIS_FAILURE.
CartelReport cartel_equilibrium_check(const Scenario& s, uint64_t seed = 1);

// CSV trace: header line, then one row per producer decision (rounds without
// decisions emit a single row with empty transaction columns).
std::string trace_to_csv(const SimTrace& trace);

// Structured-text summary: cumulative utilities and the final pool table.
std::string trace_summary(const SimTrace& trace);

// Per-round pool table snapshots (round, pool, operator, stake, members).
std::string pool_table_csv(const SimTrace& trace);

}  // namespace poolsim
