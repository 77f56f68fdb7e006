#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poolsim/games.hpp"

namespace poolsim {

enum class Verdict { CONFIRMED, COUNTEREXAMPLE, HYPOTHESIS_FAILURE };
const char* to_string(Verdict v);

// One line of a hypothesis or condition checklist. Hypotheses gate the
// verdict (a failed one yields HYPOTHESIS_FAILURE); conditions are
// informational and help triage a COUNTEREXAMPLE into "stated condition
// unmet" versus "claim breached".
struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

bool all_passed(const std::vector<CheckItem>& items);

// Canonical one-line renderings, used for deterministic ordering and reports.
std::string to_string(const StrategyProfile& p);
std::string to_string(const MultiRoundProfile& p);
std::string to_string(const KRoundProfile& p);
std::string to_string(const TwoPoolProfile& p);

// ---------------------------------------------------------------- scans --
// A deviation is a unilateral strategy change with its exact utility gain.
// Strictly positive gains are violations (the profile is not a pure Nash
// equilibrium); zero gains are collected separately as indifferences.

struct SingleDeviation {
  bool leader = false;
  PlayerId member = 0;
  StrategyProfile deviated;
  Util gain = 0;
  std::string label;
};
struct SingleScan {
  std::vector<SingleDeviation> violations;
  std::vector<SingleDeviation> indifferences;
};
SingleScan best_response_scan(const SingleRoundGame& game, const StrategyProfile& profile);
std::vector<SingleDeviation> best_response_violations(const SingleRoundGame& game,
                                                      const StrategyProfile& profile);
std::vector<StrategyProfile> enumerate_pure_nash(const SingleRoundGame& game,
                                                 std::size_t limit = std::size_t{1} << 20);

struct MultiDeviation {
  bool leader = false;
  PlayerId member = 0;
  MultiRoundProfile deviated;
  Util gain = 0;
  std::string label;
};
struct MultiScan {
  std::vector<MultiDeviation> violations;
  std::vector<MultiDeviation> indifferences;
};
MultiScan best_response_scan(const MultiRoundGame& game, const MultiRoundProfile& profile);
std::vector<MultiDeviation> best_response_violations(const MultiRoundGame& game,
                                                     const MultiRoundProfile& profile);
std::vector<MultiRoundProfile> enumerate_pure_nash(const MultiRoundGame& game,
                                                   std::size_t limit = std::size_t{1} << 20);

// Subgame-perfection over commitment-respecting profiles. Subgame r covers
// rounds r+1..m and inherits the prefix's commitment locks plus whether a
// revolution already happened.
struct SubgameFailure {
  int subgame = 0;
  MultiDeviation deviation;
};
struct SpneResult {
  bool ok = false;
  std::optional<SubgameFailure> failure;
};
SpneResult check_spne(const MultiRoundGame& game, const MultiRoundProfile& profile);

struct KRoundDeviation {
  bool leader = false;
  PlayerId member = 0;
  KRoundProfile deviated;
  Util gain = 0;
  std::string label;
};
struct KRoundScan {
  std::vector<KRoundDeviation> violations;
  std::vector<KRoundDeviation> indifferences;
};
// Deviations range over full action scripts (commitment-clamped), which is
// exact: any adaptive strategy realizes as some script against the fixed
// strategies of the other players.
KRoundScan best_response_scan(const MultiRoundGame& game, const KRoundProfile& profile);
std::vector<KRoundDeviation> best_response_violations(const MultiRoundGame& game,
                                                      const KRoundProfile& profile);

// The two-round adaptive strategy space: every player picks a first-round
// action and a policy for the second round.
std::vector<KRoundProfile> enumerate_adaptive_profiles(const MultiRoundGame& game,
                                                       std::size_t limit = std::size_t{1} << 20);
std::vector<KRoundProfile> enumerate_pure_nash_adaptive(const MultiRoundGame& game,
                                                        std::size_t limit = std::size_t{1} << 20);

struct TwoPoolDeviation {
  int pool = 0;  // 1 or 2
  bool leader = false;
  PlayerId member = 0;
  TwoPoolProfile deviated;
  Util gain = 0;
  std::string label;
};
struct TwoPoolScan {
  std::vector<TwoPoolDeviation> violations;
  std::vector<TwoPoolDeviation> indifferences;
};
TwoPoolScan best_response_scan(const TwoPoolGame& game, const TwoPoolProfile& profile);
std::vector<TwoPoolDeviation> best_response_violations(const TwoPoolGame& game,
                                                       const TwoPoolProfile& profile);

// ------------------------------------------------------------- verifiers --

// Single-round characterization: the pure equilibria are exactly the
// capitulate-and-censor profile plus every no-censor profile whose leader
// weakly prefers staying over censoring against the capitulators and whose
// rebel set is either plural or a single rebel who weakly prefers the fresh
// pool. Requires strictly positive in-pool member utilities and at least one
// member who strictly prefers the fresh pool.
struct Theorem2Report {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  std::vector<StrategyProfile> characterized;
  std::vector<StrategyProfile> enumerated;
  std::vector<StrategyProfile> only_characterized;
  std::vector<StrategyProfile> only_enumerated;
};
Theorem2Report verify_theorem2(const SingleRoundGame& game);

// Multi-round delayed-revolution family: censor plus full capitulation for l
// rounds, then no-censor with a rebel set satisfying the single-round side
// conditions. Every member of the family must be subgame perfect.
struct Theorem3Report {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  int family_size = 0;
  std::optional<MultiRoundProfile> failing_profile;
  std::optional<SubgameFailure> failure;
};
Theorem3Report verify_theorem3_family(const MultiRoundGame& game, int l);

struct Theorem4Options {
  // Evaluate the rebel threshold against the member's utility at their own
  // stake level instead of twice the full-pool utility. Requires the table
  // to carry that level; reported unevaluable otherwise.
  bool literal_threshold_reading = false;
};
struct Theorem4Report {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  std::vector<CheckItem> conditions;
  std::vector<KRoundDeviation> violations;
};
Theorem4Report verify_theorem4(const MultiRoundGame& game, const AdaptiveProfile& profile,
                               const Theorem4Options& options = {});

// Structure of two-round adaptive equilibria, checked by whole-space
// enumeration: (I) with a round-one rebel and a leader who strictly prefers
// the fresh pool to censoring the reactive rebels, no equilibrium keeps
// censoring in round two; (II) when some member strictly prefers the fresh
// pool to two in-pool rounds and a reactive rebel policy is present, every
// equilibrium that ends without censorship pays that member the fresh-pool
// utility in round two.
struct Theorem5PartReport {
  std::string name;
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> checks;
  std::vector<KRoundProfile> witnesses;
};
struct Theorem5Report {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  Theorem5PartReport part1;
  Theorem5PartReport part2;
  std::size_t equilibria = 0;
};
Theorem5Report verify_theorem5(const MultiRoundGame& game);

struct Theorem6Report {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  std::vector<CheckItem> conditions;
  std::vector<TwoPoolDeviation> violations;
};
Theorem6Report verify_theorem6(const TwoPoolGame& game, const TwoPoolProfile& profile);

// k-round generalization of the two-round structure: sustained rebellion for
// j rounds triggers the reactive policies at round j+1; the rebel threshold
// scales to u'_i >= (k/(k-j)) * u^i_y, compared exactly by cross
// multiplication. k is the game's round count.
struct KRoundReport {
  Verdict verdict = Verdict::HYPOTHESIS_FAILURE;
  std::vector<CheckItem> hypotheses;
  std::vector<CheckItem> conditions;
  std::vector<KRoundDeviation> violations;
};
KRoundReport verify_kround_extension(const MultiRoundGame& game, int j, const KRoundProfile& profile);

}  // namespace poolsim
