#include "CLI11.hpp"
#include "json.hpp"

#include "poolsim/beacon.hpp"
#include "poolsim/equilibrium.hpp"
#include "poolsim/report_json.hpp"
#include "poolsim/sim.hpp"
#include "poolsim/stats.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace poolsim;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kExitOk = 0;
constexpr int kExitCounterexample = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLoad = 3;
constexpr int kExitHypothesis = 4;

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::CONFIRMED: return kExitOk;
        case Verdict::COUNTEREXAMPLE: return kExitCounterexample;
        case Verdict::HYPOTHESIS_FAILURE: return kExitHypothesis;
    }
    return kExitLoad;
}

// No partial files: write next to the target, rename into place.
void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void print_checks(const char* title, const std::vector<CheckItem>& items) {
    if (items.empty()) return;
    std::cout << title << ":\n";
    for (const CheckItem& c : items) {
        std::cout << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
}

void write_report(const std::string& out_dir, const std::string& name, const json& body) {
    if (out_dir.empty()) return;
    write_atomic(fs::path(out_dir) / name, body.dump(2) + "\n");
}

GameFile load_game_checked(const std::string& path) {
    if (path.empty()) throw UsageError("a game file is required (--game)");
    return load_game_file(path);
}

MultiRoundGame as_multi(const GameFile& g) {
    if (g.kind == GameKind::TWOPOOL)
        throw UsageError("this operation expects a single- or multi-round game");
    return {g.table, g.rounds};
}

// ------------------------------------------------------------ simulate --

int cmd_simulate(const std::string& scenario_path, uint64_t seed, int64_t rounds,
                 const std::string& out_dir, const std::string& format, int verbosity) {
    const Scenario s = load_scenario_file(scenario_path);
    const SimTrace trace = run_rounds(s, rounds, seed);
    const std::string summary = trace_summary(trace);
    if (format == "csv") {
        write_atomic(fs::path(out_dir) / "trace.csv", trace_to_csv(trace));
        write_atomic(fs::path(out_dir) / "pools.csv", pool_table_csv(trace));
        write_atomic(fs::path(out_dir) / "summary.txt", summary);
    } else {
        write_atomic(fs::path(out_dir) / "trace.txt", summary + trace_to_csv(trace));
    }
    if (verbosity > 0) std::cout << summary;
    std::cout << "simulated " << rounds << " rounds into " << out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- nash --

int cmd_nash(const std::string& game_path, const std::string& out_dir, std::size_t limit) {
    const GameFile g = load_game_checked(game_path);
    json report;
    report["game"] = game_path;
    std::vector<std::string> lines;
    if (g.kind == GameKind::SINGLE && g.rounds == 1) {
        for (const StrategyProfile& p : enumerate_pure_nash(SingleRoundGame{g.table}, limit))
            lines.push_back(to_string(p));
        report["rounds"] = 1;
    } else {
        const MultiRoundGame mg = as_multi(g);
        for (const MultiRoundProfile& p : enumerate_pure_nash(mg, limit))
            lines.push_back(to_string(p));
        report["rounds"] = mg.rounds;
    }
    std::sort(lines.begin(), lines.end());
    report["count"] = lines.size();
    report["equilibria"] = lines;
    write_report(out_dir, "nash.json", report);
    std::cout << "pure equilibria: " << lines.size() << "\n";
    for (const std::string& l : lines) std::cout << "  " << l << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- spne --

int cmd_spne(const std::string& game_path, const std::string& profile_path,
             const std::string& out_dir) {
    const GameFile g = load_game_checked(game_path);
    const MultiRoundGame mg = as_multi(g);
    if (profile_path.empty()) throw UsageError("a profile file is required (--profile)");
    const AnyProfile any = load_profile_file(profile_path);
    const MultiRoundProfile* p = std::get_if<MultiRoundProfile>(&any);
    if (!p) throw UsageError("spne expects a multi-round profile");
    const SpneResult res = check_spne(mg, *p);
    json report;
    report["game"] = game_path;
    report["profile"] = to_string(*p);
    report["subgame_perfect"] = res.ok;
    if (res.failure) report["failure"] = failure_json(*res.failure);
    write_report(out_dir, "spne.json", report);
    if (res.ok) {
        std::cout << "subgame perfect\n";
        return kExitOk;
    }
    std::cout << "not subgame perfect: subgame " << res.failure->subgame << ", "
              << res.failure->deviation.label << " gains "
              << util_to_string(res.failure->deviation.gain) << "\n";
    return kExitCounterexample;
}

// -------------------------------------------------------------- verify --

const AdaptiveProfile& adaptive_of(const AnyProfile& any) {
    const AdaptiveProfile* p = std::get_if<AdaptiveProfile>(&any);
    if (!p) throw UsageError("this theorem expects an adaptive profile");
    return *p;
}

int cmd_verify(const std::string& selector, const std::string& game_path,
               const std::string& profile_path, const std::string& scenario_path, int l, int j,
               bool literal_threshold, uint64_t seed, const std::string& out_dir) {
    json report;
    report["theorem"] = selector;
    Verdict verdict = Verdict::HYPOTHESIS_FAILURE;

    if (selector == "t2") {
        const GameFile g = load_game_checked(game_path);
        if (g.kind != GameKind::SINGLE || g.rounds != 1)
            throw UsageError("t2 expects a single-round game");
        const Theorem2Report rep = verify_theorem2(SingleRoundGame{g.table});
        verdict = rep.verdict;
        report.update(report_json(rep));
        report["game"] = game_path;
        print_checks("hypotheses", rep.hypotheses);
        std::cout << "equilibria: " << rep.enumerated.size() << "\n";
    } else if (selector == "t3") {
        if (l < 1) throw UsageError("t3 requires --l >= 1");
        const MultiRoundGame mg = as_multi(load_game_checked(game_path));
        const Theorem3Report rep = verify_theorem3_family(mg, l);
        verdict = rep.verdict;
        report.update(report_json(rep, l));
        report["game"] = game_path;
        print_checks("hypotheses", rep.hypotheses);
        std::cout << "family size: " << rep.family_size << "\n";
    } else if (selector == "t4") {
        const MultiRoundGame mg = as_multi(load_game_checked(game_path));
        if (profile_path.empty()) throw UsageError("t4 requires --profile");
        const AnyProfile any = load_profile_file(profile_path);
        Theorem4Options opts;
        opts.literal_threshold_reading = literal_threshold;
        const Theorem4Report rep = verify_theorem4(mg, adaptive_of(any), opts);
        verdict = rep.verdict;
        report.update(report_json(rep));
        report["game"] = game_path;
        report["profile"] = profile_path;
        print_checks("hypotheses", rep.hypotheses);
        print_checks("conditions", rep.conditions);
    } else if (selector == "t5") {
        const MultiRoundGame mg = as_multi(load_game_checked(game_path));
        const Theorem5Report rep = verify_theorem5(mg);
        verdict = rep.verdict;
        report.update(report_json(rep));
        report["game"] = game_path;
        print_checks("hypotheses", rep.hypotheses);
        std::cout << "part 1: " << to_string(rep.part1.verdict) << "\n";
        std::cout << "part 2: " << to_string(rep.part2.verdict) << "\n";
    } else if (selector == "t6") {
        const GameFile g = load_game_checked(game_path);
        if (g.kind != GameKind::TWOPOOL || !g.two_pool)
            throw UsageError("t6 expects a two-pool game");
        if (profile_path.empty()) throw UsageError("t6 requires --profile");
        const AnyProfile any = load_profile_file(profile_path);
        const TwoPoolProfile* p = std::get_if<TwoPoolProfile>(&any);
        if (!p) throw UsageError("t6 expects a two-pool profile");
        const Theorem6Report rep = verify_theorem6(*g.two_pool, *p);
        verdict = rep.verdict;
        report.update(report_json(rep));
        report["game"] = game_path;
        report["profile"] = profile_path;
        print_checks("hypotheses", rep.hypotheses);
        print_checks("conditions", rep.conditions);
    } else if (selector == "kround") {
        if (j < 1) throw UsageError("kround requires --j >= 1");
        const MultiRoundGame mg = as_multi(load_game_checked(game_path));
        if (profile_path.empty()) throw UsageError("kround requires --profile");
        const AnyProfile any = load_profile_file(profile_path);
        const KRoundProfile* p = std::get_if<KRoundProfile>(&any);
        if (!p) throw UsageError("kround expects a k-round profile");
        const KRoundReport rep = verify_kround_extension(mg, j, *p);
        verdict = rep.verdict;
        report.update(report_json(rep, j));
        report["game"] = game_path;
        report["profile"] = profile_path;
        print_checks("hypotheses", rep.hypotheses);
        print_checks("conditions", rep.conditions);
    } else if (selector == "cartel") {
        if (scenario_path.empty()) throw UsageError("cartel requires --scenario");
        const Scenario s = load_scenario_file(scenario_path);
        const CartelReport rep = cartel_equilibrium_check(s, seed);
        verdict = rep.verdict;
        report.update(report_json(rep));
        report["scenario"] = scenario_path;
        std::cout << rep.detail << "\n";
    } else {
        throw UsageError("unknown theorem selector '" + selector + "'");
    }

    report["verdict"] = to_string(verdict);
    write_report(out_dir, "verify_" + selector + ".json", report);
    std::cout << "verdict: " << to_string(verdict) << "\n";
    return verdict_exit(verdict);
}

// --------------------------------------------------------- audit-stats --

int cmd_audit_stats(int64_t draws, int pools, int seeds, uint64_t base_seed, double alpha,
                    const std::string& out_dir) {
    if (draws < 1 || pools < 1 || seeds < 1) throw UsageError("draws, pools and seeds must be positive");
    std::vector<PoolName> names;
    for (int i = 0; i < pools; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "p%03d", i);
        names.emplace_back(buf);
    }
    std::map<PoolName, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

    std::ostringstream csv;
    csv << "seed,statistic,p_value,pass\n";
    int passed = 0;
    for (int s = 0; s < seeds; ++s) {
        const Beacon beacon{base_seed + static_cast<uint64_t>(s)};
        std::vector<uint64_t> counts(static_cast<std::size_t>(pools), 0);
        for (int64_t d = 0; d < draws; ++d)
            ++counts[index.at(select_pool_for_audit(draw_randomness(beacon, d), names))];
        const ChiSquareResult res = chi_square_uniform(counts);
        const bool pass = res.p_value >= alpha;
        if (pass) ++passed;
        csv << (base_seed + static_cast<uint64_t>(s)) << "," << res.statistic << ","
            << res.p_value << "," << (pass ? 1 : 0) << "\n";
    }
    if (!out_dir.empty()) write_atomic(fs::path(out_dir) / "audit_stats.csv", csv.str());
    std::cout << "uniformity: " << passed << "/" << seeds << " seeds pass at alpha " << alpha
              << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ classify --

int cmd_classify(const std::string& scenario_path, int horizon, const std::string& out_dir) {
    const Scenario s = load_scenario_file(scenario_path);
    if (!s.model) throw ScenarioError("the scenario has no utility model to classify against");
    if (s.pending.empty()) throw ScenarioError("the scenario has no pending transactions");
    const LedgerState state = scenario_genesis(s);
    const int h = horizon > 0 ? horizon : static_cast<int>(s.horizon);
    json rows = json::array();
    for (const Transaction& tx : s.pending) {
        const ClassifyResult res = classify_transaction(*s.model, state, tx, s.pending, h);
        rows.push_back(classify_row_json(tx, res));
        std::cout << transaction_id(tx) << " " << transaction_kind(tx) << " "
                  << to_string(res.verdict) << " nodes=" << res.nodes << "\n";
    }
    json report = {{"scenario", scenario_path}, {"horizon", h}, {"transactions", rows}};
    write_report(out_dir, "classify.json", report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pool censorship incentive simulator and equilibrium verifier"};
    app.require_subcommand(1);

    std::string scenario_path, game_path, profile_path, out_dir{"."}, format{"csv"}, selector;
    uint64_t seed = 1;
    int64_t rounds = -1, draws = 100000;
    int verbosity = 0, l = 0, j = 0, pools = 10, seeds = 100, horizon = 0;
    double alpha = 0.01;
    bool literal_threshold = false;

    CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write trace files");
    sim->add_option("--scenario", scenario_path)->required();
    sim->add_option("--seed", seed)->required();
    sim->add_option("--rounds", rounds)->required();
    sim->add_option("--out", out_dir);
    sim->add_option("--format", format)->check(CLI::IsMember({"csv", "structured-text"}));
    sim->add_flag("-v,--verbose", verbosity);

    CLI::App* nash = app.add_subcommand("nash", "enumerate pure Nash equilibria of a game file");
    nash->add_option("--game", game_path)->required();
    nash->add_option("--out", out_dir);

    CLI::App* spne = app.add_subcommand("spne", "check subgame perfection of a profile");
    spne->add_option("--game", game_path)->required();
    spne->add_option("--profile", profile_path)->required();
    spne->add_option("--out", out_dir);

    CLI::App* verify = app.add_subcommand("verify", "run a theorem verifier");
    verify->add_option("selector", selector, "t2|t3|t4|t5|t6|kround|cartel")->required();
    verify->add_option("--game", game_path);
    verify->add_option("--profile", profile_path);
    verify->add_option("--scenario", scenario_path);
    verify->add_option("--l", l);
    verify->add_option("--j", j);
    verify->add_option("--seed", seed);
    verify->add_flag("--literal-threshold", literal_threshold);
    verify->add_option("--out", out_dir);

    CLI::App* audit = app.add_subcommand("audit-stats", "beacon uniformity test");
    audit->add_option("--draws", draws);
    audit->add_option("--pools", pools);
    audit->add_option("--seeds", seeds);
    audit->add_option("--seed", seed);
    audit->add_option("--alpha", alpha);
    audit->add_option("--out", out_dir);

    CLI::App* classify = app.add_subcommand("classify", "classify pending transactions");
    classify->add_option("--scenario", scenario_path)->required();
    classify->add_option("--horizon", horizon);
    classify->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(scenario_path, seed, rounds, out_dir, format, verbosity);
        if (nash->parsed()) return cmd_nash(game_path, out_dir, std::size_t{1} << 20);
        if (spne->parsed()) return cmd_spne(game_path, profile_path, out_dir);
        if (verify->parsed())
            return cmd_verify(selector, game_path, profile_path, scenario_path, l, j,
                              literal_threshold, seed, out_dir);
        if (audit->parsed()) return cmd_audit_stats(draws, pools, seeds, seed, alpha, out_dir);
        if (classify->parsed()) return cmd_classify(scenario_path, horizon, out_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ScenarioError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return kExitLoad;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoad;
    }
    return kExitUsage;
}
