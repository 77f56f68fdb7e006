// Python face of the library: text in, report text out. Games, profiles and
// scenarios use the same JSON forms the command line reads from files.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "poolsim/beacon.hpp"
#include "poolsim/equilibrium.hpp"
#include "poolsim/report_json.hpp"
#include "poolsim/scenario.hpp"
#include "poolsim/sim.hpp"
#include "poolsim/stats.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace py = pybind11;
using json = nlohmann::json;
using namespace poolsim;

namespace {

MultiRoundGame as_multi(const GameFile& g) {
    if (g.kind == GameKind::TWOPOOL)
        throw std::invalid_argument("this operation expects a single- or multi-round game");
    return {g.table, g.rounds};
}

std::string dump(const json& j) { return j.dump(2); }

std::string nash_text(const std::string& game_text, std::size_t limit) {
    const GameFile g = parse_game_text(game_text);
    std::vector<std::string> lines;
    json report;
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
    return dump(report);
}

std::string spne_text(const std::string& game_text, const std::string& profile_text) {
    const MultiRoundGame mg = as_multi(parse_game_text(game_text));
    const AnyProfile any = parse_profile_text(profile_text);
    const MultiRoundProfile* p = std::get_if<MultiRoundProfile>(&any);
    if (!p) throw std::invalid_argument("spne expects a multi-round profile");
    const SpneResult res = check_spne(mg, *p);
    json report;
    report["profile"] = to_string(*p);
    report["subgame_perfect"] = res.ok;
    if (res.failure) report["failure"] = failure_json(*res.failure);
    return dump(report);
}

std::string verify_text(const std::string& selector, const std::string& game_text,
                        const std::string& profile_text, int l, int j, bool literal_threshold) {
    json report;
    if (selector == "t2") {
        const GameFile g = parse_game_text(game_text);
        if (g.kind != GameKind::SINGLE || g.rounds != 1)
            throw std::invalid_argument("t2 expects a single-round game");
        report = report_json(verify_theorem2(SingleRoundGame{g.table}));
    } else if (selector == "t3") {
        if (l < 1) throw std::invalid_argument("t3 requires l >= 1");
        report = report_json(verify_theorem3_family(as_multi(parse_game_text(game_text)), l), l);
    } else if (selector == "t4") {
        const AnyProfile any = parse_profile_text(profile_text);
        const AdaptiveProfile* p = std::get_if<AdaptiveProfile>(&any);
        if (!p) throw std::invalid_argument("t4 expects an adaptive profile");
        Theorem4Options opts;
        opts.literal_threshold_reading = literal_threshold;
        report = report_json(verify_theorem4(as_multi(parse_game_text(game_text)), *p, opts));
    } else if (selector == "t5") {
        report = report_json(verify_theorem5(as_multi(parse_game_text(game_text))));
    } else if (selector == "t6") {
        const GameFile g = parse_game_text(game_text);
        if (g.kind != GameKind::TWOPOOL || !g.two_pool)
            throw std::invalid_argument("t6 expects a two-pool game");
        const AnyProfile any = parse_profile_text(profile_text);
        const TwoPoolProfile* p = std::get_if<TwoPoolProfile>(&any);
        if (!p) throw std::invalid_argument("t6 expects a two-pool profile");
        report = report_json(verify_theorem6(*g.two_pool, *p));
    } else if (selector == "kround") {
        if (j < 1) throw std::invalid_argument("kround requires j >= 1");
        const AnyProfile any = parse_profile_text(profile_text);
        const KRoundProfile* p = std::get_if<KRoundProfile>(&any);
        if (!p) throw std::invalid_argument("kround expects a k-round profile");
        report = report_json(verify_kround_extension(as_multi(parse_game_text(game_text)), j, *p), j);
    } else {
        throw std::invalid_argument("unknown theorem selector '" + selector + "'");
    }
    report["theorem"] = selector;
    return dump(report);
}

py::dict simulate_text(const std::string& scenario_text, int64_t rounds, uint64_t seed) {
    const Scenario s = parse_scenario_text(scenario_text);
    const SimTrace trace = run_rounds(s, rounds, seed);
    py::dict out;
    out["trace_csv"] = trace_to_csv(trace);
    out["pools_csv"] = pool_table_csv(trace);
    out["summary"] = trace_summary(trace);
    out["revolution"] = trace.revolution;
    out["final_digest"] = content_digest(trace.final_state);
    return out;
}

std::string theorem1_text(const std::string& scenario_text, double byzantine_fraction,
                          int64_t rounds, uint64_t seed) {
    const Scenario s = parse_scenario_text(scenario_text);
    return dump(report_json(theorem1_experiment(s, byzantine_fraction, rounds, seed)));
}

std::string cartel_text(const std::string& scenario_text, uint64_t seed) {
    const Scenario s = parse_scenario_text(scenario_text);
    return dump(report_json(cartel_equilibrium_check(s, seed)));
}

py::object incumbency_text(const std::string& scenario_text) {
    const Scenario s = parse_scenario_text(scenario_text);
    if (!s.model) throw ScenarioError("the scenario has no utility model");
    const auto w = check_incumbency(*s.model, scenario_genesis(s));
    if (!w) return py::none();
    return py::str(dump(witness_json(*w)));
}

std::string classify_text(const std::string& scenario_text, int horizon) {
    const Scenario s = parse_scenario_text(scenario_text);
    if (!s.model) throw ScenarioError("the scenario has no utility model to classify against");
    if (s.pending.empty()) throw ScenarioError("the scenario has no pending transactions");
    const LedgerState state = scenario_genesis(s);
    const int h = horizon > 0 ? horizon : static_cast<int>(s.horizon);
    json rows = json::array();
    for (const Transaction& tx : s.pending)
        rows.push_back(classify_row_json(tx, classify_transaction(*s.model, state, tx, s.pending, h)));
    return dump(json{{"horizon", h}, {"transactions", rows}});
}

std::string pool_table_text(const LedgerState& state) {
    json out = json::object();
    for (const auto& [name, row] : build_pool_table(state)) {
        json members = json::array();
        for (PlayerId m : row.members) members.push_back(m);
        out[name] = {{"operator", row.operator_id},
                     {"delegated", row.delegated},
                     {"members", members},
                     {"dissolved", row.dissolved}};
    }
    return dump(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pool censorship incentive simulator and equilibrium verifier";

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    py::class_<LedgerState>(m, "Ledger")
        .def(py::init([](const std::map<PlayerId, Stake>& stakes) {
                 return genesis_state(stakes);
             }),
             py::arg("stakes"))
        .def("admissible",
             [](const LedgerState& s, const std::string& tx_text) {
                 const Admissibility a = admissible(s, parse_transaction_text(tx_text));
                 return py::make_tuple(a.ok, a.reason);
             },
             py::arg("tx"))
        .def("apply",
             [](LedgerState& s, const std::string& tx_text) {
                 return apply_in_place(s, parse_transaction_text(tx_text));
             },
             py::arg("tx"))
        .def("dissolve",
             [](LedgerState& s, const PoolName& pool) { dissolve_pool_in_place(s, pool); },
             py::arg("pool"))
        .def("undelegated",
             [](const LedgerState& s, PlayerId player) { return undelegated_stake(s, player); },
             py::arg("player"))
        .def("content_digest", [](const LedgerState& s) { return content_digest(s); })
        .def("history_digest", [](const LedgerState& s) { return history_digest(s); })
        .def("pool_table", &pool_table_text)
        .def("serialize", [](const LedgerState& s) { return serialize_state(s); })
        .def("replay_consistent",
             [](const LedgerState& s) {
                 const LedgerState r = replay_events(s.stake, s.history);
                 return content_digest(r) == content_digest(s) &&
                        history_digest(r) == history_digest(s);
             })
        .def_property_readonly("round", [](const LedgerState& s) { return s.round; })
        .def("__len__", [](const LedgerState& s) { return s.history.size(); });

    m.def("nash", &nash_text, py::arg("game"), py::arg("limit") = std::size_t{1} << 20);
    m.def("spne", &spne_text, py::arg("game"), py::arg("profile"));
    m.def("verify", &verify_text, py::arg("selector"), py::arg("game"),
          py::arg("profile") = std::string{}, py::arg("l") = 0, py::arg("j") = 0,
          py::arg("literal_threshold") = false);
    m.def("simulate", &simulate_text, py::arg("scenario"), py::arg("rounds"), py::arg("seed"));
    m.def("theorem1", &theorem1_text, py::arg("scenario"), py::arg("byzantine_fraction"),
          py::arg("rounds"), py::arg("seed"));
    m.def("cartel", &cartel_text, py::arg("scenario"), py::arg("seed") = uint64_t{1});
    m.def("incumbency", &incumbency_text, py::arg("scenario"));
    m.def("classify", &classify_text, py::arg("scenario"), py::arg("horizon") = 0);

    m.def("draw_randomness",
          [](uint64_t seed, int64_t round) { return draw_randomness(Beacon{seed}, round); },
          py::arg("seed"), py::arg("round"));
    m.def("select_pool_for_audit",
          [](uint64_t rho, const std::vector<PoolName>& pools) {
              return select_pool_for_audit(rho, pools);
          },
          py::arg("rho"), py::arg("pools"));
    m.def("chi_square_uniform",
          [](const std::vector<uint64_t>& counts) {
              const ChiSquareResult r = chi_square_uniform(counts);
              return py::make_tuple(r.statistic, r.p_value);
          },
          py::arg("counts"));
}
