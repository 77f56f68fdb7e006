#include "poolsim/report_json.hpp"

#include "poolsim/ledger.hpp"

namespace poolsim {

using nlohmann::json;

json check_items_json(const std::vector<CheckItem>& items) {
    json arr = json::array();
    for (const CheckItem& c : items)
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return arr;
}

json profiles_json(const std::vector<StrategyProfile>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back(to_string(p));
    return arr;
}

namespace {

template <typename Deviation>
json deviation_json(const Deviation& d) {
    json o = {{"gain", util_to_string(d.gain)},
              {"label", d.label},
              {"deviated", to_string(d.deviated)}};
    if (d.leader)
        o["player"] = "leader";
    else
        o["player"] = d.member;
    return o;
}

}  // namespace

json deviations_json(const std::vector<KRoundDeviation>& ds) {
    json arr = json::array();
    for (const KRoundDeviation& d : ds) arr.push_back(deviation_json(d));
    return arr;
}

json deviations_json(const std::vector<TwoPoolDeviation>& ds) {
    json arr = json::array();
    for (const TwoPoolDeviation& d : ds) {
        json o = deviation_json(d);
        o["pool"] = d.pool;
        arr.push_back(o);
    }
    return arr;
}

json failure_json(const SubgameFailure& f) {
    return {{"subgame", f.subgame},
            {"gain", util_to_string(f.deviation.gain)},
            {"label", f.deviation.label},
            {"deviated", to_string(f.deviation.deviated)}};
}

json report_json(const Theorem2Report& rep) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["equilibria"] = profiles_json(rep.enumerated);
    report["characterized"] = profiles_json(rep.characterized);
    report["only_characterized"] = profiles_json(rep.only_characterized);
    report["only_enumerated"] = profiles_json(rep.only_enumerated);
    report["alpha_includes_leader_stake"] = true;
    return report;
}

json report_json(const Theorem3Report& rep, int l) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["l"] = l;
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["family_size"] = rep.family_size;
    if (rep.failing_profile) report["failing_profile"] = to_string(*rep.failing_profile);
    if (rep.failure) report["failure"] = failure_json(*rep.failure);
    return report;
}

json report_json(const Theorem4Report& rep) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["conditions"] = check_items_json(rep.conditions);
    report["violations"] = deviations_json(rep.violations);
    return report;
}

json report_json(const Theorem5Report& rep) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["equilibria"] = rep.equilibria;
    for (const Theorem5PartReport* part : {&rep.part1, &rep.part2}) {
        json pj;
        pj["name"] = part->name;
        pj["verdict"] = to_string(part->verdict);
        pj["checks"] = check_items_json(part->checks);
        json ws = json::array();
        for (const KRoundProfile& w : part->witnesses) ws.push_back(to_string(w));
        pj["witnesses"] = ws;
        report[part == &rep.part1 ? "part1" : "part2"] = pj;
    }
    return report;
}

json report_json(const Theorem6Report& rep) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["conditions"] = check_items_json(rep.conditions);
    report["violations"] = deviations_json(rep.violations);
    return report;
}

json report_json(const KRoundReport& rep, int j) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["j"] = j;
    report["hypotheses"] = check_items_json(rep.hypotheses);
    report["conditions"] = check_items_json(rep.conditions);
    report["violations"] = deviations_json(rep.violations);
    return report;
}

json report_json(const CartelReport& rep) {
    json report;
    report["verdict"] = to_string(rep.verdict);
    report["mechanism"] = rep.mechanism;
    report["precondition_ok"] = rep.precondition_ok;
    report["detail"] = rep.detail;
    json devs = json::array();
    for (const CartelDeviation& d : rep.deviations)
        devs.push_back({{"pool", d.pool},
                        {"operator", d.operator_id},
                        {"label", d.label},
                        {"base", util_to_string(d.base)},
                        {"deviated", util_to_string(d.deviated)},
                        {"gain", util_to_string(d.gain)}});
    report["deviations"] = devs;
    return report;
}

json report_json(const Theorem1Report& rep) {
    json report;
    report["rounds"] = rep.rounds;
    report["byzantine_fraction"] = rep.byzantine_fraction;
    report["byzantine_pools"] = rep.byzantine_pools;
    report["all_live"] = rep.all_live;
    report["no_positive_gain"] = rep.no_positive_gain;
    json live = json::array();
    for (const LivenessEntry& e : rep.liveness)
        live.push_back({{"tx_id", e.tx_id},
                        {"kind", e.kind},
                        {"submitted_round", e.submitted_round},
                        {"applied_round", e.applied_round},
                        {"in_scope", e.in_scope},
                        {"live", e.live}});
    report["liveness"] = live;
    json devs = json::array();
    for (const DeviationAuditEntry& d : rep.deviations)
        devs.push_back({{"operator", d.operator_id},
                        {"tx_id", d.tx_id},
                        {"base", util_to_string(d.base)},
                        {"deviated", util_to_string(d.deviated)},
                        {"gain", util_to_string(d.gain)}});
    report["deviations"] = devs;
    return report;
}

json witness_json(const IncumbencyWitness& w) {
    return {{"operator", w.operator_id},
            {"tx_id", transaction_id(w.tx)},
            {"tx", serialize_transaction(w.tx)},
            {"before", w.before},
            {"after", w.after}};
}

json classify_row_json(const Transaction& tx, const ClassifyResult& res) {
    json row = {{"tx_id", transaction_id(tx)},
                {"kind", transaction_kind(tx)},
                {"verdict", to_string(res.verdict)},
                {"nodes", res.nodes},
                {"limit_hit", res.limit_hit}};
    if (res.witness)
        row["witness"] = {{"player", res.witness->player},
                          {"before", res.witness->before},
                          {"after", res.witness->after}};
    return row;
}

}  // namespace poolsim
