#pragma once

#include "json.hpp"

#include "poolsim/equilibrium.hpp"
#include "poolsim/incentive.hpp"
#include "poolsim/sim.hpp"

// JSON views of reports, shared by the command line and the python module.
namespace poolsim {

nlohmann::json check_items_json(const std::vector<CheckItem>& items);
nlohmann::json profiles_json(const std::vector<StrategyProfile>& ps);
nlohmann::json deviations_json(const std::vector<KRoundDeviation>& ds);
nlohmann::json deviations_json(const std::vector<TwoPoolDeviation>& ds);
nlohmann::json failure_json(const SubgameFailure& f);

nlohmann::json report_json(const Theorem2Report& rep);
nlohmann::json report_json(const Theorem3Report& rep, int l);
nlohmann::json report_json(const Theorem4Report& rep);
nlohmann::json report_json(const Theorem5Report& rep);
nlohmann::json report_json(const Theorem6Report& rep);
nlohmann::json report_json(const KRoundReport& rep, int j);
nlohmann::json report_json(const CartelReport& rep);
nlohmann::json report_json(const Theorem1Report& rep);
nlohmann::json witness_json(const IncumbencyWitness& w);
nlohmann::json classify_row_json(const Transaction& tx, const ClassifyResult& res);

}  // namespace poolsim
