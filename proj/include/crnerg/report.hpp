#pragma once

#include <string>

#include <json.hpp>

#include "crnerg/ergodicity.hpp"
#include "crnerg/network.hpp"

namespace crnerg {

nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const MultiPoly& p);
nlohmann::json to_json(const ErgodicityReport& r);
nlohmann::json to_json(const ControllerReport& r, const ReactionNetwork& net, const ControllerSpec& spec);

/// Human-readable rendering of a report.
std::string to_text(const ErgodicityReport& r);
std::string to_text(const ControllerReport& r, const ReactionNetwork& net, const ControllerSpec& spec);

}  // namespace crnerg
