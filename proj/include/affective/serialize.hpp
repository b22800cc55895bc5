#pragma once

// JSON views of the result types. Numbers are rounded to 12 significant
// digits; non-finite values become null.

#include <string>

#include <json.hpp>

#include "affective/conditions.hpp"
#include "affective/economy.hpp"
#include "affective/equilibrium.hpp"
#include "affective/linalg.hpp"
#include "affective/solver.hpp"
#include "affective/welfare.hpp"

namespace affective::io {

using nlohmann::json;

double round12(double v);
json number(double v);
json to_json(const Vector& v);
/// Array of rows.
json to_json(const Matrix& m);

json to_json(const solver::ConsistencySolution& s);
json to_json(const solver::PicardResult& r);
json to_json(const solver::InducedGameEval& e);
json to_json(const conditions::ConditionReport& r);
json to_json(const equilibrium::VerificationReport& r);
json to_json(const equilibrium::EquilibriumResult& r);
json to_json(const equilibrium::BestReply& r);
json to_json(const equilibrium::DominanceReport& r);
json to_json(const welfare::ParetoCertificate& c);
json to_json(const welfare::WelfareWeights& w);
json to_json(const welfare::WelfareGridMax& g);
json to_json(const economy::CompetitiveEquilibrium& ce);
json to_json(const economy::PlannerSolution& p);
json to_json(const economy::EfficiencyAudit& a);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

}  // namespace affective::io
