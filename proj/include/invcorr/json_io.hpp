#pragma once

#include <json.hpp>

#include "invcorr/bivariate.hpp"
#include "invcorr/dependence.hpp"
#include "invcorr/models.hpp"
#include "invcorr/polytope.hpp"
#include "invcorr/verify.hpp"

namespace invcorr {

using Json = nlohmann::json;

// {"d":3,"blocks":[[1,2],[3]]}
Json to_json(const SetPartition& partition);
SetPartition partition_from_json(const Json& json);

// {"d":3,"rows":[[1,0.8,0.5],[0.8,1,0.2],[0.5,0.2,1]]}
Json to_json(const CorrMatrix& matrix);
CorrMatrix corr_matrix_from_json(const Json& json);

// {"member":false,"residual":...,"weights":[{"blocks":[[1,2],[3]],"alpha":0.5}],
//  "reconstruction_error":...}
Json to_json(const MembershipCert& cert);

Json to_json(const ExactMembershipCert& cert);

// {"x_atoms":[...],"y_atoms":[...],"P":[[...],...]}
Json to_json(const JointPMF& pmf);
JointPMF joint_pmf_from_json(const Json& json);

// {"d":3,"weights":[{"blocks":[[1,2],[3]],"alpha":0.5},...]}
Json to_json(const GammaModel& model);
GammaModel gamma_model_from_json(const Json& json);

// {"levels":[[...],...],"probs":[...]}
Json to_json(const GridPMF& pmf);
GridPMF grid_pmf_from_json(const Json& json);

// {"index":i,"upset":[[...],...],"x":...,"x_prime":...,"p_x":...,"p_x_prime":...}
Json to_json(const PrdWitness& witness);

Json to_json(const InvarianceReport& report);

Json to_json(const TailDependenceEstimate& estimate);

// Exact rational as {"num":"...","den":"..."} decimal strings.
Json rational_to_json(const mpq_class& value);

// {"error":{"code":"...","message":"..."}}
Json error_to_json(const Error& error);

}  // namespace invcorr
