#ifndef BMLAB_JSON_IO_HPP
#define BMLAB_JSON_IO_HPP

#include <json.hpp>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"

namespace bmlab {

/// {"mean": m, "coeffs": [c_0..c_Q], "rank": d, "truncation": Q}
nlohmann::json expansion_to_json(const HermiteExpansion& e);
HermiteExpansion expansion_from_json(const nlohmann::json& j);

/// {"family":"fgn","H":h} | {"family":"exponential","a":a} |
/// {"family":"table","values":[..]} | {"family":"white"}
nlohmann::json covariance_to_json(const CovarianceModel& m);
CovarianceModel covariance_from_json(const nlohmann::json& j);

}  // namespace bmlab

#endif  // BMLAB_JSON_IO_HPP
