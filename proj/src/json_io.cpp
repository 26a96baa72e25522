#include "bmlab/json_io.hpp"

#include "bmlab/errors.hpp"

namespace bmlab {

using nlohmann::json;

json expansion_to_json(const HermiteExpansion& e) {
  json j;
  j["mean"] = e.mean;
  j["coeffs"] = e.coeffs;
  j["rank"] = e.rank;
  j["truncation"] = e.truncation();
  return j;
}

HermiteExpansion expansion_from_json(const json& j) {
  if (!j.contains("coeffs") || !j["coeffs"].is_array())
    throw ConfigError("expansion: missing coefficient array");
  std::vector<double> levels = j["coeffs"].get<std::vector<double>>();
  if (levels.empty()) levels.push_back(0.0);
  HermiteExpansion e = make_expansion(std::move(levels));
  if (j.contains("mean")) e.mean = j["mean"].get<double>();
  return e;
}

json covariance_to_json(const CovarianceModel& m) {
  json j;
  switch (m.family()) {
    case CovFamily::white_noise:
      j["family"] = "white";
      break;
    case CovFamily::exponential:
      j["family"] = "exponential";
      j["a"] = m.decay();
      break;
    case CovFamily::fgn:
      j["family"] = "fgn";
      j["H"] = m.hurst();
      break;
    case CovFamily::finite_table:
      j["family"] = "table";
      j["values"] = m.table();
      break;
  }
  return j;
}

CovarianceModel covariance_from_json(const json& j) {
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError("covariance: missing family");
  const std::string family = j["family"].get<std::string>();
  if (family == "white") return CovarianceModel::white_noise();
  if (family == "fgn") {
    if (!j.contains("H")) throw ConfigError("covariance: fgn needs H");
    return CovarianceModel::fgn(j["H"].get<double>());
  }
  if (family == "exponential") {
    if (!j.contains("a")) throw ConfigError("covariance: exponential needs a");
    return CovarianceModel::exponential(j["a"].get<double>());
  }
  if (family == "table") {
    if (!j.contains("values"))
      throw ConfigError("covariance: table needs values");
    return CovarianceModel::finite_table(
        j["values"].get<std::vector<double>>());
  }
  throw ConfigError("covariance: unknown family '" + family + "'");
}

}  // namespace bmlab
