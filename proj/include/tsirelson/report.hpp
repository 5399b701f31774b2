#pragma once

#include <json.hpp>

#include "tsirelson/phi.hpp"

namespace tsirelson::report {

using nlohmann::json;

// Every numeric claim carries one of these tags.
inline constexpr const char* exact = "exact";
inline constexpr const char* lower_bound = "lower-bound";
inline constexpr const char* upper_bound = "upper-bound";
inline constexpr const char* float_estimate = "float-estimate";

/// {"value": "p/q", "kind": tag}
json tagged(const Rational& value, const char* kind);
json tagged(double value, const char* kind);

json to_json(const NormBound& b);
json to_json(const EvalStats& s);
json to_json(const CertificateLine& line);
json to_json(const Witness& w);
json to_json(const CertifiedRatio& r);
json to_json(const ProbeTarget& p);
json to_json(const DistanceEstimate& d);
json to_json(const OrderMatrix& m);
json to_json(const StabilityReport& s);
json to_json(const PhiExpr& e);
json to_json(const PhiValue& v);

/// Phi values of the matrix entries under `variant`, keyed like the matrix.
json phi_table(const OrderMatrix& m, PhiVariant variant);

} // namespace tsirelson::report
