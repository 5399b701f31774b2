#include <cmath>

#include "tsirelson/report.hpp"

namespace tsirelson::report {

json tagged(const Rational& value, const char* kind) { return {{"value", value.str()}, {"kind", kind}}; }

json tagged(double value, const char* kind) {
    // JSON has no infinities; keep them as strings
    if (std::isinf(value)) return {{"value", value > 0 ? "inf" : "-inf"}, {"kind", kind}};
    return {{"value", value}, {"kind", kind}};
}

json to_json(const NormBound& b) { return tagged(b.value, b.exact ? exact : lower_bound); }

json to_json(const EvalStats& s) {
    return {{"evaluations", s.evaluations}, {"dp_cells", s.dp_cells}, {"families", s.families},
            {"cache_hits", s.cache_hits}};
}

json to_json(const CertificateLine& line) {
    return {{"name", line.name},
            {"claim", line.claim()},
            {"lhs", line.lhs},
            {"relation", to_string(line.relation)},
            {"value", tagged(line.value, line.status == LineStatus::Exact ? exact : lower_bound)},
            {"bound", tagged(line.bound, exact)},
            {"status", to_string(line.status)},
            {"verified", line.verified},
            {"route", line.route}};
}

json to_json(const Witness& w) {
    json parts = json::array();
    for (const auto& p : w.parts) parts.push_back(p.literal());
    json lines = json::array();
    for (const auto& l : w.certificate) lines.push_back(to_json(l));
    return {{"level", w.level},
            {"n", w.n},
            {"schedule", {{"n", w.sched.n}, {"start", w.sched.start}, {"m", w.sched.m}}},
            {"parts", parts},
            {"sum", w.sum.literal()},
            {"certificate", lines},
            {"status", w.verified() ? "verified" : "failed"}};
}

json to_json(const CertifiedRatio& r) {
    return {{"x", r.x.literal()},
            {"numerator", {{"norm", r.numerator.str()}, {"value", tagged(r.numerator_value, r.numerator_exact ? exact : lower_bound)}}},
            {"denominator", {{"norm", r.denominator.str()}, {"value", tagged(r.denominator_value, exact)}}},
            {"ratio", tagged(r.lower_bound, lower_bound)},
            {"source", r.source}};
}

json to_json(const ProbeTarget& p) {
    json out = {{"target", p.target.str()},
                {"status", p.achieved ? "achieved" : "not-achieved-within-budget"},
                {"from_level", p.from_level},
                {"to_level", p.to_level}};
    out["certificate"] = p.certificate ? to_json(*p.certificate) : json(nullptr);
    return out;
}

json to_json(const DistanceEstimate& d) {
    const char* kind = d.kind == EstimateKind::Exact ? exact : lower_bound;
    json out = {{"value", d.str()}, {"kind", kind}, {"sided", to_string(d.sided)}};
    out["witness"] = d.witness ? json(d.witness->literal()) : json(nullptr);
    return out;
}

json to_json(const OrderMatrix& m) {
    json entries = json::array();
    for (const auto& row : m.entries) {
        for (const auto& e : row) {
            json j = {{"n", e.n}, {"k", e.k}, {"verdict", e.verdict}, {"source", e.source}};
            j["D"] = to_json(e.d);
            j["phi"] = {{"logistic", tagged(phi_transform(PhiVariant::Logistic, e.d), float_estimate)},
                        {"similarity", tagged(phi_transform(PhiVariant::Similarity, e.d), float_estimate)}};
            entries.push_back(std::move(j));
        }
    }
    return {{"levels", m.levels}, {"rows", "numerator level n"}, {"cols", "denominator level k"}, {"entries", entries}};
}

json to_json(const StabilityReport& s) {
    return {{"rows", s.rows},
            {"cols", s.cols},
            {"sup_lower", tagged(s.sup_lower, float_estimate)},
            {"sup_at", {s.sup_at.first, s.sup_at.second}},
            {"inf_upper", tagged(s.inf_upper, float_estimate)},
            {"inf_at", {s.inf_at.first, s.inf_at.second}},
            {"gap", tagged(s.gap, float_estimate)}};
}

json to_json(const PhiExpr& e) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1: return {{"tag", "const1"}};
    case PhiExpr::Kind::Atom: return {{"tag", "atom"}, {"id", e.id()}};
    case PhiExpr::Kind::Scal: return {{"tag", "scal"}, {"r", e.coefficient().str()}, {"child", to_json(e.child())}};
    case PhiExpr::Kind::And: return {{"tag", "and"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
    case PhiExpr::Kind::Or: return {{"tag", "or"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
    case PhiExpr::Kind::Oplus: return {{"tag", "oplus"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
    }
    return nullptr;
}

json to_json(const PhiValue& v) { return v.exact ? tagged(v.q, exact) : tagged(v.f, float_estimate); }

json phi_table(const OrderMatrix& m, PhiVariant variant) {
    json rows = json::array();
    for (const auto& row : phi_matrix(m, variant)) rows.push_back(row);
    return rows;
}

} // namespace tsirelson::report
