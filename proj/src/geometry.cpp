#include <cmath>
#include <limits>

#include "tsirelson/geometry.hpp"

namespace tsirelson {

std::string to_string(Sided s) { return s == Sided::OneSided ? "one-sided" : "two-sided"; }
std::string to_string(EstimateKind k) { return k == EstimateKind::Exact ? "exact" : "lower-bound"; }
std::string to_string(PhiVariant v) { return v == PhiVariant::Logistic ? "logistic" : "similarity"; }

PhiVariant parse_variant(std::string_view text) {
    if (text == "logistic") return PhiVariant::Logistic;
    if (text == "similarity") return PhiVariant::Similarity;
    throw std::invalid_argument("unknown phi variant '" + std::string(text) + "' (expected logistic or similarity)");
}

Sided sided_for(PhiVariant v) { return v == PhiVariant::Logistic ? Sided::OneSided : Sided::TwoSided; }

std::string DistanceEstimate::str() const { return value ? value->str() : "inf"; }

DistanceEstimate distance_lower(const NormSpec& m, const NormSpec& n, const std::vector<FiniteVector>& pool,
                                Sided sided, EvalSession& session) {
    if (pool.empty()) throw std::invalid_argument("candidate pool is empty");
    DistanceEstimate d;
    d.sided = sided;
    d.value = sided == Sided::TwoSided ? Rational(1) : Rational(0);
    for (const auto& raw : pool) {
        if (raw.is_zero()) throw std::invalid_argument("candidate pool contains the zero vector");
        const FiniteVector x = normalize_l1(raw);
        const NormBound den = norm_bound(n, x, session);
        if (!den.exact) continue;
        const NormBound num = norm_bound(m, x, session);
        if (den.value.is_zero() || (num.exact && num.value.is_zero()))
            throw std::logic_error("a norm vanished on the nonzero candidate " + raw.literal());
        Rational r = num.value / den.value;
        if (sided == Sided::TwoSided && num.exact && r < 1) r = Rational(1) / r;
        if (!d.witness || r > *d.value) {
            d.value = max(*d.value, r);
            d.witness = x;
        }
    }
    return d;
}

double phi_transform(PhiVariant v, const DistanceEstimate& d) {
    if (d.infinite()) return v == PhiVariant::Logistic ? 1.0 : 0.0;
    const double dv = std::max(1.0, d.value->to_double());
    const double l = std::log(dv);
    const double t = l / (1.0 + l);
    return v == PhiVariant::Logistic ? t : 1.0 - t;
}

PhiEstimate phi_of(const NormSpec& m, const NormSpec& n, PhiVariant variant, const std::vector<FiniteVector>& pool,
                   EvalSession& session) {
    PhiEstimate e;
    e.distance = distance_lower(m, n, pool, sided_for(variant), session);
    e.value = phi_transform(variant, e.distance);
    e.is_upper_bound = variant == PhiVariant::Similarity;
    if (e.distance.infinite())
        e.exact = variant == PhiVariant::Logistic ? Rational(1) : Rational(0);
    else if (*e.distance.value <= 1)
        e.exact = variant == PhiVariant::Logistic ? Rational(0) : Rational(1);
    return e;
}

namespace {

std::vector<FiniteVector> witness_pool() {
    std::vector<FiniteVector> out;
    for (unsigned n = 2; n <= 4; ++n) {
        FiniteVector x;
        for (Index m : schedule(n, 1).m) x = x + FiniteVector::flat(m, 2 * m - 1, Rational(1, static_cast<unsigned long>(m)));
        out.push_back(x);
    }
    return out;
}

Rational ratio_on(const FiniteVector& x, unsigned n, unsigned k, EvalSession& s, bool& ok) {
    const NormBound den = norm_bound(NormSpec::iterate(k), x, s);
    ok = den.exact;
    if (!ok) return Rational(0);
    return norm_bound(NormSpec::iterate(n), x, s).value / den.value;
}

} // namespace

OrderMatrix order_property_matrix(unsigned levels, const MatrixOptions& options, EvalSession& session) {
    if (levels < 2) throw std::invalid_argument("order matrix needs at least levels 0..2");
    OrderMatrix out;
    out.levels = levels;
    const unsigned size = levels + 1;
    out.entries.assign(size, std::vector<OrderEntry>(size));

    std::vector<std::pair<FiniteVector, std::string>> candidates;
    candidates.emplace_back(FiniteVector::basis(1), "basis");
    for (const auto& x : options.pool) candidates.emplace_back(x, "pool");
    if (options.witnesses)
        for (const auto& x : witness_pool()) candidates.emplace_back(x, "base witness");
    std::vector<std::optional<CertifiedRatio>> sub(size);
    if (options.witnesses) sub[1] = ratio_certificate(1, 4, session);
    if (options.search_subdiagonal) {
        for (unsigned n = 1; n < size; ++n) {
            CertifiedRatio r = ratio_search(NormSpec::iterate(n), NormSpec::iterate(n - 1), options.search, session);
            if (!sub[n] || r.lower_bound > sub[n]->lower_bound) sub[n] = std::move(r);
        }
    }
    for (unsigned n = 1; n < size; ++n)
        if (sub[n]) candidates.emplace_back(sub[n]->x, sub[n]->source);

    for (unsigned n = 0; n < size; ++n) {
        for (unsigned k = 0; k < size; ++k) {
            OrderEntry& e = out.entries[n][k];
            e.n = n;
            e.k = k;
            e.d.sided = Sided::OneSided;
            if (n <= k) {
                // ||x||_n <= ||x||_k pointwise, and t_1 attains ratio 1
                e.d.value = Rational(1);
                e.d.kind = EstimateKind::Exact;
                e.d.witness = FiniteVector::basis(1);
                e.verdict = n == k ? "=1" : "<=1";
                e.source = n == k ? "identity" : "monotone ladder";
                continue;
            }
            e.d.value = Rational(0);
            for (const auto& [x, src] : candidates) {
                bool ok = false;
                const Rational r = ratio_on(normalize_l1(x), n, k, session, ok);
                if (ok && r > *e.d.value) {
                    e.d.value = r;
                    e.d.witness = normalize_l1(x);
                    e.source = src;
                }
            }
        }
    }
    // D(n,k) >= D(n',k') whenever k <= k' < n' <= n.
    for (unsigned gap = 2; gap < size; ++gap) {
        for (unsigned k = 0; k + gap < size; ++k) {
            const unsigned n = k + gap;
            OrderEntry& e = out.entries[n][k];
            for (const OrderEntry* from : {&out.entries[n - 1][k], &out.entries[n][k + 1]}) {
                if (*from->d.value > *e.d.value) {
                    e.d.value = from->d.value;
                    e.d.witness = from->d.witness;
                    e.source = "ladder from (" + std::to_string(from->n) + "," + std::to_string(from->k) + ")";
                }
            }
        }
    }
    for (unsigned n = 0; n < size; ++n)
        for (unsigned k = 0; k < n; ++k) out.entries[n][k].verdict = ">=" + out.entries[n][k].d.value->str();
    return out;
}

std::vector<std::vector<double>> phi_matrix(const OrderMatrix& m, PhiVariant variant) {
    std::vector<std::vector<double>> out;
    for (const auto& row : m.entries) {
        std::vector<double> r;
        for (const auto& e : row) r.push_back(phi_transform(variant, e.d));
        out.push_back(std::move(r));
    }
    return out;
}

StabilityReport stability_gap(const std::vector<std::vector<double>>& matrix) {
    if (matrix.size() < 2) throw std::invalid_argument("stability matrix needs at least 2 rows");
    const std::size_t cols = matrix.front().size();
    if (cols < 2) throw std::invalid_argument("stability matrix needs at least 2 columns");
    for (const auto& row : matrix)
        if (row.size() != cols) throw std::invalid_argument("stability matrix rows differ in length");
    StabilityReport r;
    r.rows = matrix.size();
    r.cols = cols;
    r.sup_lower = -std::numeric_limits<double>::infinity();
    r.inf_upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = matrix[i][j];
            if (std::isnan(v)) throw std::invalid_argument("stability matrix contains NaN");
            if (i < j && v > r.sup_lower) {
                r.sup_lower = v;
                r.sup_at = {i, j};
            }
            if (j < i && v < r.inf_upper) {
                r.inf_upper = v;
                r.inf_at = {i, j};
            }
        }
    }
    r.gap = r.sup_lower - r.inf_upper;
    return r;
}

int logistic_gap_sign(const OrderMatrix& m) {
    // logistic is increasing on [1, inf], so compare the D values directly;
    // every D below 1 maps to 0 like D = 1.
    auto clamp = [](const DistanceEstimate& d) -> std::optional<Rational> {
        if (d.infinite()) return std::nullopt;
        return max(*d.value, Rational(1));
    };
    auto less = [](const std::optional<Rational>& a, const std::optional<Rational>& b) {
        if (!b) return a.has_value();
        return a && *a < *b;
    };
    std::optional<Rational> sup_upper = Rational(0);
    bool first_lower = true;
    std::optional<Rational> inf_lower;
    const std::size_t size = m.entries.size();
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            const auto v = clamp(m.entries[i][j].d);
            if (i < j && less(sup_upper, v)) sup_upper = v;
            if (j < i && (first_lower || less(v, inf_lower))) {
                inf_lower = v;
                first_lower = false;
            }
        }
    }
    if (less(sup_upper, inf_lower)) return -1;
    if (less(inf_lower, sup_upper)) return 1;
    return 0;
}

} // namespace tsirelson
