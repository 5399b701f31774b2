#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsirelson/witness.hpp"

namespace tsirelson {

enum class Sided { OneSided, TwoSided };
enum class EstimateKind { Exact, LowerBound };

std::string to_string(Sided s);
std::string to_string(EstimateKind k);

/// Estimate of D(M, N). An empty `value` stands for +infinity.
struct DistanceEstimate {
    std::optional<Rational> value;
    EstimateKind kind = EstimateKind::LowerBound;
    Sided sided = Sided::OneSided;
    std::optional<FiniteVector> witness;

    bool infinite() const { return !value.has_value(); }
    std::string str() const; ///< "p/q" or "inf"
};

/// One-sided: max over the pool of ||x||_M / ||x||_N on l1-normalized x.
/// Two-sided: max of max(r, 1/r), floored at 1; 1/r is used only when the
/// numerator is exact. Denominators must be exact; candidates whose
/// denominator is out of budget are skipped. Throws std::logic_error when a
/// norm vanishes on a nonzero candidate.
DistanceEstimate distance_lower(const NormSpec& m, const NormSpec& n, const std::vector<FiniteVector>& pool,
                                Sided sided, EvalSession& session);

enum class PhiVariant { Logistic, Similarity };
std::string to_string(PhiVariant v);
PhiVariant parse_variant(std::string_view text);

/// logistic pairs with the one-sided D, similarity with the two-sided D.
Sided sided_for(PhiVariant v);

/// log D/(1 + log D), or its complement; D = infinity maps to 1 / 0.
double phi_transform(PhiVariant v, const DistanceEstimate& d);

struct PhiEstimate {
    double value = 0;
    /// A lower bound on D gives a lower bound on the logistic value and an
    /// upper bound on the similarity value.
    bool is_upper_bound = false;
    DistanceEstimate distance;
    /// Set when the transform is exact (D = 1 or D = infinity).
    std::optional<Rational> exact;
};

PhiEstimate phi_of(const NormSpec& m, const NormSpec& n, PhiVariant variant, const std::vector<FiniteVector>& pool,
                   EvalSession& session);

struct OrderEntry {
    unsigned n = 0; ///< numerator level
    unsigned k = 0; ///< denominator level
    DistanceEstimate d;
    std::string verdict; ///< "<=1", "=1" or ">=p/q"
    std::string source;
};

struct OrderMatrix {
    unsigned levels = 0; ///< entries for 0..levels
    std::vector<std::vector<OrderEntry>> entries;
};

struct MatrixOptions {
    std::vector<FiniteVector> pool;   ///< extra candidates for every entry
    bool witnesses = true;            ///< add base witnesses and the (k+1,k) certificates
    SearchBudget search{};            ///< per sub-diagonal ratio search
    bool search_subdiagonal = true;
};

/// Entry (n, k) estimates the one-sided D(Iterate(n), Iterate(k)). Above the
/// diagonal the pointwise ladder gives D <= 1 and t_1 gives D >= 1; below
/// it lower bounds come from the pool, witnesses, search, and the ladder
/// (D(n,k) >= D(n',k') whenever k <= k' < n' <= n).
OrderMatrix order_property_matrix(unsigned levels, const MatrixOptions& options, EvalSession& session);

/// Applies the transform to every entry (rows = numerator level).
std::vector<std::vector<double>> phi_matrix(const OrderMatrix& m, PhiVariant variant);

struct StabilityReport {
    double sup_lower = 0; ///< sup over entries with i < j
    double inf_upper = 0; ///< inf over entries with j < i
    double gap = 0;       ///< sup_lower - inf_upper
    std::size_t rows = 0, cols = 0;
    std::pair<std::size_t, std::size_t> sup_at{0, 0};
    std::pair<std::size_t, std::size_t> inf_at{0, 0};
};

/// Throws std::invalid_argument unless the matrix is rectangular, at least 2x2.
StabilityReport stability_gap(const std::vector<std::vector<double>>& matrix);

/// Sign of stability_gap(phi_matrix(m, Logistic)) decided on the rational
/// D values alone: the logistic transform is 0 exactly at D = 1 and
/// positive exactly when D > 1.
int logistic_gap_sign(const OrderMatrix& m);

} // namespace tsirelson
