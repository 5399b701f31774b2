#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tsirelson/rational.hpp"
#include "tsirelson/vector.hpp"

namespace tsirelson {

/// Which families E_1 < ... < E_n may be summed at an iterate step.
///
/// FigielJohnson: any n >= 1 with n <= min E_1.
/// PaperLiteral:  the step from level k to k+1 uses exactly k sets with
///                k <= min E_1 (so level 1 coincides with the sup norm).
enum class AdmissibilityRule { FigielJohnson, PaperLiteral };

std::string to_string(AdmissibilityRule rule);
AdmissibilityRule parse_rule(std::string_view text);

/// Algebraic description of a norm on c00.
class NormSpec {
public:
    enum class Kind { Ell1, Sup, Iterate, TsirelsonLimit, Join };

    static NormSpec ell1();
    static NormSpec sup();
    static NormSpec iterate(unsigned level, AdmissibilityRule rule = AdmissibilityRule::FigielJohnson);
    static NormSpec tsirelson(AdmissibilityRule rule = AdmissibilityRule::FigielJohnson);
    static NormSpec join(NormSpec left, NormSpec right);

    /// Grammar: l1 | sup | iterate:K | tsirelson | join(SPEC,SPEC), where
    /// iterate and tsirelson accept an optional "@fj" / "@paper" suffix that
    /// overrides `default_rule`.
    static NormSpec parse(std::string_view text,
                          AdmissibilityRule default_rule = AdmissibilityRule::FigielJohnson);

    Kind kind() const { return kind_; }
    unsigned level() const { return level_; }
    AdmissibilityRule rule() const { return rule_; }
    const NormSpec& left() const;
    const NormSpec& right() const;

    /// Inverse of parse; the rule suffix is printed only for PaperLiteral.
    std::string str() const;

    friend bool operator==(const NormSpec& a, const NormSpec& b);

private:
    NormSpec() = default;
    Kind kind_ = Kind::Ell1;
    unsigned level_ = 0;
    AdmissibilityRule rule_ = AdmissibilityRule::FigielJohnson;
    std::shared_ptr<const NormSpec> left_;
    std::shared_ptr<const NormSpec> right_;
};

/// Resource limits for exact evaluation.
struct Budget {
    /// Upper bound on dynamic-programming cell updates per evaluation.
    std::uint64_t max_work = 40'000'000'000ULL;
    /// Largest support expanded into the index-by-index dynamic program.
    std::uint64_t max_positions = 5'000;
};

struct EvalStats {
    std::uint64_t evaluations = 0;
    std::uint64_t dp_cells = 0;      ///< partition-table cells filled
    std::uint64_t families = 0;      ///< window/family candidates scanned
    std::uint64_t cache_hits = 0;
};

/// Thrown when exact evaluation would exceed the budget. Carries the best
/// certified lower bound found before giving up; it is a bound, never the
/// exact value.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, Rational lower_bound)
        : std::runtime_error(what), lower_bound_(std::move(lower_bound)) {}
    const Rational& lower_bound() const { return lower_bound_; }

private:
    Rational lower_bound_;
};

/// Evaluation context confined to one thread: budget, statistics and a memo
/// of exact results keyed by (vector, norm). Reset between unrelated calls.
class EvalSession {
public:
    explicit EvalSession(Budget budget = {}, unsigned jobs = 1) : budget_(budget), jobs_(jobs ? jobs : 1) {}

    const Budget& budget() const { return budget_; }
    void set_budget(Budget b) { budget_ = b; }
    unsigned jobs() const { return jobs_; }
    EvalStats& stats() { return stats_; }
    const EvalStats& stats() const { return stats_; }

    std::optional<Rational> lookup(const std::string& key);
    void store(const std::string& key, const Rational& value);
    void reset();

private:
    Budget budget_;
    unsigned jobs_;
    EvalStats stats_;
    std::map<std::string, Rational> memo_;
};

/// Exact ||x||_k. Level 0 is the sup norm; FigielJohnson level 1 uses a
/// block closed form valid for any support size; higher levels run the
/// interval dynamic program. Throws BudgetError when out of budget.
Rational iterate_norm(const FiniteVector& x, unsigned k,
                      AdmissibilityRule rule, EvalSession& session);
Rational iterate_norm(const FiniteVector& x, unsigned k,
                      AdmissibilityRule rule = AdmissibilityRule::FigielJohnson);

/// Exact ||x||_T = lim_k ||x||_k. For FigielJohnson this solves the fixed
/// point recursion directly on support intervals.
Rational tsirelson_norm(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session);
Rational tsirelson_norm(const FiniteVector& x,
                        AdmissibilityRule rule = AdmissibilityRule::FigielJohnson);

Rational norm_eval(const NormSpec& spec, const FiniteVector& x, EvalSession& session);
Rational norm_eval(const NormSpec& spec, const FiniteVector& x);

/// Value that is either exact or a certified lower bound.
struct NormBound {
    Rational value;
    bool exact = true;
};

/// Exact value when the budget allows it, otherwise a certified lower bound
/// (ladder plus block-level families). Never throws BudgetError.
NormBound norm_bound(const NormSpec& spec, const FiniteVector& x, EvalSession& session);

/// Certified lower bound on ||x||_k that stays cheap on huge block vectors.
Rational iterate_lower_bound(const FiniteVector& x, unsigned k,
                             AdmissibilityRule rule, EvalSession& session);

/// Smallest K with ||x||_K == ||x||_T, observed by climbing the ladder.
unsigned stabilization_level(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session);

/// Alternative evaluation routes, exposed so callers can cross-check results
/// computed along different code paths.
namespace paths {

/// FigielJohnson ||x||_1 from the block closed form (breakpoint analysis).
Rational level1_closed_form(const FiniteVector& x);
/// FigielJohnson ||x||_1 by scanning every window start inside the support.
Rational level1_scan(const FiniteVector& x);
/// Interval dynamic program without the level-1 top-sum shortcut.
Rational iterate_generic(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& session);
/// Interval dynamic program whose level-1 table comes from the block closed
/// form applied to every support interval (block vectors with few runs).
Rational iterate_via_block_level1(const FiniteVector& x, unsigned k, EvalSession& session);
/// Limit obtained by iterating levels until every interval value is stable.
Rational limit_by_levels(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session);

} // namespace paths

} // namespace tsirelson
