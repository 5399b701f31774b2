#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tsirelson/geometry.hpp"

namespace tsirelson {

/// phi-polynomial over named norm atoms.
class PhiExpr {
public:
    enum class Kind { Const1, Atom, Scal, And, Or, Oplus };

    static PhiExpr one();
    static PhiExpr atom(std::string id);
    /// Throws std::invalid_argument unless 0 <= r <= 1.
    static PhiExpr scal(Rational r, PhiExpr child);
    static PhiExpr conj(PhiExpr l, PhiExpr r);
    static PhiExpr disj(PhiExpr l, PhiExpr r);
    static PhiExpr oplus(PhiExpr l, PhiExpr r);

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    const Rational& coefficient() const { return coef_; }
    const PhiExpr& child() const { return *left_; } ///< Scal only
    const PhiExpr& left() const { return *left_; }
    const PhiExpr& right() const { return *right_; }

    friend bool operator==(const PhiExpr& a, const PhiExpr& b);

private:
    PhiExpr() = default;
    static PhiExpr binary(Kind k, PhiExpr l, PhiExpr r);
    Kind kind_ = Kind::Const1;
    std::string id_;
    Rational coef_;
    std::shared_ptr<const PhiExpr> left_, right_;
};

class PhiSyntaxError : public std::invalid_argument {
public:
    PhiSyntaxError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// expr := "1" | "phi(" id ")" | "(" expr op expr ")" | rational "*" expr,
/// op one of & (min), | (max), + (truncated sum). Whitespace is ignored.
PhiExpr parse_phi(std::string_view text);

/// Canonical parenthesized form; parse_phi(print(e)) == e.
std::string print(const PhiExpr& e);

/// Value in [0, 1]: exact while every atom is exact, a double otherwise.
struct PhiValue {
    bool exact = true;
    Rational q;
    double f = 0;

    static PhiValue of(const Rational& r) { return {true, r, r.to_double()}; }
    static PhiValue of(double d) { return {false, Rational(0), d}; }
    double as_double() const { return exact ? q.to_double() : f; }
};

/// Tolerance for comparisons involving floating-point phi values.
inline constexpr double phi_tolerance = 0x1p-40;

/// v <= r, exactly when v is exact and within phi_tolerance otherwise.
bool phi_at_most(const PhiValue& v, const Rational& r);

struct EvalContext {
    std::map<std::string, NormSpec> registry;
    PhiVariant variant = PhiVariant::Similarity;
    std::vector<FiniteVector> pool;

    const NormSpec& lookup(const std::string& id) const;
};

/// Const1 -> 1, Atom(M) -> phi_of(M, N), Scal -> r * child, And -> min,
/// Or -> max, Oplus -> min(sum, 1).
PhiValue eval(const PhiExpr& e, const NormSpec& n, const EvalContext& ctx, EvalSession& session);

/// Maximum possible value by structural induction.
Rational mpv(const PhiExpr& e);

struct Realization {
    NormSpec norm;
    PhiValue achieved;
};

/// Atom(M) -> M, ⊕/∧/∨ -> Join of the realizers of the children with
/// positive mpv, Scal -> the child's realizer, Const1 -> no constraint. When
/// nothing constrains the norm, the first atom of `e` is used, or else the
/// first registered norm. Throws
/// std::invalid_argument when mpv(e) = 0 or epsilon <= 0.
Realization approx_realizer(const PhiExpr& e, const Rational& epsilon, const EvalContext& ctx, EvalSession& session);

} // namespace tsirelson
