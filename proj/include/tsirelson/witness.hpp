#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsirelson/norm.hpp"

namespace tsirelson {

/// Window starts m_1 < m_2 < ... with (2m_i - 1)/m_{i+1} < 1/m_i.
struct Schedule {
    unsigned n = 0;
    Index start = 1;
    std::vector<Index> m;
};

/// Minimal schedule: m_1 = max(n, start, 2), m_{i+1} = m_i(2m_i - 1) + 1.
/// Throws std::invalid_argument when n < 2.
Schedule schedule(unsigned n, Index start = 1);

enum class Relation { Equal, AtMost, AtLeast };
enum class LineStatus { Exact, CertifiedLowerBound };

std::string to_string(Relation r);
std::string to_string(LineStatus s);

/// One inequality "lhs REL bound". `value` is the exact left-hand side, or
/// for CertifiedLowerBound a proven lower bound on it.
struct CertificateLine {
    std::string name;
    std::string lhs;  ///< e.g. "||x_1||_1"
    Rational value;
    Relation relation = Relation::Equal;
    Rational bound;
    LineStatus status = LineStatus::Exact;
    bool verified = false;
    /// Evaluation routes that agreed on the line, e.g. "closed-form+scan".
    std::string route;

    /// "||x||_2 >= 1/2"
    std::string claim() const;
};

struct Witness {
    unsigned level = 1; ///< lines are about ||.||_level and ||.||_{level+1}
    unsigned n = 0;
    Schedule sched;
    std::vector<FiniteVector> parts;
    FiniteVector sum;
    std::vector<CertificateLine> certificate;

    bool verified() const;
};

/// Raised when a certificate line cannot be verified. Budget exhaustion on
/// an exact line surfaces as BudgetError naming that line instead.
class CertificateFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parts x_i = (1/m_i) 1_[m_i, 2m_i - 1]; lines ||x_i||_1 = 1/2,
/// ||x||_1 <= 1 and ||x||_2 >= n/4 from the family of the windows.
Witness base_witness(unsigned n, Index start, EvalSession& session);

/// Level k+1 witness from level-k witnesses y_i placed in windows
/// [m_i, p_i] with p_i n < m_{i+1}; z_i = y_i / (2 ||y_i||_{k+1}).
/// Sub-witness i uses arity min(m_i, sub_arity) (the construction itself
/// asks for m_i, which is out of reach for any m_i beyond the first few).
Witness inductive_witness(unsigned k, unsigned n, EvalSession& session, Index start = 1,
                          unsigned sub_arity = 2);

/// Level-`level` witness: base_witness for 1, inductive_witness(level-1) above.
Witness witness_at_level(unsigned level, unsigned n, Index start, EvalSession& session,
                         unsigned sub_arity = 2);

/// Lower bound on ||x||_num / ||x||_den for one vector.
struct CertifiedRatio {
    FiniteVector x;
    NormSpec numerator = NormSpec::sup();
    NormSpec denominator = NormSpec::sup();
    Rational numerator_value;   ///< exact or certified lower bound
    bool numerator_exact = true;
    Rational denominator_value; ///< always exact
    Rational lower_bound;
    std::string source;         ///< candidate family that produced x
};

/// ||x||_{k+1}/||x||_k >= n/4 for the l1-normalized level-k witness.
CertifiedRatio ratio_certificate(unsigned k, unsigned n, EvalSession& session);

struct SearchBudget {
    std::size_t candidates = 400;   ///< evaluations, counted along a fixed sequence
    std::uint64_t max_support = 200;
    std::uint64_t seed = 1;
};

/// Best certified ratio over a deterministic candidate sequence: canonical
/// witnesses, flat runs, seeded power-law vectors, then hill climbing from
/// the best so far. A larger `candidates` budget evaluates a superset, so the
/// result never decreases.
CertifiedRatio ratio_search(const NormSpec& num, const NormSpec& den, const SearchBudget& budget,
                            EvalSession& session);

struct ProbeTarget {
    Rational target;
    bool achieved = false;
    unsigned from_level = 0; ///< ratio ||.||_{to}/||.||_{from}
    unsigned to_level = 0;
    std::optional<CertifiedRatio> certificate;
};

/// Tries to certify ratios >= each target between consecutive levels drawn
/// from `levels`, using ratio certificates first and search second. Never
/// claims that the sequence stabilizes.
std::vector<ProbeTarget> dichotomy_probe(const std::vector<unsigned>& levels, const std::vector<Rational>& targets,
                                         const SearchBudget& budget, EvalSession& session);

} // namespace tsirelson
