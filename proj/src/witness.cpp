#include <sstream>

#include "tsirelson/witness.hpp"

namespace tsirelson {

std::string to_string(Relation r) {
    switch (r) {
    case Relation::Equal: return "=";
    case Relation::AtMost: return "<=";
    case Relation::AtLeast: return ">=";
    }
    return "?";
}

std::string to_string(LineStatus s) { return s == LineStatus::Exact ? "exact" : "certified-lower-bound"; }

std::string CertificateLine::claim() const { return lhs + " " + to_string(relation) + " " + bound.str(); }

bool Witness::verified() const {
    for (const auto& line : certificate)
        if (!line.verified) return false;
    return !certificate.empty();
}

Schedule schedule(unsigned n, Index start) {
    if (n < 2) throw std::invalid_argument("n must be ≥ 2");
    Schedule s{n, start, {}};
    Index m = std::max<Index>({n, start, 2});
    for (unsigned i = 0; i < n; ++i) {
        s.m.push_back(m);
        if (i + 1 == n) break;
        const unsigned __int128 next = static_cast<unsigned __int128>(m) * (2 * static_cast<unsigned __int128>(m) - 1) + 1;
        if (next >> 62) throw std::overflow_error("schedule leaves the 62-bit index range at step " + std::to_string(i + 2));
        m = static_cast<Index>(next);
    }
    return s;
}

namespace {

std::string norm_text(const std::string& name, unsigned level) {
    return "||" + name + "||_" + std::to_string(level);
}

bool holds(const Rational& v, Relation r, const Rational& b) {
    switch (r) {
    case Relation::Equal: return v == b;
    case Relation::AtMost: return v <= b;
    case Relation::AtLeast: return v >= b;
    }
    return false;
}

// Supports up to this size are re-verified by the index-by-index scan.
constexpr std::uint64_t scan_limit = 1u << 24;

// Exact FigielJohnson level-1 value through the closed form, cross-checked
// by the scan when the support allows it.
Rational level1_checked(const FiniteVector& x, std::string& route) {
    const Rational v = paths::level1_closed_form(x);
    route = "closed-form";
    if (x.support_size() <= scan_limit) {
        const Rational w = paths::level1_scan(x);
        if (w != v)
            throw CertificateFailure("level-1 routes disagree on " + x.literal() + ": " + v.str() + " vs " + w.str());
        route += "+scan";
    }
    return v;
}

// Exact value of ||x||_k for the witness lines. The second route either
// rebuilds level 1 from the closed form on every support interval or, for
// tiny supports, runs the generic table.
Rational iterate_checked(const FiniteVector& x, unsigned k, EvalSession& s, const std::string& line,
                         std::string& route) {
    if (k == 1) return level1_checked(x, route);
    Rational v;
    try {
        v = iterate_norm(x, k, AdmissibilityRule::FigielJohnson, s);
    } catch (const BudgetError& e) {
        throw BudgetError("cannot verify '" + line + "' exactly: " + e.what(), e.lower_bound());
    }
    route = "dp";
    const std::uint64_t m = x.support_size();
    std::optional<Rational> w;
    try {
        if (m <= 64) {
            w = paths::iterate_generic(x, k, AdmissibilityRule::FigielJohnson, s);
            route += "+generic-dp";
        } else if (m <= 2000 && k == 2) {
            w = paths::iterate_via_block_level1(x, k, s);
            route += "+interval-closed-form";
        }
    } catch (const BudgetError&) {
        w.reset();
    }
    if (w && *w != v)
        throw CertificateFailure("routes disagree on '" + line + "': " + v.str() + " vs " + w->str());
    return v;
}

// Lower bound from a second route with a capped budget; used to confirm
// family-based lower-bound lines.
NormBound independent_bound(const FiniteVector& x, unsigned level, const EvalSession& s) {
    Budget b = s.budget();
    b.max_work = std::min<std::uint64_t>(b.max_work, 2'000'000'000ULL);
    EvalSession side(b, s.jobs());
    return norm_bound(NormSpec::iterate(level), x, side);
}

void finish_line(CertificateLine& line) {
    line.verified = holds(line.value, line.relation, line.bound);
}

} // namespace

Witness base_witness(unsigned n, Index start, EvalSession& session) {
    Witness w;
    w.level = 1;
    w.n = n;
    w.sched = schedule(n, start);
    for (Index m : w.sched.m) {
        w.parts.push_back(FiniteVector::flat(m, 2 * m - 1, Rational(1, static_cast<unsigned long>(m))));
        w.sum = w.sum + w.parts.back();
    }
    Rational family = 0;
    for (unsigned i = 0; i < n; ++i) {
        CertificateLine line;
        line.name = "part level-1 norm";
        line.lhs = norm_text("x_" + std::to_string(i + 1), 1);
        line.value = level1_checked(w.parts[i], line.route);
        line.relation = Relation::Equal;
        line.bound = Rational(1, 2);
        finish_line(line);
        family += line.value;
        w.certificate.push_back(std::move(line));
    }
    {
        CertificateLine line;
        line.name = "sum level-1 upper bound";
        line.lhs = norm_text("x", 1);
        line.value = level1_checked(w.sum, line.route);
        line.relation = Relation::AtMost;
        line.bound = 1;
        finish_line(line);
        w.certificate.push_back(std::move(line));
    }
    {
        // E_1 < ... < E_n with n <= m_1 = min E_1 is admissible.
        if (n > w.sched.m.front()) throw CertificateFailure("window family is not admissible");
        CertificateLine line;
        line.name = "sum level-2 lower bound";
        line.lhs = norm_text("x", 2);
        line.relation = Relation::AtLeast;
        line.bound = Rational(static_cast<long>(n), 4);
        line.status = LineStatus::CertifiedLowerBound;
        family /= Rational(2);
        const Rational other = independent_bound(w.sum, 2, session).value;
        line.value = max(family, other);
        line.route = "window-family+block-bound";
        finish_line(line);
        if (other < line.bound) line.verified = false;
        w.certificate.push_back(std::move(line));
    }
    return w;
}

Witness inductive_witness(unsigned k, unsigned n, EvalSession& session, Index start, unsigned sub_arity) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (n < 2) throw std::invalid_argument("n must be ≥ 2");
    if (sub_arity < 2) throw std::invalid_argument("sub-witness arity must be >= 2");
    Witness w;
    w.level = k + 1;
    w.n = n;
    w.sched.n = n;
    w.sched.start = start;
    Index m = std::max<Index>({n, start, 2});
    std::vector<Rational> part_norms;
    for (unsigned i = 0; i < n; ++i) {
        w.sched.m.push_back(m);
        const unsigned arity = static_cast<unsigned>(std::min<Index>(m, sub_arity));
        const Witness sub = witness_at_level(k, arity, m, session, sub_arity);
        if (!sub.verified()) throw CertificateFailure("level-" + std::to_string(k) + " sub-witness " + std::to_string(i + 1) + " failed");
        const FiniteVector& y = sub.sum;
        const std::string zi = "z_" + std::to_string(i + 1);
        std::string route;
        const Rational ny = iterate_checked(y, k + 1, session, norm_text(zi, k + 1) + " = 1/2", route);
        w.parts.push_back(y.scaled(Rational(1) / (Rational(2) * ny)));
        w.sum = w.sum + w.parts.back();
        if (i + 1 < n) {
            const unsigned __int128 next = static_cast<unsigned __int128>(y.max_index()) * n + 1;
            if (next >> 62) throw std::overflow_error("window schedule leaves the 62-bit index range");
            m = static_cast<Index>(next);
        }
    }
    for (unsigned i = 0; i < n; ++i) {
        CertificateLine line;
        line.name = "part norm";
        line.lhs = norm_text("z_" + std::to_string(i + 1), k + 1);
        line.value = iterate_checked(w.parts[i], k + 1, session, line.lhs + " = 1/2", line.route);
        line.relation = Relation::Equal;
        line.bound = Rational(1, 2);
        finish_line(line);
        part_norms.push_back(line.value);
        w.certificate.push_back(std::move(line));
    }
    {
        CertificateLine line;
        line.name = "sum upper bound";
        line.lhs = norm_text("z", k + 1);
        line.value = iterate_checked(w.sum, k + 1, session, line.lhs + " <= 1", line.route);
        line.relation = Relation::AtMost;
        line.bound = 1;
        finish_line(line);
        w.certificate.push_back(std::move(line));
    }
    {
        // The windows [m_i, p_i] form an admissible family since n <= m_1.
        if (n > w.sched.m.front()) throw CertificateFailure("window family is not admissible");
        CertificateLine line;
        line.name = "sum lower bound";
        line.lhs = norm_text("z", k + 2);
        line.relation = Relation::AtLeast;
        line.bound = Rational(static_cast<long>(n), 4);
        line.status = LineStatus::CertifiedLowerBound;
        Rational family = 0;
        for (const auto& v : part_norms) family += v;
        family /= Rational(2);
        const Rational other = independent_bound(w.sum, k + 2, session).value;
        line.value = max(family, other);
        line.route = "window-family+block-bound";
        finish_line(line);
        if (other < line.bound) line.verified = false;
        w.certificate.push_back(std::move(line));
    }
    return w;
}

Witness witness_at_level(unsigned level, unsigned n, Index start, EvalSession& session, unsigned sub_arity) {
    if (level == 0) throw std::invalid_argument("witness level must be >= 1");
    if (level == 1) return base_witness(n, start, session);
    return inductive_witness(level - 1, n, session, start, sub_arity);
}

CertifiedRatio ratio_certificate(unsigned k, unsigned n, EvalSession& session) {
    const Witness w = witness_at_level(k, n, 1, session);
    if (!w.verified()) throw CertificateFailure("witness certificate failed");
    CertifiedRatio r;
    const Rational mass = l1_norm(w.sum);
    r.x = normalize_l1(w.sum);
    r.numerator = NormSpec::iterate(k + 1);
    r.denominator = NormSpec::iterate(k);
    // the last line bounds the sum one level above the witness level
    r.numerator_value = w.certificate.back().value / mass;
    const NormBound direct = independent_bound(r.x, k + 1, session);
    r.numerator_exact = direct.exact;
    r.numerator_value = max(r.numerator_value, direct.value);
    r.denominator_value = iterate_norm(r.x, k, AdmissibilityRule::FigielJohnson, session);
    r.lower_bound = r.numerator_value / r.denominator_value;
    std::ostringstream os;
    os << "witness(level " << k << ", n " << n << ")";
    r.source = os.str();
    return r;
}

} // namespace tsirelson
