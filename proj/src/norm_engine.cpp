#include <algorithm>
#include <sstream>

#include "level_dp.hpp"
#include "tsirelson/norm.hpp"

namespace tsirelson {

std::optional<Rational> EvalSession::lookup(const std::string& key) {
    auto it = memo_.find(key);
    if (it == memo_.end()) return std::nullopt;
    ++stats_.cache_hits;
    return it->second;
}

void EvalSession::store(const std::string& key, const Rational& value) { memo_.insert_or_assign(key, value); }

void EvalSession::reset() {
    memo_.clear();
    stats_ = {};
}

namespace engine {

SparseInput make_sparse(const FiniteVector& x) {
    SparseInput in;
    for (const auto& b : x.blocks()) mpz_lcm(in.scale.get_mpz_t(), in.scale.get_mpz_t(), b.value.den().get_mpz_t());
    for (const auto& [i, v] : x.entries()) {
        in.pos.push_back(i);
        mpz_class w = abs(v.num()) * (in.scale / v.den());
        in.total += w;
        in.w.push_back(std::move(w));
    }
    return in;
}

bool fits_int64(const SparseInput& in, unsigned shift) {
    if (shift >= 62) return false;
    const mpz_class limit = mpz_class(1) << (62 - shift);
    return in.total < limit;
}

namespace {

// Widest cap that forces a real partition table somewhere.
double table_width(const SparseInput& in) {
    const std::size_t m = in.pos.size();
    std::uint64_t width = 1;
    for (std::size_t t = 0; t < m; ++t)
        if (in.pos[t] < m - t) width = std::max<std::uint64_t>(width, in.pos[t]);
    return static_cast<double>(width);
}

} // namespace

double estimate_work(const SparseInput& in, unsigned levels, AdmissibilityRule rule) {
    if (levels == 0) return 0;
    const double m = static_cast<double>(in.pos.size());
    const double w = rule == AdmissibilityRule::FigielJohnson ? table_width(in)
                                                                : std::min<double>(levels, m);
    const double full = m * m * m / 6.0 * w;
    const double top = m * m / 2.0 * w;
    return (levels - 1) * full + top;
}

double estimate_fixed_point_work(const SparseInput& in) {
    const double m = static_cast<double>(in.pos.size());
    return m * m * m / 6.0 * table_width(in);
}

} // namespace engine

namespace {

using engine::LevelEngine;
using engine::SparseInput;

std::string memo_key(const char* tag, const FiniteVector& x, unsigned k, AdmissibilityRule rule) {
    std::ostringstream os;
    os << tag << '/' << k << '/' << to_string(rule) << '/' << x.literal();
    return os.str();
}

unsigned effective_level(const FiniteVector& x, unsigned k, AdmissibilityRule rule) {
    const std::uint64_t m = x.support_size();
    if (rule == AdmissibilityRule::FigielJohnson)
        return static_cast<unsigned>(std::min<std::uint64_t>(k, m - 1));
    const std::uint64_t last_useful = std::min<std::uint64_t>(m, x.max_index()) + 1;
    return static_cast<unsigned>(std::min<std::uint64_t>(k, last_useful));
}

Rational unscale(const mpz_class& v, unsigned shift, const mpz_class& scale) {
    return Rational(v, mpz_class(scale << shift));
}

template <class Run>
Rational with_int(const SparseInput& in, unsigned shift, Run&& run) {
    if (engine::fits_int64(in, shift)) return unscale(engine::IntOps<std::int64_t>::to_mpz(run(std::int64_t{})), shift, in.scale);
    return unscale(run(mpz_class{}), shift, in.scale);
}

bool within_positions(const FiniteVector& x, const EvalSession& s) {
    return x.support_size() <= s.budget().max_positions;
}

// Exact ||x||_k, or nullopt when the budget forbids the dynamic program.
std::optional<Rational> exact_iterate(const FiniteVector& x, unsigned k, AdmissibilityRule rule,
                                      EvalSession& s, bool topsum) {
    if (x.is_zero()) return Rational(0);
    if (k == 0) return sup_norm(x);
    const unsigned ke = effective_level(x, k, rule);
    if (ke == 0) return sup_norm(x);
    if (ke == 1) {
        if (rule == AdmissibilityRule::PaperLiteral) return sup_norm(x);
        if (topsum) return paths::level1_closed_form(x);
    }
    const std::string key = memo_key(topsum ? "it" : "gen", x, ke, rule);
    if (auto hit = s.lookup(key)) return hit;
    if (!within_positions(x, s)) return std::nullopt;
    const SparseInput in = engine::make_sparse(x);
    if (engine::estimate_work(in, ke, rule) > static_cast<double>(s.budget().max_work)) return std::nullopt;
    ++s.stats().evaluations;
    Rational r = with_int(in, ke, [&](auto tag) {
        using Int = decltype(tag);
        return LevelEngine<Int>(in, rule, s).run(ke, topsum);
    });
    s.store(key, r);
    return r;
}

std::optional<Rational> exact_limit(const FiniteVector& x, AdmissibilityRule rule, EvalSession& s) {
    if (x.is_zero()) return Rational(0);
    if (rule == AdmissibilityRule::PaperLiteral) {
        const std::uint64_t m = x.support_size();
        const unsigned last = static_cast<unsigned>(std::min<std::uint64_t>(m, x.max_index()) + 1);
        return exact_iterate(x, last, rule, s, true);
    }
    const std::uint64_t m = x.support_size();
    if (m == 1) return sup_norm(x);
    const std::string key = memo_key("fix", x, 0, rule);
    if (auto hit = s.lookup(key)) return hit;
    if (!within_positions(x, s)) return std::nullopt;
    const SparseInput in = engine::make_sparse(x);
    if (engine::estimate_fixed_point_work(in) > static_cast<double>(s.budget().max_work)) return std::nullopt;
    ++s.stats().evaluations;
    const unsigned shift = static_cast<unsigned>(m - 1);
    Rational r = with_int(in, shift, [&](auto tag) {
        using Int = decltype(tag);
        return LevelEngine<Int>(in, rule, s).fixed_point();
    });
    s.store(key, r);
    return r;
}

std::string budget_message(const char* what, const FiniteVector& x, const EvalSession& s) {
    std::ostringstream os;
    os << what << " exceeds the evaluation budget (support " << x.support_size() << ", "
       << x.blocks().size() << " runs, max_positions " << s.budget().max_positions << ", max_work "
       << s.budget().max_work << ")";
    return os.str();
}

// Lower bound where the families are built from whole runs of x: every
// group of consecutive runs is one set, valued by a lower bound of its own.
Rational block_family_bound(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& s);

Rational lower_bound_rec(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& s) {
    if (x.is_zero()) return Rational(0);
    if (k == 0) return sup_norm(x);
    const unsigned ke = effective_level(x, k, rule);
    if (ke == 0) return sup_norm(x);
    if (ke == 1 && rule == AdmissibilityRule::FigielJohnson) return paths::level1_closed_form(x);
    if (ke == 1) return sup_norm(x);
    if (auto exact = exact_iterate(x, ke, rule, s, true)) return *exact;
    const std::string key = memo_key("lb", x, ke, rule);
    if (auto hit = s.lookup(key)) return *hit;
    Rational best = lower_bound_rec(x, ke - 1, rule, s);
    best = max(best, block_family_bound(x, ke, rule, s));
    s.store(key, best);
    return best;
}

Rational block_family_bound(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& s) {
    const auto& blocks = x.blocks();
    const std::size_t b = blocks.size();
    if (b < 2 || b > 96) return Rational(0);
    const unsigned step = k - 1;
    std::vector<Rational> group((b + 1) * b);
    auto piece = [&](std::size_t t, std::size_t u) -> Rational& { return group[t * b + u]; };
    for (std::size_t t = 0; t < b; ++t) {
        for (std::size_t u = t; u < b; ++u) {
            if (t == 0 && u == b - 1) continue;
            const auto part = FiniteVector::from_blocks({blocks.begin() + t, blocks.begin() + u + 1});
            piece(t, u) = lower_bound_rec(part, step, rule, s);
        }
    }
    Rational best = 0;
    const Rational none(-1);
    for (std::size_t t = 0; t < b; ++t) {
        const std::uint64_t cap = engine::window_cap(rule, blocks[t].first, step);
        if (cap < 1) continue;
        const std::size_t width = static_cast<std::size_t>(std::min<std::uint64_t>(cap, b - t));
        // f[u][c]: best split of runs u..b-1 into at most c groups.
        std::vector<std::vector<Rational>> f(b + 1, std::vector<Rational>(width + 1, none));
        for (std::size_t c = 0; c <= width; ++c) f[b][c] = 0;
        for (std::size_t u = b; u-- > t;) {
            for (std::size_t c = 1; c <= width; ++c) {
                Rational cur = none;
                for (std::size_t v = u; v < b; ++v) {
                    if (u == 0 && v == b - 1) continue;
                    if (f[v + 1][c - 1] == none) continue;
                    cur = max(cur, piece(u, v) + f[v + 1][c - 1]);
                }
                f[u][c] = cur;
            }
        }
        if (f[t][width] != none) best = max(best, f[t][width] / Rational(2));
        ++s.stats().families;
    }
    return best;
}

} // namespace

Rational iterate_norm(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& session) {
    if (auto exact = exact_iterate(x, k, rule, session, true)) return *exact;
    throw BudgetError(budget_message("iterate norm", x, session), lower_bound_rec(x, k, rule, session));
}

Rational iterate_norm(const FiniteVector& x, unsigned k, AdmissibilityRule rule) {
    EvalSession s;
    return iterate_norm(x, k, rule, s);
}

Rational iterate_lower_bound(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& session) {
    return lower_bound_rec(x, k, rule, session);
}

namespace {

Rational limit_lower_bound(const FiniteVector& x, AdmissibilityRule rule, EvalSession& s) {
    if (x.is_zero()) return Rational(0);
    const unsigned depth = static_cast<unsigned>(std::min<std::uint64_t>(x.support_size(), x.blocks().size() + 2));
    return lower_bound_rec(x, depth, rule, s);
}

} // namespace

Rational tsirelson_norm(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session) {
    if (auto exact = exact_limit(x, rule, session)) return *exact;
    throw BudgetError(budget_message("limit norm", x, session), limit_lower_bound(x, rule, session));
}

Rational tsirelson_norm(const FiniteVector& x, AdmissibilityRule rule) {
    EvalSession s;
    return tsirelson_norm(x, rule, s);
}

Rational norm_eval(const NormSpec& spec, const FiniteVector& x, EvalSession& session) {
    switch (spec.kind()) {
    case NormSpec::Kind::Ell1: return l1_norm(x);
    case NormSpec::Kind::Sup: return sup_norm(x);
    case NormSpec::Kind::Iterate: return iterate_norm(x, spec.level(), spec.rule(), session);
    case NormSpec::Kind::TsirelsonLimit: return tsirelson_norm(x, spec.rule(), session);
    case NormSpec::Kind::Join:
        return max(norm_eval(spec.left(), x, session), norm_eval(spec.right(), x, session));
    }
    throw std::logic_error("unknown norm kind");
}

Rational norm_eval(const NormSpec& spec, const FiniteVector& x) {
    EvalSession s;
    return norm_eval(spec, x, s);
}

NormBound norm_bound(const NormSpec& spec, const FiniteVector& x, EvalSession& session) {
    switch (spec.kind()) {
    case NormSpec::Kind::Ell1: return {l1_norm(x), true};
    case NormSpec::Kind::Sup: return {sup_norm(x), true};
    case NormSpec::Kind::Iterate:
        if (auto e = exact_iterate(x, spec.level(), spec.rule(), session, true)) return {*e, true};
        return {lower_bound_rec(x, spec.level(), spec.rule(), session), false};
    case NormSpec::Kind::TsirelsonLimit:
        if (auto e = exact_limit(x, spec.rule(), session)) return {*e, true};
        return {limit_lower_bound(x, spec.rule(), session), false};
    case NormSpec::Kind::Join: {
        const NormBound a = norm_bound(spec.left(), x, session);
        const NormBound b = norm_bound(spec.right(), x, session);
        return {max(a.value, b.value), a.exact && b.exact};
    }
    }
    throw std::logic_error("unknown norm kind");
}

unsigned stabilization_level(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session) {
    const Rational limit = tsirelson_norm(x, rule, session);
    for (unsigned k = 0;; ++k)
        if (iterate_norm(x, k, rule, session) == limit) return k;
}

namespace paths {

Rational iterate_generic(const FiniteVector& x, unsigned k, AdmissibilityRule rule, EvalSession& session) {
    if (auto exact = exact_iterate(x, k, rule, session, false)) return *exact;
    throw BudgetError(budget_message("iterate norm", x, session), lower_bound_rec(x, k, rule, session));
}

Rational iterate_via_block_level1(const FiniteVector& x, unsigned k, EvalSession& session) {
    const auto rule = AdmissibilityRule::FigielJohnson;
    if (x.is_zero()) return Rational(0);
    const unsigned ke = effective_level(x, k, rule);
    if (ke <= 1) return ke == 0 ? sup_norm(x) : level1_closed_form(x);
    if (!within_positions(x, session)) throw BudgetError(budget_message("iterate norm", x, session), lower_bound_rec(x, k, rule, session));
    const SparseInput in = engine::make_sparse(x);
    const std::size_t m = in.pos.size();
    return with_int(in, ke, [&](auto tag) {
        using Int = decltype(tag);
        engine::IntervalTable<Int> level1(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                const Rational v = level1_closed_form(x.restrict_to_interval(in.pos[i], in.pos[j]));
                const mpz_class scaled = v.num() * (mpz_class(2 * in.scale) / v.den());
                level1(i, j) = engine::IntOps<Int>::from(scaled);
            }
        }
        return LevelEngine<Int>(in, rule, session).run(ke, false, &level1);
    });
}

Rational limit_by_levels(const FiniteVector& x, AdmissibilityRule rule, EvalSession& session) {
    if (x.is_zero()) return Rational(0);
    if (!within_positions(x, session)) throw BudgetError(budget_message("limit norm", x, session), limit_lower_bound(x, rule, session));
    const SparseInput in = engine::make_sparse(x);
    const std::size_t m = in.pos.size();
    LevelEngine<mpz_class> eng(in, rule, session);
    auto cur = eng.level0();
    // PaperLiteral steps are level dependent, so an unchanged table says
    // nothing about later steps; run to the last level with any family.
    const unsigned paper_last = static_cast<unsigned>(std::min<std::uint64_t>(m, x.max_index()) + 1);
    for (unsigned level = 0;; ++level) {
        if (rule == AdmissibilityRule::PaperLiteral) {
            if (level == paper_last) return unscale(cur(0, m - 1), level, in.scale);
            cur = eng.step(cur, level, false);
            continue;
        }
        auto next = eng.step(cur, level, false);
        bool stable = true;
        for (std::size_t i = 0; i < m && stable; ++i)
            for (std::size_t j = i; j < m; ++j)
                if (next(i, j) != 2 * cur(i, j)) {
                    stable = false;
                    break;
                }
        if (stable) return unscale(cur(0, m - 1), level, in.scale);
        cur = std::move(next);
    }
}

} // namespace paths

} // namespace tsirelson
