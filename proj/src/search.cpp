#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "tsirelson/witness.hpp"

namespace tsirelson {
namespace {

struct Candidate {
    FiniteVector x;
    std::string source;
};

// Ratio for one vector, or nothing when the denominator is not exact.
std::optional<CertifiedRatio> evaluate(const NormSpec& num, const NormSpec& den, const Candidate& c,
                                       EvalSession& s) {
    if (c.x.is_zero()) return std::nullopt;
    const NormBound d = norm_bound(den, c.x, s);
    if (!d.exact) return std::nullopt;
    if (d.value.is_zero()) throw std::logic_error("norm vanished on a nonzero vector: " + den.str());
    const NormBound n = norm_bound(num, c.x, s);
    CertifiedRatio r;
    r.x = c.x;
    r.numerator = num;
    r.denominator = den;
    r.numerator_value = n.value;
    r.numerator_exact = n.exact;
    r.denominator_value = d.value;
    r.lower_bound = n.value / d.value;
    r.source = c.source;
    return r;
}

// Feeds the fixed candidate sequence to `take` until it returns false.
class CandidateStream {
public:
    CandidateStream(const NormSpec& num, const NormSpec& den, const SearchBudget& b)
        : num_(num), den_(den), budget_(b), rng_(b.seed) {}

    /// Structured candidates: basis vector, witnesses, flat runs.
    std::vector<Candidate> structured() const {
        std::vector<Candidate> out;
        out.push_back({FiniteVector::basis(1), "basis"});
        const bool consecutive = num_.kind() == NormSpec::Kind::Iterate && den_.kind() == NormSpec::Kind::Iterate &&
                                 num_.level() == den_.level() + 1 && num_.rule() == den_.rule();
        if (consecutive && den_.level() == 1) {
            for (unsigned n = 2; n <= 4; ++n) {
                const Schedule s = schedule(n, 1);
                FiniteVector x;
                for (Index m : s.m) x = x + FiniteVector::flat(m, 2 * m - 1, Rational(1, static_cast<unsigned long>(m)));
                out.push_back({normalize_l1(x), "base witness n=" + std::to_string(n)});
            }
        }
        const Index top = std::min<Index>(budget_.max_support, 24);
        for (Index m = 2; m <= top; ++m)
            out.push_back({FiniteVector::flat(1, m, Rational(1, static_cast<unsigned long>(m))), "flat 1.." + std::to_string(m)});
        for (Index m = 2; 2 * m - 1 <= budget_.max_support && m <= 12; ++m)
            out.push_back({FiniteVector::flat(m, 2 * m - 1, Rational(1, static_cast<unsigned long>(m))),
                           "flat " + std::to_string(m) + ".." + std::to_string(2 * m - 1)});
        return out;
    }

    /// Seeded vector with weights ~ i^-decay on a random subset of [2, L].
    Candidate power_law() {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const Index cap = std::max<Index>(budget_.max_support, 2);
        const Index len = std::max<Index>(2, static_cast<Index>(std::ceil(cap * (0.4 + 0.6 * unit(rng_)))));
        const double decay = 0.8 + 1.1 * unit(rng_);
        const double density = 0.4 + 0.6 * unit(rng_);
        std::vector<std::pair<Index, Rational>> e;
        for (Index i = 2; i <= len + 1 && e.size() < cap; ++i) {
            if (unit(rng_) > density) continue;
            const double w = 1000.0 * std::pow(static_cast<double>(i), -decay) * (0.5 + unit(rng_));
            e.emplace_back(i, Rational(std::max(1L, std::lround(w))));
        }
        if (e.empty()) e.emplace_back(2, Rational(1));
        std::ostringstream os;
        os << "power-law decay " << std::lround(decay * 100) / 100.0 << " density " << std::lround(density * 100) / 100.0;
        return {FiniteVector::from_entries(std::move(e)), os.str()};
    }

    /// Small random edit of `base` inside [1, max_support + 1].
    Candidate mutate(const FiniteVector& base) {
        auto e = base.entries();
        std::map<Index, Rational> m(e.begin(), e.end());
        std::uniform_int_distribution<Index> pos(1, std::max<Index>(budget_.max_support, 2));
        std::uniform_int_distribution<int> edits(1, 3);
        std::uniform_int_distribution<int> factor(0, 5);
        const int count = edits(rng_);
        for (int q = 0; q < count; ++q) {
            const Index i = pos(rng_);
            auto it = m.find(i);
            const Rational cur = it == m.end() ? Rational(0) : it->second;
            static const Rational scale[] = {Rational(0), Rational(1, 2), Rational(3, 4), Rational(5, 4), Rational(3, 2), Rational(2)};
            Rational next = cur * scale[factor(rng_)];
            if (cur.is_zero()) next = m.empty() ? Rational(1) : m.rbegin()->second;
            if (next.is_zero())
                m.erase(i);
            else
                m[i] = next;
        }
        if (m.size() > budget_.max_support) m.erase(std::prev(m.end()));
        std::vector<std::pair<Index, Rational>> out(m.begin(), m.end());
        return {FiniteVector::from_entries(std::move(out)), "hill-climb"};
    }

private:
    const NormSpec& num_;
    const NormSpec& den_;
    SearchBudget budget_;
    std::mt19937_64 rng_;
};

constexpr std::size_t power_law_count = 160;

} // namespace

CertifiedRatio ratio_search(const NormSpec& num, const NormSpec& den, const SearchBudget& budget,
                            EvalSession& session) {
    CandidateStream stream(num, den, budget);
    std::optional<CertifiedRatio> best;
    std::size_t used = 0;
    auto consider = [&](const Candidate& c) {
        if (used >= budget.candidates) return false;
        ++used;
        if (c.x.support_size() > budget.max_support) return true;
        if (auto r = evaluate(num, den, c, session); r && (!best || r->lower_bound > best->lower_bound))
            best = std::move(r);
        return true;
    };
    for (const auto& c : stream.structured())
        if (!consider(c)) break;
    for (std::size_t i = 0; i < power_law_count && used < budget.candidates; ++i) consider(stream.power_law());
    // Climb from the best vector so far; ties move the walk along plateaus.
    FiniteVector current = best ? best->x : FiniteVector::basis(1);
    Rational current_ratio = best ? best->lower_bound : Rational(0);
    while (used < budget.candidates) {
        const Candidate c = stream.mutate(current);
        ++used;
        if (c.x.is_zero() || c.x.support_size() > budget.max_support) continue;
        auto r = evaluate(num, den, c, session);
        if (!r || r->lower_bound < current_ratio) continue;
        current = r->x;
        current_ratio = r->lower_bound;
        if (!best || r->lower_bound > best->lower_bound) best = std::move(r);
    }
    if (!best) {
        CertifiedRatio r;
        r.x = FiniteVector::basis(1);
        r.numerator = num;
        r.denominator = den;
        r.numerator_value = 1;
        r.denominator_value = 1;
        r.lower_bound = 1;
        r.source = "no exact denominator within budget";
        return r;
    }
    const Rational mass = l1_norm(best->x);
    best->x = normalize_l1(best->x);
    best->numerator_value /= mass;
    best->denominator_value /= mass;
    return *best;
}

std::vector<ProbeTarget> dichotomy_probe(const std::vector<unsigned>& levels, const std::vector<Rational>& targets,
                                         const SearchBudget& budget, EvalSession& session) {
    for (std::size_t i = 1; i < targets.size(); ++i)
        if (!(targets[i - 1] < targets[i])) throw std::invalid_argument("targets must be increasing");
    std::vector<unsigned> ks(levels);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.size() < 2) throw std::invalid_argument("need at least two levels");
    std::vector<ProbeTarget> out;
    std::size_t from = 0;
    for (const Rational& t : targets) {
        ProbeTarget p;
        p.target = t;
        if (from + 1 < ks.size()) {
            const unsigned k = ks[from];
            const unsigned to = ks[from + 1];
            p.from_level = k;
            p.to_level = to;
            // ||.||_to >= ||.||_{k+1}, so a witness for k -> k+1 serves.
            std::optional<CertifiedRatio> cert;
            if (k >= 1) {
                const Rational need = t * Rational(4);
                mpz_class n = need.num() / need.den();
                if (n * need.den() < need.num()) ++n;
                if (n < 2) n = 2;
                if (n <= 64) {
                    try {
                        cert = ratio_certificate(k, static_cast<unsigned>(n.get_ui()), session);
                        cert->numerator = NormSpec::iterate(to);
                    } catch (const std::exception&) {
                        cert.reset();
                    }
                }
            }
            if (!cert || cert->lower_bound < t) {
                CertifiedRatio r = ratio_search(NormSpec::iterate(to), NormSpec::iterate(k), budget, session);
                if (!cert || r.lower_bound > cert->lower_bound) cert = std::move(r);
            }
            p.achieved = cert->lower_bound >= t;
            p.certificate = std::move(cert);
            if (p.achieved) ++from;
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace tsirelson
