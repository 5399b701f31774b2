#include <map>

#include "tsirelson/oracle.hpp"

namespace tsirelson {
namespace {

using Mask = unsigned;

class Oracle {
public:
    Oracle(const FiniteVector& x, AdmissibilityRule rule) : rule_(rule) {
        for (const auto& [i, v] : x.entries()) {
            idx_.push_back(i);
            a_.push_back(abs(v));
        }
    }

    Mask full() const { return (Mask{1} << idx_.size()) - 1; }
    Index max_index() const { return idx_.back(); }

    Rational level(Mask s, unsigned k) {
        if (s == 0) return Rational(0);
        if (k == 0) return sup(s);
        const auto key = std::make_pair(s, k);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Rational best = level(s, k - 1);
        const unsigned step = k - 1;
        for_each_family(s, [&](const std::vector<Mask>& groups, Index first) {
            const std::size_t n = groups.size();
            if (rule_ == AdmissibilityRule::FigielJohnson) {
                if (n > first) return;
            } else if (step == 0 || n > step || first < step) {
                return;
            }
            Rational sum = 0;
            for (Mask g : groups) sum += level(g, k - 1);
            best = max(best, sum / Rational(2));
        });
        memo_.emplace(key, best);
        return best;
    }

    // FigielJohnson steps do not depend on the level, so once no subset
    // changes between consecutive levels nothing changes afterwards.
    Rational limit() {
        for (unsigned k = 1;; ++k) {
            bool stable = true;
            for (Mask s = 1; s <= full() && stable; ++s) stable = level(s, k) == level(s, k - 1);
            if (stable) return level(full(), k);
        }
    }

private:
    Rational sup(Mask s) const {
        Rational r = 0;
        for (std::size_t i = 0; i < idx_.size(); ++i)
            if (s >> i & 1u) r = max(r, a_[i]);
        return r;
    }

    // Every sequence of nonempty sets E_1 < ... < E_n drawn from s; elements
    // between or inside the sets may be skipped.
    template <class Fn>
    void for_each_family(Mask s, Fn&& fn) const {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < idx_.size(); ++i)
            if (s >> i & 1u) members.push_back(i);
        std::vector<Mask> groups;
        Index first = 0;
        auto rec = [&](auto&& self, std::size_t p) -> void {
            if (p == members.size()) {
                if (!groups.empty()) fn(groups, first);
                return;
            }
            const Mask bit = Mask{1} << members[p];
            self(self, p + 1);
            if (!groups.empty()) {
                groups.back() |= bit;
                self(self, p + 1);
                groups.back() &= ~bit;
            }
            const Index saved = first;
            if (groups.empty()) first = idx_[members[p]];
            groups.push_back(bit);
            self(self, p + 1);
            groups.pop_back();
            first = saved;
        };
        rec(rec, 0);
    }

    AdmissibilityRule rule_;
    std::vector<Index> idx_;
    std::vector<Rational> a_;
    std::map<std::pair<Mask, unsigned>, Rational> memo_;
};

} // namespace

Rational brute_force_norm(const FiniteVector& x, std::optional<unsigned> level, AdmissibilityRule rule,
                          std::size_t max_support) {
    if (max_support > 20) throw std::invalid_argument("oracle support limit must be at most 20");
    if (x.support_size() > max_support)
        throw OracleRefusal("oracle refuses support of size " + std::to_string(x.support_size()) +
                            " (limit " + std::to_string(max_support) + ")");
    if (x.is_zero()) return Rational(0);
    Oracle o(x, rule);
    if (level) return o.level(o.full(), *level);
    if (rule == AdmissibilityRule::FigielJohnson) return o.limit();
    // PaperLiteral step l needs min E_1 >= l, so nothing changes after the
    // step numbered by the largest index.
    return o.level(o.full(), static_cast<unsigned>(o.max_index()) + 1);
}

} // namespace tsirelson
