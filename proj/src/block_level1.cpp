// FigielJohnson level 1 on block vectors.
//
// ||x||_1 = max(||x||_inf, 1/2 max_s g(s)) where g(s) is the sum of the s
// largest |x_i| with i >= s. Only starts s inside the support matter: moving
// s forward to the next support index keeps the entries and raises the cap.

#include <map>

#include <gmpxx.h>

#include "tsirelson/norm.hpp"

namespace tsirelson::paths {
namespace {

struct Level {
    mpz_class w;
    std::uint64_t count;
};

mpz_class times(const mpz_class& w, std::uint64_t c) {
    return w * mpz_class(static_cast<unsigned long>(c));
}

struct Scaled {
    std::vector<Block> blocks; // absolute values
    std::vector<mpz_class> w;  // value * scale
    mpz_class scale = 1;
};

Scaled scale_blocks(const FiniteVector& x) {
    Scaled s;
    s.blocks = x.abs().blocks();
    for (const auto& b : s.blocks) mpz_lcm(s.scale.get_mpz_t(), s.scale.get_mpz_t(), b.value.den().get_mpz_t());
    for (const auto& b : s.blocks) s.w.push_back(b.value.num() * (s.scale / b.value.den()));
    return s;
}

// Sum of the `cap` largest among `own` copies of v and the tail levels.
mpz_class top_sum(const std::vector<Level>& tail, const mpz_class& v, std::uint64_t own, std::uint64_t cap) {
    mpz_class sum = 0;
    std::uint64_t left = cap;
    bool placed = false;
    auto take = [&](const mpz_class& w, std::uint64_t c) {
        const std::uint64_t t = std::min(c, left);
        sum += times(w, t);
        left -= t;
    };
    for (const auto& l : tail) {
        if (left == 0) break;
        if (!placed && v >= l.w) {
            take(v, own);
            placed = true;
            if (left == 0) break;
        }
        take(l.w, l.count);
    }
    if (!placed && left > 0) take(v, own);
    return sum;
}

void insert_level(std::vector<Level>& tail, const mpz_class& w, std::uint64_t count) {
    auto it = tail.begin();
    while (it != tail.end() && it->w > w) ++it;
    if (it != tail.end() && it->w == w)
        it->count += count;
    else
        tail.insert(it, Level{w, count});
}

Rational finish(const Scaled& s, mpz_class best_window) {
    mpz_class sup = 0;
    for (const auto& w : s.w) sup = std::max(sup, w);
    mpz_class twice = 2 * sup;
    return Rational(std::max(twice, best_window), 2 * s.scale);
}

} // namespace

Rational level1_closed_form(const FiniteVector& x) {
    if (x.is_zero()) return Rational(0);
    const Scaled s = scale_blocks(x);
    std::vector<Level> tail;
    mpz_class best = 0;
    for (std::size_t b = s.blocks.size(); b-- > 0;) {
        const Index first = s.blocks[b].first;
        const Index last = s.blocks[b].last;
        // g is linear in s between the points where the cap meets a
        // cumulative count: s = K or s = K + (last - s + 1).
        std::vector<Index> cands{first, last};
        std::uint64_t cumulative = 0;
        auto add_breaks = [&](std::uint64_t k) {
            for (std::uint64_t num : {k, last + 1 + k}) {
                for (std::uint64_t den : {1u, 2u}) {
                    const std::uint64_t lo = num / den;
                    for (std::uint64_t c : {lo, lo + 1})
                        if (c >= first && c <= last) cands.push_back(c);
                }
            }
        };
        add_breaks(0);
        for (const auto& l : tail) {
            cumulative += l.count;
            add_breaks(cumulative);
        }
        for (Index c : cands) best = std::max(best, top_sum(tail, s.w[b], last - c + 1, c));
        insert_level(tail, s.w[b], s.blocks[b].length());
    }
    return finish(s, best);
}

Rational level1_scan(const FiniteVector& x) {
    if (x.is_zero()) return Rational(0);
    const Scaled s = scale_blocks(x);
    std::map<mpz_class, std::uint64_t, std::greater<>> seen;
    mpz_class best = 0;
    for (std::size_t b = s.blocks.size(); b-- > 0;) {
        for (Index i = s.blocks[b].last + 1; i-- > s.blocks[b].first;) {
            ++seen[s.w[b]];
            mpz_class sum = 0;
            std::uint64_t left = i;
            for (const auto& [w, c] : seen) {
                const std::uint64_t t = std::min(c, left);
                sum += times(w, t);
                left -= t;
                if (left == 0) break;
            }
            best = std::max(best, sum);
        }
    }
    return finish(s, best);
}

} // namespace tsirelson::paths
