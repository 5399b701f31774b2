#pragma once

// Interval dynamic program behind iterate_norm and tsirelson_norm.
//
// Values are kept as scaled integers: with `scale` the lcm of the entry
// denominators and w_t = |a_t| * scale, the level-l value of a support
// interval is stored as I_l = 2^l * scale * ||.||_l, which satisfies
//
//   I_0(i,j)   = max w over [i..j]
//   I_{l+1}    = max(2 I_l(i,j), max over windows [t..j], t >= i, of the best
//                 split of [t..j] into at most cap(t) consecutive pieces of
//                 sum I_l(piece)).
//
// Restricting families to consecutive pieces covering a suffix window is
// exact because restriction never increases an iterate norm.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "tsirelson/norm.hpp"
#include "tsirelson/parallel.hpp"

namespace tsirelson::engine {

struct SparseInput {
    std::vector<Index> pos;
    std::vector<mpz_class> w;
    mpz_class scale = 1;
    mpz_class total = 0; ///< sum of w
};

SparseInput make_sparse(const FiniteVector& x);

/// True when 2^shift * total stays below 2^62, so int64 arithmetic is exact.
bool fits_int64(const SparseInput& in, unsigned shift);

/// Cell-update estimate for `levels` steps where only the last is top-only.
double estimate_work(const SparseInput& in, unsigned levels, AdmissibilityRule rule);
double estimate_fixed_point_work(const SparseInput& in);

template <class Int>
struct IntOps;

template <>
struct IntOps<std::int64_t> {
    static std::int64_t from(const mpz_class& z) { return z.get_si(); }
    static mpz_class to_mpz(std::int64_t v) { return mpz_class(static_cast<long>(v)); }
};

template <>
struct IntOps<mpz_class> {
    static mpz_class from(const mpz_class& z) { return z; }
    static mpz_class to_mpz(const mpz_class& v) { return v; }
};

/// Upper-triangular m x m table indexed by support positions.
template <class Int>
class IntervalTable {
public:
    explicit IntervalTable(std::size_t m = 0) : m_(m), v_(m * m) {}
    std::size_t size() const { return m_; }
    Int& operator()(std::size_t i, std::size_t j) { return v_[i * m_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return v_[i * m_ + j]; }

private:
    std::size_t m_;
    std::vector<Int> v_;
};

inline std::uint64_t window_cap(AdmissibilityRule rule, Index p, unsigned step) {
    if (rule == AdmissibilityRule::FigielJohnson) return p;
    return p >= step ? step : 0;
}

template <class Int>
class LevelEngine {
public:
    LevelEngine(const SparseInput& in, AdmissibilityRule rule, EvalSession& session)
        : in_(in), rule_(rule), session_(session), m_(in.pos.size()) {}

    /// I_0 for every interval.
    IntervalTable<Int> level0() const {
        IntervalTable<Int> t(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            Int best = IntOps<Int>::from(in_.w[i]);
            for (std::size_t j = i; j < m_; ++j) {
                const Int wj = IntOps<Int>::from(in_.w[j]);
                if (best < wj) best = wj;
                t(i, j) = best;
            }
        }
        return t;
    }

    /// FigielJohnson level 1 from level 0: each window [t..j] contributes the
    /// sum of its cap(t) largest weights, since every chosen weight can sit in
    /// its own piece.
    IntervalTable<Int> level1_topsum(const IntervalTable<Int>& cur) {
        IntervalTable<Int> ts(m_);
        for (std::size_t t = 0; t < m_; ++t) {
            const std::uint64_t cap = in_.pos[t];
            std::priority_queue<Int, std::vector<Int>, std::greater<Int>> heap;
            Int sum = 0;
            for (std::size_t j = t; j < m_; ++j) {
                const Int wj = IntOps<Int>::from(in_.w[j]);
                heap.push(wj);
                sum += wj;
                if (heap.size() > cap) {
                    sum -= heap.top();
                    heap.pop();
                }
                ts(t, j) = sum;
            }
        }
        session_.stats().families += m_ * (m_ + 1) / 2;
        IntervalTable<Int> next(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            Int running = -1;
            for (std::size_t i = j + 1; i-- > 0;) {
                if (running < ts(i, j)) running = ts(i, j);
                Int twice = cur(i, j);
                twice += cur(i, j);
                next(i, j) = twice < running ? running : twice;
            }
        }
        return next;
    }

    /// One generic step from level `step` to `step + 1`. With `top_only`
    /// only the entry for the whole support is meaningful in the result.
    IntervalTable<Int> step(const IntervalTable<Int>& cur, unsigned step, bool top_only) {
        std::vector<Int> singles(m_);
        std::vector<Int> prefix(m_ + 1);
        prefix[0] = 0;
        for (std::size_t t = 0; t < m_; ++t) {
            singles[t] = IntOps<Int>::from(mpz_class(in_.w[t] << step));
            prefix[t + 1] = prefix[t] + singles[t];
        }
        IntervalTable<Int> next(m_);
        const std::size_t first_col = top_only ? m_ - 1 : 0;
        const std::size_t cols = m_ - first_col;
        const unsigned jobs = top_only ? 1 : session_.jobs();
        std::vector<std::vector<Int>> fbuf(jobs), gbuf(jobs);
        std::vector<std::uint64_t> cells(cols, 0), fams(cols, 0);
        parallel_for(cols, jobs, [&](std::size_t c, unsigned worker) {
            const std::size_t j = first_col + c;
            auto& g = gbuf[worker];
            partition_column(cur, j, step, prefix, fbuf[worker], g, cells[c], fams[c]);
            Int running = -1;
            for (std::size_t i = j + 1; i-- > 0;) {
                if (running < g[i]) running = g[i];
                Int twice = cur(i, j);
                twice += cur(i, j);
                next(i, j) = twice < running ? running : twice;
            }
        });
        for (std::size_t c = 0; c < cols; ++c) {
            session_.stats().dp_cells += cells[c];
            session_.stats().families += fams[c];
        }
        return next;
    }

    /// Top value I_k(0, m-1). `trace`, when given, receives the top entry of
    /// every level 0..k (all levels are then computed in full).
    Int run(unsigned k, bool topsum_level1, const IntervalTable<Int>* given_level1 = nullptr,
            std::vector<Int>* trace = nullptr) {
        IntervalTable<Int> cur;
        unsigned level = 0;
        if (given_level1 != nullptr) {
            cur = *given_level1;
            level = 1;
        } else {
            cur = level0();
        }
        if (trace) trace->push_back(cur(0, m_ - 1));
        for (; level < k; ++level) {
            const bool last = level + 1 == k && trace == nullptr;
            if (level == 0 && rule_ == AdmissibilityRule::FigielJohnson && topsum_level1)
                cur = level1_topsum(cur);
            else
                cur = step(cur, level, last);
            if (trace) trace->push_back(cur(0, m_ - 1));
        }
        return cur(0, m_ - 1);
    }

    /// FigielJohnson fixed point, scaled by 2^(m-1) * scale. Windows may use
    /// any number of pieces up to cap; a window equal to the whole interval
    /// must be split into at least two pieces, which makes the recursion
    /// well-founded on interval length.
    Int fixed_point() {
        const unsigned shift = static_cast<unsigned>(m_ - 1);
        std::vector<Int> prefix(m_ + 1);
        std::vector<Int> level0(m_);
        prefix[0] = 0;
        for (std::size_t t = 0; t < m_; ++t) {
            level0[t] = IntOps<Int>::from(mpz_class(in_.w[t] << shift));
            prefix[t + 1] = prefix[t] + level0[t];
        }
        IntervalTable<Int> fix(m_);
        std::vector<Int> f;
        for (std::size_t j = 0; j < m_; ++j) {
            std::size_t width = 0;
            for (std::size_t t = 0; t <= j; ++t) {
                const std::uint64_t len = j - t + 1;
                const std::uint64_t cap = in_.pos[t];
                if (cap < len) width = std::max<std::size_t>(width, cap);
            }
            const std::size_t stride = width + 1;
            f.assign((j + 2) * stride, Int(-1));
            for (std::size_t c = 0; c <= width; ++c) f[(j + 1) * stride + c] = 0;
            Int running = -1;
            Int sup = 0;
            for (std::size_t i = j + 1; i-- > 0;) {
                const std::uint64_t len = j - i + 1;
                const Int window_sum = prefix[j + 1] - prefix[i];
                if (sup < level0[i]) sup = level0[i];
                Int best = sup;
                if (!(running < 0)) best = std::max(best, halve(running));
                const std::uint64_t cap = std::min<std::uint64_t>(in_.pos[i], len);
                if (cap >= 2) {
                    Int cand = -1;
                    if (cap >= len) {
                        cand = window_sum;
                    } else {
                        for (std::size_t u = i; u < j; ++u) {
                            const Int& rest = f[(u + 1) * stride + (cap - 1)];
                            if (rest < 0) continue;
                            Int v = fix(i, u);
                            v += rest;
                            if (cand < v) cand = v;
                        }
                        session_.stats().dp_cells += j - i;
                    }
                    if (!(cand < 0)) best = std::max(best, halve(cand));
                }
                fix(i, j) = best;
                fill_row(f, stride, width, i, j, window_sum,
                         [&](std::size_t u) -> const Int& { return fix(i, u); });
                Int g = in_.pos[i] >= len ? window_sum : f[i * stride + in_.pos[i]];
                if (running < g) running = g;
                ++session_.stats().families;
            }
        }
        return fix(0, m_ - 1);
    }

private:
    static Int halve(const Int& v) {
        Int r = v / 2;
        if (r + r != v) throw std::logic_error("fixed point: odd numerator where an even one is guaranteed");
        return r;
    }

    // f[i][c] = best split of [i..j] into at most c pieces, c = 1..width.
    template <class PieceFn>
    void fill_row(std::vector<Int>& f, std::size_t stride, std::size_t width, std::size_t i,
                  std::size_t j, const Int& window_sum, PieceFn&& piece) {
        const std::uint64_t len = j - i + 1;
        if (width >= 1) f[i * stride + 1] = piece(j);
        for (std::size_t c = 2; c <= width; ++c) {
            if (c >= len) {
                f[i * stride + c] = window_sum;
                continue;
            }
            Int best = f[i * stride + c - 1];
            for (std::size_t u = i; u < j; ++u) {
                const Int& rest = f[(u + 1) * stride + (c - 1)];
                Int v = piece(u);
                v += rest;
                if (best < v) best = v;
            }
            f[i * stride + c] = best;
        }
    }

    void partition_column(const IntervalTable<Int>& cur, std::size_t j, unsigned step,
                          const std::vector<Int>& prefix, std::vector<Int>& f, std::vector<Int>& g,
                          std::uint64_t& cells, std::uint64_t& fams) const {
        std::size_t width = 0;
        for (std::size_t t = 0; t <= j; ++t) {
            const std::uint64_t len = j - t + 1;
            const std::uint64_t cap = window_cap(rule_, in_.pos[t], step);
            if (cap > 0 && cap < len) width = std::max<std::size_t>(width, cap);
        }
        const std::size_t stride = width + 1;
        f.assign((j + 2) * stride, Int(-1));
        g.assign(j + 1, Int(-1));
        for (std::size_t c = 0; c <= width; ++c) f[(j + 1) * stride + c] = 0;
        for (std::size_t t = j + 1; t-- > 0;) {
            const std::uint64_t len = j - t + 1;
            const Int window_sum = prefix[j + 1] - prefix[t];
            if (width >= 1) f[t * stride + 1] = cur(t, j);
            for (std::size_t c = 2; c <= width; ++c) {
                if (c >= len) {
                    f[t * stride + c] = window_sum;
                    continue;
                }
                Int best = f[t * stride + c - 1];
                for (std::size_t u = t; u < j; ++u) {
                    Int v = cur(t, u);
                    v += f[(u + 1) * stride + (c - 1)];
                    if (best < v) best = v;
                }
                f[t * stride + c] = best;
                cells += j - t;
            }
            const std::uint64_t cap = window_cap(rule_, in_.pos[t], step);
            if (cap == 0) continue;
            ++fams;
            g[t] = cap >= len ? window_sum : f[t * stride + cap];
        }
    }

    const SparseInput& in_;
    AdmissibilityRule rule_;
    EvalSession& session_;
    std::size_t m_;
};

} // namespace tsirelson::engine
