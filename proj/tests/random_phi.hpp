#pragma once

#include <random>
#include <string>
#include <vector>

#include "tsirelson/phi.hpp"

namespace testutil {

// Random expression of depth <= max_depth over the given atom ids, with
// scale coefficients p/q in [0, 1], q <= 8.
inline tsirelson::PhiExpr random_phi(std::mt19937_64& rng, unsigned max_depth, const std::vector<std::string>& ids) {
    using tsirelson::PhiExpr;
    using tsirelson::Rational;
    std::uniform_int_distribution<int> kind(0, max_depth <= 1 ? 1 : 5);
    switch (kind(rng)) {
    case 0: return PhiExpr::one();
    case 1: {
        std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
        return PhiExpr::atom(ids[pick(rng)]);
    }
    case 2: {
        std::uniform_int_distribution<long> den(1, 8);
        const long q = den(rng);
        std::uniform_int_distribution<long> num(0, q);
        return PhiExpr::scal(Rational(num(rng), static_cast<unsigned long>(q)), random_phi(rng, max_depth - 1, ids));
    }
    case 3: return PhiExpr::conj(random_phi(rng, max_depth - 1, ids), random_phi(rng, max_depth - 1, ids));
    case 4: return PhiExpr::disj(random_phi(rng, max_depth - 1, ids), random_phi(rng, max_depth - 1, ids));
    default: return PhiExpr::oplus(random_phi(rng, max_depth - 1, ids), random_phi(rng, max_depth - 1, ids));
    }
}

inline unsigned depth(const tsirelson::PhiExpr& e) {
    using K = tsirelson::PhiExpr::Kind;
    switch (e.kind()) {
    case K::Const1:
    case K::Atom: return 1;
    case K::Scal: return 1 + depth(e.child());
    default: return 1 + std::max(depth(e.left()), depth(e.right()));
    }
}

// Maximum possible value straight from the printed text, without the AST:
// a second reading of the grammar used as an oracle for mpv.
class TextMpv {
public:
    explicit TextMpv(std::string s) : s_(std::move(s)) {}

    tsirelson::Rational run() {
        auto v = expr();
        if (p_ != s_.size()) throw std::runtime_error("trailing text in " + s_);
        return v;
    }

private:
    tsirelson::Rational expr() {
        using tsirelson::Rational;
        if (s_.compare(p_, 4, "phi(") == 0) {
            p_ = s_.find(')', p_) + 1;
            return Rational(1);
        }
        if (s_[p_] == '(') {
            ++p_;
            const Rational a = expr();
            // printer emits " op "
            const char op = s_[p_ + 1];
            p_ += 3;
            const Rational b = expr();
            ++p_; // ')'
            if (op == '&') return a < b ? a : b;
            if (op == '|') return a < b ? b : a;
            const Rational sum = a + b;
            return sum < Rational(1) ? sum : Rational(1);
        }
        std::size_t end = p_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '/')) ++end;
        const Rational r = Rational::parse(s_.substr(p_, end - p_));
        p_ = end;
        if (p_ < s_.size() && s_[p_] == '*') {
            ++p_;
            return r * expr();
        }
        return r;
    }

    std::string s_;
    std::size_t p_ = 0;
};

} // namespace testutil
