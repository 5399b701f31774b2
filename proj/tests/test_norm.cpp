#include <doctest.h>

#include "random_vectors.hpp"
#include "tsirelson/norm.hpp"
#include "tsirelson/oracle.hpp"

using namespace tsirelson;

namespace {
const auto FJ = AdmissibilityRule::FigielJohnson;
const auto PL = AdmissibilityRule::PaperLiteral;

FiniteVector v(const char* s) { return parse_vector(s); }
} // namespace

TEST_CASE("iterate norms on small vectors") {
    CHECK(iterate_norm(FiniteVector::basis(1), 0) == 1);
    CHECK(iterate_norm(FiniteVector::basis(1), 5) == 1);
    CHECK(iterate_norm(v("1:1,2:1"), 0) == 1);
    CHECK(iterate_norm(v("3:1,4:1,5:1"), 1) == Rational(3, 2));
    CHECK(iterate_norm(v("2:1,3:1"), 1) == 1);
    CHECK(iterate_norm(FiniteVector{}, 3) == 0);
    // the paper reading has no family at step 0
    CHECK(iterate_norm(v("3:1,4:1,5:1"), 1, PL) == 1);
}

TEST_CASE("limit norm") {
    for (Index j : {1, 2, 7, 100}) CHECK(tsirelson_norm(FiniteVector::basis(j)) == 1);
    CHECK(tsirelson_norm(FiniteVector{}) == 0);
    CHECK(tsirelson_norm(v("3:1,4:1,5:1")) == Rational(3, 2));
}

TEST_CASE("norm_eval dispatch") {
    const auto x = v("1:1,2:1");
    CHECK(norm_eval(NormSpec::join(NormSpec::ell1(), NormSpec::sup()), x) == 2);
    CHECK(norm_eval(NormSpec::ell1(), v("1:1/2,3:-2")) == Rational(5, 2));
    const auto s = NormSpec::iterate(2);
    const auto y = v("2:1/3,3:-1,5:2/7,6:1");
    CHECK(norm_eval(NormSpec::join(s, s), y) == norm_eval(s, y));
}

TEST_CASE("norm spec text round trip") {
    for (const char* t : {"l1", "sup", "iterate:3", "iterate:2@paper", "tsirelson", "join(l1,join(sup,iterate:1))"})
        CHECK(NormSpec::parse(t).str() == t);
    CHECK(NormSpec::parse("iterate:2", PL) == NormSpec::iterate(2, PL));
    CHECK(NormSpec::parse(" join ( sup , l1 ) ") == NormSpec::join(NormSpec::sup(), NormSpec::ell1()));
    CHECK_THROWS_AS(NormSpec::parse("iterate:"), std::invalid_argument);
    CHECK_THROWS_AS(NormSpec::parse("join(l1)"), std::invalid_argument);
    CHECK_THROWS_AS(NormSpec::parse("tsirelson@weird"), std::invalid_argument);
}

TEST_CASE("oracle agrees with the engine") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        const auto x = testutil::random_vector(rng, 6, 10);
        for (auto rule : {FJ, PL}) {
            for (unsigned k = 0; k <= 3; ++k) {
                INFO(x.literal() << " k=" << k << " rule=" << to_string(rule));
                CHECK(iterate_norm(x, k, rule) == brute_force_norm(x, k, rule));
            }
            INFO(x.literal() << " limit rule=" << to_string(rule));
            CHECK(tsirelson_norm(x, rule) == brute_force_norm(x, std::nullopt, rule));
        }
    }
}

TEST_CASE("oracle refuses large supports") {
    const auto x = FiniteVector::flat(1, 9, Rational(1));
    CHECK_THROWS_AS(brute_force_norm(x, 1, FJ), OracleRefusal);
    CHECK(brute_force_norm(v("2:1,3:1"), 1, FJ) == 1);
    CHECK(brute_force_norm(v("3:1,4:1,5:1"), 1, FJ) == Rational(3, 2));
}

TEST_CASE("alternative paths agree") {
    std::mt19937_64 rng(5);
    EvalSession s;
    for (int trial = 0; trial < 60; ++trial) {
        const auto x = testutil::random_vector(rng, 10, 16);
        CHECK(paths::level1_closed_form(x) == paths::level1_scan(x));
        CHECK(paths::level1_closed_form(x) == paths::iterate_generic(x, 1, FJ, s));
        for (unsigned k = 2; k <= 3; ++k) {
            CHECK(iterate_norm(x, k, FJ, s) == paths::iterate_generic(x, k, FJ, s));
            CHECK(iterate_norm(x, k, FJ, s) == paths::iterate_via_block_level1(x, k, s));
        }
        CHECK(tsirelson_norm(x, FJ, s) == paths::limit_by_levels(x, FJ, s));
        CHECK(tsirelson_norm(x, PL, s) == paths::limit_by_levels(x, PL, s));
    }
}

TEST_CASE("level-1 closed form on long runs") {
    // x = sum over blocks; compare with the scan on moderate sizes
    const auto x = FiniteVector::from_blocks({{3, 40, Rational(1, 7)}, {41, 90, Rational(1, 3)}, {200, 260, Rational(2, 9)}});
    CHECK(paths::level1_closed_form(x) == paths::level1_scan(x));
    const auto y = FiniteVector::from_blocks({{2, 3, Rational(1, 2)}, {7, 13, Rational(1, 7)}});
    CHECK(paths::level1_closed_form(y) == Rational(1, 2));
    CHECK(paths::level1_closed_form(FiniteVector::flat(1000, 1999, Rational(1, 1000))) == Rational(1, 2));
}

TEST_CASE("ladder, homogeneity, sign and suppression") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 80; ++trial) {
        const auto x = testutil::random_vector(rng, 9, 14);
        Rational prev = iterate_norm(x, 0);
        for (unsigned k = 1; k <= 4; ++k) {
            const Rational cur = iterate_norm(x, k);
            CHECK(prev <= cur);
            prev = cur;
        }
        CHECK(prev <= tsirelson_norm(x));
        CHECK(tsirelson_norm(x) <= l1_norm(x));
        const Rational c(-3, 5);
        CHECK(iterate_norm(x.scaled(c), 3) == abs(c) * iterate_norm(x, 3));
        CHECK(iterate_norm(x.abs(), 3) == iterate_norm(x, 3));
        const auto e = x.entries();
        std::vector<Index> keep;
        for (std::size_t i = 0; i < e.size(); i += 2) keep.push_back(e[i].first);
        CHECK(iterate_norm(restrict(x, IndexSet(keep)), 3) <= iterate_norm(x, 3));
    }
}

TEST_CASE("budget errors carry a lower bound") {
    EvalSession s(Budget{1000, 5000});
    const auto x = FiniteVector::from_blocks({{2, 3, Rational(1, 2)}, {7, 13, Rational(1, 7)}, {30, 60, Rational(1, 31)}});
    try {
        iterate_norm(x, 3, FJ, s);
        FAIL("expected a budget error");
    } catch (const BudgetError& e) {
        EvalSession big;
        CHECK(e.lower_bound() <= iterate_norm(x, 3, FJ, big));
        CHECK(e.lower_bound() >= iterate_norm(x, 1, FJ, big));
    }
    const NormBound b = norm_bound(NormSpec::iterate(3), x, s);
    CHECK_FALSE(b.exact);
}

TEST_CASE("stabilization is observed") {
    const auto x = v("3:1,4:1,5:1,6:1,7:1,8:1");
    EvalSession s;
    const unsigned k = stabilization_level(x, FJ, s);
    CHECK(iterate_norm(x, k, FJ, s) == tsirelson_norm(x, FJ, s));
    if (k > 0) CHECK(iterate_norm(x, k - 1, FJ, s) < tsirelson_norm(x, FJ, s));
}

TEST_CASE("parallel evaluation is deterministic") {
    std::mt19937_64 rng(3);
    const auto x = testutil::random_vector(rng, 30, 40);
    EvalSession serial;
    EvalSession par(Budget{}, 4);
    CHECK(iterate_norm(x, 3, FJ, serial) == iterate_norm(x, 3, FJ, par));
    CHECK(paths::iterate_generic(x, 2, PL, serial) == paths::iterate_generic(x, 2, PL, par));
}
