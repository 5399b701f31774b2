#include <cmath>

#include <doctest.h>

#include "random_phi.hpp"
#include "random_vectors.hpp"
#include "tsirelson/phi.hpp"

using namespace tsirelson;

namespace {

EvalContext context(PhiVariant variant, std::vector<FiniteVector> pool) {
    EvalContext ctx;
    ctx.registry.emplace("M", NormSpec::iterate(2));
    ctx.registry.emplace("M1", NormSpec::ell1());
    ctx.registry.emplace("M2", NormSpec::sup());
    ctx.registry.emplace("T", NormSpec::tsirelson());
    ctx.registry.emplace("P", NormSpec::iterate(3, AdmissibilityRule::PaperLiteral));
    ctx.variant = variant;
    ctx.pool = std::move(pool);
    return ctx;
}

std::vector<FiniteVector> small_pool(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<FiniteVector> out{FiniteVector::basis(1)};
    while (out.size() < count) out.push_back(testutil::random_vector(rng, 5, 10));
    return out;
}

} // namespace

TEST_CASE("parse examples") {
    CHECK(parse_phi("1") == PhiExpr::one());
    CHECK(parse_phi("1/2*phi(M1)") == PhiExpr::scal(Rational(1, 2), PhiExpr::atom("M1")));
    CHECK(parse_phi("(phi(M1)+phi(M2))") == PhiExpr::oplus(PhiExpr::atom("M1"), PhiExpr::atom("M2")));
    CHECK(parse_phi(" ( phi( A ) & 1 ) ") == PhiExpr::conj(PhiExpr::atom("A"), PhiExpr::one()));
    CHECK(parse_phi("(1 | 0*1)") == PhiExpr::disj(PhiExpr::one(), PhiExpr::scal(0, PhiExpr::one())));
    CHECK(parse_phi("1*1") == PhiExpr::scal(1, PhiExpr::one()));
    CHECK(parse_phi("2/4*phi(x_y')").coefficient() == Rational(1, 2));
    CHECK_FALSE(parse_phi("(phi(A)&phi(B))") == parse_phi("(phi(B)&phi(A))"));
}

TEST_CASE("parse errors carry positions") {
    auto position = [](const char* text) -> std::size_t {
        try {
            parse_phi(text);
        } catch (const PhiSyntaxError& e) {
            return e.position();
        }
        return std::string::npos;
    };
    CHECK(position("") == 0);
    CHECK(position("(phi(A) ^ 1)") == 8);
    CHECK(position("phi(A") == 5);
    CHECK(position("phi()") == 4);
    CHECK(position("(1 & 1") == 6);
    CHECK(position("1 1") == 2);
    CHECK(position("3/2*1") == 0);
    CHECK(position("2") == 1);
    CHECK(position("1/0*1") == 0);
    CHECK(position("x") == 0);
    CHECK_THROWS_AS(PhiExpr::scal(Rational(-1, 2), PhiExpr::one()), std::invalid_argument);
    CHECK_THROWS_AS(PhiExpr::scal(Rational(3, 2), PhiExpr::one()), std::invalid_argument);
}

TEST_CASE("printer") {
    CHECK(print(parse_phi("( 1/2 * phi(A) | (1 & phi(B)))")) == "(1/2*phi(A) | (1 & phi(B)))");
    CHECK(print(parse_phi("4/8*1")) == "1/2*1");
    CHECK(print(PhiExpr::oplus(PhiExpr::one(), PhiExpr::atom("M"))) == "(1 + phi(M))");
}

TEST_CASE("mpv examples") {
    CHECK(mpv(parse_phi("1")) == 1);
    CHECK(mpv(parse_phi("(1/2*1 + 3/4*1)")) == 1);
    CHECK(mpv(parse_phi("(1/2*phi(M) & 1)")) == Rational(1, 2));
    CHECK(mpv(parse_phi("(1/3*1 + 1/3*phi(M))")) == Rational(2, 3));
    CHECK(mpv(parse_phi("(1/3*1 | 1/4*phi(M))")) == Rational(1, 3));
    CHECK(mpv(parse_phi("0*phi(M)")) == 0);
}

TEST_CASE("eval examples") {
    EvalSession s;
    const EvalContext ctx = context(PhiVariant::Similarity, small_pool(1, 10));
    CHECK(eval(parse_phi("1"), NormSpec::sup(), ctx, s).q == 1);
    const PhiValue same = eval(parse_phi("(phi(M)&phi(M))"), ctx.lookup("M"), ctx, s);
    CHECK(same.exact);
    CHECK(same.q == 1);
    CHECK_THROWS_AS(eval(parse_phi("phi(Q)"), NormSpec::sup(), ctx, s), std::invalid_argument);

    // a single candidate with ||x||_1 / ||x||_sup close to e, so log D = 1
    const mpq_class r(std::exp(1.0) - 2.0);
    const FiniteVector x = FiniteVector::from_entries({{1, Rational(1)}, {2, Rational(1)}, {3, Rational(r)}});
    const EvalContext e_ctx = context(PhiVariant::Similarity, {x});
    const PhiValue quarter = eval(parse_phi("1/2*phi(M1)"), NormSpec::sup(), e_ctx, s);
    CHECK_FALSE(quarter.exact);
    CHECK(std::abs(quarter.f - 0.25) <= phi_tolerance);
    CHECK(phi_at_most(quarter, Rational(1, 4) + Rational(1, 1000000000000)));
}

TEST_CASE("phi_at_most") {
    CHECK(phi_at_most(PhiValue::of(Rational(1, 3)), Rational(1, 3)));
    CHECK_FALSE(phi_at_most(PhiValue::of(Rational(1, 2)), Rational(1, 3)));
    CHECK(phi_at_most(PhiValue::of(0.5 + 0x1p-45), Rational(1, 2)));
    CHECK_FALSE(phi_at_most(PhiValue::of(0.5 + 0x1p-30), Rational(1, 2)));
}

TEST_CASE("realizer examples") {
    EvalSession s;
    const EvalContext ctx = context(PhiVariant::Similarity, small_pool(2, 10));
    const Realization atom = approx_realizer(parse_phi("phi(M)"), Rational(1, 10), ctx, s);
    CHECK(atom.norm == ctx.lookup("M"));
    CHECK(atom.achieved.q == 1);
    const Realization one = approx_realizer(parse_phi("1"), Rational(1, 10), ctx, s);
    CHECK(one.achieved.q == 1);
    CHECK(one.norm == ctx.registry.begin()->second);
    const Realization joined = approx_realizer(parse_phi("(phi(M1) + 1/2*phi(M2))"), Rational(1, 10), ctx, s);
    CHECK(joined.norm == NormSpec::join(NormSpec::ell1(), NormSpec::sup()));
    CHECK(phi_at_most(joined.achieved, Rational(1)));
    CHECK_THROWS_AS(approx_realizer(parse_phi("0*phi(M)"), Rational(1, 10), ctx, s), std::invalid_argument);
    CHECK_THROWS_AS(approx_realizer(parse_phi("phi(M)"), Rational(0), ctx, s), std::invalid_argument);
}

TEST_CASE("random expressions: round trip, mpv oracle, eval <= mpv") {
    EvalSession s;
    std::mt19937_64 rng(21);
    const std::vector<std::string> ids{"M", "M1", "M2", "T", "P"};
    for (PhiVariant variant : {PhiVariant::Similarity, PhiVariant::Logistic}) {
        const EvalContext ctx = context(variant, small_pool(3, 12));
        for (int t = 0; t < 80; ++t) {
            const PhiExpr e = testutil::random_phi(rng, 5, ids);
            CHECK(testutil::depth(e) <= 5);
            const std::string text = print(e);
            CHECK(parse_phi(text) == e);
            CHECK(mpv(e) == testutil::TextMpv(text).run());
            const Rational m = mpv(e);
            CHECK(m >= 0);
            CHECK(m <= 1);
            for (const auto& id : ids) CHECK(phi_at_most(eval(e, ctx.lookup(id), ctx, s), m));
        }
    }
}

TEST_CASE("same-atom realizations achieve mpv exactly") {
    EvalSession s;
    std::mt19937_64 rng(4);
    const EvalContext ctx = context(PhiVariant::Similarity, small_pool(5, 12));
    for (const std::string id : {"M", "M1", "P"}) {
        for (int t = 0; t < 40; ++t) {
            const PhiExpr e = testutil::random_phi(rng, 5, {id});
            if (mpv(e).is_zero()) continue;
            const Realization r = approx_realizer(e, Rational(1, 1000), ctx, s);
            REQUIRE(r.achieved.exact);
            CHECK(r.achieved.q == mpv(e));
            CHECK(eval(e, r.norm, ctx, s).q == mpv(e));
        }
    }
}
