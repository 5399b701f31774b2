// Acceptance gate: one PASS/FAIL line per criterion. The CLI binary path is
// the first argument (criteria 1 and 2 run through it).
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "random_phi.hpp"
#include "random_vectors.hpp"
#include "tsirelson/oracle.hpp"
#include "tsirelson/report.hpp"

using namespace tsirelson;
using report::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& exe, const std::string& args) {
    CliResult r;
    const std::string cmd = "'" + exe + "' " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("cannot start " + exe);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const json* line(const json& cert, const std::string& lhs) {
    for (const auto& l : cert)
        if (l["lhs"] == lhs) return &l;
    return nullptr;
}

bool line_is(const json* l, const std::string& rel, const Rational& bound, const std::string& status) {
    return l && l->at("relation") == rel && Rational::parse(l->at("bound").at("value").get<std::string>()) == bound &&
           l->at("status") == status && l->at("verified") == true;
}

Outcome criterion1(const std::string& exe) {
    std::ostringstream d;
    bool ok = true;
    for (unsigned n = 2; n <= 4; ++n) {
        const auto t0 = Clock::now();
        const CliResult r = run_cli(exe, "witness --k 1 --n " + std::to_string(n) + " --json");
        const double secs = seconds_since(t0);
        bool good = r.code == 0;
        std::string value = "?";
        if (good) {
            const json j = json::parse(r.out);
            const json& cert = j["outputs"]["certificate"];
            for (unsigned i = 1; i <= n; ++i)
                good = good && line_is(line(cert, "||x_" + std::to_string(i) + "||_1"), "=", Rational(1, 2), "exact");
            good = good && line_is(line(cert, "||x||_1"), "<=", 1, "exact");
            const json* top = line(cert, "||x||_2");
            good = good && line_is(top, ">=", Rational(static_cast<long>(n), 4), "certified-lower-bound");
            if (top) value = top->at("value").at("value").get<std::string>();
        }
        if (n == 4 && secs > 60) good = false;
        d << " n=" << n << (good ? " ok" : " FAILED") << " (exit " << r.code << ", ||x||_2 >= " << value << ", "
          << static_cast<int>(secs * 10) / 10.0 << " s)";
        ok = ok && good;
    }
    return {ok, d.str()};
}

Outcome criterion2(const std::string& exe) {
    const auto t0 = Clock::now();
    // levels of the criterion: ||z_i||_2, ||z||_2 and ||z||_3, i.e. the
    // inductive step on level-1 sub-witnesses
    const CliResult r = run_cli(exe, "witness --k 2 --n 2 --json");
    const double secs = seconds_since(t0);
    std::ostringstream d;
    bool ok = r.code == 0 && secs <= 600;
    std::string value = "?";
    if (r.code == 0) {
        const json j = json::parse(r.out);
        const json& cert = j["outputs"]["certificate"];
        ok = ok && line_is(line(cert, "||z_1||_2"), "=", Rational(1, 2), "exact") &&
             line_is(line(cert, "||z_2||_2"), "=", Rational(1, 2), "exact") &&
             line_is(line(cert, "||z||_2"), "<=", 1, "exact") &&
             line_is(line(cert, "||z||_3"), ">=", Rational(1, 2), "certified-lower-bound");
        if (const json* top = line(cert, "||z||_3")) value = top->at("value").at("value").get<std::string>();
    }
    d << " exit " << r.code << ", ||z||_3 >= " << value << ", " << static_cast<int>(secs * 10) / 10.0 << " s";
    return {ok, d.str()};
}

Outcome criterion3() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240603);
    EvalSession s;
    std::size_t checks = 0, mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const FiniteVector x = testutil::random_vector(rng, 6, 12, 8);
        for (auto rule : {AdmissibilityRule::FigielJohnson, AdmissibilityRule::PaperLiteral}) {
            for (unsigned k = 0; k <= 3; ++k) {
                ++checks;
                if (iterate_norm(x, k, rule, s) != brute_force_norm(x, k, rule)) ++mismatches;
            }
            ++checks;
            if (tsirelson_norm(x, rule, s) != brute_force_norm(x, std::nullopt, rule)) ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << " " << checks << " comparisons, " << mismatches << " mismatches, " << static_cast<int>(secs * 10) / 10.0 << " s";
    return {mismatches == 0 && secs <= 60, d.str()};
}

Outcome criterion4() {
    std::mt19937_64 rng(77);
    EvalSession s;
    std::size_t broken = 0, unstable = 0;
    std::map<unsigned, std::size_t> histogram;
    for (int t = 0; t < 1000; ++t) {
        const FiniteVector x = testutil::random_vector(rng, 12, 24, 8);
        const Rational l1 = l1_norm(x);
        Rational prev = iterate_norm(x, 0, AdmissibilityRule::FigielJohnson, s);
        for (unsigned k = 0; k <= 3; ++k) {
            const Rational next = iterate_norm(x, k + 1, AdmissibilityRule::FigielJohnson, s);
            if (!(prev <= next && next <= l1)) ++broken;
            prev = next;
        }
        const unsigned K = stabilization_level(x, AdmissibilityRule::FigielJohnson, s);
        const Rational limit = tsirelson_norm(x, AdmissibilityRule::FigielJohnson, s);
        if (K > 12 || iterate_norm(x, K, AdmissibilityRule::FigielJohnson, s) != limit ||
            iterate_norm(x, K + 1, AdmissibilityRule::FigielJohnson, s) != limit)
            ++unstable;
        ++histogram[K];
    }
    std::ostringstream d;
    d << " chain violations " << broken << ", stabilization failures " << unstable << ", K histogram";
    for (const auto& [k, c] : histogram) d << " " << k << ":" << c;
    return {broken == 0 && unstable == 0, d.str()};
}

struct MatrixRun {
    OrderMatrix m;
    double secs = 0;
};

Outcome criterion5(const MatrixRun& run, EvalSession& s) {
    const OrderMatrix& m = run.m;
    std::ostringstream d;
    bool upper = true;
    for (const auto& row : m.entries)
        for (const auto& e : row)
            if (e.n < e.k && (e.verdict != "<=1" || e.d.kind != EstimateKind::Exact)) upper = false;
    // (2,1) through the n = 4 witness alone
    const FiniteVector w4 = normalize_l1(base_witness(4, 1, s).sum);
    const Rational via_w4 = *distance_lower(NormSpec::iterate(2), NormSpec::iterate(1), {w4}, Sided::OneSided, s).value;
    const OrderEntry& e21 = m.entries[2][1];
    const OrderEntry& e32 = m.entries[3][2];
    const bool support_ok = e32.d.witness && e32.d.witness->support_size() <= 200;
    const bool ok = upper && via_w4 >= 1 && *e21.d.value >= via_w4 && *e32.d.value >= Rational(9, 8) && support_ok &&
                    run.secs <= 300;
    d << " upper triangle " << (upper ? "all <=1 exact" : "NOT all <=1") << "; (2,1) >= " << e21.d.str()
      << " (n=4 witness alone " << via_w4.str() << ")"
      << "; (3,2) >= " << e32.d.str() << " ~ " << e32.d.value->to_double() << " from " << e32.source << ", support "
      << (e32.d.witness ? e32.d.witness->support_size() : 0) << "; " << static_cast<int>(run.secs) << " s";
    return {ok, d.str()};
}

Outcome criterion6(const MatrixRun& run) {
    const StabilityReport r = stability_gap(phi_matrix(run.m, PhiVariant::Logistic));
    const int exact = logistic_gap_sign(run.m);
    const int measured = (r.gap > 0) - (r.gap < 0);
    std::ostringstream d;
    d << " gap " << r.gap << " (sup_{i<j} " << r.sup_lower << " at (" << r.sup_at.first << "," << r.sup_at.second
      << "), inf_{j<i} " << r.inf_upper << " at (" << r.inf_at.first << "," << r.inf_at.second << ")); exact sign "
      << exact << ", float sign " << measured << "; sup != inf " << (exact != 0 ? "holds" : "fails")
      << "; required gap > 0";
    return {r.gap > 0 && exact > 0 && measured == exact, d.str()};
}

Outcome criterion7() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31337);
    EvalSession s;
    const std::vector<std::string> ids{"A", "B", "C", "D", "E"};
    EvalContext ctx;
    ctx.registry.emplace("A", NormSpec::iterate(1));
    ctx.registry.emplace("B", NormSpec::iterate(2));
    ctx.registry.emplace("C", NormSpec::ell1());
    ctx.registry.emplace("D", NormSpec::tsirelson());
    ctx.registry.emplace("E", NormSpec::join(NormSpec::sup(), NormSpec::iterate(2, AdmissibilityRule::PaperLiteral)));
    ctx.pool.push_back(FiniteVector::basis(1));
    while (ctx.pool.size() < 16) ctx.pool.push_back(testutil::random_vector(rng, 6, 12));
    std::size_t bound = 0, oracle = 0, trip = 0, realize = 0, realized = 0;
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    for (int t = 0; t < 500; ++t) {
        const PhiExpr e = testutil::random_phi(rng, 5, ids);
        const std::string text = print(e);
        if (!(parse_phi(text) == e)) ++trip;
        const Rational m = mpv(e);
        if (m != testutil::TextMpv(text).run()) ++oracle;
        ctx.variant = t % 2 ? PhiVariant::Logistic : PhiVariant::Similarity;
        if (!phi_at_most(eval(e, ctx.lookup(ids[pick(rng)]), ctx, s), m)) ++bound;
        // same atom everywhere, similarity variant
        const std::string only = ids[pick(rng)];
        const PhiExpr same = testutil::random_phi(rng, 5, {only});
        if (mpv(same).is_zero()) continue;
        ctx.variant = PhiVariant::Similarity;
        const Realization r = approx_realizer(same, Rational(1, 100), ctx, s);
        ++realized;
        if (!r.achieved.exact || r.achieved.q != mpv(same)) ++realize;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << " eval>mpv " << bound << ", mpv oracle mismatches " << oracle << ", round-trip failures " << trip
      << ", realizer misses " << realize << "/" << realized << ", " << static_cast<int>(secs * 10) / 10.0 << " s";
    return {bound == 0 && oracle == 0 && trip == 0 && realize == 0 && secs <= 30, d.str()};
}

Outcome criterion8() {
    std::mt19937_64 rng(4242);
    EvalSession s;
    const auto PL = AdmissibilityRule::PaperLiteral;
    const std::vector<NormSpec> norms{
        NormSpec::ell1(),         NormSpec::sup(),           NormSpec::iterate(1),      NormSpec::iterate(2),
        NormSpec::iterate(3),     NormSpec::iterate(2, PL),  NormSpec::iterate(3, PL),  NormSpec::tsirelson(),
        NormSpec::tsirelson(PL),  NormSpec::join(NormSpec::sup(), NormSpec::iterate(1)),
        NormSpec::join(NormSpec::iterate(2, PL), NormSpec::iterate(1))};
    std::uniform_int_distribution<std::size_t> pick(0, norms.size() - 1);
    std::size_t violations = 0, strict = 0;
    for (int t = 0; t < 100; ++t) {
        const NormSpec& m = norms[pick(rng)];
        const NormSpec& n = norms[pick(rng)];
        const NormSpec& n2 = norms[pick(rng)];
        std::vector<FiniteVector> pool;
        while (pool.size() < 50) pool.push_back(testutil::random_vector(rng, 6, 12));
        for (Sided sided : {Sided::OneSided, Sided::TwoSided}) {
            const Rational lhs = *distance_lower(m, NormSpec::join(n, n2), pool, sided, s).value;
            const Rational rhs = max(*distance_lower(m, n, pool, sided, s).value, *distance_lower(m, n2, pool, sided, s).value);
            if (!(lhs <= rhs)) ++violations;
            if (lhs < rhs) ++strict;
        }
    }
    std::ostringstream d;
    d << " 100 triples x {one-sided, two-sided}: " << violations << " violations (" << strict << " strict)";
    return {violations == 0, d.str()};
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance PATH_TO_CLI\n";
        return 2;
    }
    const std::string exe = argv[1];
    int failures = 0;
    auto report_line = [&](int id, const std::string& title, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string(" exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ":" << o.detail << std::endl;
    };

    report_line(1, "base witnesses n=2,3,4", [&] { return criterion1(exe); });
    report_line(2, "inductive step, level-3 bound", [&] { return criterion2(exe); });
    report_line(3, "oracle equivalence", criterion3);
    report_line(4, "monotone ladder and stabilization", criterion4);

    EvalSession session;
    MatrixRun run;
    try {
        const auto t0 = Clock::now();
        MatrixOptions o;
        o.search.candidates = 250;
        o.search.max_support = 200;
        o.search.seed = 1;
        run.m = order_property_matrix(4, o, session);
        run.secs = seconds_since(t0);
    } catch (const std::exception& e) {
        std::cout << "matrix construction failed: " << e.what() << '\n';
    }
    const bool have_matrix = !run.m.entries.empty();
    report_line(5, "order-property matrix 0..4", [&] {
        return have_matrix ? criterion5(run, session) : Outcome{false, " no matrix"};
    });
    report_line(6, "stability gap", [&] { return have_matrix ? criterion6(run) : Outcome{false, " no matrix"}; });
    report_line(7, "phi-polynomial suite", criterion7);
    report_line(8, "join estimator inequality", criterion8);
    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : std::string("acceptance: all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
