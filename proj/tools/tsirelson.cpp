// Command-line front end. JSON (--json) is the machine format; the default
// output is a short human-readable rendering on stdout.
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tsirelson/oracle.hpp"
#include "tsirelson/report.hpp"

using namespace tsirelson;
using report::json;

namespace {

enum Exit { ok = 0, certificate_failed = 1, input_error = 2, budget_exhausted = 3 };

struct Globals {
    std::string rule = "fj";
    std::uint64_t budget = Budget{}.max_work;
    std::uint64_t max_positions = Budget{}.max_positions;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool json = false;
    bool timing = false;
};

struct Run {
    json report = json::object();
    std::ostringstream text;
    int code = ok;
};

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<FiniteVector> read_pool_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open pool file " + path);
    std::vector<FiniteVector> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        out.push_back(parse_vector(line));
    }
    return out;
}

// Basis vector, flat runs and seeded random vectors of small support.
std::vector<FiniteVector> default_pool(std::size_t random_count, std::uint64_t seed) {
    std::vector<FiniteVector> out{FiniteVector::basis(1)};
    for (Index m = 2; m <= 5; ++m) out.push_back(FiniteVector::flat(1, m, Rational(1, static_cast<unsigned long>(m))));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(1, 6), index(1, 10), num(-8, 8), den(1, 8);
    for (std::size_t i = 0; i < random_count; ++i) {
        std::map<Index, Rational> e;
        const int s = size(rng);
        while (static_cast<int>(e.size()) < s) {
            int p = num(rng);
            if (p == 0) p = 1;
            e[static_cast<Index>(index(rng))] = Rational(p, static_cast<unsigned long>(den(rng)));
        }
        out.push_back(FiniteVector::from_entries({e.begin(), e.end()}));
    }
    return out;
}

std::vector<std::vector<double>> read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string s = buf.str();
    const auto first = s.find_first_not_of(" \t\r\n");
    std::vector<std::vector<double>> m;
    if (first != std::string::npos && (s[first] == '[' || s[first] == '{')) {
        json j;
        try {
            j = json::parse(s);
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("matrix file: ") + e.what());
        }
        if (j.is_object()) {
            if (!j.contains("matrix")) throw std::invalid_argument("matrix file: object needs a \"matrix\" field");
            j = j["matrix"];
        }
        try {
            m = j.get<std::vector<std::vector<double>>>();
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("matrix file: ") + e.what());
        }
        return m;
    }
    std::istringstream lines(s);
    std::string line;
    while (std::getline(lines, line)) {
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        std::vector<double> r;
        std::string tok;
        while (row >> tok) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw std::invalid_argument("matrix file: bad number '" + tok + "'");
            r.push_back(v);
        }
        if (!r.empty()) m.push_back(std::move(r));
    }
    return m;
}

EvalContext make_context(const std::vector<std::string>& atoms, AdmissibilityRule rule, const std::string& variant,
                         std::vector<FiniteVector> pool) {
    EvalContext ctx;
    ctx.registry.emplace("l1", NormSpec::ell1());
    ctx.registry.emplace("sup", NormSpec::sup());
    ctx.registry.emplace("T", NormSpec::tsirelson(rule));
    for (unsigned k = 0; k <= 5; ++k) ctx.registry.emplace("I" + std::to_string(k), NormSpec::iterate(k, rule));
    for (const auto& a : atoms) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("atom binding '" + a + "' is not ID=SPEC");
        ctx.registry.insert_or_assign(a.substr(0, eq), NormSpec::parse(a.substr(eq + 1), rule));
    }
    ctx.variant = parse_variant(variant);
    ctx.pool = std::move(pool);
    return ctx;
}

json registry_json(const EvalContext& ctx) {
    json out = json::object();
    for (const auto& [id, spec] : ctx.registry) out[id] = spec.str();
    return out;
}

std::string value_text(const PhiValue& v) { return v.exact ? v.q.str() : fmt(v.f); }

void print_witness(const Witness& w, std::ostream& os) {
    os << "schedule";
    for (Index m : w.sched.m) os << ' ' << m;
    os << '\n';
    for (const auto& line : w.certificate) {
        os << line.claim() << "  [" << to_string(line.status);
        if (line.status == LineStatus::CertifiedLowerBound || line.relation != Relation::Equal)
            os << ", value " << line.value.str();
        os << ", " << (line.verified ? "verified" : "FAILED") << " via " << line.route << "]\n";
    }
    os << (w.verified() ? "verified" : "not verified") << '\n';
}

void print_ratio(const CertifiedRatio& r, std::ostream& os) {
    os << r.lower_bound.str() << '\n';
    os << r.numerator.str() << " " << (r.numerator_exact ? "=" : ">=") << " " << r.numerator_value.str() << ", "
       << r.denominator.str() << " = " << r.denominator_value.str() << "  (" << r.source << ")\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tsirelson norm iterates, witnesses, distances and phi-polynomials"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--rule", g.rule, "admissibility rule")->check(CLI::IsMember({"fj", "paper"}));
    app.add_option("--budget", g.budget, "dynamic-program work limit per evaluation");
    app.add_option("--max-positions", g.max_positions, "largest support expanded index by index");
    app.add_option("--seed", g.seed, "seed for candidate pools");
    app.add_option("--jobs", g.jobs, "worker threads");
    app.add_flag("--json", g.json, "emit a JSON report");
    app.add_flag("--timing", g.timing, "report wall time");

    Run run;
    std::function<void(EvalSession&)> action;
    auto rule = [&] { return parse_rule(g.rule); };

    // norm
    auto* norm = app.add_subcommand("norm", "exact norm of a vector");
    std::string norm_spec = "tsirelson", norm_vec;
    norm->add_option("--spec", norm_spec, "l1 | sup | iterate:K | tsirelson | join(A,B)");
    norm->add_option("vector", norm_vec, "e.g. 3:1,4:1,5:1 or 7..13:1/7")->required();
    norm->callback([&] {
        action = [&](EvalSession& s) {
            const NormSpec spec = NormSpec::parse(norm_spec, rule());
            const FiniteVector x = parse_vector(norm_vec);
            run.report["inputs"] = {{"spec", spec.str()}, {"vector", x.literal()}};
            try {
                const Rational v = norm_eval(spec, x, s);
                run.report["outputs"] = {{"value", report::tagged(v, report::exact)}};
                run.text << v.str() << '\n';
            } catch (const BudgetError& e) {
                run.report["outputs"] = {{"error", e.what()}, {"value", report::tagged(e.lower_bound(), report::lower_bound)}};
                run.text << ">= " << e.lower_bound().str() << "  (budget exhausted: " << e.what() << ")\n";
                run.code = budget_exhausted;
            }
        };
    });

    // oracle
    auto* oracle = app.add_subcommand("oracle", "brute-force enumeration for small supports");
    std::string oracle_spec = "tsirelson", oracle_vec;
    unsigned oracle_limit = 8;
    oracle->add_option("--spec", oracle_spec, "iterate:K | tsirelson");
    oracle->add_option("--max-support", oracle_limit, "refuse larger supports");
    oracle->add_option("vector", oracle_vec)->required();
    oracle->callback([&] {
        action = [&](EvalSession&) {
            const NormSpec spec = NormSpec::parse(oracle_spec, rule());
            std::optional<unsigned> level;
            if (spec.kind() == NormSpec::Kind::Iterate)
                level = spec.level();
            else if (spec.kind() != NormSpec::Kind::TsirelsonLimit)
                throw std::invalid_argument("oracle handles iterate:K and tsirelson only");
            const FiniteVector x = parse_vector(oracle_vec);
            const Rational v = brute_force_norm(x, level, spec.rule(), oracle_limit);
            run.report["inputs"] = {{"spec", spec.str()}, {"vector", x.literal()}};
            run.report["outputs"] = {{"value", report::tagged(v, report::exact)}};
            run.text << v.str() << '\n';
        };
    });

    // witness
    auto* witness = app.add_subcommand("witness", "certified witness vector for ||.||_{k+1} >= n/4");
    unsigned wk = 1, wn = 2, sub_arity = 2;
    Index wstart = 1;
    witness->add_option("--k", wk, "certificate level (1: base construction)")->required();
    witness->add_option("--n", wn, "number of parts (n >= 2)")->required();
    witness->add_option("--start", wstart, "first window starts at or after this index");
    witness->add_option("--sub-arity", sub_arity, "parts per sub-witness in the inductive step");
    witness->callback([&] {
        action = [&](EvalSession& s) {
            if (wk < 1) throw std::invalid_argument("k must be ≥ 1");
            run.report["inputs"] = {{"k", wk}, {"n", wn}, {"start", wstart}, {"sub_arity", sub_arity}};
            Witness w;
            try {
                w = witness_at_level(wk, wn, wstart, s, sub_arity);
            } catch (const CertificateFailure& e) {
                run.report["outputs"] = {{"status", "failed"}, {"error", e.what()}};
                run.text << "certificate failure: " << e.what() << '\n';
                run.code = certificate_failed;
                return;
            }
            run.report["outputs"] = report::to_json(w);
            print_witness(w, run.text);
            if (!w.verified()) run.code = certificate_failed;
            if (rule() == AdmissibilityRule::PaperLiteral) {
                // the construction is certified under fj; show how the
                // literal reading scores the same vectors
                json div = json::array();
                const NormBound lo = norm_bound(NormSpec::iterate(w.level, rule()), w.sum, s);
                const NormBound hi = norm_bound(NormSpec::iterate(w.level + 1, rule()), w.sum, s);
                div.push_back({{"lhs", "||x||_" + std::to_string(w.level)}, {"value", report::to_json(lo)}});
                div.push_back({{"lhs", "||x||_" + std::to_string(w.level + 1)}, {"value", report::to_json(hi)}});
                run.report["outputs"]["paper_rule"] = div;
                run.text << "paper rule: ||x||_" << w.level << (lo.exact ? " = " : " >= ") << lo.value.str()
                         << ", ||x||_" << w.level + 1 << (hi.exact ? " = " : " >= ") << hi.value.str() << '\n';
            }
        };
    });

    // ratio
    auto* ratio = app.add_subcommand("ratio", "certified lower bounds on norm ratios");
    ratio->require_subcommand(1);
    SearchBudget sb;
    unsigned rk = 1, rn = 4;
    auto* rcert = ratio->add_subcommand("certificate", "||x||_{k+1}/||x||_k >= n/4 from the witness");
    rcert->add_option("--k", rk)->required();
    rcert->add_option("--n", rn)->required();
    rcert->callback([&] {
        action = [&](EvalSession& s) {
            run.report["inputs"] = {{"k", rk}, {"n", rn}};
            const CertifiedRatio r = ratio_certificate(rk, rn, s);
            run.report["outputs"] = report::to_json(r);
            print_ratio(r, run.text);
        };
    });
    std::string num_spec = "iterate:2", den_spec = "iterate:1";
    auto* rsearch = ratio->add_subcommand("search", "best ratio over a seeded candidate sequence");
    rsearch->add_option("--num", num_spec);
    rsearch->add_option("--den", den_spec);
    rsearch->add_option("--candidates", sb.candidates);
    rsearch->add_option("--max-support", sb.max_support);
    rsearch->callback([&] {
        action = [&](EvalSession& s) {
            sb.seed = g.seed;
            const NormSpec num = NormSpec::parse(num_spec, rule()), den = NormSpec::parse(den_spec, rule());
            run.report["inputs"] = {{"num", num.str()}, {"den", den.str()}, {"candidates", sb.candidates},
                                    {"max_support", sb.max_support}, {"seed", sb.seed}};
            const CertifiedRatio r = ratio_search(num, den, sb, s);
            run.report["outputs"] = report::to_json(r);
            print_ratio(r, run.text);
        };
    });
    std::string levels_arg = "1,2,3", targets_arg = "1/2,1";
    auto* rprobe = ratio->add_subcommand("probe", "certify ratios >= targets between increasing levels");
    rprobe->add_option("--levels", levels_arg, "comma-separated levels");
    rprobe->add_option("--targets", targets_arg, "comma-separated increasing rationals");
    rprobe->add_option("--candidates", sb.candidates);
    rprobe->add_option("--max-support", sb.max_support);
    rprobe->callback([&] {
        action = [&](EvalSession& s) {
            sb.seed = g.seed;
            std::vector<unsigned> levels;
            for (const auto& t : split(levels_arg, ',')) {
                std::size_t used = 0;
                int v = -1;
                try {
                    v = std::stoi(t, &used);
                } catch (const std::exception&) {
                }
                if (v < 0 || used != t.size()) throw std::invalid_argument("bad level '" + t + "'");
                levels.push_back(static_cast<unsigned>(v));
            }
            std::vector<Rational> targets;
            for (const auto& t : split(targets_arg, ',')) targets.push_back(Rational::parse(t));
            json tj = json::array();
            for (const auto& t : targets) tj.push_back(t.str());
            run.report["inputs"] = {{"levels", levels}, {"targets", tj}, {"candidates", sb.candidates}};
            json out = json::array();
            for (const auto& p : dichotomy_probe(levels, targets, sb, s)) {
                out.push_back(report::to_json(p));
                run.text << p.target.str() << ": ";
                if (p.achieved)
                    run.text << "achieved, ||x||_" << p.to_level << "/||x||_" << p.from_level
                             << " >= " << p.certificate->lower_bound.str() << " (" << p.certificate->source << ")\n";
                else
                    run.text << "not achieved within budget\n";
            }
            run.report["outputs"] = {{"targets", out}};
        };
    });

    // matrix
    auto* matrix = app.add_subcommand("matrix", "order-property matrix of the iterates");
    unsigned levels = 3;
    std::string pool_kind = "search", pool_file;
    SearchBudget mb;
    mb.candidates = 100;
    matrix->add_option("--levels", levels, "entries for levels 0..L (L >= 2)");
    matrix->add_option("--pool", pool_kind, "none | witnesses | search")->check(CLI::IsMember({"none", "witnesses", "search"}));
    matrix->add_option("--pool-file", pool_file, "extra candidates, one vector literal per line");
    matrix->add_option("--candidates", mb.candidates, "search candidates per sub-diagonal entry");
    matrix->add_option("--max-support", mb.max_support);
    auto matrix_options = [&] {
        MatrixOptions o;
        if (!pool_file.empty()) o.pool = read_pool_file(pool_file);
        o.witnesses = pool_kind != "none";
        o.search_subdiagonal = pool_kind == "search";
        mb.seed = g.seed;
        o.search = mb;
        return o;
    };
    matrix->callback([&] {
        action = [&](EvalSession& s) {
            run.report["inputs"] = {{"levels", levels}, {"pool", pool_kind}, {"candidates", mb.candidates}};
            const OrderMatrix m = order_property_matrix(levels, matrix_options(), s);
            run.report["outputs"] = report::to_json(m);
            run.text << "n\\k";
            for (unsigned k = 0; k <= levels; ++k) run.text << '\t' << k;
            run.text << '\n';
            for (const auto& row : m.entries) {
                run.text << row.front().n;
                for (const auto& e : row) run.text << '\t' << e.verdict;
                run.text << '\n';
            }
        };
    });

    // stability
    auto* stability = app.add_subcommand("stability", "sup_{i<j} - inf_{j<i} of a phi matrix");
    std::string matrix_path, variant_name = "logistic";
    stability->add_option("--matrix", matrix_path, "JSON array of rows, {\"matrix\": ...}, or whitespace text");
    stability->add_option("--levels", levels, "without --matrix: transform the order-property matrix");
    stability->add_option("--variant", variant_name)->check(CLI::IsMember({"logistic", "similarity"}));
    stability->add_option("--pool", pool_kind)->check(CLI::IsMember({"none", "witnesses", "search"}));
    stability->add_option("--candidates", mb.candidates);
    stability->callback([&] {
        action = [&](EvalSession& s) {
            std::vector<std::vector<double>> mat;
            std::optional<int> exact_sign;
            if (!matrix_path.empty()) {
                run.report["inputs"] = {{"matrix", matrix_path}};
                mat = read_matrix(matrix_path);
            } else {
                const PhiVariant v = parse_variant(variant_name);
                run.report["inputs"] = {{"levels", levels}, {"variant", variant_name}, {"pool", pool_kind}};
                const OrderMatrix m = order_property_matrix(levels, matrix_options(), s);
                mat = phi_matrix(m, v);
                if (v == PhiVariant::Logistic) exact_sign = logistic_gap_sign(m);
                run.report["outputs"]["order_matrix"] = report::to_json(m);
            }
            const StabilityReport r = stability_gap(mat);
            run.report["outputs"]["stability"] = report::to_json(r);
            run.text << "gap " << fmt(r.gap) << '\n'
                     << "sup_{i<j} " << fmt(r.sup_lower) << " at (" << r.sup_at.first << "," << r.sup_at.second << ")\n"
                     << "inf_{j<i} " << fmt(r.inf_upper) << " at (" << r.inf_at.first << "," << r.inf_at.second << ")\n";
            if (exact_sign) {
                run.report["outputs"]["exact_gap_sign"] = *exact_sign;
                run.text << "exact sign " << *exact_sign << '\n';
            }
        };
    });

    // phi
    auto* phi = app.add_subcommand("phi", "phi-polynomials");
    phi->require_subcommand(1);
    std::string expr_text, n_spec = "T", epsilon_text = "1/100", phi_variant = "similarity";
    std::vector<std::string> atoms;
    std::size_t pool_size = 50;
    auto add_ctx_options = [&](CLI::App* c) {
        c->add_option("--atom", atoms, "ID=SPEC binding (l1, sup, T, I0..I5 are predefined)");
        c->add_option("--variant", phi_variant, "similarity | logistic")->check(CLI::IsMember({"logistic", "similarity"}));
        c->add_option("--pool-size", pool_size, "seeded random candidates for D");
        c->add_option("--pool-file", pool_file, "candidate vectors, one literal per line");
    };
    auto context = [&] {
        std::vector<FiniteVector> pool = pool_file.empty() ? default_pool(pool_size, g.seed) : read_pool_file(pool_file);
        return make_context(atoms, rule(), phi_variant, std::move(pool));
    };
    auto* pparse = phi->add_subcommand("parse", "canonical form of an expression");
    pparse->add_option("expr", expr_text)->required();
    pparse->callback([&] {
        action = [&](EvalSession&) {
            const PhiExpr e = parse_phi(expr_text);
            run.report["inputs"] = {{"expr", expr_text}};
            run.report["outputs"] = {{"canonical", print(e)}, {"ast", report::to_json(e)}};
            run.text << print(e) << '\n';
        };
    });
    auto* pmpv = phi->add_subcommand("mpv", "maximum possible value");
    pmpv->add_option("expr", expr_text)->required();
    pmpv->callback([&] {
        action = [&](EvalSession&) {
            const PhiExpr e = parse_phi(expr_text);
            const Rational v = mpv(e);
            run.report["inputs"] = {{"expr", print(e)}};
            run.report["outputs"] = {{"mpv", report::tagged(v, report::exact)}};
            run.text << v.str() << '\n';
        };
    });
    auto* peval = phi->add_subcommand("eval", "value of an expression at a norm");
    peval->add_option("expr", expr_text)->required();
    peval->add_option("--norm", n_spec, "registered id or norm spec");
    add_ctx_options(peval);
    peval->callback([&] {
        action = [&](EvalSession& s) {
            const PhiExpr e = parse_phi(expr_text);
            const EvalContext ctx = context();
            auto it = ctx.registry.find(n_spec);
            const NormSpec n = it != ctx.registry.end() ? it->second : NormSpec::parse(n_spec, rule());
            const PhiValue v = eval(e, n, ctx, s);
            run.report["inputs"] = {{"expr", print(e)}, {"norm", n.str()}, {"variant", phi_variant},
                                    {"pool_size", ctx.pool.size()}, {"registry", registry_json(ctx)}};
            run.report["outputs"] = {{"value", report::to_json(v)}, {"mpv", report::tagged(mpv(e), report::exact)}};
            run.text << value_text(v) << '\n';
        };
    });
    auto* prealize = phi->add_subcommand("realize", "norm whose value approaches mpv");
    prealize->add_option("expr", expr_text)->required();
    prealize->add_option("--epsilon", epsilon_text);
    add_ctx_options(prealize);
    prealize->callback([&] {
        action = [&](EvalSession& s) {
            const PhiExpr e = parse_phi(expr_text);
            const EvalContext ctx = context();
            const Realization r = approx_realizer(e, Rational::parse(epsilon_text), ctx, s);
            run.report["inputs"] = {{"expr", print(e)}, {"epsilon", epsilon_text}, {"variant", phi_variant},
                                    {"pool_size", ctx.pool.size()}, {"registry", registry_json(ctx)}};
            run.report["outputs"] = {{"norm", r.norm.str()}, {"achieved", report::to_json(r.achieved)},
                                     {"mpv", report::tagged(mpv(e), report::exact)}};
            run.text << r.norm.str() << '\n' << "achieved " << value_text(r.achieved) << " of mpv " << mpv(e).str() << '\n';
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : input_error;
    }

    json command = json::array();
    for (int i = 1; i < argc; ++i) command.push_back(argv[i]);
    run.report["command"] = command;
    const auto t0 = std::chrono::steady_clock::now();
    EvalSession session(Budget{g.budget, g.max_positions}, g.jobs);
    std::string error;
    try {
        action(session);
    } catch (const BudgetError& e) {
        error = std::string("budget exhausted: ") + e.what() + " (lower bound " + e.lower_bound().str() + ")";
        run.code = budget_exhausted;
    } catch (const CertificateFailure& e) {
        error = std::string("certificate failure: ") + e.what();
        run.code = certificate_failed;
    } catch (const std::invalid_argument& e) {
        error = e.what();
        run.code = input_error;
    } catch (const std::out_of_range& e) {
        error = e.what();
        run.code = input_error;
    } catch (const std::exception& e) {
        error = std::string("internal error: ") + e.what();
        run.code = certificate_failed;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    run.report["exit_code"] = run.code;
    run.report["rule"] = g.rule;
    run.report["stats"] = report::to_json(session.stats());
    if (!error.empty()) run.report["error"] = error;
    if (g.timing) run.report["timing_ms"] = report::tagged(ms, report::float_estimate);

    if (g.json)
        std::cout << run.report.dump(2) << '\n';
    else
        std::cout << run.text.str();
    if (!error.empty()) std::cerr << "error: " << error << '\n';
    if (g.timing && !g.json) std::cerr << "time " << fmt(ms) << " ms\n";
    return run.code;
}
