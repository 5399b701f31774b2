#include <cctype>
#include <optional>

#include "tsirelson/phi.hpp"

namespace tsirelson {

PhiExpr PhiExpr::one() { return PhiExpr{}; }

PhiExpr PhiExpr::atom(std::string id) {
    if (id.empty()) throw std::invalid_argument("atom id is empty");
    PhiExpr e;
    e.kind_ = Kind::Atom;
    e.id_ = std::move(id);
    return e;
}

PhiExpr PhiExpr::scal(Rational r, PhiExpr child) {
    if (r < 0 || r > 1) throw std::invalid_argument("scale coefficient " + r.str() + " is outside [0,1]");
    PhiExpr e;
    e.kind_ = Kind::Scal;
    e.coef_ = std::move(r);
    e.left_ = std::make_shared<const PhiExpr>(std::move(child));
    return e;
}

PhiExpr PhiExpr::binary(Kind k, PhiExpr l, PhiExpr r) {
    PhiExpr e;
    e.kind_ = k;
    e.left_ = std::make_shared<const PhiExpr>(std::move(l));
    e.right_ = std::make_shared<const PhiExpr>(std::move(r));
    return e;
}

PhiExpr PhiExpr::conj(PhiExpr l, PhiExpr r) { return binary(Kind::And, std::move(l), std::move(r)); }
PhiExpr PhiExpr::disj(PhiExpr l, PhiExpr r) { return binary(Kind::Or, std::move(l), std::move(r)); }
PhiExpr PhiExpr::oplus(PhiExpr l, PhiExpr r) { return binary(Kind::Oplus, std::move(l), std::move(r)); }

bool operator==(const PhiExpr& a, const PhiExpr& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
    case PhiExpr::Kind::Const1: return true;
    case PhiExpr::Kind::Atom: return a.id_ == b.id_;
    case PhiExpr::Kind::Scal: return a.coef_ == b.coef_ && *a.left_ == *b.left_;
    default: return *a.left_ == *b.left_ && *a.right_ == *b.right_;
    }
}

namespace {

class PhiParser {
public:
    explicit PhiParser(std::string_view text) : s_(text) {}

    PhiExpr parse() {
        PhiExpr e = expr();
        skip();
        if (p_ != s_.size()) throw PhiSyntaxError("unexpected '" + std::string(1, s_[p_]) + "'", p_);
        return e;
    }

private:
    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool peek(char c) {
        skip();
        return p_ < s_.size() && s_[p_] == c;
    }

    void expect(char c) {
        if (!peek(c)) {
            const std::string got = p_ < s_.size() ? "'" + std::string(1, s_[p_]) + "'" : "end of input";
            throw PhiSyntaxError("expected '" + std::string(1, c) + "' but found " + got, p_);
        }
        ++p_;
    }

    std::string digits() {
        const std::size_t start = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        if (start == p_) throw PhiSyntaxError("expected digits", p_);
        return std::string(s_.substr(start, p_ - start));
    }

    PhiExpr expr() {
        skip();
        if (p_ >= s_.size()) throw PhiSyntaxError("unexpected end of input", p_);
        const char c = s_[p_];
        if (c == '(') {
            ++p_;
            PhiExpr l = expr();
            skip();
            if (p_ >= s_.size()) throw PhiSyntaxError("expected '&', '|' or '+' but found end of input", p_);
            const char op = s_[p_];
            if (op != '&' && op != '|' && op != '+')
                throw PhiSyntaxError("expected '&', '|' or '+' but found '" + std::string(1, op) + "'", p_);
            ++p_;
            PhiExpr r = expr();
            expect(')');
            if (op == '&') return PhiExpr::conj(std::move(l), std::move(r));
            if (op == '|') return PhiExpr::disj(std::move(l), std::move(r));
            return PhiExpr::oplus(std::move(l), std::move(r));
        }
        if (s_.substr(p_, 3) == "phi") {
            p_ += 3;
            expect('(');
            skip();
            const std::size_t start = p_;
            while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_' || s_[p_] == '\''))
                ++p_;
            if (start == p_) throw PhiSyntaxError("expected a norm id", p_);
            std::string id(s_.substr(start, p_ - start));
            expect(')');
            return PhiExpr::atom(std::move(id));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = p_;
            std::string num = digits();
            std::string den = "1";
            if (p_ < s_.size() && s_[p_] == '/') {
                ++p_;
                den = digits();
            }
            if (!peek('*')) {
                if (num == "1" && den == "1") return PhiExpr::one();
                throw PhiSyntaxError("expected '*' after coefficient", p_);
            }
            ++p_;
            Rational r;
            try {
                r = Rational::parse(num + "/" + den);
            } catch (const std::exception& e) {
                throw PhiSyntaxError(e.what(), start);
            }
            if (r > 1) throw PhiSyntaxError("scale coefficient " + r.str() + " is outside [0,1]", start);
            return PhiExpr::scal(std::move(r), expr());
        }
        throw PhiSyntaxError("expected '1', 'phi(', '(' or a coefficient", p_);
    }

    std::string_view s_;
    std::size_t p_ = 0;
};

} // namespace

PhiExpr parse_phi(std::string_view text) { return PhiParser(text).parse(); }

std::string print(const PhiExpr& e) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1: return "1";
    case PhiExpr::Kind::Atom: return "phi(" + e.id() + ")";
    case PhiExpr::Kind::Scal: return e.coefficient().str() + "*" + print(e.child());
    case PhiExpr::Kind::And: return "(" + print(e.left()) + " & " + print(e.right()) + ")";
    case PhiExpr::Kind::Or: return "(" + print(e.left()) + " | " + print(e.right()) + ")";
    case PhiExpr::Kind::Oplus: return "(" + print(e.left()) + " + " + print(e.right()) + ")";
    }
    return {};
}

bool phi_at_most(const PhiValue& v, const Rational& r) {
    if (v.exact) return v.q <= r;
    return v.f <= r.to_double() + phi_tolerance;
}

const NormSpec& EvalContext::lookup(const std::string& id) const {
    auto it = registry.find(id);
    if (it == registry.end()) throw std::invalid_argument("unresolved atom phi(" + id + ")");
    return it->second;
}

namespace {

PhiValue combine(PhiExpr::Kind k, const PhiValue& a, const PhiValue& b) {
    if (a.exact && b.exact) {
        switch (k) {
        case PhiExpr::Kind::And: return PhiValue::of(min(a.q, b.q));
        case PhiExpr::Kind::Or: return PhiValue::of(max(a.q, b.q));
        default: return PhiValue::of(min(a.q + b.q, Rational(1)));
        }
    }
    const double x = a.as_double(), y = b.as_double();
    switch (k) {
    case PhiExpr::Kind::And: return PhiValue::of(std::min(x, y));
    case PhiExpr::Kind::Or: return PhiValue::of(std::max(x, y));
    default: return PhiValue::of(std::min(x + y, 1.0));
    }
}

} // namespace

PhiValue eval(const PhiExpr& e, const NormSpec& n, const EvalContext& ctx, EvalSession& session) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1: return PhiValue::of(Rational(1));
    case PhiExpr::Kind::Atom: {
        const PhiEstimate est = phi_of(ctx.lookup(e.id()), n, ctx.variant, ctx.pool, session);
        return est.exact ? PhiValue::of(*est.exact) : PhiValue::of(est.value);
    }
    case PhiExpr::Kind::Scal: {
        const PhiValue c = eval(e.child(), n, ctx, session);
        if (c.exact) return PhiValue::of(e.coefficient() * c.q);
        return PhiValue::of(e.coefficient().to_double() * c.f);
    }
    default:
        return combine(e.kind(), eval(e.left(), n, ctx, session), eval(e.right(), n, ctx, session));
    }
}

Rational mpv(const PhiExpr& e) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1:
    case PhiExpr::Kind::Atom: return Rational(1);
    case PhiExpr::Kind::Scal: return e.coefficient() * mpv(e.child());
    case PhiExpr::Kind::And: return min(mpv(e.left()), mpv(e.right()));
    case PhiExpr::Kind::Or: return max(mpv(e.left()), mpv(e.right()));
    case PhiExpr::Kind::Oplus: return min(mpv(e.left()) + mpv(e.right()), Rational(1));
    }
    return Rational(0);
}

namespace {

// Empty result: the subexpression puts no constraint on the norm.
std::optional<NormSpec> realize(const PhiExpr& e, const EvalContext& ctx) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1: return std::nullopt;
    case PhiExpr::Kind::Atom: return ctx.lookup(e.id());
    case PhiExpr::Kind::Scal:
        if (mpv(e).is_zero()) return std::nullopt;
        return realize(e.child(), ctx);
    default: {
        std::optional<NormSpec> out;
        for (const PhiExpr* c : {&e.left(), &e.right()}) {
            if (mpv(*c).is_zero()) continue;
            auto r = realize(*c, ctx);
            if (!r) continue;
            out = out ? NormSpec::join(*out, *r) : *r;
        }
        return out;
    }
    }
}

// First atom in reading order, if any.
const std::string* first_atom(const PhiExpr& e) {
    switch (e.kind()) {
    case PhiExpr::Kind::Const1: return nullptr;
    case PhiExpr::Kind::Atom: return &e.id();
    case PhiExpr::Kind::Scal: return first_atom(e.child());
    default: {
        const std::string* l = first_atom(e.left());
        return l ? l : first_atom(e.right());
    }
    }
}

} // namespace

Realization approx_realizer(const PhiExpr& e, const Rational& epsilon, const EvalContext& ctx, EvalSession& session) {
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
    if (mpv(e).is_zero()) throw std::invalid_argument("mpv is 0; no realizer is promised");
    std::optional<NormSpec> n = realize(e, ctx);
    if (!n) {
        // any norm will do; prefer one the expression mentions
        if (const std::string* id = first_atom(e))
            n = ctx.lookup(*id);
        else if (ctx.registry.empty())
            throw std::invalid_argument("no registered norm to realize the constant 1");
        else
            n = ctx.registry.begin()->second;
    }
    Realization r{*n, eval(e, *n, ctx, session)};
    return r;
}

} // namespace tsirelson
