#include "tsirelson/vector.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <stdexcept>

namespace tsirelson {

IndexSet::IndexSet(std::initializer_list<Index> idx) : IndexSet(std::vector<Index>(idx)) {}

IndexSet::IndexSet(std::vector<Index> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    if (!idx_.empty() && idx_.front() == 0)
        throw std::invalid_argument("index sets hold 1-based indices");
}

Index IndexSet::min() const {
    if (idx_.empty()) throw std::invalid_argument("empty index set has no minimum");
    return idx_.front();
}

Index IndexSet::max() const {
    if (idx_.empty()) throw std::invalid_argument("empty index set has no maximum");
    return idx_.back();
}

bool IndexSet::contains(Index i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
}

namespace {

// Sorts, drops zero runs, rejects overlaps, merges equal neighbours.
std::vector<Block> canonicalize(std::vector<Block> blocks) {
    std::erase_if(blocks, [](const Block& b) { return b.value.is_zero(); });
    for (const auto& b : blocks) {
        if (b.first == 0) throw std::invalid_argument("indices are 1-based; index 0 is not allowed");
        if (b.last < b.first) throw std::invalid_argument("run with last < first");
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const Block& a, const Block& b) { return a.first < b.first; });
    std::vector<Block> out;
    out.reserve(blocks.size());
    for (auto& b : blocks) {
        if (!out.empty()) {
            Block& prev = out.back();
            if (b.first <= prev.last)
                throw std::invalid_argument("overlapping entries at index " + std::to_string(b.first));
            if (b.first == prev.last + 1 && b.value == prev.value) {
                prev.last = b.last;
                continue;
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace

FiniteVector FiniteVector::from_entries(std::vector<std::pair<Index, Rational>> entries) {
    std::vector<Block> blocks;
    blocks.reserve(entries.size());
    for (auto& [i, v] : entries) blocks.push_back(Block{i, i, std::move(v)});
    return FiniteVector(canonicalize(std::move(blocks)));
}

FiniteVector FiniteVector::from_blocks(std::vector<Block> blocks) {
    return FiniteVector(canonicalize(std::move(blocks)));
}

FiniteVector FiniteVector::basis(Index j) { return from_blocks({Block{j, j, Rational(1)}}); }

FiniteVector FiniteVector::flat(Index first, Index last, const Rational& value) {
    return from_blocks({Block{first, last, value}});
}

std::uint64_t FiniteVector::support_size() const {
    std::uint64_t n = 0;
    for (const auto& b : blocks_) n += b.length();
    return n;
}

Index FiniteVector::min_index() const {
    if (blocks_.empty()) throw std::invalid_argument("zero vector has empty support");
    return blocks_.front().first;
}

Index FiniteVector::max_index() const {
    if (blocks_.empty()) throw std::invalid_argument("zero vector has empty support");
    return blocks_.back().last;
}

std::vector<std::pair<Index, Rational>> FiniteVector::entries(std::uint64_t limit) const {
    if (support_size() > limit)
        throw std::length_error("support of " + std::to_string(support_size()) +
                                " indices exceeds expansion limit " + std::to_string(limit));
    std::vector<std::pair<Index, Rational>> out;
    out.reserve(support_size());
    for (const auto& b : blocks_)
        for (Index i = b.first; i <= b.last; ++i) out.emplace_back(i, b.value);
    return out;
}

Rational FiniteVector::at(Index i) const {
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), i,
                               [](Index v, const Block& b) { return v < b.first; });
    if (it == blocks_.begin()) return Rational(0);
    --it;
    return i <= it->last ? it->value : Rational(0);
}

FiniteVector FiniteVector::restrict_to(const IndexSet& e) const {
    std::vector<Block> out;
    for (Index i : e.indices()) {
        Rational v = at(i);
        if (!v.is_zero()) out.push_back(Block{i, i, std::move(v)});
    }
    return from_blocks(std::move(out));
}

FiniteVector FiniteVector::restrict_to_interval(Index lo, Index hi) const {
    std::vector<Block> out;
    for (const auto& b : blocks_) {
        const Index a = std::max(b.first, lo);
        const Index z = std::min(b.last, hi);
        if (a <= z) out.push_back(Block{a, z, b.value});
    }
    return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::scaled(const Rational& c) const {
    if (c.is_zero()) return {};
    std::vector<Block> out = blocks_;
    for (auto& b : out) b.value *= c;
    return FiniteVector(std::move(out));
}

FiniteVector FiniteVector::abs() const {
    std::vector<Block> out = blocks_;
    for (auto& b : out) b.value = tsirelson::abs(b.value);
    return from_blocks(std::move(out));
}

FiniteVector FiniteVector::operator+(const FiniteVector& o) const {
    // Sweep over all run boundaries of both operands.
    std::vector<Index> cuts;
    for (const auto* v : {this, &o})
        for (const auto& b : v->blocks_) {
            cuts.push_back(b.first);
            cuts.push_back(b.last + 1);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Block> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Rational v = at(cuts[k]) + o.at(cuts[k]);
        if (!v.is_zero()) out.push_back(Block{cuts[k], cuts[k + 1] - 1, std::move(v)});
    }
    return from_blocks(std::move(out));
}

std::string FiniteVector::literal() const {
    std::string s;
    for (const auto& b : blocks_) {
        if (!s.empty()) s += ',';
        s += std::to_string(b.first);
        if (b.last != b.first) s += ".." + std::to_string(b.last);
        s += ':' + b.value.str();
    }
    return s;
}

namespace {

Index parse_index(std::string_view s, std::string_view term) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("malformed index in term '" + std::string(term) + "'");
    if (s.size() > 19) throw std::invalid_argument("index out of range in '" + std::string(term) + "'");
    const Index i = std::stoull(std::string(s));
    if (i == 0) throw std::invalid_argument("indices are 1-based; index 0 is not allowed");
    return i;
}

} // namespace

FiniteVector parse_vector(std::string_view text) {
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    std::vector<Block> blocks;
    std::string_view rest = compact;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view term = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (term.empty()) throw std::invalid_argument("empty term in vector literal");
        const auto colon = term.find(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("term '" + std::string(term) + "' lacks ':'");
        std::string_view where = term.substr(0, colon);
        Rational value = Rational::parse(term.substr(colon + 1));
        const auto dots = where.find("..");
        Index first = 0;
        Index last = 0;
        if (dots == std::string_view::npos) {
            first = last = parse_index(where, term);
        } else {
            first = parse_index(where.substr(0, dots), term);
            last = parse_index(where.substr(dots + 2), term);
            if (last < first) throw std::invalid_argument("empty run in '" + std::string(term) + "'");
        }
        blocks.push_back(Block{first, last, std::move(value)});
    }
    // Reject overlaps including those hidden by zero-valued terms.
    std::vector<std::pair<Index, Index>> spans;
    for (const auto& b : blocks) spans.emplace_back(b.first, b.last);
    std::sort(spans.begin(), spans.end());
    for (std::size_t k = 1; k < spans.size(); ++k)
        if (spans[k].first <= spans[k - 1].second)
            throw std::invalid_argument("index " + std::to_string(spans[k].first) + " given twice");
    return FiniteVector::from_blocks(std::move(blocks));
}

FiniteVector restrict(const FiniteVector& x, const IndexSet& e) { return x.restrict_to(e); }

Rational sup_norm(const FiniteVector& x) {
    Rational best(0);
    for (const auto& b : x.blocks()) best = max(best, abs(b.value));
    return best;
}

Rational l1_norm(const FiniteVector& x) {
    Rational total(0);
    for (const auto& b : x.blocks())
        total += abs(b.value) * Rational(mpz_class(static_cast<unsigned long>(b.length())));
    return total;
}

FiniteVector normalize_l1(const FiniteVector& x) {
    if (x.is_zero()) throw std::domain_error("cannot normalize zero");
    return x.scaled(Rational(1) / l1_norm(x));
}

bool precedes(const IndexSet& e, const IndexSet& f, bool strict) {
    if (e.empty() || f.empty()) throw std::invalid_argument("precedes: index sets must be nonempty");
    return strict ? e.max() < f.min() : e.max() <= f.min();
}

} // namespace tsirelson
