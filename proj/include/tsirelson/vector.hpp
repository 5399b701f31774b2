#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsirelson/rational.hpp"

namespace tsirelson {

/// 1-based coordinate index into c00.
using Index = std::uint64_t;

/// Constant run [first, last] carrying one nonzero value.
struct Block {
    Index first = 1;
    Index last = 1;
    Rational value;

    std::uint64_t length() const { return last - first + 1; }
    friend bool operator==(const Block&, const Block&) = default;
};

/// Sorted finite set of positive indices.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::initializer_list<Index> idx);
    explicit IndexSet(std::vector<Index> idx);

    bool empty() const { return idx_.empty(); }
    std::size_t size() const { return idx_.size(); }
    Index min() const;
    Index max() const;
    bool contains(Index i) const;
    const std::vector<Index>& indices() const { return idx_; }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<Index> idx_;
};

/// Finitely supported sequence of exact rationals.
///
/// Stored in block form only: runs are sorted, disjoint, carry nonzero
/// values, and adjacent runs with equal values are merged. A sparse vector is
/// the special case where every run has length one, so two vectors are equal
/// exactly when their block lists are equal.
class FiniteVector {
public:
    FiniteVector() = default;

    static FiniteVector from_entries(std::vector<std::pair<Index, Rational>> entries);
    static FiniteVector from_blocks(std::vector<Block> blocks);
    static FiniteVector basis(Index j);
    static FiniteVector flat(Index first, Index last, const Rational& value);

    bool is_zero() const { return blocks_.empty(); }
    std::uint64_t support_size() const;
    Index min_index() const;
    Index max_index() const;
    const std::vector<Block>& blocks() const { return blocks_; }

    /// Expanded (index, value) list. Throws std::length_error when the
    /// support is larger than `limit`.
    std::vector<std::pair<Index, Rational>> entries(std::uint64_t limit = 1u << 24) const;
    Rational at(Index i) const;

    FiniteVector restrict_to(const IndexSet& e) const;
    FiniteVector restrict_to_interval(Index lo, Index hi) const;
    FiniteVector scaled(const Rational& c) const;
    FiniteVector abs() const;
    FiniteVector operator+(const FiniteVector& o) const;

    /// Canonical literal: singleton runs as "i:v", longer runs as "a..b:v".
    std::string literal() const;

    friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

private:
    explicit FiniteVector(std::vector<Block> canonical) : blocks_(std::move(canonical)) {}
    std::vector<Block> blocks_;
};

/// Parses `3:1,4:-1/2` or `7..13:1/7` (whitespace ignored). Indices must be
/// strictly positive; runs may not overlap. Throws std::invalid_argument.
FiniteVector parse_vector(std::string_view text);

FiniteVector restrict(const FiniteVector& x, const IndexSet& e);
Rational sup_norm(const FiniteVector& x);
Rational l1_norm(const FiniteVector& x);
FiniteVector normalize_l1(const FiniteVector& x);

/// E <= F (max E <= min F), or E < F when `strict`.
bool precedes(const IndexSet& e, const IndexSet& f, bool strict);

} // namespace tsirelson
