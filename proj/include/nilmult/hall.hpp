#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nilmult/limits.hpp"

namespace nilmult {

/// A basic commutator. Leaves are the free generators x1..xd; every other
/// element is the bracket [left, right] of two earlier basis elements.
struct BasicCommutator {
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::size_t id = 0;
    int weight = 1;
    std::size_t left = none;
    std::size_t right = none;
    int letter = -1; // 0-based generator index for leaves, -1 otherwise

    bool is_generator() const { return letter >= 0; }
};

/// Hall basis of the free nilpotent group on `gens` letters of class `max_weight`.
///
/// Elements are ordered by weight; within a weight block they appear in the
/// order the inductive construction discovers them, scanning candidate pairs
/// [u, v] by increasing id of v, then of u. Immutable after construction.
class HallBasis {
public:
    /// Throws InvalidInput for gens < 1 or max_weight < 1 and
    /// ResourceLimitExceeded when the basis would exceed `max_size`.
    static HallBasis generate(int gens, int max_weight, std::size_t max_size);
    static HallBasis generate(int gens, int max_weight);

    int gens() const { return gens_; }
    int max_weight() const { return max_weight_; }
    std::size_t size() const { return elements_.size(); }

    const BasicCommutator& operator[](std::size_t id) const { return elements_[id]; }
    const std::vector<BasicCommutator>& elements() const { return elements_; }

    /// First id of the weight-w block; weight_begin(max_weight + 1) == size().
    std::size_t weight_begin(int w) const;
    std::size_t weight_end(int w) const { return weight_begin(w + 1); }
    std::size_t weight_count(int w) const { return weight_end(w) - weight_begin(w); }

    /// Id of the basic commutator [left, right], or BasicCommutator::none.
    std::size_t find(std::size_t left, std::size_t right) const;

    /// Left-normed rendering: [[x2,x1],x1] prints as "[x2,x1,x1]".
    std::string render(std::size_t id) const;

    /// Plain-text serialization, one "id weight left right" line per element
    /// after a "hall <gens> <max_weight>" header.
    std::string serialize() const;
    /// Inverse of serialize(); validates every structural invariant.
    static HallBasis deserialize(const std::string& text);

    friend bool operator==(const HallBasis& a, const HallBasis& b);

private:
    HallBasis() = default;
    void add(BasicCommutator bc);

    int gens_ = 0;
    int max_weight_ = 0;
    std::vector<BasicCommutator> elements_;
    std::vector<std::size_t> weight_offsets_; // indexed by weight, size max_weight + 2
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pairs_;
};

/// Number of basic commutators of weight w on d letters:
/// (1/w) * sum_{k | w} mobius(k) * d^(w/k), computed exactly.
Integer witt(int d, int w);

/// Möbius function.
int mobius(std::uint64_t k);

} // namespace nilmult
