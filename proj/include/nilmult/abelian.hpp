#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nilmult/limits.hpp"

namespace nilmult {

/// Dense integer matrix; each row is read as one relation in the columns.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    /// Throws InvalidInput if the rows are ragged.
    IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    void append_row(const std::vector<Integer>& row);

    friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

/// A finitely generated abelian group Z_{d_1} + ... + Z_{d_r} + Z^free_rank
/// with d_1 | d_2 | ... | d_r and every d_i >= 2.
struct AbelianInvariants {
    std::vector<Integer> torsion;
    std::size_t free_rank = 0;

    /// Normalizes arbitrary cyclic orders (0 means Z, 1 is dropped) into a divisor chain.
    static AbelianInvariants from_cyclic_orders(const std::vector<Integer>& orders);

    bool is_trivial() const { return torsion.empty() && free_rank == 0; }
    bool is_finite() const { return free_rank == 0; }

    /// "Z2 + Z2 + Z4", with "Z" for each free summand and "trivial" for the zero group.
    std::string to_string() const;
    /// Parses the to_string() format.
    static AbelianInvariants parse(const std::string& text);

    friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;
};

/// Invariants of <n_generators | rows of m>. Exact gcd-driven elimination
/// with the smallest nonzero entry as pivot.
AbelianInvariants smith_invariants(const IntegerMatrix& m, std::size_t n_generators);

/// Diagonal of the Smith normal form of m (length min(rows, cols), zeros included).
std::vector<Integer> smith_diagonal(IntegerMatrix m);

AbelianInvariants direct_sum(const AbelianInvariants& a, const AbelianInvariants& b);

/// Product of the torsion entries, or nullopt if the group is infinite.
std::optional<Integer> order(const AbelianInvariants& a);

/// True iff q is isomorphic to a quotient of g: invariant factors aligned from
/// the largest must divide componentwise, free summands counting as 0.
bool quotient_dominates(const AbelianInvariants& g, const AbelianInvariants& q);

/// Distinct primes dividing n > 0, ascending.
std::vector<Integer> prime_divisors(Integer n);

} // namespace nilmult
