#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nilmult/hall.hpp"
#include "nilmult/limits.hpp"

namespace nilmult {

/// One syllable x_{generator+1}^{exponent} of a word in the free group.
struct Letter {
    int generator = 0; // 0-based
    Integer exponent = 1;

    friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// Parses the word syntax
///
///     word    := factor*                      (separated by blanks or '*')
///     factor  := primary ('^' ['-'|'+'] digits)?
///     primary := 'x' digits | '1' | '(' word ')' | '[' word (',' word)+ ']'
///
/// into a flat word. Brackets are left-normed commutators:
/// [a,b] = a^-1 b^-1 a b and [a,b,c] = [[a,b],c]. "1" is the empty word.
/// Throws InvalidInput on syntax errors or letters outside x1..x`gens`.
Word parse_word(std::string_view text, int gens);

/// Renders a flat word as "x1^2 x2^-1 x1"; the empty word renders as "1".
std::string render_word(const Word& word);

Word inverse_word(const Word& word);

class FreeNilpotentGroup;
class GroupElement;

using Exponents = std::vector<Integer>;
using GroupPtr = std::shared_ptr<const FreeNilpotentGroup>;

/// The free nilpotent group Q = F / gamma_{L+1}(F) on d generators, with
/// arithmetic by collection over its Hall basis.
///
/// Every element is uniquely z_1^{e_1} z_2^{e_2} ... z_N^{e_N} where z_i runs
/// over the Hall basis in order and z_{[u,v]} is the group commutator
/// [z_u, z_v] = z_u^-1 z_v^-1 z_u z_v. Multiplication collects from the left
/// using, for every pair i < j of weight sum <= L, the normal forms of
/// z_j^{z_i^{+-1}} and their inverses. The tables are filled once at
/// construction, so a group is immutable and safe to share across threads.
class FreeNilpotentGroup : public std::enable_shared_from_this<FreeNilpotentGroup> {
public:
    static GroupPtr create(int gens, int max_weight, const Limits& limits);

    /// Shared instance for (gens, max_weight, default_limits()).
    static GroupPtr get(int gens, int max_weight);

    const HallBasis& basis() const { return basis_; }
    int gens() const { return basis_.gens(); }
    int max_weight() const { return basis_.max_weight(); }
    std::size_t rank() const { return basis_.size(); }
    const Limits& limits() const { return limits_; }

    GroupElement identity() const;
    /// x_{i+1} for 0-based i.
    GroupElement generator(int i) const;
    /// The element whose exponent vector is the indicator of basis element `id`.
    GroupElement eval_basic(std::size_t id) const;
    GroupElement element(Exponents exponents) const;

    GroupElement collect(const Word& word) const;
    GroupElement parse(std::string_view text) const;

    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;
    GroupElement power(const GroupElement& a, const Integer& e) const;
    GroupElement commutator(const GroupElement& a, const GroupElement& b) const;

    // Exponent-vector level arithmetic. Vectors must have length rank().

    /// v := v * z_p^k.
    void mul_gen_power(Exponents& v, std::size_t p, const Integer& k) const;
    /// a := a * b.
    void mul_into(Exponents& a, const Exponents& b) const;
    Exponents inverse_of(const Exponents& a) const;
    Exponents power_of(const Exponents& a, Integer e) const;
    Exponents commutator_of(const Exponents& a, const Exponents& b) const;

    std::string render(const Exponents& v) const;

    FreeNilpotentGroup(const FreeNilpotentGroup&) = delete;
    FreeNilpotentGroup& operator=(const FreeNilpotentGroup&) = delete;

private:
    struct Term {
        std::size_t index;
        Integer exponent;
    };
    using Sparse = std::vector<Term>;

    /// Images of z_q and z_q^-1 under conjugation by z_p (or z_p^-1).
    /// Empty when z_p and z_q commute.
    struct ConjugationRule {
        Sparse image;
        Sparse image_of_inverse;
    };

    FreeNilpotentGroup(HallBasis basis, const Limits& limits);
    void build_tables();

    /// h := h^(z_p^{dir}) for h supported strictly after p; dir is +1 or -1.
    Exponents conjugate_tail(const Exponents& h, std::size_t p, int dir) const;
    void mul_sparse(Exponents& v, const Sparse& s) const;
    void check_bits(const Integer& x) const;
    bool commutes_with_tail(const Exponents& v, std::size_t p) const;
    Sparse to_sparse(const Exponents& v) const;
    Exponents unit(std::size_t p) const;
    const ConjugationRule& rule(std::size_t p, std::size_t q, int dir) const;

    HallBasis basis_;
    Limits limits_;
    std::vector<int> weight_;
    // tail_limit_[p]: first index q whose weight makes z_q commute with z_p
    std::vector<std::size_t> tail_limit_;
    // forward_[p][q - p - 1] describes conjugation by z_p, backward_ by z_p^-1
    std::vector<std::vector<ConjugationRule>> forward_;
    std::vector<std::vector<ConjugationRule>> backward_;
};

/// Value-semantic element of a FreeNilpotentGroup, stored in normal form.
class GroupElement {
public:
    GroupElement(GroupPtr group, Exponents exponents);

    const FreeNilpotentGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    const Exponents& exponents() const { return exponents_; }
    const Integer& operator[](std::size_t i) const { return exponents_[i]; }
    std::size_t size() const { return exponents_.size(); }

    bool is_identity() const;
    /// Index of the first nonzero exponent, or size() for the identity.
    std::size_t leading() const;

    GroupElement operator*(const GroupElement& other) const;
    GroupElement inverse() const;
    GroupElement pow(const Integer& e) const;

    /// Word syntax, e.g. "x1^2 [x2,x1]^-1"; the identity renders as "1".
    std::string to_string() const;

    friend bool operator==(const GroupElement& a, const GroupElement& b);

private:
    GroupPtr group_;
    Exponents exponents_;
};

/// [a, b] = a^-1 b^-1 a b.
GroupElement commutator(const GroupElement& a, const GroupElement& b);
/// a^b = b^-1 a b.
GroupElement conjugate(const GroupElement& a, const GroupElement& b);

/// Throws InvalidInput unless a and b live in the same free nilpotent group.
void require_same_group(const GroupElement& a, const GroupElement& b);
bool same_group(const FreeNilpotentGroup& a, const FreeNilpotentGroup& b);

} // namespace nilmult
