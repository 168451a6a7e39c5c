#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nilmult/abelian.hpp"
#include "nilmult/engine.hpp"

namespace nilmult {

/// Canonical induced generating sequence of a subgroup H of a free nilpotent group Q.
///
/// Rows are in echelon form: strictly increasing leading basis index, positive
/// leading exponent, and every entry of a row sitting at another row's leading
/// index reduced into [0, that leader). Every element of H is uniquely
/// h_1^{c_1} ... h_m^{c_m}, and two subgroups are equal exactly when their row
/// lists are. Because the Hall order refines the weight grading, H meets
/// gamma_j(Q) in the rows whose leader has weight >= j.
class InducedSequence {
public:
    /// The trivial subgroup of `group`.
    explicit InducedSequence(GroupPtr group);

    const FreeNilpotentGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    const std::vector<GroupElement>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool is_trivial() const { return rows_.empty(); }

    /// Leading basis index of every row, ascending.
    std::vector<std::size_t> leaders() const;
    /// Leading exponent of every row, in row order.
    std::vector<Integer> leading_exponents() const;

    /// Debug dump: one row per line in word syntax.
    std::string dump() const;

    friend bool operator==(const InducedSequence& a, const InducedSequence& b);

private:
    friend class SubgroupBuilder;
    friend InducedSequence gamma_tail(const GroupPtr& group, int j);
    friend InducedSequence intersect_with_tail(const InducedSequence& h, int j);
    GroupPtr group_;
    std::vector<GroupElement> rows_;
};

/// The subgroup generated by `generators`. An empty list needs the group.
InducedSequence subgroup(const GroupPtr& group, const std::vector<GroupElement>& generators);
InducedSequence subgroup(const std::vector<GroupElement>& generators);

/// Smallest normal subgroup of Q containing `generators`.
InducedSequence normal_closure(const GroupPtr& group, const std::vector<GroupElement>& generators);

/// The whole group Q.
InducedSequence whole_group(const GroupPtr& group);

/// [H, K] for normal H and K: the normal closure of the commutators of their rows.
InducedSequence mutual_commutator(const InducedSequence& h, const InducedSequence& k);

/// [H, _c Q] = [H, Q, ..., Q] with c brackets, for normal H.
InducedSequence iterated_commutator_with_ambient(const InducedSequence& h, int c);

/// gamma_j(Q): generated by the basis elements of weight >= j.
InducedSequence gamma_tail(const GroupPtr& group, int j);

/// H ∩ gamma_j(Q).
InducedSequence intersect_with_tail(const InducedSequence& h, int j);

/// Coordinates c with g = h_1^{c_1} ... h_m^{c_m}, or nullopt if g is not in H.
std::optional<std::vector<Integer>> membership(const GroupElement& g, const InducedSequence& h);
bool contains(const InducedSequence& h, const GroupElement& g);

/// Subgroup generated by H and K (a subgroup product when one of them is normal).
InducedSequence product(const InducedSequence& h, const InducedSequence& k);

bool equal(const InducedSequence& h, const InducedSequence& k);
/// K ⊆ H.
bool contains(const InducedSequence& h, const InducedSequence& k);

/// Conjugates of every row by the generators of Q and their inverses lie in H.
bool verify_normal(const InducedSequence& h);

/// [Q : H], or nullopt when the index is infinite.
std::optional<Integer> index_in_ambient(const InducedSequence& h);

/// Canonical representative of the right coset H g, for normal H: each
/// exponent at a leading index is reduced into [0, leader).
GroupElement coset_representative(const GroupElement& g, const InducedSequence& h);

/// Invariants of H/K. Requires K ⊆ H, K normal in H and [H, H] ⊆ K; throws
/// PreconditionViolation otherwise.
AbelianInvariants quotient_invariants(const InducedSequence& h, const InducedSequence& k);

/// The element h_1^{c_1} ... h_m^{c_m}.
GroupElement expand(const InducedSequence& h, const std::vector<Integer>& coords);

} // namespace nilmult
