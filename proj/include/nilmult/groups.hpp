#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nilmult/subgroups.hpp"

namespace nilmult {

/// The nth nilpotent product Z_{m_1} *n ... *n Z_{m_k}, plus the class c of
/// the variety for Baer-invariant requests.
struct NilpotentProductSpec {
    std::vector<std::uint64_t> factors;
    int n = 1;
    int c = 1;

    int gens() const { return static_cast<int>(factors.size()); }

    /// Throws InvalidInput unless every m_i >= 2, n >= 1, c >= 1 and k >= 1.
    void validate() const;

    /// "factors=2,2;n=2;c=3"; c may be omitted (defaults to 1).
    static NilpotentProductSpec parse(std::string_view text);
    std::string to_string() const;

    /// {"factors":[2,2],"n":2,"c":3}
    static NilpotentProductSpec from_json(std::string_view text);
    std::string to_json() const;

    friend bool operator==(const NilpotentProductSpec&, const NilpotentProductSpec&) = default;
};

/// Subgroups of Q = F/gamma_{L+1}(F) attached to a cyclic-factor spec.
/// R_closure is the normal closure of the relators x_i^{m_i}, K_n the part of
/// gamma_{n+1} inside the cartesian subgroup, L_n = R_closure K_n the kernel
/// onto the nilpotent product.
struct NamedSubgroups {
    GroupPtr group;
    InducedSequence R_closure;
    InducedSequence K_n;
    InducedSequence L_n;
    InducedSequence D_1;
    InducedSequence D_c;
    InducedSequence E_c;
};

/// Free nilpotent group on the spec's generators, of class `max_weight`.
GroupPtr ambient_group(const NilpotentProductSpec& spec, int max_weight);

/// Normal closure of {[x_i, x_j] : i != j}.
InducedSequence cartesian_subgroup(const GroupPtr& group);

/// The relators x_i^{m_i}.
std::vector<GroupElement> relators(const NilpotentProductSpec& spec, const GroupPtr& group);

/// R_closure = <<x_i^{m_i}>>.
InducedSequence relator_closure(const NilpotentProductSpec& spec, const GroupPtr& group);

/// K_j = gamma_{j+1}(Q) meet the cartesian subgroup. For cyclic factors this is
/// gamma_{j+1}(Q); the equality is checked and InternalError thrown otherwise.
InducedSequence cartesian_tail(const GroupPtr& group, int j);

/// D_1 = <<[x_i^{m_i}, x_j] : i != j>>.
InducedSequence d_one(const NilpotentProductSpec& spec, const GroupPtr& group);

/// D_c = <<[x_i^{m_i}, x_{u_1}, ..., x_{u_c}] : some u_j != i>>.
InducedSequence d_class(const NilpotentProductSpec& spec, const GroupPtr& group, int c);

/// All named subgroups for spec.n and spec.c inside `group`.
NamedSubgroups build_named_subgroups(const NilpotentProductSpec& spec, const GroupPtr& group);

/// |Z_{m_1} *n ... *n Z_{m_k}|, as the index of L_n in the free nilpotent group of class n.
Integer group_order(const NilpotentProductSpec& spec);

/// Checks on `trials` random elements of G = Q/L_n that g = a_1 ... a_k u with
/// a_i a power of x_i below m_i and u in the cartesian image, and that no other
/// choice of the a_i works.
bool unique_normal_form_check(const NilpotentProductSpec& spec, int trials, std::uint64_t seed = 1);

} // namespace nilmult
