#pragma once

#include <string>
#include <vector>

#include "nilmult/baer.hpp"

namespace nilmult {

/// One checked case of a verification suite.
struct CaseReport {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string expected;
    std::string actual;
    std::string detail;

    std::string to_json() const;
    /// "PASS closed-form n=2 c=3: Z2 + Z2 + Z4"
    std::string to_text() const;
};

/// Baer invariants of Z2 *n Z2 against the closed form, for n <= n_max,
/// c <= c_max and n + c <= sum_max.
std::vector<CaseReport> verify_closed_form(int n_max, int c_max, int sum_max, int jobs = 1);

/// |M(Z_m1 x Z_m2)| = gcd(m1, m2) for 2 <= m1, m2 <= m_max.
std::vector<CaseReport> verify_schur(int m_max, int jobs = 1);

/// The product section equals the multiplier of the direct product
/// (2 <= m_i <= m_max), and for Z2 *n Z2 the multiplier has the order of the
/// section for n <= n_max.
std::vector<CaseReport> verify_section(int m_max, int n_max, int jobs = 1);

/// Subgroup identities between the named subgroups of `spec`, in the free
/// nilpotent group of class n + c.
std::vector<CaseReport> verify_lemmas(const NilpotentProductSpec& spec);

/// The specs (2,2), (2,3), (2,2,2) with n, c in {1, 2}.
std::vector<NilpotentProductSpec> default_lemma_specs();

bool all_pass(const std::vector<CaseReport>& reports);

} // namespace nilmult
