#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "nilmult/groups.hpp"

namespace nilmult {

/// N_cM(G) = (R ∩ gamma_{c+1}(F)) / [R, _c F] for G = F/R the nilpotent product in `spec`.
struct BaerResult {
    NilpotentProductSpec spec;
    AbelianInvariants invariants;
    Integer group_order;
    int ambient_class = 0;
    std::size_t basis_size = 0;
    double seconds = 0; // not serialized

    /// {"factors":[2,2],"n":2,"c":3,"invariants":["2","2","4"],"group_order":"8","ambient_class":5,"basis_size":14}
    std::string to_json() const;
    static BaerResult from_json(std::string_view text);

    /// Same fields as the JSON record, on one line, invariants as "Z2 + Z2 + Z4".
    std::string to_text() const;

    /// Equality of everything but the timing.
    bool same_values(const BaerResult& other) const;
};

/// Computed in the free nilpotent group of class n + c, where the quotient is
/// already exact because R contains gamma_{n+1}(F).
BaerResult baer_invariant(const NilpotentProductSpec& spec);

/// N_cM(F/R) for R the normal closure of `relators` in `group`, of class L.
/// Exact when F/R has class at most L - c, which is checked as
/// gamma_{L-c+1}(Q) ⊆ R (PreconditionViolation otherwise).
AbelianInvariants baer_invariant_of_presentation(const GroupPtr& group, const std::vector<GroupElement>& relators, int c);

/// baer_invariant with c = 1.
BaerResult schur_multiplier(NilpotentProductSpec spec);

/// [A, B, _{n-1} A*B] / [A, B, _n A*B] modulo the relators, for exactly two
/// cyclic factors A, B. Rejects other factor counts with InvalidInput.
AbelianInvariants product_section(const NilpotentProductSpec& spec);

/// Closed form for Z2 *n Z2: Z_{2^c} when c < n, otherwise r(c+1) - 1 copies
/// of Z2 plus Z_{2^n}, where r(w) counts basic commutators of weight w on two letters.
AbelianInvariants two_involution_oracle(int n, int c);

/// The result is finite and every prime dividing its order divides |G|.
bool schur_baer_check(const BaerResult& result);

/// JSON-lines store of results keyed by (factors, n, c). Loads the file on
/// construction; store() appends one line. Safe for concurrent use; identical
/// keys resolve last-writer-wins, which is harmless since values are deterministic.
class ResultCache {
public:
    explicit ResultCache(std::string path);

    std::optional<BaerResult> lookup(const NilpotentProductSpec& spec) const;
    void store(const BaerResult& result);
    std::vector<BaerResult> entries() const;
    const std::string& path() const { return path_; }

private:
    using Key = std::tuple<std::vector<std::uint64_t>, int, int>;
    static Key key_of(const NilpotentProductSpec& spec);

    std::string path_;
    mutable std::mutex mutex_;
    std::map<Key, BaerResult> entries_;
};

} // namespace nilmult
