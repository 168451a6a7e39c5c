#pragma once

#include <cstddef>

#include <gmpxx.h>

namespace nilmult {

using Integer = mpz_class;

/// Resource caps shared by basis construction and collection.
struct Limits {
    std::size_t max_basis_size = 2000;
    std::size_t max_exponent_bits = 4096;

    friend bool operator==(const Limits&, const Limits&) = default;
};

/// Defaults used by every API that does not take explicit limits.
/// Set once at startup (the CLI does this from flags/env); read-only afterwards.
Limits& default_limits();

} // namespace nilmult
