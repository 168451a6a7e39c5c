#pragma once

// Invariant factors from determinantal divisors: d_k = gcd of all k x k
// minors, invariant factor k = d_k / d_{k-1}. Exponential, small matrices only.

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<mpz_class>>;

inline mpz_class determinant(Matrix m)
{
    // fraction-free Bareiss elimination
    const std::size_t n = m.size();
    mpz_class sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && m[r][k] == 0)
                ++r;
            if (r == n)
                return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

inline void for_each_subset(std::size_t n, std::size_t k, std::vector<std::size_t>& cur, std::size_t from,
                            const auto& fn)
{
    if (cur.size() == k) {
        fn(cur);
        return;
    }
    for (std::size_t i = from; i < n; ++i) {
        cur.push_back(i);
        for_each_subset(n, k, cur, i + 1, fn);
        cur.pop_back();
    }
}

// Nonzero invariant factors (including 1s) in divisor order.
inline std::vector<mpz_class> invariant_factors(const Matrix& m)
{
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<mpz_class> out;
    mpz_class prev = 1;
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        mpz_class g = 0;
        std::vector<std::size_t> rs;
        for_each_subset(rows, k, rs, 0, [&](const std::vector<std::size_t>& ri) {
            std::vector<std::size_t> cs;
            for_each_subset(cols, k, cs, 0, [&](const std::vector<std::size_t>& ci) {
                Matrix sub(k, std::vector<mpz_class>(k));
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b)
                        sub[a][b] = m[ri[a]][ci[b]];
                mpz_class d = determinant(sub);
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
            });
        });
        if (g == 0)
            break;
        out.push_back(g / prev);
        prev = g;
    }
    return out;
}

} // namespace oracle
