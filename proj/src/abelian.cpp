#include "nilmult/abelian.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "nilmult/errors.hpp"

namespace nilmult {

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw InvalidInput("integer matrix rows must all have the same length");
        for (long v : r)
            data_.emplace_back(v);
    }
}

void IntegerMatrix::append_row(const std::vector<Integer>& row)
{
    if (rows_ == 0 && cols_ == 0)
        cols_ = row.size();
    if (row.size() != cols_)
        throw InvalidInput(fmt::format("row of length {} appended to a matrix with {} columns", row.size(), cols_));
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
}

namespace {

void swap_rows(IntegerMatrix& m, std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t j = 0; j < m.cols(); ++j)
        std::swap(m(a, j), m(b, j));
}

void swap_cols(IntegerMatrix& m, std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t i = 0; i < m.rows(); ++i)
        std::swap(m(i, a), m(i, b));
}

// row dst -= q * row src, from column `from` on
void sub_row(IntegerMatrix& m, std::size_t dst, std::size_t src, const Integer& q, std::size_t from)
{
    for (std::size_t j = from; j < m.cols(); ++j)
        if (m(src, j) != 0)
            m(dst, j) -= q * m(src, j);
}

void sub_col(IntegerMatrix& m, std::size_t dst, std::size_t src, const Integer& q, std::size_t from)
{
    for (std::size_t i = from; i < m.rows(); ++i)
        if (m(i, src) != 0)
            m(i, dst) -= q * m(i, src);
}

// moves the smallest nonzero |entry| of the trailing block to (t, t)
bool place_pivot(IntegerMatrix& m, std::size_t t)
{
    std::size_t bi = 0;
    std::size_t bj = 0;
    bool found = false;
    for (std::size_t i = t; i < m.rows(); ++i)
        for (std::size_t j = t; j < m.cols(); ++j)
            if (m(i, j) != 0 && (!found || mpz_cmpabs(m(i, j).get_mpz_t(), m(bi, bj).get_mpz_t()) < 0)) {
                bi = i;
                bj = j;
                found = true;
            }
    if (!found)
        return false;
    swap_rows(m, t, bi);
    swap_cols(m, t, bj);
    return true;
}

} // namespace

std::vector<Integer> smith_diagonal(IntegerMatrix m)
{
    const std::size_t steps = std::min(m.rows(), m.cols());
    std::vector<Integer> diag(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        if (!place_pivot(m, t))
            break;
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m.rows(); ++i) {
                if (m(i, t) == 0)
                    continue;
                Integer q = m(i, t) / m(t, t);
                sub_row(m, i, t, q, t);
                clean = clean && m(i, t) == 0;
            }
            for (std::size_t j = t + 1; j < m.cols(); ++j) {
                if (m(t, j) == 0)
                    continue;
                Integer q = m(t, j) / m(t, t);
                sub_col(m, j, t, q, t);
                clean = clean && m(t, j) == 0;
            }
            if (!clean) {
                // a remainder smaller than the pivot survived; re-pivot on row/column t
                place_pivot(m, t);
                continue;
            }
            // the pivot must divide the whole trailing block
            bool divides = true;
            for (std::size_t i = t + 1; i < m.rows() && divides; ++i)
                for (std::size_t j = t + 1; j < m.cols(); ++j)
                    if (m(i, j) != 0 && !mpz_divisible_p(m(i, j).get_mpz_t(), m(t, t).get_mpz_t())) {
                        sub_row(m, t, i, Integer(-1), t);
                        divides = false;
                        break;
                    }
            if (divides)
                break;
        }
        diag[t] = abs(m(t, t));
    }
    return diag;
}

AbelianInvariants smith_invariants(const IntegerMatrix& m, std::size_t n_generators)
{
    if (m.rows() > 0 && m.cols() != n_generators)
        throw InvalidInput(fmt::format("relation matrix has {} columns for {} generators", m.cols(), n_generators));
    AbelianInvariants out;
    std::size_t nonzero = 0;
    if (m.rows() > 0) {
        for (const auto& d : smith_diagonal(m)) {
            if (d == 0)
                continue;
            ++nonzero;
            if (d > 1)
                out.torsion.push_back(d);
        }
    }
    out.free_rank = n_generators - nonzero;
    for (std::size_t i = 1; i < out.torsion.size(); ++i)
        if (!mpz_divisible_p(out.torsion[i].get_mpz_t(), out.torsion[i - 1].get_mpz_t()))
            throw InternalError("Smith normal form produced a broken divisor chain");
    return out;
}

std::vector<Integer> prime_divisors(Integer n)
{
    if (n <= 0)
        throw InvalidInput("prime_divisors needs a positive integer");
    std::vector<Integer> out;
    for (Integer p = 2; p * p <= n; ++p) {
        if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            out.push_back(p);
            while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t()))
                n /= p;
        }
        if (n > 1 && mpz_probab_prime_p(n.get_mpz_t(), 40) == 2)
            break;
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

AbelianInvariants AbelianInvariants::from_cyclic_orders(const std::vector<Integer>& orders)
{
    AbelianInvariants out;
    std::map<Integer, std::vector<Integer>> powers; // prime -> prime-power parts
    for (Integer n : orders) {
        n = abs(n);
        if (n == 0) {
            ++out.free_rank;
            continue;
        }
        for (const auto& p : prime_divisors(n)) {
            Integer pk = 1;
            while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
                n /= p;
                pk *= p;
            }
            powers[p].push_back(pk);
        }
    }
    std::size_t len = 0;
    for (auto& [p, list] : powers) {
        std::sort(list.begin(), list.end(), std::greater<>());
        len = std::max(len, list.size());
    }
    // i-th largest invariant factor collects the i-th largest power of every prime
    std::vector<Integer> chain(len, 1);
    for (const auto& [p, list] : powers)
        for (std::size_t i = 0; i < list.size(); ++i)
            chain[len - 1 - i] *= list[i];
    out.torsion = std::move(chain);
    return out;
}

std::string AbelianInvariants::to_string() const
{
    if (is_trivial())
        return "trivial";
    std::string out;
    for (const auto& d : torsion) {
        if (!out.empty())
            out += " + ";
        out += "Z" + d.get_str();
    }
    for (std::size_t i = 0; i < free_rank; ++i) {
        if (!out.empty())
            out += " + ";
        out += "Z";
    }
    return out;
}

AbelianInvariants AbelianInvariants::parse(const std::string& text)
{
    std::istringstream is(text);
    std::string tok;
    std::vector<Integer> orders;
    bool expect_term = true;
    bool any = false;
    while (is >> tok) {
        if (tok == "trivial" && !any) {
            any = true;
            expect_term = false;
            continue;
        }
        if (expect_term) {
            if (tok.empty() || tok[0] != 'Z')
                throw InvalidInput(fmt::format("bad abelian group term '{}'", tok));
            const std::string digits = tok.substr(1);
            if (digits.empty()) {
                orders.emplace_back(0);
            } else {
                if (digits.find_first_not_of("0123456789") != std::string::npos)
                    throw InvalidInput(fmt::format("bad abelian group term '{}'", tok));
                orders.emplace_back(digits);
            }
            any = true;
            expect_term = false;
        } else {
            if (tok != "+")
                throw InvalidInput(fmt::format("expected '+' in abelian group, got '{}'", tok));
            expect_term = true;
        }
    }
    if (!any || expect_term)
        throw InvalidInput(fmt::format("incomplete abelian group description '{}'", text));
    return from_cyclic_orders(orders);
}

AbelianInvariants direct_sum(const AbelianInvariants& a, const AbelianInvariants& b)
{
    std::vector<Integer> orders = a.torsion;
    orders.insert(orders.end(), b.torsion.begin(), b.torsion.end());
    auto out = AbelianInvariants::from_cyclic_orders(orders);
    out.free_rank = a.free_rank + b.free_rank;
    return out;
}

std::optional<Integer> order(const AbelianInvariants& a)
{
    if (a.free_rank > 0)
        return std::nullopt;
    Integer n = 1;
    for (const auto& d : a.torsion)
        n *= d;
    return n;
}

bool quotient_dominates(const AbelianInvariants& g, const AbelianInvariants& q)
{
    std::vector<Integer> gs = g.torsion;
    gs.insert(gs.end(), g.free_rank, Integer(0));
    std::vector<Integer> qs = q.torsion;
    qs.insert(qs.end(), q.free_rank, Integer(0));
    if (qs.size() > gs.size())
        return false;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const Integer& a = qs[qs.size() - 1 - i];
        const Integer& b = gs[gs.size() - 1 - i];
        if (b == 0)
            continue;
        if (a == 0 || !mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()))
            return false;
    }
    return true;
}

} // namespace nilmult
