#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nilmult/errors.hpp"
#include "nilmult/subgroups.hpp"
#include "oracles/todd_coxeter.hpp"

using namespace nilmult;

namespace {

std::vector<GroupElement> elems(const GroupPtr& g, std::initializer_list<const char*> words)
{
    std::vector<GroupElement> out;
    for (const char* w : words)
        out.push_back(g->parse(w));
    return out;
}

std::vector<std::size_t> ids(std::initializer_list<std::size_t> v)
{
    return v;
}

std::vector<Integer> ints(std::initializer_list<long> v)
{
    return {v.begin(), v.end()};
}

GroupElement random_element(const GroupPtr& g, std::mt19937_64& rng, int span = 3)
{
    std::uniform_int_distribution<int> dist(-span, span);
    Exponents e(g->rank());
    for (auto& x : e)
        x = dist(rng);
    return g->element(std::move(e));
}

// a random element with two nonzero exponents of weight <= 2
GroupElement sparse_element(const GroupPtr& g, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> dist(-3, 3);
    std::uniform_int_distribution<std::size_t> pos(0, g->basis().weight_end(2) - 1);
    Exponents e(g->rank());
    for (int k = 0; k < 2; ++k)
        e[pos(rng)] = dist(rng);
    return g->element(std::move(e));
}

oracle::Relator to_relator(const Word& w)
{
    oracle::Relator r;
    for (const auto& l : w) {
        const int e = static_cast<int>(l.exponent.get_si());
        for (int k = 0; k < std::abs(e); ++k)
            r.push_back(e > 0 ? l.generator + 1 : -(l.generator + 1));
    }
    return r;
}

} // namespace

TEST(Subgroup, TrivialAndDiagonal)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_TRUE(subgroup({g->identity()}).is_trivial());
    auto h = subgroup(elems(g, {"x1^2", "x2^2", "[x2,x1]^2"}));
    EXPECT_EQ(h.leaders(), ids({0, 1, 2}));
    EXPECT_EQ(h.leading_exponents(), ints({2, 2, 2}));
}

TEST(Subgroup, EmptyListNeedsGroup)
{
    EXPECT_THROW(subgroup(std::vector<GroupElement>{}), InvalidInput);
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_TRUE(subgroup(g, {}).is_trivial());
}

TEST(Subgroup, NormalClosureOfSquares)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto n = normal_closure(g, elems(g, {"x1^2", "x2^2"}));
    EXPECT_EQ(n.leaders(), ids({0, 1, 2}));
    EXPECT_EQ(n.leading_exponents(), ints({2, 2, 2}));
    EXPECT_EQ(index_in_ambient(n), std::optional<Integer>(8));
    // same subgroup when listed by its rows
    EXPECT_EQ(subgroup(n.rows()), n);
}

TEST(Subgroup, NormalClosureSmallCases)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_TRUE(normal_closure(g, {}).is_trivial());
    auto n = normal_closure(g, elems(g, {"x1"}));
    EXPECT_EQ(n.leaders(), ids({0, 2}));
    EXPECT_EQ(n.leading_exponents(), ints({1, 1}));
    EXPECT_TRUE(verify_normal(n));
    EXPECT_FALSE(verify_normal(subgroup(elems(g, {"x1"}))));
}

TEST(Subgroup, MutualCommutatorExamples)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto q = whole_group(g);
    auto c = mutual_commutator(q, q);
    EXPECT_EQ(c.leaders(), ids({2}));
    EXPECT_EQ(c.leading_exponents(), ints({1}));
    EXPECT_EQ(c, gamma_tail(g, 2));
    EXPECT_TRUE(mutual_commutator(q, InducedSequence(g)).is_trivial());
}

TEST(Subgroup, GammaTailExamples)
{
    auto g = FreeNilpotentGroup::get(2, 3);
    EXPECT_EQ(gamma_tail(g, 1), whole_group(g));
    EXPECT_TRUE(gamma_tail(g, 4).is_trivial());
    auto t = gamma_tail(g, 2);
    ASSERT_EQ(t.size(), 3u);
    std::vector<std::string> names;
    for (auto id : t.leaders())
        names.push_back(g->basis().render(id));
    EXPECT_EQ(names, (std::vector<std::string>{"[x2,x1]", "[x2,x1,x1]", "[x2,x1,x2]"}));
    EXPECT_EQ(t.leading_exponents(), ints({1, 1, 1}));
    EXPECT_THROW(gamma_tail(g, 0), InvalidInput);
}

TEST(Subgroup, IntersectWithTailExamples)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_EQ(intersect_with_tail(whole_group(g), 1), whole_group(g));
    auto n = normal_closure(g, elems(g, {"x1^2", "x2^2"}));
    auto t = intersect_with_tail(n, 2);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.rows()[0], g->parse("[x2,x1]^2"));

    auto g4 = FreeNilpotentGroup::get(2, 4);
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b)
            EXPECT_EQ(intersect_with_tail(gamma_tail(g4, a), b), gamma_tail(g4, std::max(a, b)));
}

TEST(Subgroup, MembershipExamples)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto n = normal_closure(g, elems(g, {"x1^2"}));
    EXPECT_TRUE(contains(n, g->identity()));
    EXPECT_TRUE(contains(InducedSequence(g), g->identity()));
    EXPECT_TRUE(contains(n, g->parse("[x2,x1]^2")));
    EXPECT_FALSE(contains(subgroup(elems(g, {"x1^2"})), g->parse("x1")));
    EXPECT_FALSE(contains(n, g->parse("x2")));
}

TEST(Subgroup, QuotientInvariantsExamples)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto gamma2 = gamma_tail(g, 2);
    auto sq = subgroup(elems(g, {"[x2,x1]^2"}));
    EXPECT_EQ(quotient_invariants(gamma2, sq).torsion, ints({2}));
    EXPECT_TRUE(quotient_invariants(gamma2, gamma2).is_trivial());
    auto q = whole_group(g);
    EXPECT_TRUE(quotient_invariants(q, q).is_trivial());

    auto ab = quotient_invariants(q, gamma2);
    EXPECT_TRUE(ab.torsion.empty());
    EXPECT_EQ(ab.free_rank, 2u);

    // abelianization of Q / <<x1^2, x2^2>> is Z2 + Z2
    auto n = normal_closure(g, elems(g, {"x1^2", "x2^2"}));
    EXPECT_EQ(quotient_invariants(q, product(n, gamma2)).torsion, ints({2, 2}));
}

TEST(Subgroup, QuotientInvariantsPreconditions)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto q = whole_group(g);
    auto sq = subgroup(elems(g, {"[x2,x1]^2"}));
    EXPECT_THROW(quotient_invariants(sq, q), PreconditionViolation);
    // Q is nonabelian modulo <[x2,x1]^2>
    EXPECT_THROW(quotient_invariants(q, sq), PreconditionViolation);
    // <x1> is not normal in Q
    EXPECT_THROW(quotient_invariants(q, subgroup(elems(g, {"x1"}))), PreconditionViolation);
}

TEST(Subgroup, QuotientInvariantsAgainstCosetEnumeration)
{
    // Q/N abelian for N = <<x1^a, x2^b>> gamma_2 has order ab; the enumerator
    // counts the abelianized presentation independently.
    auto g = FreeNilpotentGroup::get(2, 3);
    auto q = whole_group(g);
    for (int a = 2; a <= 4; ++a)
        for (int b = 2; b <= 4; ++b) {
            auto n = product(normal_closure(g, {g->parse("x1^" + std::to_string(a)), g->parse("x2^" + std::to_string(b))}),
                             gamma_tail(g, 2));
            auto inv = quotient_invariants(q, n);
            auto expected = oracle::group_order(
                2, {oracle::rel_power(1, a), oracle::rel_power(2, b), oracle::rel_comm({1}, {2})});
            ASSERT_TRUE(expected.has_value());
            EXPECT_EQ(order(inv), std::optional<Integer>(*expected));
        }
}

TEST(Subgroup, IndexExamples)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_EQ(index_in_ambient(whole_group(g)), std::optional<Integer>(1));
    EXPECT_FALSE(index_in_ambient(InducedSequence(g)).has_value());
}

TEST(Subgroup, IndexAgainstCosetEnumeration)
{
    struct Case {
        int d;
        int L;
        std::vector<const char*> gens;
    };
    const std::vector<Case> cases{
        {2, 2, {"x1^2", "x2^2"}},
        {2, 2, {"x1^3", "x2^3"}},
        {2, 2, {"x1^2", "x2^4"}},
        {2, 3, {"x1^2", "x2^2"}},
        {2, 3, {"x1^2", "x2^3"}},
        {2, 4, {"x1^2", "x2^2"}},
        {2, 3, {"x1^2 x2", "x2^4"}},
        {2, 2, {"x1^4", "x2^2", "[x2,x1]^2"}},
        {3, 2, {"x1^2", "x2^2", "x3^2"}},
        {2, 3, {"x1^4", "x2^2", "[x2,x1,x2]"}},
    };
    for (const auto& c : cases) {
        auto g = FreeNilpotentGroup::get(c.d, c.L);
        std::vector<GroupElement> gens;
        std::vector<oracle::Relator> rels;
        for (const char* w : c.gens) {
            gens.push_back(g->parse(w));
            rels.push_back(to_relator(parse_word(w, c.d)));
        }
        for (auto& r : oracle::class_relators(c.d, c.L))
            rels.push_back(std::move(r));
        auto expected = oracle::group_order(c.d, rels);
        ASSERT_TRUE(expected.has_value()) << c.gens.front();
        auto n = normal_closure(g, gens);
        EXPECT_EQ(index_in_ambient(n), std::optional<Integer>(*expected)) << "d=" << c.d << " L=" << c.L << " " << n.dump();
    }
}

TEST(Subgroup, CanonicalUnderShuffle)
{
    std::mt19937_64 rng(21);
    for (auto [d, L] : {std::pair{2, 3}, std::pair{2, 4}, std::pair{3, 3}}) {
        auto g = FreeNilpotentGroup::get(d, L);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<GroupElement> gens;
            for (int k = 0; k < 3; ++k)
                gens.push_back(random_element(g, rng));
            auto h = subgroup(gens);
            auto shuffled = gens;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            // redundant products and inverses do not change the subgroup
            shuffled.push_back(gens[0] * gens[1].inverse());
            shuffled.push_back(gens[2].pow(3));
            EXPECT_EQ(subgroup(shuffled), h);
            EXPECT_EQ(normal_closure(g, shuffled), normal_closure(g, gens));
        }
    }
}

TEST(Subgroup, EchelonShapeAndClosure)
{
    std::mt19937_64 rng(4);
    auto g = FreeNilpotentGroup::get(2, 4);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<GroupElement> gens{random_element(g, rng), random_element(g, rng)};
        for (const auto& h : {subgroup(gens), normal_closure(g, gens)}) {
            const auto leaders = h.leaders();
            EXPECT_TRUE(std::is_sorted(leaders.begin(), leaders.end()));
            EXPECT_EQ(std::adjacent_find(leaders.begin(), leaders.end()), leaders.end());
            for (std::size_t i = 0; i < h.size(); ++i) {
                EXPECT_GT(h.rows()[i][leaders[i]], 0);
                for (std::size_t j = i + 1; j < h.size(); ++j) {
                    const auto& e = h.rows()[i][leaders[j]];
                    EXPECT_TRUE(e >= 0 && e < h.rows()[j][leaders[j]]);
                }
            }
            for (const auto& x : gens)
                EXPECT_TRUE(contains(h, x));
            for (const auto& a : h.rows()) {
                EXPECT_TRUE(contains(h, a.inverse()));
                for (const auto& b : h.rows())
                    EXPECT_TRUE(contains(h, a * b));
            }
        }
    }
}

TEST(Subgroup, GammaTailIsIteratedCommutator)
{
    for (int d = 1; d <= 3; ++d)
        for (int L = 1; L <= 6; ++L) {
            auto g = FreeNilpotentGroup::get(d, L);
            auto q = whole_group(g);
            for (int j = 2; j <= L + 1; ++j)
                EXPECT_EQ(iterated_commutator_with_ambient(q, j - 1), gamma_tail(g, j)) << d << " " << L << " " << j;
        }
}

TEST(Subgroup, IteratedCommutatorMatchesMutualCommutator)
{
    std::mt19937_64 rng(9);
    auto g = FreeNilpotentGroup::get(2, 4);
    auto q = whole_group(g);
    for (int trial = 0; trial < 5; ++trial) {
        auto h = normal_closure(g, {sparse_element(g, rng)});
        EXPECT_EQ(iterated_commutator_with_ambient(h, 1), mutual_commutator(h, q));
        EXPECT_EQ(iterated_commutator_with_ambient(h, 2), mutual_commutator(mutual_commutator(h, q), q));
        EXPECT_EQ(iterated_commutator_with_ambient(h, 0), h);
    }
}

TEST(Subgroup, CommutatorDistributesOverProducts)
{
    // [A M1 M2, N] = [A,N] [M1,N] [M2,N] for normal subgroups
    std::mt19937_64 rng(17);
    for (auto [d, L] : {std::pair{2, 4}, std::pair{3, 3}}) {
        auto g = FreeNilpotentGroup::get(d, L);
        for (int trial = 0; trial < 6; ++trial) {
            auto a = normal_closure(g, {sparse_element(g, rng)});
            auto m1 = normal_closure(g, {sparse_element(g, rng)});
            auto m2 = normal_closure(g, {sparse_element(g, rng)});
            auto n = normal_closure(g, {sparse_element(g, rng), sparse_element(g, rng)});
            auto lhs = mutual_commutator(product(a, product(m1, m2)), n);
            auto rhs = product(product(mutual_commutator(a, n), mutual_commutator(m1, n)), mutual_commutator(m2, n));
            EXPECT_EQ(lhs, rhs);
        }
    }
}

TEST(Subgroup, CertificateReplays)
{
    std::mt19937_64 rng(2);
    auto g = FreeNilpotentGroup::get(3, 3);
    for (int trial = 0; trial < 10; ++trial) {
        auto h = normal_closure(g, {random_element(g, rng), random_element(g, rng)});
        for (int k = 0; k < 10; ++k) {
            // a random product of rows and generators' conjugates lies in h
            GroupElement x = g->identity();
            for (int s = 0; s < 4; ++s) {
                const auto& row = h.rows()[rng() % h.size()];
                x = x * conjugate(row.pow(static_cast<long>(rng() % 5) - 2), g->generator(static_cast<int>(rng() % 3)));
            }
            auto cert = membership(x, h);
            ASSERT_TRUE(cert.has_value());
            EXPECT_EQ(expand(h, *cert), x);
        }
    }
}

TEST(Subgroup, IndexInvariantUnderConjugation)
{
    std::mt19937_64 rng(31);
    auto g = FreeNilpotentGroup::get(2, 3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<GroupElement> s{g->parse("x1^2") * random_element(g, rng, 1), g->parse("x2^3")};
        auto base = index_in_ambient(normal_closure(g, s));
        auto t = random_element(g, rng);
        std::vector<GroupElement> conj;
        for (const auto& x : s)
            conj.push_back(conjugate(x, t));
        EXPECT_EQ(index_in_ambient(normal_closure(g, conj)), base);
        EXPECT_EQ(normal_closure(g, conj), normal_closure(g, s));
    }
}

TEST(Subgroup, CosetRepresentative)
{
    std::mt19937_64 rng(12);
    auto g = FreeNilpotentGroup::get(2, 3);
    auto n = normal_closure(g, elems(g, {"x1^2", "x2^3"}));
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_element(g, rng, 6);
        auto r = coset_representative(x, n);
        EXPECT_TRUE(contains(n, x.inverse() * r));
        const auto& row = n.rows()[rng() % n.size()];
        EXPECT_EQ(coset_representative(x * row, n), r);
        EXPECT_EQ(coset_representative(row * x, n), r);
    }
}

TEST(Subgroup, BasisMismatch)
{
    auto a = FreeNilpotentGroup::get(2, 2);
    auto b = FreeNilpotentGroup::get(2, 3);
    EXPECT_THROW(subgroup(a, {b->parse("x1")}), InvalidInput);
    EXPECT_THROW(product(whole_group(a), whole_group(b)), InvalidInput);
    EXPECT_THROW(contains(whole_group(a), b->parse("x1")), InvalidInput);
}

TEST(Subgroup, DumpUsesWordSyntax)
{
    auto g = FreeNilpotentGroup::get(2, 2);
    auto n = normal_closure(g, elems(g, {"x1"}));
    const auto text = n.dump();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_NE(text.find("x1"), std::string::npos);
}
