#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "nilmult/engine.hpp"
#include "nilmult/errors.hpp"
#include "oracles/magnus.hpp"

using namespace nilmult;

namespace {

GroupElement random_element(const GroupPtr& g, std::mt19937_64& rng, int lo = -9, int hi = 9)
{
    std::uniform_int_distribution<int> dist(lo, hi);
    Exponents e(g->rank());
    for (auto& x : e)
        x = dist(rng);
    return g->element(std::move(e));
}

Word random_word(int gens, std::mt19937_64& rng, int length)
{
    std::uniform_int_distribution<int> letter(0, gens - 1);
    std::uniform_int_distribution<int> exponent(-3, 3);
    Word w;
    for (int i = 0; i < length; ++i)
        w.push_back({letter(rng), exponent(rng)});
    return w;
}

Exponents only(std::size_t n, std::initializer_list<std::pair<std::size_t, int>> entries)
{
    Exponents e(n);
    for (auto [i, v] : entries)
        e[i] = v;
    return e;
}

} // namespace

TEST(Collect, FreeCancellation)
{
    auto g = FreeNilpotentGroup::get(2, 3);
    EXPECT_TRUE(g->parse("x1 x1^-1").is_identity());
    EXPECT_TRUE(g->collect({{0, 1}, {0, -1}}).is_identity());
}

TEST(Collect, SwapProducesCommutator)
{
    // x2 x1 = x1 x2 [x2,x1]
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_EQ(g->parse("x2 x1").exponents(), only(3, {{0, 1}, {1, 1}, {2, 1}}));
}

TEST(Collect, SquareCommutatorInClassTwo)
{
    // [x1^2, x2] = [x1,x2]^2 = [x2,x1]^-2
    auto g = FreeNilpotentGroup::get(2, 2);
    EXPECT_EQ(g->parse("[x1^2, x2]").exponents(), only(3, {{2, -2}}));
}

TEST(Commutator, LeftNormedWeightThree)
{
    auto g = FreeNilpotentGroup::get(2, 3);
    auto c = commutator(commutator(g->generator(1), g->generator(0)), g->generator(0));
    EXPECT_EQ(c.exponents(), only(5, {{3, 1}}));
    EXPECT_EQ(c.to_string(), "[x2,x1,x1]");
}

TEST(Commutator, SelfCommutatorIsTrivial)
{
    std::mt19937_64 rng(7);
    auto g = FreeNilpotentGroup::get(3, 4);
    auto a = random_element(g, rng);
    EXPECT_TRUE(commutator(a, a).is_identity());
    EXPECT_EQ(a * g->identity(), a);
    EXPECT_EQ(g->identity() * a, a);
}

TEST(Collect, AgreesWithMagnusEmbedding)
{
    std::mt19937_64 rng(11);
    for (int d = 1; d <= 3; ++d) {
        for (int L = 1; L <= 5; ++L) {
            auto g = FreeNilpotentGroup::get(d, L);
            auto images = oracle::magnus_of_basis(g->basis());
            for (int trial = 0; trial < 6; ++trial) {
                Word w = random_word(d, rng, 12);
                auto collected = g->collect(w);
                EXPECT_EQ(oracle::magnus_of_normal_form(images, collected.exponents(), d, L),
                          oracle::magnus_of_word(w, d, L))
                    << "d=" << d << " L=" << L << " word " << render_word(w);
            }
        }
    }
}

TEST(Multiply, AgreesWithMagnusEmbedding)
{
    std::mt19937_64 rng(12);
    const int d = 2;
    const int L = 6;
    auto g = FreeNilpotentGroup::get(d, L);
    auto images = oracle::magnus_of_basis(g->basis());
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_element(g, rng, -4, 4);
        auto b = random_element(g, rng, -4, 4);
        auto ma = oracle::magnus_of_normal_form(images, a.exponents(), d, L);
        auto mb = oracle::magnus_of_normal_form(images, b.exponents(), d, L);
        EXPECT_EQ(oracle::magnus_of_normal_form(images, (a * b).exponents(), d, L), ma * mb);
        EXPECT_EQ(oracle::magnus_of_normal_form(images, a.inverse().exponents(), d, L), ma.inverse());
    }
}

TEST(Multiply, LargeExponentsAgreeWithMagnus)
{
    // exercises the squaring path for conjugation by large powers
    const int d = 2;
    const int L = 5;
    auto g = FreeNilpotentGroup::get(d, L);
    auto images = oracle::magnus_of_basis(g->basis());
    auto a = g->parse("x2^3 [x2,x1]^-2 x1");
    auto b = g->parse("x1^1000 x2^-77");
    auto ma = oracle::magnus_of_normal_form(images, a.exponents(), d, L);
    auto mb = oracle::magnus_of_normal_form(images, b.exponents(), d, L);
    EXPECT_EQ(oracle::magnus_of_normal_form(images, (a * b).exponents(), d, L), ma * mb);
    EXPECT_EQ(oracle::magnus_of_normal_form(images, a.pow(-345).exponents(), d, L), ma.pow(-345));
}

TEST(GroupLaws, RandomElements)
{
    std::mt19937_64 rng(3);
    for (int d = 1; d <= 3; ++d) {
        for (int L = 1; L <= 6; ++L) {
            if (d == 3 && L == 6)
                continue; // covered below with fewer trials
            auto g = FreeNilpotentGroup::get(d, L);
            for (int trial = 0; trial < 4; ++trial) {
                auto a = random_element(g, rng);
                auto b = random_element(g, rng);
                auto c = random_element(g, rng);
                EXPECT_EQ((a * b) * c, a * (b * c));
                EXPECT_TRUE((a * a.inverse()).is_identity());
                EXPECT_TRUE((a.inverse() * a).is_identity());
                EXPECT_EQ(a.pow(3), a * a * a);
                EXPECT_EQ(a.pow(-2), (a * a).inverse());
            }
        }
    }
}

TEST(GroupLaws, ThreeLettersClassSix)
{
    std::mt19937_64 rng(4);
    auto g = FreeNilpotentGroup::get(3, 6);
    for (int trial = 0; trial < 2; ++trial) {
        auto a = random_element(g, rng, -3, 3);
        auto b = random_element(g, rng, -3, 3);
        auto c = random_element(g, rng, -3, 3);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_TRUE((a * a.inverse()).is_identity());
    }
}

TEST(GroupLaws, CommutatorExpansion)
{
    // [a, bc] = [a,c] [a,b]^c
    std::mt19937_64 rng(5);
    for (int L = 2; L <= 6; ++L) {
        auto g = FreeNilpotentGroup::get(2, L);
        for (int trial = 0; trial < 4; ++trial) {
            auto a = random_element(g, rng);
            auto b = random_element(g, rng);
            auto c = random_element(g, rng);
            EXPECT_EQ(commutator(a, b * c), commutator(a, c) * conjugate(commutator(a, b), c));
        }
    }
}

TEST(GroupLaws, WeightGrading)
{
    std::mt19937_64 rng(6);
    for (int d = 2; d <= 3; ++d) {
        const int L = 5;
        auto g = FreeNilpotentGroup::get(d, L);
        const auto& basis = g->basis();
        for (int i = 1; i <= L; ++i) {
            for (int j = 1; i + j <= L + 1; ++j) {
                auto a = random_element(g, rng);
                auto b = random_element(g, rng);
                Exponents ea = a.exponents();
                Exponents eb = b.exponents();
                for (std::size_t k = 0; k < basis.weight_begin(i); ++k)
                    ea[k] = 0;
                for (std::size_t k = 0; k < basis.weight_begin(j); ++k)
                    eb[k] = 0;
                auto c = commutator(g->element(ea), g->element(eb));
                for (std::size_t k = 0; k < basis.weight_begin(i + j) && k < c.size(); ++k)
                    EXPECT_EQ(c[k], 0) << "i=" << i << " j=" << j;
            }
        }
    }
}

TEST(EvalBasic, MatchesRecursiveCommutators)
{
    for (int d = 1; d <= 3; ++d) {
        for (int L = 1; L <= 6; ++L) {
            auto g = FreeNilpotentGroup::get(d, L);
            std::vector<GroupElement> rec;
            for (const auto& bc : g->basis().elements()) {
                if (bc.is_generator())
                    rec.push_back(g->generator(bc.letter));
                else
                    rec.push_back(commutator(rec[bc.left], rec[bc.right]));
                EXPECT_EQ(rec.back(), g->eval_basic(bc.id));
            }
        }
    }
}

TEST(EvalBasic, MagnusImageOfIndicator)
{
    // the rendered bracket, expanded as a word, is the same group element
    auto g = FreeNilpotentGroup::get(3, 5);
    const auto& basis = g->basis();
    auto images = oracle::magnus_of_basis(basis);
    for (std::size_t id = 0; id < basis.size(); ++id) {
        Word w = parse_word(basis.render(id), 3);
        EXPECT_EQ(oracle::magnus_of_word(w, 3, 5), images[id]);
        EXPECT_EQ(g->collect(w), g->eval_basic(id));
    }
}

TEST(Parser, RenderRoundTrip)
{
    std::mt19937_64 rng(8);
    auto g = FreeNilpotentGroup::get(3, 4);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_element(g, rng, -3, 3);
        EXPECT_EQ(g->parse(a.to_string()), a);
    }
    EXPECT_EQ(g->identity().to_string(), "1");
    EXPECT_TRUE(g->parse("1").is_identity());
}

TEST(Parser, Grammar)
{
    EXPECT_EQ(parse_word("x1^2 x2 x1^-2", 2), (Word{{0, 2}, {1, 1}, {0, -2}}));
    EXPECT_EQ(parse_word("x1*x1", 2), (Word{{0, 2}}));
    EXPECT_EQ(parse_word("[x1,x2]", 2), (Word{{0, -1}, {1, -1}, {0, 1}, {1, 1}}));
    EXPECT_EQ(parse_word("(x1 x2)^2", 2), (Word{{0, 1}, {1, 1}, {0, 1}, {1, 1}}));
    EXPECT_EQ(parse_word("(x1 x2)^-1", 2), (Word{{1, -1}, {0, -1}}));
    EXPECT_EQ(parse_word("  ", 2), Word{});
    EXPECT_EQ(parse_word("x1^+3", 1), (Word{{0, 3}}));
    // left-normed: [x1,x2,x1] = [[x1,x2],x1]
    EXPECT_EQ(parse_word("[x1,x2,x1]", 2), parse_word("[[x1,x2],x1]", 2));
}

TEST(Parser, Errors)
{
    EXPECT_THROW(parse_word("x3", 2), InvalidInput);
    EXPECT_THROW(parse_word("x0", 2), InvalidInput);
    EXPECT_THROW(parse_word("[x1]", 2), InvalidInput);
    EXPECT_THROW(parse_word("[x1,]", 2), InvalidInput);
    EXPECT_THROW(parse_word("[x1,x2", 2), InvalidInput);
    EXPECT_THROW(parse_word("x1^", 2), InvalidInput);
    EXPECT_THROW(parse_word("y1", 2), InvalidInput);
    EXPECT_THROW(parse_word("(x1", 2), InvalidInput);
}

TEST(Errors, BasisMismatch)
{
    auto g2 = FreeNilpotentGroup::get(2, 2);
    auto g3 = FreeNilpotentGroup::get(2, 3);
    EXPECT_THROW(g2->generator(0) * g3->generator(0), InvalidInput);
    EXPECT_THROW(commutator(g2->generator(0), g3->generator(1)), InvalidInput);
    EXPECT_THROW(g2->generator(2), InvalidInput);
}

TEST(Errors, ExponentCap)
{
    Limits tight;
    tight.max_exponent_bits = 16;
    auto g = FreeNilpotentGroup::create(2, 3, tight);
    EXPECT_NO_THROW(g->parse("x1^1000"));
    EXPECT_THROW(g->parse("x1^100000"), ResourceLimitExceeded);
    EXPECT_THROW(g->parse("x1^300 x2^300").pow(300), ResourceLimitExceeded);
}

TEST(Concurrency, SharedGroupAcrossThreads)
{
    auto g = FreeNilpotentGroup::get(2, 5);
    auto a = g->parse("x1^3 x2^-2 [x2,x1]");
    auto b = g->parse("x2 x1^-1");
    const auto expected = commutator(a * b, b.pow(4));
    std::vector<std::thread> threads;
    std::atomic<int> bad = 0;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&] {
            for (int i = 0; i < 20; ++i)
                if (!(commutator(a * b, b.pow(4)) == expected))
                    ++bad;
        });
    for (auto& t : threads)
        t.join();
    EXPECT_EQ(bad.load(), 0);
}
