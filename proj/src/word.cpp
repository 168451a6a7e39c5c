#include <cctype>

#include <fmt/format.h>

#include "nilmult/engine.hpp"
#include "nilmult/errors.hpp"

namespace nilmult {

namespace {

constexpr std::size_t kMaxWordLength = std::size_t{1} << 22;

// appends with free reduction of adjacent syllables in the same letter
void push_letter(Word& w, int generator, const Integer& exponent)
{
    if (exponent == 0)
        return;
    if (!w.empty() && w.back().generator == generator) {
        w.back().exponent += exponent;
        if (w.back().exponent == 0)
            w.pop_back();
        return;
    }
    w.push_back({generator, exponent});
    if (w.size() > kMaxWordLength)
        throw ResourceLimitExceeded("expanded word is too long");
}

void append(Word& w, const Word& tail)
{
    for (const auto& l : tail)
        push_letter(w, l.generator, l.exponent);
}

Word commutator_word(const Word& a, const Word& b)
{
    Word out = inverse_word(a);
    append(out, inverse_word(b));
    append(out, a);
    append(out, b);
    return out;
}

class Parser {
public:
    Parser(std::string_view text, int gens) : text_(text), gens_(gens) {}

    Word parse()
    {
        Word w = word();
        skip_blanks();
        if (pos_ != text_.size())
            fail(fmt::format("unexpected '{}'", text_[pos_]));
        return w;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw InvalidInput(fmt::format("word syntax error at offset {} in \"{}\": {}", pos_, text_, what));
    }

    void skip_blanks()
    {
        while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '*'))
            ++pos_;
    }

    bool at(char c)
    {
        skip_blanks();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool starts_factor()
    {
        skip_blanks();
        if (pos_ >= text_.size())
            return false;
        const char c = text_[pos_];
        return c == 'x' || c == '1' || c == '(' || c == '[';
    }

    std::string digits()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected digits");
        return std::string(text_.substr(start, pos_ - start));
    }

    Word word()
    {
        Word w;
        while (starts_factor())
            append(w, factor());
        return w;
    }

    Word operand()
    {
        if (!starts_factor())
            fail("empty bracket entry");
        return word();
    }

    Word factor()
    {
        Word base = primary();
        if (!at('^'))
            return base;
        ++pos_;
        skip_blanks();
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        Integer e(digits());
        if (negative)
            e = -e;
        return power(base, e);
    }

    Word power(const Word& base, Integer e)
    {
        if (base.size() == 1) {
            Word out;
            push_letter(out, base[0].generator, base[0].exponent * e);
            return out;
        }
        const Word unit = e < 0 ? inverse_word(base) : base;
        e = abs(e);
        if (!base.empty() && e > kMaxWordLength)
            throw ResourceLimitExceeded("expanded word is too long");
        Word out;
        for (unsigned long i = base.empty() ? 0 : e.get_ui(); i > 0; --i)
            append(out, unit);
        return out;
    }

    Word primary()
    {
        skip_blanks();
        const char c = text_[pos_];
        if (c == 'x') {
            ++pos_;
            const std::string idx = digits();
            const unsigned long g = idx.size() > 6 ? 0 : std::stoul(idx);
            if (g < 1 || g > static_cast<unsigned long>(gens_))
                fail(fmt::format("generator x{} out of range x1..x{}", idx, gens_));
            return Word{{static_cast<int>(g - 1), 1}};
        }
        if (c == '1') {
            ++pos_;
            return {};
        }
        if (c == '(') {
            ++pos_;
            Word inner = word();
            if (!at(')'))
                fail("expected ')'");
            ++pos_;
            return inner;
        }
        // c == '['
        ++pos_;
        Word acc = operand();
        int operands = 1;
        while (at(',')) {
            ++pos_;
            acc = commutator_word(acc, operand());
            ++operands;
        }
        if (operands < 2)
            fail("a bracket needs at least two entries");
        if (!at(']'))
            fail("expected ']'");
        ++pos_;
        return acc;
    }

    std::string_view text_;
    int gens_;
    std::size_t pos_ = 0;
};

} // namespace

Word parse_word(std::string_view text, int gens)
{
    if (gens < 1)
        throw InvalidInput("word parser needs at least one generator");
    return Parser(text, gens).parse();
}

Word inverse_word(const Word& word)
{
    Word out;
    out.reserve(word.size());
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        out.push_back({it->generator, -it->exponent});
    return out;
}

std::string render_word(const Word& word)
{
    if (word.empty())
        return "1";
    std::string out;
    for (const auto& l : word) {
        if (!out.empty())
            out += ' ';
        out += fmt::format("x{}", l.generator + 1);
        if (l.exponent != 1)
            out += "^" + l.exponent.get_str();
    }
    return out;
}

} // namespace nilmult
