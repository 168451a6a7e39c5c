#include "nilmult/hall.hpp"

#include <sstream>

#include <fmt/format.h>

#include "nilmult/errors.hpp"

namespace nilmult {

Limits& default_limits()
{
    static Limits limits;
    return limits;
}

int mobius(std::uint64_t k)
{
    if (k == 0)
        throw InvalidInput("mobius(0) is undefined");
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= k; ++p) {
        if (k % p != 0)
            continue;
        k /= p;
        if (k % p == 0)
            return 0;
        sign = -sign;
    }
    if (k > 1)
        sign = -sign;
    return sign;
}

Integer witt(int d, int w)
{
    if (d < 1 || w < 1)
        throw InvalidInput(fmt::format("witt({}, {}): arguments must be positive", d, w));
    Integer sum = 0;
    for (int k = 1; k <= w; ++k) {
        if (w % k != 0)
            continue;
        int mu = mobius(static_cast<std::uint64_t>(k));
        if (mu == 0)
            continue;
        Integer term;
        mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(w / k));
        sum += mu * term;
    }
    return sum / w;
}

HallBasis HallBasis::generate(int gens, int max_weight)
{
    return generate(gens, max_weight, default_limits().max_basis_size);
}

HallBasis HallBasis::generate(int gens, int max_weight, std::size_t max_size)
{
    if (gens < 1)
        throw InvalidInput(fmt::format("Hall basis needs at least one generator (got {})", gens));
    if (max_weight < 1)
        throw InvalidInput(fmt::format("Hall basis needs max weight >= 1 (got {})", max_weight));

    Integer expected = 0;
    for (int w = 1; w <= max_weight; ++w) {
        expected += witt(gens, w);
        if (expected > max_size)
            throw ResourceLimitExceeded(fmt::format(
                "Hall basis on {} letters up to weight {} has more than {} elements (cap {})",
                gens, max_weight, expected.get_str(), max_size));
    }

    HallBasis basis;
    basis.gens_ = gens;
    basis.max_weight_ = max_weight;
    basis.elements_.reserve(expected.get_ui());
    basis.weight_offsets_.assign(static_cast<std::size_t>(max_weight) + 2, 0);

    basis.weight_offsets_[1] = 0;
    for (int g = 0; g < gens; ++g)
        basis.add({.id = 0, .weight = 1, .letter = g});

    for (int w = 2; w <= max_weight; ++w) {
        basis.weight_offsets_[w] = basis.elements_.size();
        const std::size_t known = basis.elements_.size();
        for (std::size_t v = 0; v < known; ++v) {
            const int wu = w - basis.elements_[v].weight;
            if (wu < basis.elements_[v].weight)
                continue;
            // u > v forces weight(u) >= weight(v); scan the weight-wu block
            for (std::size_t u = basis.weight_offsets_[wu]; u < basis.weight_offsets_[wu + 1]; ++u) {
                if (u <= v)
                    continue;
                const auto& uu = basis.elements_[u];
                if (!uu.is_generator() && uu.right > v)
                    continue;
                basis.add({.id = 0, .weight = w, .left = u, .right = v});
            }
        }
    }
    basis.weight_offsets_[max_weight + 1] = basis.elements_.size();

    if (basis.elements_.size() != expected)
        throw InternalError(fmt::format("Hall basis size {} disagrees with Witt count {}",
                                        basis.elements_.size(), expected.get_str()));
    return basis;
}

void HallBasis::add(BasicCommutator bc)
{
    bc.id = elements_.size();
    if (!bc.is_generator())
        pairs_.emplace(std::pair{bc.left, bc.right}, bc.id);
    elements_.push_back(bc);
}

std::size_t HallBasis::weight_begin(int w) const
{
    if (w < 1)
        return 0;
    if (w > max_weight_)
        return elements_.size();
    return weight_offsets_[w];
}

std::size_t HallBasis::find(std::size_t left, std::size_t right) const
{
    auto it = pairs_.find({left, right});
    return it == pairs_.end() ? BasicCommutator::none : it->second;
}

std::string HallBasis::render(std::size_t id) const
{
    const auto& bc = elements_.at(id);
    if (bc.is_generator())
        return fmt::format("x{}", bc.letter + 1);

    // walk the left spine down to its generator, collecting right operands
    std::vector<std::size_t> rights;
    std::size_t cur = id;
    while (!elements_[cur].is_generator()) {
        rights.push_back(elements_[cur].right);
        cur = elements_[cur].left;
    }
    std::string out = "[" + render(cur);
    for (auto it = rights.rbegin(); it != rights.rend(); ++it)
        out += "," + render(*it);
    out += "]";
    return out;
}

std::string HallBasis::serialize() const
{
    std::ostringstream os;
    os << "hall " << gens_ << ' ' << max_weight_ << '\n';
    for (const auto& bc : elements_) {
        if (bc.is_generator())
            os << bc.id << ' ' << bc.weight << " x" << bc.letter + 1 << '\n';
        else
            os << bc.id << ' ' << bc.weight << ' ' << bc.left << ' ' << bc.right << '\n';
    }
    return os.str();
}

HallBasis HallBasis::deserialize(const std::string& text)
{
    std::istringstream is(text);
    std::string tag;
    int gens = 0;
    int max_weight = 0;
    if (!(is >> tag >> gens >> max_weight) || tag != "hall")
        throw InvalidInput("serialized Hall basis: missing 'hall <gens> <max_weight>' header");
    if (gens < 1 || max_weight < 1)
        throw InvalidInput("serialized Hall basis: header values must be positive");

    HallBasis parsed;
    parsed.gens_ = gens;
    parsed.max_weight_ = max_weight;
    std::size_t id = 0;
    int weight = 0;
    while (is >> id >> weight) {
        if (id != parsed.elements_.size())
            throw InvalidInput(fmt::format("serialized Hall basis: id {} out of sequence", id));
        std::string a;
        if (!(is >> a))
            throw InvalidInput("serialized Hall basis: truncated line");
        if (!a.empty() && a[0] == 'x') {
            int letter = std::stoi(a.substr(1)) - 1;
            if (weight != 1 || letter < 0 || letter >= gens)
                throw InvalidInput(fmt::format("serialized Hall basis: bad generator line for id {}", id));
            parsed.add({.id = id, .weight = 1, .letter = letter});
            continue;
        }
        std::size_t right = 0;
        if (!(is >> right))
            throw InvalidInput("serialized Hall basis: truncated line");
        std::size_t left = std::stoul(a);
        if (left >= id || right >= id)
            throw InvalidInput(fmt::format("serialized Hall basis: id {} refers forward", id));
        const auto& u = parsed.elements_[left];
        if (weight != u.weight + parsed.elements_[right].weight || left <= right
            || (!u.is_generator() && u.right > right))
            throw InvalidInput(fmt::format("serialized Hall basis: id {} violates the Hall conditions", id));
        parsed.add({.id = id, .weight = weight, .left = left, .right = right});
    }
    if (!is.eof())
        throw InvalidInput("serialized Hall basis: trailing garbage");

    // the order is fixed, so a valid serialization must match the canonical one
    HallBasis canonical = generate(gens, max_weight, std::numeric_limits<std::size_t>::max());
    if (!(canonical.elements_.size() == parsed.elements_.size()))
        throw InvalidInput("serialized Hall basis: wrong number of elements");
    for (std::size_t i = 0; i < parsed.elements_.size(); ++i) {
        const auto& p = parsed.elements_[i];
        const auto& c = canonical.elements_[i];
        if (p.weight != c.weight || p.left != c.left || p.right != c.right || p.letter != c.letter)
            throw InvalidInput(fmt::format("serialized Hall basis: element {} is out of canonical order", i));
    }
    return canonical;
}

bool operator==(const HallBasis& a, const HallBasis& b)
{
    if (a.gens_ != b.gens_ || a.max_weight_ != b.max_weight_ || a.elements_.size() != b.elements_.size())
        return false;
    for (std::size_t i = 0; i < a.elements_.size(); ++i) {
        const auto& x = a.elements_[i];
        const auto& y = b.elements_[i];
        if (x.weight != y.weight || x.left != y.left || x.right != y.right || x.letter != y.letter)
            return false;
    }
    return true;
}

} // namespace nilmult
