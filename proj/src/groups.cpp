#include "nilmult/groups.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "nilmult/errors.hpp"

namespace nilmult {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidInput(fmt::format("bad {} '{}'", what, text));
    return value;
}

GroupElement power_of_generator(const GroupPtr& group, int i, std::uint64_t m)
{
    return group->generator(i).pow(Integer(static_cast<unsigned long>(m)));
}

} // namespace

void NilpotentProductSpec::validate() const
{
    if (factors.empty())
        throw InvalidInput("a nilpotent product needs at least one factor");
    for (auto m : factors) {
        if (m == 1)
            throw InvalidInput("factor order 1 is the trivial group; drop it from the factor list");
        if (m < 2)
            throw InvalidInput(fmt::format("factor order {} must be at least 2", m));
    }
    if (n < 1)
        throw InvalidInput(fmt::format("nilpotency degree n={} must be at least 1", n));
    if (c < 1)
        throw InvalidInput(fmt::format("variety class c={} must be at least 1", c));
}

NilpotentProductSpec NilpotentProductSpec::parse(std::string_view text)
{
    NilpotentProductSpec spec;
    bool have_factors = false;
    bool have_n = false;
    bool have_c = false;
    while (!text.empty()) {
        const auto semi = text.find(';');
        const auto item = trim(text.substr(0, semi));
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw InvalidInput(fmt::format("expected key=value in spec, got '{}'", item));
        const auto key = trim(item.substr(0, eq));
        auto value = item.substr(eq + 1);
        if (key == "factors" && !have_factors) {
            have_factors = true;
            while (true) {
                const auto comma = value.find(',');
                spec.factors.push_back(parse_number<std::uint64_t>(value.substr(0, comma), "factor order"));
                if (comma == std::string_view::npos)
                    break;
                value.remove_prefix(comma + 1);
            }
        } else if (key == "n" && !have_n) {
            have_n = true;
            spec.n = parse_number<int>(value, "n");
        } else if (key == "c" && !have_c) {
            have_c = true;
            spec.c = parse_number<int>(value, "c");
        } else {
            throw InvalidInput(fmt::format("unknown or repeated spec key '{}'", key));
        }
    }
    if (!have_factors || !have_n)
        throw InvalidInput("spec needs both factors= and n=");
    spec.validate();
    return spec;
}

std::string NilpotentProductSpec::to_string() const
{
    return fmt::format("factors={};n={};c={}", fmt::join(factors, ","), n, c);
}

NilpotentProductSpec NilpotentProductSpec::from_json(std::string_view text)
{
    NilpotentProductSpec spec;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_object() || !j.contains("factors") || !j.contains("n"))
            throw InvalidInput("spec JSON needs \"factors\" and \"n\"");
        for (const auto& f : j.at("factors")) {
            if (!f.is_number_unsigned())
                throw InvalidInput(fmt::format("factor order {} is not a positive integer", f.dump()));
            spec.factors.push_back(f.get<std::uint64_t>());
        }
        spec.n = j.at("n").get<int>();
        if (j.contains("c"))
            spec.c = j.at("c").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("bad spec JSON: {}", e.what()));
    }
    spec.validate();
    return spec;
}

std::string NilpotentProductSpec::to_json() const
{
    nlohmann::ordered_json j;
    j["factors"] = factors;
    j["n"] = n;
    j["c"] = c;
    return j.dump();
}

GroupPtr ambient_group(const NilpotentProductSpec& spec, int max_weight)
{
    spec.validate();
    return FreeNilpotentGroup::get(spec.gens(), max_weight);
}

InducedSequence cartesian_subgroup(const GroupPtr& group)
{
    std::vector<GroupElement> gens;
    for (int i = 0; i < group->gens(); ++i)
        for (int j = i + 1; j < group->gens(); ++j)
            gens.push_back(commutator(group->generator(i), group->generator(j)));
    return normal_closure(group, gens);
}

std::vector<GroupElement> relators(const NilpotentProductSpec& spec, const GroupPtr& group)
{
    std::vector<GroupElement> out;
    for (int i = 0; i < spec.gens(); ++i)
        out.push_back(power_of_generator(group, i, spec.factors[static_cast<std::size_t>(i)]));
    return out;
}

InducedSequence relator_closure(const NilpotentProductSpec& spec, const GroupPtr& group)
{
    return normal_closure(group, relators(spec, group));
}

InducedSequence cartesian_tail(const GroupPtr& group, int j)
{
    auto k = intersect_with_tail(cartesian_subgroup(group), j + 1);
    if (!(k == gamma_tail(group, j + 1)))
        throw InternalError(fmt::format("cartesian subgroup does not contain gamma_{}", j + 1));
    return k;
}

InducedSequence d_class(const NilpotentProductSpec& spec, const GroupPtr& group, int c)
{
    if (c < 1)
        throw InvalidInput("D_c needs c >= 1");
    const int k = spec.gens();
    std::vector<GroupElement> gens;
    if (c + 1 <= group->max_weight()) {
        std::vector<int> mu(static_cast<std::size_t>(c), 0);
        const auto rels = relators(spec, group);
        for (int i = 0; i < k; ++i) {
            // all tuples mu in [0,k)^c, odometer order
            std::fill(mu.begin(), mu.end(), 0);
            for (bool more = true; more;) {
                if (std::any_of(mu.begin(), mu.end(), [i](int m) { return m != i; })) {
                    GroupElement x = rels[static_cast<std::size_t>(i)];
                    for (int m : mu)
                        x = commutator(x, group->generator(m));
                    gens.push_back(std::move(x));
                }
                more = false;
                for (auto& m : mu) {
                    if (++m < k) {
                        more = true;
                        break;
                    }
                    m = 0;
                }
            }
        }
    }
    return normal_closure(group, gens);
}

InducedSequence d_one(const NilpotentProductSpec& spec, const GroupPtr& group)
{
    return d_class(spec, group, 1);
}

NamedSubgroups build_named_subgroups(const NilpotentProductSpec& spec, const GroupPtr& group)
{
    spec.validate();
    if (group->gens() != spec.gens())
        throw InvalidInput(fmt::format("spec has {} factors but the group has {} generators", spec.gens(), group->gens()));
    auto r = relator_closure(spec, group);
    auto k = cartesian_tail(group, spec.n);
    auto l = product(r, k);
    auto d1 = d_one(spec, group);
    auto dc = d_class(spec, group, spec.c);
    auto ec = intersect_with_tail(d1, spec.c + 1);
    return {group, std::move(r), std::move(k), std::move(l), std::move(d1), std::move(dc), std::move(ec)};
}

Integer group_order(const NilpotentProductSpec& spec)
{
    auto group = ambient_group(spec, spec.n);
    auto l = product(relator_closure(spec, group), cartesian_tail(group, spec.n));
    auto index = index_in_ambient(l);
    if (!index)
        throw InternalError("nilpotent product of finite cyclic groups came out infinite");
    return *index;
}

bool unique_normal_form_check(const NilpotentProductSpec& spec, int trials, std::uint64_t seed)
{
    auto group = ambient_group(spec, spec.n);
    const int k = spec.gens();
    auto l = product(relator_closure(spec, group), cartesian_tail(group, spec.n));
    auto cart = product(cartesian_subgroup(group), l);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(-20, 20);

    auto prefix = [&](const std::vector<Integer>& r) {
        GroupElement a = group->identity();
        for (int i = 0; i < k; ++i)
            a = a * group->generator(i).pow(r[static_cast<std::size_t>(i)]);
        return a;
    };

    for (int t = 0; t < trials; ++t) {
        Exponents e(group->rank());
        for (auto& x : e)
            x = dist(rng);
        const auto g = coset_representative(group->element(std::move(e)), l);

        std::vector<Integer> r(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const Integer m(static_cast<unsigned long>(spec.factors[static_cast<std::size_t>(i)]));
            mpz_fdiv_r(r[i].get_mpz_t(), g[static_cast<std::size_t>(i)].get_mpz_t(), m.get_mpz_t());
        }
        if (!contains(cart, prefix(r).inverse() * g))
            return false;

        // any other choice of one a_i leaves u outside the cartesian image
        const auto i = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k));
        const std::uint64_t m = spec.factors[i];
        auto other = r;
        other[i] = (r[i] + 1 + static_cast<unsigned long>(rng() % (m - 1))) % static_cast<unsigned long>(m);
        if (contains(cart, prefix(other).inverse() * g))
            return false;
    }
    return true;
}

} // namespace nilmult
