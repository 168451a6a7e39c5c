#include "nilmult/baer.hpp"

#include <chrono>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "nilmult/errors.hpp"
#include "nilmult/hall.hpp"

namespace nilmult {

namespace {

nlohmann::ordered_json record(const BaerResult& r)
{
    nlohmann::ordered_json j;
    j["factors"] = r.spec.factors;
    j["n"] = r.spec.n;
    j["c"] = r.spec.c;
    auto inv = nlohmann::ordered_json::array();
    for (const auto& d : r.invariants.torsion)
        inv.push_back(d.get_str());
    j["invariants"] = inv;
    j["group_order"] = r.group_order.get_str();
    j["ambient_class"] = r.ambient_class;
    j["basis_size"] = r.basis_size;
    return j;
}

Integer parse_integer(const nlohmann::json& j, const char* what)
{
    if (!j.is_string())
        throw InvalidInput(fmt::format("{} must be a decimal string", what));
    const auto s = j.get<std::string>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidInput(fmt::format("bad {} '{}'", what, s));
    return Integer(s);
}

// (R ∩ gamma_{c+1}) / [R, _c Q]
AbelianInvariants baer_quotient(const InducedSequence& r, int c, const std::string& what)
{
    const auto numerator = intersect_with_tail(r, c + 1);
    const auto denominator = iterated_commutator_with_ambient(r, c);
    if (!contains(numerator, denominator))
        throw InternalError(fmt::format("[R, _cF] not inside R meet gamma_{{c+1}} for {}", what));
    auto inv = quotient_invariants(numerator, denominator);
    if (!inv.is_finite())
        throw InternalError(fmt::format("infinite Baer invariant for finite group {}", what));
    return inv;
}

} // namespace

std::string BaerResult::to_json() const
{
    return record(*this).dump();
}

BaerResult BaerResult::from_json(std::string_view text)
{
    BaerResult r;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const char* key : {"factors", "n", "c", "invariants", "group_order", "ambient_class", "basis_size"})
            if (!j.contains(key))
                throw InvalidInput(fmt::format("result record lacks \"{}\"", key));
        r.spec = NilpotentProductSpec::from_json(j.dump());
        std::vector<Integer> orders;
        for (const auto& d : j.at("invariants"))
            orders.push_back(parse_integer(d, "invariant"));
        r.invariants = AbelianInvariants::from_cyclic_orders(orders);
        if (r.invariants.torsion != orders)
            throw InvalidInput("invariants are not a normalized divisor chain");
        r.group_order = parse_integer(j.at("group_order"), "group_order");
        r.ambient_class = j.at("ambient_class").get<int>();
        r.basis_size = j.at("basis_size").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("bad result record: {}", e.what()));
    }
    return r;
}

std::string BaerResult::to_text() const
{
    return fmt::format("factors={} n={} c={}: {}  (|G|={}, class {}, basis {})", fmt::join(spec.factors, ","), spec.n,
                       spec.c, invariants.to_string(), group_order.get_str(), ambient_class, basis_size);
}

bool BaerResult::same_values(const BaerResult& other) const
{
    return spec == other.spec && invariants == other.invariants && group_order == other.group_order &&
           ambient_class == other.ambient_class && basis_size == other.basis_size;
}

BaerResult baer_invariant(const NilpotentProductSpec& spec)
{
    const auto start = std::chrono::steady_clock::now();
    spec.validate();
    const int L = spec.n + spec.c;
    auto group = ambient_group(spec, L);

    const auto r = product(relator_closure(spec, group), cartesian_tail(group, spec.n));

    BaerResult out;
    out.spec = spec;
    out.invariants = baer_quotient(r, spec.c, spec.to_string());
    out.group_order = group_order(spec);
    out.ambient_class = L;
    out.basis_size = group->rank();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

AbelianInvariants baer_invariant_of_presentation(const GroupPtr& group, const std::vector<GroupElement>& relators, int c)
{
    if (c < 1)
        throw InvalidInput("Baer invariant needs c >= 1");
    const int L = group->max_weight();
    if (L - c < 1)
        throw InvalidInput(fmt::format("class {} leaves no room for c = {}", L, c));
    const auto r = normal_closure(group, relators);
    if (!contains(r, gamma_tail(group, L - c + 1)))
        throw PreconditionViolation(
            fmt::format("presented group has class above {}; raise the ambient class", L - c));
    return baer_quotient(r, c, "presentation");
}

BaerResult schur_multiplier(NilpotentProductSpec spec)
{
    spec.c = 1;
    return baer_invariant(spec);
}

AbelianInvariants product_section(const NilpotentProductSpec& spec)
{
    spec.validate();
    if (spec.gens() != 2)
        throw InvalidInput(fmt::format("the product section needs exactly two factors, got {}", spec.gens()));
    auto group = ambient_group(spec, spec.n + 2);
    const auto s = relator_closure(spec, group);
    const auto c = normal_closure(group, {commutator(group->generator(0), group->generator(1))});
    const auto top = product(iterated_commutator_with_ambient(c, spec.n - 1), s);
    const auto bottom = product(iterated_commutator_with_ambient(c, spec.n), s);
    return quotient_invariants(top, bottom);
}

AbelianInvariants two_involution_oracle(int n, int c)
{
    if (n < 1 || c < 1)
        throw InvalidInput("closed form needs n >= 1 and c >= 1");
    Integer top;
    if (c < n) {
        mpz_ui_pow_ui(top.get_mpz_t(), 2, static_cast<unsigned long>(c));
        return AbelianInvariants::from_cyclic_orders({top});
    }
    mpz_ui_pow_ui(top.get_mpz_t(), 2, static_cast<unsigned long>(n));
    const Integer r = witt(2, c + 1);
    std::vector<Integer> orders(r.get_ui() - 1, Integer(2));
    orders.push_back(top);
    return AbelianInvariants::from_cyclic_orders(orders);
}

bool schur_baer_check(const BaerResult& result)
{
    const auto ord = order(result.invariants);
    if (!ord)
        return false;
    for (const auto& p : prime_divisors(*ord))
        if (!mpz_divisible_p(result.group_order.get_mpz_t(), p.get_mpz_t()))
            return false;
    return true;
}

ResultCache::Key ResultCache::key_of(const NilpotentProductSpec& spec)
{
    return {spec.factors, spec.n, spec.c};
}

ResultCache::ResultCache(std::string path) : path_(std::move(path))
{
    std::ifstream in(path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            auto r = BaerResult::from_json(line);
            entries_.insert_or_assign(key_of(r.spec), std::move(r));
        } catch (const InvalidInput& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", path_, lineno, e.what()));
        }
    }
}

std::optional<BaerResult> ResultCache::lookup(const NilpotentProductSpec& spec) const
{
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key_of(spec)); it != entries_.end())
        return it->second;
    return std::nullopt;
}

void ResultCache::store(const BaerResult& result)
{
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    out << result.to_json() << '\n';
    if (!out)
        throw Error(fmt::format("cannot append to cache {}", path_));
    entries_.insert_or_assign(key_of(result.spec), result);
}

std::vector<BaerResult> ResultCache::entries() const
{
    std::lock_guard lock(mutex_);
    std::vector<BaerResult> out;
    for (const auto& [k, v] : entries_)
        out.push_back(v);
    return out;
}

} // namespace nilmult
