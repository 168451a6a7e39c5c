#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilmult/baer.hpp"
#include "nilmult/errors.hpp"
#include "nilmult/hall.hpp"
#include "nilmult/parallel.hpp"
#include "nilmult/verify.hpp"

using namespace nilmult;

namespace {

enum Exit { ok = 0, verification_failed = 1, invalid_input = 2, resource_limit = 3 };

struct Range {
    int lo = 1;
    int hi = 1;
};

// "3" or "1..4"
Range parse_range(const std::string& text, const char* what)
{
    const auto dots = text.find("..");
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != s.size() || v < 1)
            throw InvalidInput(fmt::format("--{} expects a positive integer or a range a..b, got '{}'", what, text));
        return v;
    };
    Range r;
    if (dots == std::string::npos) {
        r.lo = r.hi = number(text);
    } else {
        r.lo = number(text.substr(0, dots));
        r.hi = number(text.substr(dots + 2));
    }
    if (r.lo > r.hi)
        throw InvalidInput(fmt::format("--{} range {} is empty", what, text));
    return r;
}

std::vector<std::uint64_t> parse_factors(const std::string& text)
{
    return NilpotentProductSpec::parse("factors=" + text + ";n=1").factors;
}

std::optional<std::size_t> env_cap(const char* name)
{
    const char* value = std::getenv(name);
    if (!value)
        return std::nullopt;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != std::string(value).size() || v == 0)
        throw InvalidInput(fmt::format("{} must be a positive integer, got '{}'", name, value));
    return static_cast<std::size_t>(v);
}

struct Options {
    std::string format = "text";
    int jobs = 1;
    std::size_t max_basis = 0;
    std::size_t max_exp_bits = 0;

    std::size_t gens = 2;
    int max_weight = 4;

    std::string factors;
    std::string n = "1";
    std::string c = "1";
    std::string cache;
    bool verify_cache = false;

    std::string suite;
    int n_max = 4;
    int c_max = 5;
    int sum_max = 0;
    int m_max = 6;
};

bool json_output(const Options& o)
{
    return o.format == "json";
}

int cmd_hall(const Options& o)
{
    const auto basis = HallBasis::generate(static_cast<int>(o.gens), o.max_weight);
    if (json_output(o)) {
        nlohmann::ordered_json j;
        j["gens"] = basis.gens();
        j["max_weight"] = basis.max_weight();
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t id = 0; id < basis.size(); ++id)
            rows.push_back({{"id", id + 1}, {"weight", basis[id].weight}, {"commutator", basis.render(id)}});
        j["basis"] = rows;
        auto counts = nlohmann::ordered_json::array();
        for (int w = 1; w <= basis.max_weight(); ++w)
            counts.push_back(basis.weight_count(w));
        j["weight_counts"] = counts;
        fmt::print("{}\n", j.dump());
        return ok;
    }
    for (std::size_t id = 0; id < basis.size(); ++id)
        fmt::print("{:>5}  {:>3}  {}\n", id + 1, basis[id].weight, basis.render(id));
    for (int w = 1; w <= basis.max_weight(); ++w)
        fmt::print("weight {}: {}\n", w, basis.weight_count(w));
    return ok;
}

int cmd_baer(const Options& o)
{
    const auto factors = parse_factors(o.factors);
    const auto ns = parse_range(o.n, "n");
    const auto cs = parse_range(o.c, "c");
    std::vector<NilpotentProductSpec> cells;
    for (int n = ns.lo; n <= ns.hi; ++n)
        for (int c = cs.lo; c <= cs.hi; ++c)
            cells.push_back({factors, n, c});

    std::optional<ResultCache> cache;
    if (!o.cache.empty())
        cache.emplace(o.cache);

    if (o.verify_cache) {
        if (!cache)
            throw InvalidInput("--verify-cache needs --cache");
        const auto stored = cache->entries();
        const auto fresh = parallel_map<BaerResult>(stored.size(), o.jobs,
                                                    [&](std::size_t i) { return baer_invariant(stored[i].spec); });
        std::size_t matching = 0;
        for (std::size_t i = 0; i < stored.size(); ++i) {
            const bool same = stored[i].same_values(fresh[i]);
            matching += same ? 1 : 0;
            fmt::print("{} {}\n", same ? "PASS" : "FAIL", stored[i].spec.to_string());
            if (!same)
                fmt::print(stderr, "cached {}\nfresh  {}\n", stored[i].to_json(), fresh[i].to_json());
        }
        const bool all_same = matching == stored.size();
        fmt::print("{} {}/{}\n", all_same ? "PASS" : "FAIL", matching, stored.size());
        return all_same ? ok : verification_failed;
    }

    const auto results = parallel_map<BaerResult>(cells.size(), o.jobs, [&](std::size_t i) {
        if (cache)
            if (auto hit = cache->lookup(cells[i]))
                return *hit;
        auto r = baer_invariant(cells[i]);
        if (cache)
            cache->store(r);
        return r;
    });
    for (const auto& r : results) {
        if (json_output(o))
            fmt::print("{}\n", r.to_json());
        else if (results.size() == 1)
            fmt::print("{}\n", r.invariants.to_string());
        else
            fmt::print("n={} c={}: {}\n", r.spec.n, r.spec.c, r.invariants.to_string());
    }
    return ok;
}

int cmd_order(const Options& o)
{
    const auto ns = parse_range(o.n, "n");
    if (ns.lo != ns.hi)
        throw InvalidInput("order takes a single n");
    const NilpotentProductSpec spec{parse_factors(o.factors), ns.lo, 1};
    const auto order = group_order(spec);
    if (json_output(o)) {
        nlohmann::ordered_json j;
        j["factors"] = spec.factors;
        j["n"] = spec.n;
        j["order"] = order.get_str();
        fmt::print("{}\n", j.dump());
    } else {
        fmt::print("{}\n", order.get_str());
    }
    return ok;
}

int cmd_verify(const Options& o)
{
    std::vector<CaseReport> reports;
    if (o.suite == "closed-form") {
        const int sum_max = o.sum_max > 0 ? o.sum_max : o.n_max + o.c_max;
        reports = verify_closed_form(o.n_max, o.c_max, sum_max, o.jobs);
    } else if (o.suite == "schur") {
        reports = verify_schur(o.m_max, o.jobs);
    } else if (o.suite == "section") {
        reports = verify_section(o.m_max, o.n_max, o.jobs);
    } else if (o.suite == "lemmas") {
        std::vector<NilpotentProductSpec> specs;
        if (o.factors.empty()) {
            specs = default_lemma_specs();
        } else {
            const auto factors = parse_factors(o.factors);
            const auto ns = parse_range(o.n, "n");
            const auto cs = parse_range(o.c, "c");
            for (int n = ns.lo; n <= ns.hi; ++n)
                for (int c = cs.lo; c <= cs.hi; ++c)
                    specs.push_back({factors, n, c});
        }
        const auto per_spec = parallel_map<std::vector<CaseReport>>(
            specs.size(), o.jobs, [&](std::size_t i) { return verify_lemmas(specs[i]); });
        for (const auto& batch : per_spec)
            reports.insert(reports.end(), batch.begin(), batch.end());
    }

    std::size_t passed = 0;
    for (const auto& r : reports) {
        passed += r.pass ? 1 : 0;
        fmt::print("{}\n", json_output(o) ? r.to_json() : r.to_text());
    }
    const bool pass = passed == reports.size();
    if (!json_output(o))
        fmt::print("{} {}/{}\n", pass ? "PASS" : "FAIL", passed, reports.size());
    return pass ? ok : verification_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Baer invariants of nilpotent products of cyclic groups"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--jobs,-j", o.jobs, "Worker threads for grid cells")->check(CLI::PositiveNumber);
    app.add_option("--max-basis", o.max_basis, "Cap on the Hall basis size (env NILMULT_MAX_BASIS)")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-exp-bits", o.max_exp_bits, "Cap on exponent bit length (env NILMULT_MAX_EXP_BITS)")
        ->check(CLI::PositiveNumber);

    auto* hall = app.add_subcommand("hall", "Print the Hall basis and the number of basic commutators per weight");
    hall->add_option("--gens", o.gens, "Number of generators")->required()->check(CLI::PositiveNumber);
    hall->add_option("--max-weight", o.max_weight, "Largest weight")->required()->check(CLI::PositiveNumber);

    auto* baer = app.add_subcommand("baer", "Baer invariant N_cM of Z_m1 *n ... *n Z_mk");
    baer->add_option("--factors", o.factors, "Cyclic factor orders, e.g. 2,2");
    baer->add_option("--n", o.n, "Class of the nilpotent product, or a range a..b");
    baer->add_option("--c", o.c, "Class of the variety, or a range a..b");
    baer->add_option("--cache", o.cache, "JSON-lines result cache");
    baer->add_flag("--verify-cache", o.verify_cache, "Recompute every cached result and compare");

    auto* order = app.add_subcommand("order", "Order of the nilpotent product");
    order->add_option("--factors", o.factors, "Cyclic factor orders")->required();
    order->add_option("--n", o.n, "Class of the nilpotent product")->required();

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", o.suite, "closed-form, schur, section or lemmas")
        ->required()
        ->check(CLI::IsMember({"closed-form", "schur", "section", "lemmas"}));
    verify->add_option("--n-max", o.n_max, "Largest n (closed-form, section)")->check(CLI::PositiveNumber);
    verify->add_option("--c-max", o.c_max, "Largest c (closed-form)")->check(CLI::PositiveNumber);
    verify->add_option("--sum-max", o.sum_max, "Largest n + c (closed-form)")->check(CLI::PositiveNumber);
    verify->add_option("--m-max", o.m_max, "Largest factor order (schur, section)")->check(CLI::Range(2, 1000));
    verify->add_option("--factors", o.factors, "Spec for the lemma suite (default: built-in list)");
    verify->add_option("--n", o.n, "n or a..b for the lemma suite");
    verify->add_option("--c", o.c, "c or a..b for the lemma suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid_input;
    }

    try {
        auto& limits = default_limits();
        if (auto v = env_cap("NILMULT_MAX_BASIS"))
            limits.max_basis_size = *v;
        if (auto v = env_cap("NILMULT_MAX_EXP_BITS"))
            limits.max_exponent_bits = *v;
        if (o.max_basis)
            limits.max_basis_size = o.max_basis;
        if (o.max_exp_bits)
            limits.max_exponent_bits = o.max_exp_bits;

        if (baer->parsed() && o.factors.empty() && !o.verify_cache)
            throw InvalidInput("baer needs --factors");

        if (hall->parsed())
            return cmd_hall(o);
        if (baer->parsed())
            return cmd_baer(o);
        if (order->parsed())
            return cmd_order(o);
        return cmd_verify(o);
    } catch (const InvalidInput& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return invalid_input;
    } catch (const ResourceLimitExceeded& e) {
        fmt::print(stderr, "resource limit: {}\n", e.what());
        return resource_limit;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return verification_failed;
    }
}
