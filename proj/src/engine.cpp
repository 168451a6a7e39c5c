#include "nilmult/engine.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include <fmt/format.h>

#include "nilmult/errors.hpp"

namespace nilmult {

namespace {

// above this many repetitions a conjugation is raised to a power by squaring
constexpr unsigned long kRepeatThreshold = 32;

int sign_of(const Integer& x) { return sgn(x); }

} // namespace

FreeNilpotentGroup::FreeNilpotentGroup(HallBasis basis, const Limits& limits)
    : basis_(std::move(basis)), limits_(limits)
{
    const std::size_t n = basis_.size();
    const int L = basis_.max_weight();
    weight_.resize(n);
    tail_limit_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        weight_[i] = basis_[i].weight;
        tail_limit_[i] = std::max(i + 1, basis_.weight_end(L - weight_[i]));
    }
    forward_.resize(n);
    backward_.resize(n);
}

GroupPtr FreeNilpotentGroup::create(int gens, int max_weight, const Limits& limits)
{
    auto basis = HallBasis::generate(gens, max_weight, limits.max_basis_size);
    std::shared_ptr<FreeNilpotentGroup> group(new FreeNilpotentGroup(std::move(basis), limits));
    group->build_tables();
    return group;
}

GroupPtr FreeNilpotentGroup::get(int gens, int max_weight)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, int, std::size_t, std::size_t>, GroupPtr> cache;

    const Limits limits = default_limits();
    const auto key = std::tuple{gens, max_weight, limits.max_basis_size, limits.max_exponent_bits};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    // built outside the lock; a concurrent duplicate is discarded below
    GroupPtr group = create(gens, max_weight, limits);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(group)).first->second;
}

Exponents FreeNilpotentGroup::unit(std::size_t p) const
{
    Exponents v(rank());
    v[p] = 1;
    return v;
}

FreeNilpotentGroup::Sparse FreeNilpotentGroup::to_sparse(const Exponents& v) const
{
    Sparse s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0)
            s.push_back({i, v[i]});
    return s;
}

const FreeNilpotentGroup::ConjugationRule& FreeNilpotentGroup::rule(std::size_t p, std::size_t q, int dir) const
{
    return (dir > 0 ? forward_ : backward_)[p][q - p - 1];
}

void FreeNilpotentGroup::check_bits(const Integer& x) const
{
    if (mpz_sizeinbase(x.get_mpz_t(), 2) > limits_.max_exponent_bits)
        throw ResourceLimitExceeded(fmt::format("exponent exceeded the {}-bit cap during collection",
                                                limits_.max_exponent_bits));
}

bool FreeNilpotentGroup::commutes_with_tail(const Exponents& v, std::size_t p) const
{
    for (std::size_t q = p + 1; q < tail_limit_[p]; ++q)
        if (v[q] != 0)
            return false;
    return true;
}

void FreeNilpotentGroup::mul_sparse(Exponents& v, const Sparse& s) const
{
    for (const auto& t : s)
        mul_gen_power(v, t.index, t.exponent);
}

void FreeNilpotentGroup::mul_gen_power(Exponents& v, std::size_t p, const Integer& k) const
{
    if (k == 0)
        return;
    if (commutes_with_tail(v, p)) {
        v[p] += k;
        check_bits(v[p]);
        return;
    }

    // v = prefix * z_p^a * tail  and  tail * z_p^k = z_p^k * tail^(z_p^k)
    const std::size_t n = rank();
    Exponents tail(n);
    for (std::size_t q = p + 1; q < n; ++q)
        tail[q].swap(v[q]);
    v[p] += k;
    check_bits(v[p]);

    const int dir = sign_of(k);
    Integer count = abs(k);
    if (count <= kRepeatThreshold) {
        for (unsigned long i = count.get_ui(); i > 0; --i) {
            tail = conjugate_tail(tail, p, dir);
            if (commutes_with_tail(tail, p))
                break;
        }
    } else {
        // images of the non-commuting tail generators under conjugation by z_p^(dir*2^j)
        std::vector<Exponents> step;
        std::vector<Exponents> acc;
        const std::size_t lim = tail_limit_[p];
        for (std::size_t q = p + 1; q < lim; ++q) {
            Exponents img(n);
            mul_sparse(img, rule(p, q, dir).image);
            step.push_back(std::move(img));
            acc.push_back(unit(q));
        }
        auto apply = [&](const std::vector<Exponents>& images, const Exponents& h) {
            Exponents out(n);
            for (std::size_t q = p + 1; q < n; ++q) {
                if (h[q] == 0)
                    continue;
                if (q >= lim)
                    mul_gen_power(out, q, h[q]);
                else
                    mul_into(out, power_of(images[q - p - 1], h[q]));
            }
            return out;
        };
        auto compose = [&](const std::vector<Exponents>& outer, const std::vector<Exponents>& inner) {
            std::vector<Exponents> out;
            out.reserve(inner.size());
            for (const auto& img : inner)
                out.push_back(apply(outer, img));
            return out;
        };
        while (count > 0) {
            if (mpz_odd_p(count.get_mpz_t()))
                acc = compose(step, acc);
            count >>= 1;
            if (count > 0)
                step = compose(step, step);
        }
        tail = apply(acc, tail);
    }
    for (std::size_t q = p + 1; q < n; ++q)
        v[q].swap(tail[q]);
}

Exponents FreeNilpotentGroup::conjugate_tail(const Exponents& h, std::size_t p, int dir) const
{
    const std::size_t n = rank();
    const std::size_t lim = tail_limit_[p];
    Exponents out(n);
    for (std::size_t q = p + 1; q < n; ++q) {
        if (h[q] == 0)
            continue;
        if (q >= lim) {
            mul_gen_power(out, q, h[q]);
            continue;
        }
        const auto& r = rule(p, q, dir);
        const Sparse& image = h[q] > 0 ? r.image : r.image_of_inverse;
        const Integer count = abs(h[q]);
        if (count <= kRepeatThreshold) {
            for (unsigned long i = count.get_ui(); i > 0; --i)
                mul_sparse(out, image);
        } else {
            Exponents dense(n);
            mul_sparse(dense, image);
            mul_into(out, power_of(dense, count));
        }
    }
    return out;
}

void FreeNilpotentGroup::mul_into(Exponents& a, const Exponents& b) const
{
    for (std::size_t p = 0; p < b.size(); ++p)
        if (b[p] != 0)
            mul_gen_power(a, p, b[p]);
}

Exponents FreeNilpotentGroup::inverse_of(const Exponents& a) const
{
    // kill the leading exponent repeatedly: a * z_p1^f1 * z_p2^f2 ... = 1
    Exponents t = a;
    Exponents out(a.size());
    for (std::size_t p = 0; p < t.size(); ++p) {
        if (t[p] == 0)
            continue;
        Integer f = -t[p];
        mul_gen_power(t, p, f);
        out[p] = std::move(f);
    }
    return out;
}

Exponents FreeNilpotentGroup::power_of(const Exponents& a, Integer e) const
{
    Exponents base = e < 0 ? inverse_of(a) : a;
    e = abs(e);
    Exponents result(a.size());
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t()))
            mul_into(result, base);
        e >>= 1;
        if (e > 0) {
            Exponents sq = base;
            mul_into(sq, base);
            base = std::move(sq);
        }
    }
    return result;
}

Exponents FreeNilpotentGroup::commutator_of(const Exponents& a, const Exponents& b) const
{
    const std::size_t n = rank();
    std::size_t la = 0;
    while (la < n && a[la] == 0)
        ++la;
    std::size_t lb = 0;
    while (lb < n && b[lb] == 0)
        ++lb;
    if (la == n || lb == n || weight_[la] + weight_[lb] > max_weight())
        return Exponents(n);

    Exponents out = inverse_of(a);
    mul_into(out, inverse_of(b));
    mul_into(out, a);
    mul_into(out, b);
    return out;
}

void FreeNilpotentGroup::build_tables()
{
    const std::size_t n = rank();
    const int L = max_weight();
    for (std::size_t p = n; p-- > 0;) {
        const std::size_t lim = tail_limit_[p];
        forward_[p].resize(lim - p - 1);
        backward_[p].resize(lim - p - 1);

        auto image_of = [&](std::size_t q) {
            Exponents img(n);
            if (q >= lim)
                img[q] = 1;
            else
                mul_sparse(img, forward_[p][q - p - 1].image);
            return img;
        };

        for (std::size_t q = p + 1; q < lim; ++q) {
            const auto& bq = basis_[q];
            Exponents img;
            if (bq.is_generator() || bq.right <= p) {
                // [z_q, z_p] is itself basic
                const std::size_t k = basis_.find(q, p);
                if (k == BasicCommutator::none)
                    throw InternalError(fmt::format("missing basic commutator [{},{}]", q, p));
                img = unit(q);
                img[k] = 1;
            } else {
                // z_q = [z_a, z_b] with p < b < a, and conjugation is an automorphism
                img = commutator_of(image_of(bq.left), image_of(bq.right));
            }
            forward_[p][q - p - 1] = {to_sparse(img), to_sparse(inverse_of(img))};
        }

        // conjugation by z_p^-1: solve y^(z_p) = z_q, each correction is deeper by weight(z_p)
        for (std::size_t q = p + 1; q < lim; ++q) {
            const Exponents target = unit(q);
            Exponents y = target;
            bool converged = false;
            for (int iter = 0; iter <= L; ++iter) {
                Exponents t = conjugate_tail(y, p, +1);
                if (t == target) {
                    converged = true;
                    break;
                }
                Exponents fix = inverse_of(t);
                mul_into(fix, target);
                mul_into(y, fix);
            }
            if (!converged)
                throw InternalError(fmt::format("inverse conjugation rule for ({},{}) did not converge", p, q));
            backward_[p][q - p - 1] = {to_sparse(y), to_sparse(inverse_of(y))};
        }
    }
}

GroupElement FreeNilpotentGroup::identity() const
{
    return GroupElement(shared_from_this(), Exponents(rank()));
}

GroupElement FreeNilpotentGroup::generator(int i) const
{
    if (i < 0 || i >= gens())
        throw InvalidInput(fmt::format("generator index {} out of range for {} generators", i + 1, gens()));
    return eval_basic(static_cast<std::size_t>(i));
}

GroupElement FreeNilpotentGroup::eval_basic(std::size_t id) const
{
    if (id >= rank())
        throw InvalidInput(fmt::format("basis id {} out of range", id));
    return GroupElement(shared_from_this(), unit(id));
}

GroupElement FreeNilpotentGroup::element(Exponents exponents) const
{
    return GroupElement(shared_from_this(), std::move(exponents));
}

GroupElement FreeNilpotentGroup::collect(const Word& word) const
{
    Exponents v(rank());
    for (const auto& letter : word) {
        if (letter.generator < 0 || letter.generator >= gens())
            throw InvalidInput(fmt::format("word uses x{} but the group has {} generators",
                                           letter.generator + 1, gens()));
        mul_gen_power(v, static_cast<std::size_t>(letter.generator), letter.exponent);
    }
    return GroupElement(shared_from_this(), std::move(v));
}

GroupElement FreeNilpotentGroup::parse(std::string_view text) const
{
    return collect(parse_word(text, gens()));
}

GroupElement FreeNilpotentGroup::multiply(const GroupElement& a, const GroupElement& b) const
{
    require_same_group(a, b);
    if (!same_group(a.group(), *this))
        throw InvalidInput("element does not belong to this group");
    Exponents v = a.exponents();
    mul_into(v, b.exponents());
    return GroupElement(shared_from_this(), std::move(v));
}

GroupElement FreeNilpotentGroup::inverse(const GroupElement& a) const
{
    if (!same_group(a.group(), *this))
        throw InvalidInput("element does not belong to this group");
    return GroupElement(shared_from_this(), inverse_of(a.exponents()));
}

GroupElement FreeNilpotentGroup::power(const GroupElement& a, const Integer& e) const
{
    if (!same_group(a.group(), *this))
        throw InvalidInput("element does not belong to this group");
    return GroupElement(shared_from_this(), power_of(a.exponents(), e));
}

GroupElement FreeNilpotentGroup::commutator(const GroupElement& a, const GroupElement& b) const
{
    require_same_group(a, b);
    if (!same_group(a.group(), *this))
        throw InvalidInput("element does not belong to this group");
    return GroupElement(shared_from_this(), commutator_of(a.exponents(), b.exponents()));
}

std::string FreeNilpotentGroup::render(const Exponents& v) const
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0)
            continue;
        if (!out.empty())
            out += ' ';
        out += basis_.render(i);
        if (v[i] != 1)
            out += "^" + v[i].get_str();
    }
    return out.empty() ? "1" : out;
}

bool same_group(const FreeNilpotentGroup& a, const FreeNilpotentGroup& b)
{
    return &a == &b || (a.gens() == b.gens() && a.max_weight() == b.max_weight());
}

void require_same_group(const GroupElement& a, const GroupElement& b)
{
    if (!same_group(a.group(), b.group()))
        throw InvalidInput(fmt::format("basis mismatch: elements of F/gamma_{}(F) on {} letters and "
                                       "F/gamma_{}(F) on {} letters",
                                       a.group().max_weight() + 1, a.group().gens(),
                                       b.group().max_weight() + 1, b.group().gens()));
}

GroupElement::GroupElement(GroupPtr group, Exponents exponents)
    : group_(std::move(group)), exponents_(std::move(exponents))
{
    if (!group_)
        throw InvalidInput("group element without a group");
    if (exponents_.size() != group_->rank())
        throw InvalidInput(fmt::format("exponent vector has length {}, basis has {} elements",
                                       exponents_.size(), group_->rank()));
}

bool GroupElement::is_identity() const
{
    return leading() == exponents_.size();
}

std::size_t GroupElement::leading() const
{
    std::size_t i = 0;
    while (i < exponents_.size() && exponents_[i] == 0)
        ++i;
    return i;
}

GroupElement GroupElement::operator*(const GroupElement& other) const
{
    return group_->multiply(*this, other);
}

GroupElement GroupElement::inverse() const
{
    return group_->inverse(*this);
}

GroupElement GroupElement::pow(const Integer& e) const
{
    return group_->power(*this, e);
}

std::string GroupElement::to_string() const
{
    return group_->render(exponents_);
}

bool operator==(const GroupElement& a, const GroupElement& b)
{
    return same_group(a.group(), b.group()) && a.exponents_ == b.exponents_;
}

GroupElement commutator(const GroupElement& a, const GroupElement& b)
{
    return a.group().commutator(a, b);
}

GroupElement conjugate(const GroupElement& a, const GroupElement& b)
{
    require_same_group(a, b);
    return b.inverse() * a * b;
}

} // namespace nilmult
