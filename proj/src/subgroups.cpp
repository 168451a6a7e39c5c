#include "nilmult/subgroups.hpp"

#include <deque>

#include <fmt/format.h>

#include "nilmult/errors.hpp"

namespace nilmult {

namespace {

std::size_t first_nonzero(const Exponents& v)
{
    std::size_t i = 0;
    while (i < v.size() && v[i] == 0)
        ++i;
    return i;
}

void require_group(const GroupPtr& group, const GroupElement& g)
{
    if (!same_group(*group, g.group()))
        throw InvalidInput("basis mismatch: generator does not belong to the ambient group");
}

void require_same(const InducedSequence& a, const InducedSequence& b)
{
    if (!same_group(a.group(), b.group()))
        throw InvalidInput("basis mismatch: subgroups of different free nilpotent groups");
}

} // namespace

/// Grows an echelon table of rows (one slot per leading index) to the
/// closure of everything added: pairwise row commutators, plus conjugates
/// by the ambient generators and their inverses when `normal` is set.
class SubgroupBuilder {
public:
    SubgroupBuilder(GroupPtr group, bool normal)
        : group_(std::move(group)), g_(*group_), normal_(normal), slots_(g_.rank()), queued_(g_.rank(), false)
    {
    }

    void add(Exponents v) { sift_insert(std::move(v)); }

    InducedSequence finish()
    {
        do {
            drain();
        } while (verification_pass());
        canonicalize();

        InducedSequence out(group_);
        for (auto& slot : slots_)
            if (slot)
                out.rows_.emplace_back(group_, std::move(*slot));
        return out;
    }

private:
    int weight(std::size_t p) const { return g_.basis()[p].weight; }

    void enqueue(std::size_t p)
    {
        if (!queued_[p]) {
            queued_[p] = true;
            pending_.push_back(p);
        }
    }

    // Returns true if the table changed.
    bool sift_insert(Exponents v)
    {
        bool changed = false;
        for (;;) {
            const std::size_t p = first_nonzero(v);
            if (p == v.size())
                return changed;
            if (!slots_[p]) {
                if (v[p] < 0)
                    v = g_.inverse_of(v);
                place(p, std::move(v));
                return true;
            }
            const Exponents& row = *slots_[p];
            if (mpz_divisible_p(v[p].get_mpz_t(), row[p].get_mpz_t())) {
                Exponents t = g_.power_of(row, -(v[p] / row[p]));
                g_.mul_into(t, v);
                v = std::move(t);
                continue;
            }
            // extended Euclid on the leading exponents of the row and v
            Exponents a = row;
            Exponents b = std::move(v);
            while (b[p] != 0) {
                Exponents t = g_.power_of(b, -(a[p] / b[p]));
                g_.mul_into(t, a);
                a = std::move(b);
                b = std::move(t);
            }
            if (a[p] < 0)
                a = g_.inverse_of(a);
            place(p, std::move(a));
            changed = true;
            v = std::move(b);
        }
    }

    std::vector<std::size_t> occupied() const
    {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p < slots_.size(); ++p)
            if (slots_[p])
                out.push_back(p);
        return out;
    }

    // closure conditions for the row in slot p against the current table
    bool close_row(std::size_t p)
    {
        bool changed = false;
        const int L = g_.max_weight();
        const Exponents row = *slots_[p];
        for (std::size_t s : occupied()) {
            if (s == p || weight(p) + weight(s) > L || !slots_[s])
                continue;
            const Exponents other = *slots_[s];
            changed = sift_insert(g_.commutator_of(row, other)) || changed;
        }
        if (normal_ && weight(p) + 1 <= L) {
            for (int x = 0; x < g_.gens(); ++x) {
                Exponents gen(g_.rank());
                gen[static_cast<std::size_t>(x)] = 1;
                changed = sift_insert(g_.commutator_of(row, gen)) || changed;
                gen[static_cast<std::size_t>(x)] = -1;
                changed = sift_insert(g_.commutator_of(row, gen)) || changed;
            }
        }
        return changed;
    }

    void drain()
    {
        while (!pending_.empty()) {
            const std::size_t p = pending_.front();
            pending_.pop_front();
            queued_[p] = false;
            if (slots_[p])
                close_row(p);
        }
    }

    bool verification_pass()
    {
        bool changed = false;
        for (std::size_t p : occupied())
            if (slots_[p])
                changed = close_row(p) || changed;
        return changed;
    }

    // Right-multiplies row i by powers of the rows led at or after `from`
    // (and after i) so that its entries there fall into [0, leader).
    void reduce_row(std::size_t i, std::size_t from)
    {
        Exponents& row = *slots_[i];
        for (std::size_t j = std::max(from, i + 1); j < slots_.size(); ++j) {
            if (!slots_[j] || row[j] == 0)
                continue;
            const Exponents& other = *slots_[j];
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), row[j].get_mpz_t(), other[j].get_mpz_t());
            if (q != 0)
                g_.mul_into(row, g_.power_of(other, -q));
        }
    }

    // Installs a row and keeps the table Hermite-reduced, which bounds the
    // exponents that later sifting has to raise rows to.
    void place(std::size_t p, Exponents row)
    {
        slots_[p] = std::move(row);
        reduce_row(p, p + 1);
        for (std::size_t i = 0; i < p; ++i)
            if (slots_[i])
                reduce_row(i, p);
        enqueue(p);
    }

    void canonicalize()
    {
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i])
                reduce_row(i, i + 1);
    }

    GroupPtr group_;
    const FreeNilpotentGroup& g_;
    bool normal_;
    std::vector<std::optional<Exponents>> slots_;
    std::vector<bool> queued_;
    std::deque<std::size_t> pending_;
};

InducedSequence::InducedSequence(GroupPtr group) : group_(std::move(group))
{
    if (!group_)
        throw InvalidInput("subgroup without an ambient group");
}

std::vector<std::size_t> InducedSequence::leaders() const
{
    std::vector<std::size_t> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_)
        out.push_back(r.leading());
    return out;
}

std::vector<Integer> InducedSequence::leading_exponents() const
{
    std::vector<Integer> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_)
        out.push_back(r[r.leading()]);
    return out;
}

std::string InducedSequence::dump() const
{
    std::string out;
    for (const auto& r : rows_)
        out += r.to_string() + "\n";
    return out;
}

bool operator==(const InducedSequence& a, const InducedSequence& b)
{
    if (!same_group(a.group(), b.group()) || a.rows_.size() != b.rows_.size())
        return false;
    for (std::size_t i = 0; i < a.rows_.size(); ++i)
        if (a.rows_[i].exponents() != b.rows_[i].exponents())
            return false;
    return true;
}

InducedSequence subgroup(const GroupPtr& group, const std::vector<GroupElement>& generators)
{
    SubgroupBuilder b(group, false);
    for (const auto& g : generators) {
        require_group(group, g);
        b.add(g.exponents());
    }
    return b.finish();
}

InducedSequence subgroup(const std::vector<GroupElement>& generators)
{
    if (generators.empty())
        throw InvalidInput("subgroup of an empty generator list needs an explicit ambient group");
    return subgroup(generators.front().group_ptr(), generators);
}

InducedSequence normal_closure(const GroupPtr& group, const std::vector<GroupElement>& generators)
{
    SubgroupBuilder b(group, true);
    for (const auto& g : generators) {
        require_group(group, g);
        b.add(g.exponents());
    }
    return b.finish();
}

InducedSequence gamma_tail(const GroupPtr& group, int j)
{
    if (j < 1)
        throw InvalidInput(fmt::format("gamma_{} is undefined; weights start at 1", j));
    InducedSequence out(group);
    for (std::size_t id = group->basis().weight_begin(j); id < group->rank(); ++id)
        out.rows_.push_back(group->eval_basic(id));
    return out;
}

InducedSequence whole_group(const GroupPtr& group)
{
    return gamma_tail(group, 1);
}

InducedSequence mutual_commutator(const InducedSequence& h, const InducedSequence& k)
{
    require_same(h, k);
    const auto& g = h.group();
    const int L = g.max_weight();
    SubgroupBuilder b(h.group_ptr(), true);
    for (const auto& x : h.rows()) {
        const int wx = g.basis()[x.leading()].weight;
        for (const auto& y : k.rows())
            if (wx + g.basis()[y.leading()].weight <= L)
                b.add(g.commutator_of(x.exponents(), y.exponents()));
    }
    return b.finish();
}

InducedSequence iterated_commutator_with_ambient(const InducedSequence& h, int c)
{
    if (c < 0)
        throw InvalidInput("iterated commutator needs c >= 0");
    const auto& g = h.group();
    InducedSequence cur = h;
    for (int step = 0; step < c && !cur.is_trivial(); ++step) {
        // [H, Q] is the normal closure of [h, x] over rows h and generators x
        SubgroupBuilder b(h.group_ptr(), true);
        for (const auto& row : cur.rows()) {
            if (g.basis()[row.leading()].weight + 1 > g.max_weight())
                continue;
            for (int x = 0; x < g.gens(); ++x)
                b.add(g.commutator_of(row.exponents(), g.generator(x).exponents()));
        }
        cur = b.finish();
    }
    return cur;
}

InducedSequence intersect_with_tail(const InducedSequence& h, int j)
{
    InducedSequence out(h.group_ptr());
    const std::size_t start = h.group().basis().weight_begin(j);
    for (const auto& r : h.rows())
        if (r.leading() >= start)
            out.rows_.push_back(r);
    return out;
}

std::optional<std::vector<Integer>> membership(const GroupElement& g, const InducedSequence& h)
{
    require_group(h.group_ptr(), g);
    const auto& G = h.group();
    std::vector<Integer> coords(h.size());
    Exponents t = g.exponents();
    std::size_t i = 0;
    for (;;) {
        const std::size_t p = first_nonzero(t);
        if (p == t.size())
            return coords;
        while (i < h.size() && h.rows()[i].leading() < p)
            ++i;
        if (i == h.size() || h.rows()[i].leading() != p)
            return std::nullopt;
        const auto& row = h.rows()[i].exponents();
        if (!mpz_divisible_p(t[p].get_mpz_t(), row[p].get_mpz_t()))
            return std::nullopt;
        coords[i] = t[p] / row[p];
        Exponents next = G.power_of(row, -coords[i]);
        G.mul_into(next, t);
        t = std::move(next);
    }
}

bool contains(const InducedSequence& h, const GroupElement& g)
{
    return membership(g, h).has_value();
}

GroupElement expand(const InducedSequence& h, const std::vector<Integer>& coords)
{
    if (coords.size() != h.size())
        throw InvalidInput("coordinate vector does not match the number of rows");
    const auto& G = h.group();
    Exponents v(G.rank());
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] != 0)
            G.mul_into(v, G.power_of(h.rows()[i].exponents(), coords[i]));
    return G.element(std::move(v));
}

InducedSequence product(const InducedSequence& h, const InducedSequence& k)
{
    require_same(h, k);
    SubgroupBuilder b(h.group_ptr(), false);
    for (const auto& r : h.rows())
        b.add(r.exponents());
    for (const auto& r : k.rows())
        b.add(r.exponents());
    return b.finish();
}

bool equal(const InducedSequence& h, const InducedSequence& k)
{
    return h == k;
}

bool contains(const InducedSequence& h, const InducedSequence& k)
{
    require_same(h, k);
    for (const auto& r : k.rows())
        if (!contains(h, r))
            return false;
    return true;
}

bool verify_normal(const InducedSequence& h)
{
    const auto& G = h.group();
    for (const auto& r : h.rows()) {
        for (int x = 0; x < G.gens(); ++x) {
            const auto gen = G.generator(x);
            if (!contains(h, conjugate(r, gen)) || !contains(h, conjugate(r, gen.inverse())))
                return false;
        }
    }
    return true;
}

std::optional<Integer> index_in_ambient(const InducedSequence& h)
{
    if (h.size() != h.group().rank())
        return std::nullopt;
    Integer index = 1;
    for (const auto& e : h.leading_exponents())
        index *= e;
    return index;
}

GroupElement coset_representative(const GroupElement& g, const InducedSequence& h)
{
    require_group(h.group_ptr(), g);
    const auto& G = h.group();
    Exponents t = g.exponents();
    for (const auto& row : h.rows()) {
        const std::size_t p = row.leading();
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), t[p].get_mpz_t(), row[p].get_mpz_t());
        if (q != 0)
            G.mul_into(t, G.power_of(row.exponents(), -q));
    }
    return G.element(std::move(t));
}

AbelianInvariants quotient_invariants(const InducedSequence& h, const InducedSequence& k)
{
    require_same(h, k);
    const auto& G = h.group();
    const int L = G.max_weight();
    if (!contains(h, k))
        throw PreconditionViolation("quotient_invariants: K is not contained in H");

    const auto& hr = h.rows();
    const std::size_t m = hr.size();
    std::vector<int> hw(m);
    for (std::size_t i = 0; i < m; ++i)
        hw[i] = G.basis()[hr[i].leading()].weight;

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (hw[i] + hw[j] <= L && !contains(k, commutator(hr[i], hr[j])))
                throw PreconditionViolation("quotient_invariants: [H,H] is not contained in K");
    for (const auto& kr : k.rows()) {
        const int wk = G.basis()[kr.leading()].weight;
        for (std::size_t i = 0; i < m; ++i)
            if (wk + hw[i] <= L && !contains(k, commutator(kr, hr[i])))
                throw PreconditionViolation("quotient_invariants: K is not normal in H");
    }

    // Abelianized presentation of H/K on the rows of H: the rows of K, plus the
    // conjugation relations h_j^(h_i^{+-1}) = w_ij of the induced sequence.
    IntegerMatrix rel(0, m);
    auto certificate = [&](const GroupElement& x) {
        auto c = membership(x, h);
        if (!c)
            throw InternalError("element of H failed to sift through H");
        return *c;
    };
    for (const auto& kr : k.rows())
        rel.append_row(certificate(kr));
    for (std::size_t i = 0; i < m; ++i) {
        if (hw[i] + hw.front() > L)
            continue;
        const auto inv = hr[i].inverse();
        for (std::size_t j = i + 1; j < m; ++j) {
            if (hw[i] + hw[j] > L)
                continue;
            for (const auto& conj : {conjugate(hr[j], hr[i]), conjugate(hr[j], inv)}) {
                auto row = certificate(conj);
                row[j] -= 1;
                rel.append_row(row);
            }
        }
    }
    auto inv = smith_invariants(rel, m);

    // cross-check the order against the index computed from the echelon forms
    Integer index = 1;
    bool finite = true;
    const auto kl = k.leaders();
    const auto ke = k.leading_exponents();
    for (std::size_t i = 0, t = 0; i < m; ++i) {
        const std::size_t p = hr[i].leading();
        while (t < kl.size() && kl[t] < p)
            ++t;
        if (t == kl.size() || kl[t] != p) {
            finite = false;
            break;
        }
        index *= ke[t] / hr[i][p];
    }
    const auto ord = order(inv);
    if (finite != ord.has_value() || (finite && *ord != index))
        throw InternalError(fmt::format("quotient invariants {} disagree with the index {}", inv.to_string(),
                                        finite ? index.get_str() : std::string("infinite")));
    return inv;
}

} // namespace nilmult
