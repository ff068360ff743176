#ifndef FPTOWER_QUOTIENT_HPP
#define FPTOWER_QUOTIENT_HPP

#include <fptower/coset_table.hpp>
#include <fptower/fingerprint.hpp>
#include <fptower/rewriting.hpp>
#include <fptower/smith.hpp>
#include <fptower/tietze.hpp>
#include <fptower/triangle.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fptower {

/// An epimorphism onto Z/p, stored as the image of each generator. Image
/// vectors are normalized so the first nonzero entry is 1.
struct EpiToCyclic {
    long p = 3;
    std::vector<long> images;

    [[nodiscard]] long value(const Word & w) const
    {
        long v = 0;
        for (auto l : w)
            v += l > 0 ? images[static_cast<std::size_t>(generator_of(l))] : p - images[static_cast<std::size_t>(generator_of(l))];
        return v % p;
    }

    [[nodiscard]] std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < images.size(); ++i)
            s += (i ? "," : "") + std::to_string(images[i]);
        return s + ")";
    }

    friend bool operator==(const EpiToCyclic &, const EpiToCyclic &) = default;
};

/// All epimorphisms onto Z/p up to scalar, in lexicographic order of their
/// normalized image vectors.
inline std::vector<EpiToCyclic> epimorphisms_to_cyclic(const Presentation & pres, long p)
{
    auto basis = nullspace_mod_p(exponent_matrix(pres), p);
    const std::size_t n = static_cast<std::size_t>(pres.generator_count());
    std::set<std::vector<long>> seen;
    std::vector<EpiToCyclic> out;
    std::vector<long> coeff(basis.size(), 0);
    // every nonzero combination of the basis, then normalize and dedupe
    for (;;) {
        std::size_t pos = 0;
        while (pos < coeff.size() && coeff[pos] == p - 1)
            coeff[pos++] = 0;
        if (pos == coeff.size())
            break;
        ++coeff[pos];
        std::vector<long> v(n, 0);
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t g = 0; g < n; ++g)
                v[g] = (v[g] + coeff[i] * basis[i][g]) % p;
        auto lead = std::find_if(v.begin(), v.end(), [](long x) { return x != 0; });
        if (lead == v.end())
            continue;
        long inv = 1;
        while ((inv * *lead) % p != 1)
            ++inv;
        for (auto & x : v)
            x = (x * inv) % p;
        if (seen.insert(v).second)
            out.push_back({p, v});
    }
    std::sort(out.begin(), out.end(), [](const EpiToCyclic & a, const EpiToCyclic & b) { return a.images < b.images; });
    return out;
}

/// Coset table of the kernel: coset = image value.
inline CosetTable kernel_table(const EpiToCyclic & epi)
{
    std::vector<std::vector<int>> perms;
    for (long v : epi.images) {
        std::vector<int> perm(static_cast<std::size_t>(epi.p));
        for (long c = 0; c < epi.p; ++c)
            perm[static_cast<std::size_t>(c)] = static_cast<int>((c + v) % epi.p);
        perms.push_back(std::move(perm));
    }
    return CosetTable::from_permutations(perms);
}

using Simplifier = std::function<TietzeResult(const Presentation &, const TietzeBudget &)>;

struct RecordOptions {
    bool simplify = true;
    TietzeBudget budget;
    Simplifier simplifier; ///< defaults to simplify_presentation
};

/// Abelian invariants before and after one Tietze simplification.
struct TietzeAudit {
    std::string label;
    AbelianInvariants before, after;
    [[nodiscard]] bool agrees() const { return before == after; }
};

struct SubgroupRecord;
using RecordPtr = std::shared_ptr<const SubgroupRecord>;

/// A finitely presented group in a tower: either a root, or a finite-index
/// subgroup of its parent carried with a coset table and rewriting data.
struct SubgroupRecord {
    std::string label;
    RecordPtr parent;
    std::optional<SubgroupPresentation> rewriting; ///< relative to the parent; absent for a root
    Presentation presentation;
    std::vector<Word> generating_words; ///< current generators in the parent's alphabet
    std::optional<EpiToCyclic> epi;     ///< set when the record is a kernel in its parent
    AbelianInvariants invariants;
    std::size_t index_in_parent = 1;
    std::uint64_t index_in_root = 1;
    bool simplified = false;
    bool budget_exhausted = false;
    std::optional<TietzeAudit> audit;
    double seconds = 0; ///< wall time spent building the record

    [[nodiscard]] const CosetTable * table() const { return rewriting ? rewriting->table.get() : nullptr; }

    [[nodiscard]] const SubgroupRecord & root() const { return parent ? parent->root() : *this; }

    /// The word in this record's alphabet, or nullopt if w is not a member.
    [[nodiscard]] std::optional<Word> try_rewrite_from_root(const Word & w) const
    {
        if (! parent)
            return w;
        auto up = parent->try_rewrite_from_root(w);
        if (! up || rewriting->table->trace(*up) != 0)
            return std::nullopt;
        return rewriting->rewrite(*up);
    }

    /// Throws std::domain_error if w is not a member.
    [[nodiscard]] Word rewrite_from_root(const Word & w) const
    {
        auto r = try_rewrite_from_root(w);
        if (! r)
            throw std::domain_error(label + ": word does not lie in the subgroup");
        return *r;
    }

    [[nodiscard]] bool contains_root_word(const Word & w) const { return try_rewrite_from_root(w).has_value(); }

    [[nodiscard]] Word expand_to_root(const Word & w) const
    {
        if (! parent)
            return w;
        return parent->expand_to_root(rewriting->expand(w));
    }

    [[nodiscard]] std::vector<Word> generators_in_root() const
    {
        std::vector<Word> out;
        for (int g = 0; g < presentation.generator_count(); ++g)
            out.push_back(expand_to_root(Word::generator(g)));
        return out;
    }
};

namespace detail {
    inline double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    inline TietzeResult run_simplifier(const RecordOptions & options, const Presentation & pres)
    {
        return options.simplifier ? options.simplifier(pres, options.budget) : simplify_presentation(pres, options.budget);
    }
} // namespace detail

inline RecordPtr make_root_record(std::string label, Presentation pres)
{
    auto rec = std::make_shared<SubgroupRecord>();
    rec->label = std::move(label);
    rec->invariants = abelian_invariants(pres);
    rec->presentation = std::move(pres);
    for (int g = 0; g < rec->presentation.generator_count(); ++g)
        rec->generating_words.push_back(Word::generator(g));
    return rec;
}

/// Simplifies a record's presentation, keeping membership and rewriting intact.
inline RecordPtr simplify_record(const RecordPtr & rec, const RecordOptions & options = {})
{
    if (! rec->rewriting || rec->simplified)
        return rec;
    auto t0 = std::chrono::steady_clock::now();
    auto out = std::make_shared<SubgroupRecord>(*rec);
    out->rewriting = apply_tietze(*rec->rewriting, detail::run_simplifier(options, rec->presentation));
    out->presentation = out->rewriting->presentation;
    out->generating_words = out->rewriting->generator_words;
    out->simplified = true;
    out->budget_exhausted = out->rewriting->budget_exhausted;
    out->invariants = abelian_invariants(out->presentation);
    out->audit = TietzeAudit{rec->label, rec->invariants, out->invariants};
    out->seconds += detail::seconds_since(t0);
    return out;
}

/// Subgroup of `parent` given by a closed coset table over the parent's presentation.
inline RecordPtr make_subgroup_record(const RecordPtr & parent, std::string label, CosetTable table,
    const RecordOptions & options = {})
{
    auto t0 = std::chrono::steady_clock::now();
    auto rec = std::make_shared<SubgroupRecord>();
    rec->label = std::move(label);
    rec->parent = parent;
    rec->index_in_parent = table.index();
    rec->index_in_root = parent->index_in_root * table.index();
    rec->rewriting = reidemeister_schreier(parent->presentation, table);
    rec->presentation = rec->rewriting->presentation;
    rec->generating_words = rec->rewriting->generator_words;
    rec->invariants = abelian_invariants(rec->presentation);
    rec->seconds = detail::seconds_since(t0);
    if (options.simplify)
        return simplify_record(rec, options);
    return rec;
}

/// One record per kernel of an epimorphism onto Z/p, sorted by abelian
/// invariants (listing order) and then by image vector.
inline std::vector<RecordPtr> prime_index_normal_subgroups(const RecordPtr & rec, long p, const RecordOptions & options = {})
{
    std::vector<RecordPtr> out;
    for (auto & epi : epimorphisms_to_cyclic(rec->presentation, p)) {
        auto k = make_subgroup_record(rec, "", kernel_table(epi), options);
        std::const_pointer_cast<SubgroupRecord>(k)->epi = epi;
        out.push_back(k);
    }
    std::stable_sort(out.begin(), out.end(), [](const RecordPtr & a, const RecordPtr & b) {
        if (listing_before(a->invariants, b->invariants))
            return true;
        if (listing_before(b->invariants, a->invariants))
            return false;
        return a->epi->images < b->epi->images;
    });
    for (std::size_t i = 0; i < out.size(); ++i)
        std::const_pointer_cast<SubgroupRecord>(out[i])->label = rec->label + ".k" + std::to_string(i + 1);
    return out;
}

// ---------------------------------------------------------------------------
// chain descent

/// Picks the kernel to descend into (index into `kernels`), or -1.
using ChainSelector = std::function<int(int level, const SubgroupRecord & group, const std::vector<RecordPtr> & kernels)>;

/// The kernel with the wanted invariants whose image vector is least.
inline ChainSelector lexicographic_selector(AbelianInvariants wanted = AbelianInvariants::from_string("[3,3]"))
{
    return [wanted](int, const SubgroupRecord &, const std::vector<RecordPtr> & kernels) {
        int best = -1;
        for (std::size_t i = 0; i < kernels.size(); ++i)
            if (kernels[i]->invariants == wanted
                && (best < 0 || kernels[i]->epi->images < kernels[static_cast<std::size_t>(best)]->epi->images))
                best = static_cast<int>(i);
        return best;
    };
}

/// The first kernel containing every witness (root words). Level 0 uses
/// `first`, deeper levels `deeper`; an empty list falls back to `fallback`.
inline ChainSelector witness_selector(std::vector<Word> first, std::vector<Word> deeper,
    ChainSelector fallback = lexicographic_selector())
{
    return [first = std::move(first), deeper = std::move(deeper), fallback](int level, const SubgroupRecord & group,
               const std::vector<RecordPtr> & kernels) {
        const auto & witnesses = level == 0 ? first : deeper;
        if (witnesses.empty())
            return fallback(level, group, kernels);
        for (std::size_t i = 0; i < kernels.size(); ++i)
            if (std::all_of(witnesses.begin(), witnesses.end(), [&](const Word & w) { return kernels[i]->contains_root_word(w); }))
                return static_cast<int>(i);
        return -1;
    };
}

struct ChainLevel {
    RecordPtr group;
    std::vector<RecordPtr> kernels;
    int selected = -1;
    double seconds = 0;
};

struct ChainResult {
    std::vector<ChainLevel> levels;
    bool budget_exhausted = false;
    std::string diagnostic;

    /// The descended subgroups G_2, G_3, ... (the root is not included).
    [[nodiscard]] std::vector<RecordPtr> chain() const
    {
        std::vector<RecordPtr> out;
        for (std::size_t i = 1; i < levels.size(); ++i)
            out.push_back(levels[i].group);
        return out;
    }
};

namespace detail {
    inline std::string next_label(const std::string & label)
    {
        if (label.size() > 1 && label[0] == 'G' && std::all_of(label.begin() + 1, label.end(), ::isdigit))
            return "G" + std::to_string(std::stoi(label.substr(1)) + 1);
        return label + "'";
    }
} // namespace detail

struct ChainOptions {
    RecordOptions kernels{.simplify = false};   ///< kernels only need invariants
    RecordOptions selected;                     ///< the chosen kernel is simplified before descending
    double time_limit_seconds = 0;              ///< 0 = unlimited; checked between levels
    std::function<void(const ChainLevel &)> progress;
};

/// Descends `depth` levels from `root`. Level i holds G_{i+1} together with
/// all of its index-3 normal subgroups; the selector chooses G_{i+2}.
inline ChainResult descend_chain(const RecordPtr & root, int depth, const ChainSelector & selector, const ChainOptions & options = {})
{
    ChainResult result;
    auto start = std::chrono::steady_clock::now();
    RecordPtr group = root;
    for (int level = 0; level <= depth; ++level) {
        if (level > 0 && options.time_limit_seconds > 0 && detail::seconds_since(start) > options.time_limit_seconds) {
            result.budget_exhausted = true;
            result.diagnostic = "time budget exhausted before " + group->label + "; deepest complete level " + result.levels.back().group->label;
            break;
        }
        auto t0 = std::chrono::steady_clock::now();
        ChainLevel lv;
        lv.group = group;
        lv.kernels = prime_index_normal_subgroups(group, 3, options.kernels);
        if (level < depth) {
            lv.selected = selector(level, *group, lv.kernels);
            if (lv.selected < 0) {
                lv.seconds = detail::seconds_since(t0);
                result.levels.push_back(lv);
                result.diagnostic = "selector found no kernel below " + group->label;
                if (options.progress)
                    options.progress(result.levels.back());
                break;
            }
            auto next = simplify_record(lv.kernels[static_cast<std::size_t>(lv.selected)], options.selected);
            std::const_pointer_cast<SubgroupRecord>(next)->label = detail::next_label(group->label);
            group = next;
        }
        lv.seconds = detail::seconds_since(t0);
        result.levels.push_back(lv);
        if (options.progress)
            options.progress(result.levels.back());
    }
    return result;
}

// ---------------------------------------------------------------------------
// quotients

/// Order of the group by enumeration over the trivial subgroup, or nullopt
/// if the enumeration did not close (order unknown, possibly infinite).
inline std::optional<std::size_t> quotient_order(const Presentation & pres, const EnumerationLimits & limits = {})
{
    try {
        return todd_coxeter(pres, {}, limits).index();
    }
    catch (const LimitExceeded &) {
        return std::nullopt;
    }
}

/// The record's presentation with `extra` (words in its alphabet) appended as relators.
inline Presentation normal_closure_quotient(const SubgroupRecord & rec, const std::vector<Word> & extra)
{
    Presentation q = rec.presentation;
    for (auto & w : extra)
        q.add_relator(w);
    return q;
}

struct CommutatorCheck {
    bool holds = false;
    std::optional<std::size_t> quotient_order;
    std::string diagnostic;
};

/// G/[G,G] is (Z/3)^2: the quotient by all pairwise generator commutators has
/// order 9 and every generator image has order dividing 3.
inline CommutatorCheck commutator_check(const Presentation & pres, const EnumerationLimits & limits = {.max_cosets = 100'000})
{
    CommutatorCheck out;
    Presentation q = pres;
    const int n = pres.generator_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            q.add_relator(commutator(Word::generator(i), Word::generator(j)));
    // modulo the commutators each relator may be replaced by its exponent vector
    for (auto & r : pres.relators()) {
        Word flat;
        for (int g = 0; g < n; ++g)
            flat *= Word::generator(g, static_cast<int>(r.exponent_sum(g)));
        q.add_relator(flat);
    }
    try {
        auto table = todd_coxeter(q, {}, limits);
        out.quotient_order = table.index();
        // regular action, so tracing from the base coset decides the order
        bool cubes = true;
        for (int g = 0; g < n; ++g)
            cubes = cubes && table.trace(Word::generator(g, 3)) == 0;
        out.holds = table.index() == 9 && cubes;
        if (! out.holds)
            out.diagnostic = "abelianized quotient has order " + std::to_string(table.index());
    }
    catch (const LimitExceeded & e) {
        out.diagnostic = std::string("quotient did not close (possibly infinite): ") + e.what();
    }
    return out;
}

inline bool commutator_subgroup_check(const SubgroupRecord & rec, const EnumerationLimits & limits = {.max_cosets = 100'000})
{
    return commutator_check(rec.presentation, limits).holds;
}

struct DerivedSubgroupCheck {
    bool holds = false;
    CommutatorCheck abelianization;
    std::size_t index = 0;      ///< of the candidate in the group
    bool normal = false;
    bool abelian_quotient = false;
    std::string diagnostic;
};

/// candidate = [group, group], for a subgroup of index 9 when Abel(group) is
/// (Z/3)^2: group acts regularly and abelianly on the cosets of candidate, so
/// candidate contains the derived subgroup, and the indices agree.
inline DerivedSubgroupCheck derived_subgroup_check(const SubgroupRecord & group, const SubgroupRecord & candidate,
    const EnumerationLimits & limits = {.max_cosets = 100'000})
{
    DerivedSubgroupCheck out;
    out.abelianization = commutator_check(group.presentation, limits);
    std::vector<Word> gens;
    for (auto & g : candidate.generators_in_root()) {
        auto w = group.try_rewrite_from_root(g);
        if (! w) {
            out.diagnostic = candidate.label + " is not contained in " + group.label;
            return out;
        }
        gens.push_back(*w);
    }
    CosetTable table;
    try {
        table = todd_coxeter(group.presentation, gens, limits);
    }
    catch (const LimitExceeded & e) {
        out.diagnostic = e.what();
        return out;
    }
    out.index = table.index();
    auto perms = table.permutation_representation();
    FiniteGroup action(PermutationGroup{group.label, perms, std::nullopt});
    out.normal = action.order() == out.index;
    out.abelian_quotient = true;
    for (std::size_t i = 0; i < perms.size(); ++i)
        for (std::size_t j = i + 1; j < perms.size(); ++j)
            for (std::size_t x = 0; x < out.index; ++x)
                if (perms[i][static_cast<std::size_t>(perms[j][x])] != perms[j][static_cast<std::size_t>(perms[i][x])])
                    out.abelian_quotient = false;
    out.holds = out.abelianization.holds && out.index == 9 && out.normal && out.abelian_quotient;
    if (! out.holds && out.diagnostic.empty())
        out.diagnostic = out.abelianization.holds ? "action on the cosets is not regular and abelian" : out.abelianization.diagnostic;
    return out;
}

struct Order3Certificate {
    bool holds = false;
    bool members = false;
    std::optional<std::size_t> quotient_order;
    std::string method; ///< "kernel", "direct" or "simplified"
    std::string diagnostic;
};

/// next = <<gens3>> in rec: every g (root word) lies in next and
/// rec / <<gens3>> has order 3.
///
/// Since next has index 3, <<gens3>> is the normal closure in next of the
/// conjugates of gens3 by 1, t, t^2 for any t outside next, and the order is
/// 3 |next / that closure|. That quotient is usually trivial and collapses
/// under Tietze moves, so it is tried first. Otherwise rec with gens3 added
/// is enumerated directly, then once more after simplification.
inline Order3Certificate order3_generation_check(const SubgroupRecord & next, const SubgroupRecord & rec,
    const std::vector<Word> & gens3, const EnumerationLimits & limits = {.max_cosets = 200'000},
    const TietzeBudget & budget = {}, const Simplifier & simplifier = {})
{
    auto simplify = [&](const Presentation & p) {
        return simplifier ? simplifier(p, budget).presentation : simplify_presentation(p, budget).presentation;
    };
    Order3Certificate out;
    out.members = std::all_of(gens3.begin(), gens3.end(), [&](const Word & g) { return next.contains_root_word(g); });
    std::vector<Word> extra;
    for (auto & g : gens3) {
        auto w = rec.try_rewrite_from_root(g);
        if (! w) {
            out.diagnostic = "generator not in " + rec.label;
            return out;
        }
        extra.push_back(*w);
    }
    if (out.members && next.index_in_root == 3 * rec.index_in_root) {
        std::optional<Word> t;
        for (auto & g : rec.generators_in_root())
            if (! next.contains_root_word(g)) {
                t = g;
                break;
            }
        if (t) {
            Presentation k = next.presentation;
            for (auto & g : gens3) {
                Word c = g;
                for (int e = 0; e < 3; ++e) {
                    k.add_relator(next.rewrite_from_root(c));
                    c = t->inverse() * c * *t;
                }
            }
            if (auto m = quotient_order(simplify(k), limits)) {
                out.method = "kernel";
                out.quotient_order = 3 * *m;
            }
        }
    }
    if (! out.quotient_order) {
        auto q = normal_closure_quotient(rec, extra);
        out.method = "direct";
        out.quotient_order = quotient_order(q, limits);
        if (! out.quotient_order) {
            out.method = "simplified";
            out.quotient_order = quotient_order(simplify(q), limits);
        }
    }
    if (! out.quotient_order) {
        out.method.clear();
        out.diagnostic = "quotient enumeration did not close";
    }
    out.holds = out.members && out.quotient_order == 3u;
    return out;
}

inline bool order3_generation_certificate(const SubgroupRecord & next, const SubgroupRecord & rec, const std::vector<Word> & gens3)
{
    return order3_generation_check(next, rec, gens3).holds;
}

inline std::optional<std::vector<AffineIsometry>> find_epi_to_triangle(const SubgroupRecord & rec, const EpiSearchBudget & budget = {})
{
    return find_epi_to_triangle(rec.presentation, budget);
}

// ---------------------------------------------------------------------------
// order-3 generators a, b, c, d

struct Order3Budget {
    int conjugator_length = 3;
    std::size_t max_epimorphisms = 16;
    std::size_t max_tuples = 20'000;
    std::size_t enumeration_cosets = 5'000; ///< for the generation and quotient checks
    std::uint64_t seed = 0;                 ///< nonzero shuffles the candidate order
    EpiSearchBudget epi;
};

struct Order3Generators {
    Word a, b, c, d; ///< in the record's alphabet
    std::vector<AffineIsometry> epimorphism; ///< image of each record generator
    AffineIsometry x, y;                     ///< h(a) = h(b) = h(c) = x, h(d) = y
    std::size_t epimorphism_rank = 0;        ///< position of h in the search order
    std::size_t tuples_tried = 0;
};

namespace detail {
    // Generators declared of order 3 by a relator g^3 or g^-3.
    inline std::vector<int> order3_generators(const Presentation & pres)
    {
        std::vector<int> out;
        for (int g = 0; g < pres.generator_count(); ++g)
            for (auto & r : pres.relators())
                if (r == Word::generator(g, 3) || r == Word::generator(g, -3)) {
                    out.push_back(g);
                    break;
                }
        return out;
    }
} // namespace detail

/// Searches for a, b, c, d among conjugates of the record's declared order-3
/// generators (so each has order dividing 3), together with an epimorphism h
/// onto the triangle group such that
///   h(a) = h(b) = h(c) = x and h(d) = y generate the triangle group,
///   a, b, c, d generate the record,
///   the record modulo <<a, b, c>> has order 3 and kills every witness (root words).
/// Search order is deterministic: epimorphisms in enumeration order, then
/// image classes, then conjugates in shortlex order of the conjugator (or a
/// seeded shuffle of them).
///
/// `accept`, when given, is a final filter on otherwise valid tuples.
inline std::optional<Order3Generators> find_order3_generators(const SubgroupRecord & rec, const std::vector<Word> & witnesses,
    const Order3Budget & budget = {}, const std::function<bool(const Order3Generators &)> & accept = {})
{
    const auto & pres = rec.presentation;
    const int n = pres.generator_count();
    auto bases = detail::order3_generators(pres);
    if (bases.empty())
        return std::nullopt;
    std::vector<char> is3(static_cast<std::size_t>(n), 0);
    for (int g : bases)
        is3[static_cast<std::size_t>(g)] = 1;
    std::vector<Word> conjugators{Word{}};
    for (std::size_t i = 0; i < conjugators.size(); ++i) {
        if (static_cast<int>(conjugators[i].size()) >= budget.conjugator_length)
            continue;
        for (int g = 0; g < n; ++g)
            for (int e : {1, -1}) {
                Word v = conjugators[i];
                // g^2 = g^-1 for an order-3 generator, so skip repeated letters
                if (! v.empty() && generator_of(v.letters().back()) == g && (is3[static_cast<std::size_t>(g)] || v.letters().back() != make_letter(g, e < 0)))
                    continue;
                v *= Word::generator(g, e);
                conjugators.push_back(v);
            }
    }
    std::vector<Word> candidates;
    std::set<Word> seen;
    for (auto & v : conjugators)
        for (int g : bases) {
            Word c = conjugate(Word::generator(g), v);
            if (seen.insert(c).second)
                candidates.push_back(c);
        }

    if (budget.seed != 0) {
        std::mt19937_64 rng(budget.seed);
        std::shuffle(candidates.begin(), candidates.end(), rng);
    }

    std::vector<Word> witness_words;
    for (auto & w : witnesses) {
        auto r = rec.try_rewrite_from_root(w);
        if (! r)
            return std::nullopt;
        witness_words.push_back(*r);
    }
    const EnumerationLimits limits{.max_cosets = budget.enumeration_cosets};

    std::optional<Order3Generators> found;
    std::size_t rank = 0, tuples = 0;
    for_each_epi_to_triangle(pres, budget.epi, [&](const std::vector<AffineIsometry> & h) {
        if (rank >= budget.max_epimorphisms)
            return false;
        ++rank;
        auto key = [](const AffineIsometry & g) { return std::tuple(g.k, g.t.a, g.t.b); };
        std::map<std::tuple<int, std::int64_t, std::int64_t>, std::vector<std::size_t>> classes;
        std::map<std::tuple<int, std::int64_t, std::int64_t>, AffineIsometry> image;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            auto im = evaluate(candidates[i], h);
            classes[key(im)].push_back(i);
            image[key(im)] = im;
        }
        for (auto & [kx, xs] : classes) {
            if (xs.size() < 3 || image[kx].order() != 3)
                continue;
            // one quotient check per (a, b, c); it does not depend on d
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j)
                    for (std::size_t k = j + 1; k < xs.size(); ++k) {
                        const Word & a = candidates[xs[i]];
                        const Word & b = candidates[xs[j]];
                        const Word & c = candidates[xs[k]];
                        std::optional<bool> quotient_ok;
                        for (auto & [ky, ys] : classes) {
                            std::vector<AffineIsometry> pair{image[kx], image[ky]};
                            if (image[ky].order() != 3 || ! surjectivity_check(pair))
                                continue;
                            for (std::size_t di : ys) {
                                if (++tuples > budget.max_tuples)
                                    return false;
                                const Word & d = candidates[di];
                                try {
                                    if (todd_coxeter(pres, {a, b, c, d}, limits).index() != 1)
                                        continue;
                                }
                                catch (const LimitExceeded &) {
                                    continue;
                                }
                                if (! quotient_ok) {
                                    quotient_ok = false;
                                    Presentation q = pres;
                                    for (const Word * w : {&a, &b, &c})
                                        q.add_relator(*w);
                                    try {
                                        auto jt = todd_coxeter(q, {}, limits);
                                        quotient_ok = jt.index() == 3 && std::all_of(witness_words.begin(), witness_words.end(),
                                                                             [&](const Word & w) { return jt.trace(w) == 0; });
                                    }
                                    catch (const LimitExceeded &) {
                                    }
                                }
                                if (! *quotient_ok)
                                    break;
                                Order3Generators cand{a, b, c, d, h, image[kx], image[ky], rank - 1, tuples};
                                if (accept && ! accept(cand))
                                    continue;
                                found = std::move(cand);
                                return false;
                            }
                            if (quotient_ok && ! *quotient_ok)
                                break;
                        }
                    }
        }
        return true;
    });
    return found;
}

// ---------------------------------------------------------------------------
// conjugacy witnesses

struct ConjugacyWitness {
    enum class Status { found, impossible, inconclusive };
    std::string first, second;
    Status status = Status::inconclusive;
    std::string ambient;   ///< label of the group the conjugator lives in
    Word conjugator;       ///< in the ambient's alphabet
    std::string note;

    [[nodiscard]] static std::string status_name(Status s)
    {
        switch (s) {
        case Status::found: return "found";
        case Status::impossible: return "impossible";
        default: return "inconclusive";
        }
    }
};

/// For each pair (subs[0], subs[j]) looks for g with g^-1 A g <= B (A's
/// generators conjugated into B's coset table), trying each ambient in turn
/// (smallest first) over conjugators in shortlex order up to max_length.
inline std::vector<ConjugacyWitness> conjugacy_witness_search(const std::vector<RecordPtr> & subs,
    const std::vector<RecordPtr> & ambients, int max_length = 4)
{
    std::vector<ConjugacyWitness> out;
    if (subs.empty())
        return out;
    const RecordPtr & A = subs.front();
    auto a_gens = A->generators_in_root();
    for (std::size_t j = 1; j < subs.size(); ++j) {
        const RecordPtr & B = subs[j];
        ConjugacyWitness w{A->label, B->label};
        if (! (A->invariants == B->invariants) || A->index_in_root != B->index_in_root) {
            w.status = ConjugacyWitness::Status::impossible;
            w.note = "abelian invariants or indices differ";
            out.push_back(w);
            continue;
        }
        for (auto & amb : ambients) {
            std::vector<Word> words{Word{}};
            for (std::size_t i = 0; i < words.size() && w.status != ConjugacyWitness::Status::found; ++i) {
                Word g = amb->expand_to_root(words[i]);
                if (std::all_of(a_gens.begin(), a_gens.end(),
                        [&](const Word & x) { return B->contains_root_word(conjugate(x, g)); })) {
                    w.status = ConjugacyWitness::Status::found;
                    w.ambient = amb->label;
                    w.conjugator = words[i];
                    break;
                }
                if (static_cast<int>(words[i].size()) < max_length)
                    for (int gen = 0; gen < amb->presentation.generator_count(); ++gen)
                        for (int e : {1, -1}) {
                            Word v = words[i];
                            v *= Word::generator(gen, e);
                            if (v.size() == words[i].size() + 1)
                                words.push_back(v);
                        }
            }
            if (w.status == ConjugacyWitness::Status::found)
                break;
        }
        if (w.status != ConjugacyWitness::Status::found)
            w.note = "no conjugator up to length " + std::to_string(max_length);
        out.push_back(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// cross-check from the root

struct FromRootCheck {
    std::string label;
    std::size_t index = 0;
    AbelianInvariants from_root;
    bool agrees = false;
    double seconds = 0;
};

/// Recomputes a record's invariants in one Reidemeister-Schreier step from the
/// root: enumerate the record's generators (as root words) in the root, then
/// abelianize the raw subgroup presentation.
inline FromRootCheck from_root_check(const SubgroupRecord & rec, const EnumerationLimits & limits = {})
{
    auto t0 = std::chrono::steady_clock::now();
    FromRootCheck out{rec.label};
    const auto & root = rec.root();
    auto table = todd_coxeter(root.presentation, rec.generators_in_root(), limits);
    out.index = table.index();
    out.from_root = abelian_invariants(reidemeister_schreier(root.presentation, table).presentation);
    out.agrees = out.index == rec.index_in_root && out.from_root == rec.invariants;
    out.seconds = detail::seconds_since(t0);
    return out;
}

} // namespace fptower

#endif // FPTOWER_QUOTIENT_HPP
