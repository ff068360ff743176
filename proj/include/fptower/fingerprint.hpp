#ifndef FPTOWER_FINGERPRINT_HPP
#define FPTOWER_FINGERPRINT_HPP

#include <fptower/coset_table.hpp>
#include <fptower/presentation.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <set>
#include <string>
#include <vector>

namespace fptower {

/// A finite probe group given by permutation generators on {0..degree-1}.
/// `presentation` is optional and only used to certify the battery itself.
struct PermutationGroup {
    std::string name;
    std::vector<std::vector<int>> generators;
    std::optional<Presentation> presentation;
};

/// Regular-representation probe from a finite presentation.
inline PermutationGroup permutation_group_from(std::string name, const Presentation & pres,
    std::size_t max_cosets = 100'000)
{
    auto table = todd_coxeter(pres, {}, EnumerationLimits{.max_cosets = max_cosets});
    return {std::move(name), table.permutation_representation(), pres};
}

/// Cayley table of a permutation group, elements numbered in BFS order from
/// the identity (element 0). Product i*j applies i first.
class FiniteGroup {
public:
    explicit FiniteGroup(const PermutationGroup & g, std::size_t max_order = 100'000) : name_(g.name)
    {
        std::size_t degree = g.generators.empty() ? 1 : g.generators.front().size();
        for (auto & p : g.generators)
            if (p.size() != degree)
                throw std::invalid_argument("FiniteGroup: generator degree mismatch");
        std::vector<int> id(degree);
        for (std::size_t i = 0; i < degree; ++i)
            id[i] = static_cast<int>(i);
        std::map<std::vector<int>, int> index;
        elements_.push_back(id);
        index.emplace(id, 0);
        for (std::size_t k = 0; k < elements_.size(); ++k)
            for (auto & gen : g.generators) {
                std::vector<int> p(degree);
                for (std::size_t x = 0; x < degree; ++x)
                    p[x] = gen[static_cast<std::size_t>(elements_[k][x])];
                if (index.emplace(p, static_cast<int>(elements_.size())).second) {
                    elements_.push_back(std::move(p));
                    if (elements_.size() > max_order)
                        throw std::length_error("FiniteGroup: order exceeds " + std::to_string(max_order));
                }
            }
        const std::size_t n = elements_.size();
        mult_.resize(n * n);
        inv_.resize(n);
        std::vector<int> p(degree);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t x = 0; x < degree; ++x)
                    p[x] = elements_[j][static_cast<std::size_t>(elements_[i][x])];
                int k = index.at(p);
                mult_[i * n + j] = k;
                if (k == 0)
                    inv_[i] = static_cast<int>(j);
            }
    }

    [[nodiscard]] const std::string & name() const noexcept { return name_; }
    [[nodiscard]] std::size_t order() const noexcept { return elements_.size(); }
    [[nodiscard]] int multiply(int i, int j) const noexcept
    {
        return mult_[static_cast<std::size_t>(i) * order() + static_cast<std::size_t>(j)];
    }
    [[nodiscard]] int inverse(int i) const noexcept { return inv_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] int element_order(int i) const noexcept
    {
        int k = 1;
        for (int x = i; x != 0; x = multiply(x, i))
            ++k;
        return k;
    }

    /// Order of the subgroup generated by `gens`.
    [[nodiscard]] std::size_t generated_order(const std::vector<int> & gens) const
    {
        std::vector<char> seen(order(), 0);
        std::vector<int> queue{0};
        seen[0] = 1;
        for (std::size_t k = 0; k < queue.size(); ++k)
            for (int g : gens) {
                int y = multiply(queue[k], g);
                if (! seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    queue.push_back(y);
                }
            }
        return queue.size();
    }

private:
    std::string name_;
    std::vector<std::vector<int>> elements_;
    std::vector<int> mult_, inv_;
};

struct HomCount {
    std::uint64_t homomorphisms = 0;
    std::uint64_t epimorphisms = 0;
    friend bool operator==(const HomCount &, const HomCount &) = default;
};

namespace detail {
    // Assignment order for the backtracking: greedily take the generator that
    // completes the most relators, then the one sharing most relators with
    // those already placed.
    inline std::vector<int> assignment_order(const Presentation & pres)
    {
        const int n = pres.generator_count();
        std::vector<std::set<int>> support;
        for (auto & r : pres.relators()) {
            std::set<int> s;
            for (auto l : r)
                s.insert(generator_of(l));
            support.push_back(std::move(s));
        }
        std::vector<int> order;
        std::vector<char> placed(static_cast<std::size_t>(n), 0);
        for (int step = 0; step < n; ++step) {
            int best = -1;
            std::pair<long, long> best_score{-1, -1};
            for (int g = 0; g < n; ++g) {
                if (placed[static_cast<std::size_t>(g)])
                    continue;
                long complete = 0, shared = 0;
                for (auto & s : support) {
                    if (! s.count(g))
                        continue;
                    long missing = 0;
                    for (int h : s)
                        missing += h != g && ! placed[static_cast<std::size_t>(h)];
                    complete += missing == 0;
                    shared += static_cast<long>(s.size()) - 1 - missing;
                }
                if (std::pair(complete, shared) > best_score) {
                    best_score = {complete, shared};
                    best = g;
                }
            }
            placed[static_cast<std::size_t>(best)] = 1;
            order.push_back(best);
        }
        return order;
    }
} // namespace detail

/// Exact hom/epi counts from a presentation to a finite group by backtracking
/// over generator images; each relator is checked as soon as all of its
/// generators have images.
inline HomCount count_homomorphisms(const Presentation & pres, const FiniteGroup & group)
{
    const int n = pres.generator_count();
    HomCount out;
    if (n == 0) {
        out.homomorphisms = 1;
        out.epimorphisms = group.order() == 1 ? 1 : 0;
        return out;
    }
    auto order = detail::assignment_order(pres);
    std::vector<int> position(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        position[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
    std::vector<std::vector<const Word *>> due(static_cast<std::size_t>(n));
    for (auto & r : pres.relators()) {
        int last = 0;
        for (auto l : r)
            last = std::max(last, position[static_cast<std::size_t>(generator_of(l))]);
        due[static_cast<std::size_t>(last)].push_back(&r);
    }
    std::vector<int> image(static_cast<std::size_t>(n), 0);
    auto value = [&](const Word & w) {
        int x = 0;
        for (auto l : w) {
            int g = image[static_cast<std::size_t>(generator_of(l))];
            x = group.multiply(x, l > 0 ? g : group.inverse(g));
        }
        return x;
    };
    const int size = static_cast<int>(group.order());
    auto descend = [&](auto & self, int depth) -> void {
        const auto g = static_cast<std::size_t>(order[static_cast<std::size_t>(depth)]);
        for (int e = 0; e < size; ++e) {
            image[g] = e;
            bool ok = true;
            for (const Word * r : due[static_cast<std::size_t>(depth)])
                if (value(*r) != 0) {
                    ok = false;
                    break;
                }
            if (! ok)
                continue;
            if (depth + 1 < n)
                self(self, depth + 1);
            else {
                ++out.homomorphisms;
                if (group.generated_order(image) == group.order())
                    ++out.epimorphisms;
            }
        }
    };
    descend(descend, 0);
    return out;
}

struct FingerprintEntry {
    std::string probe;
    std::size_t order = 0;
    HomCount counts;
    friend bool operator==(const FingerprintEntry &, const FingerprintEntry &) = default;
};

struct FingerprintReport {
    std::vector<FingerprintEntry> entries;

    friend bool operator==(const FingerprintReport &, const FingerprintReport &) = default;

    /// Names of probes whose counts differ (reports must share the battery).
    [[nodiscard]] std::vector<std::string> disagreements(const FingerprintReport & other) const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < entries.size() && i < other.entries.size(); ++i)
            if (! (entries[i] == other.entries[i]))
                out.push_back(entries[i].probe);
        if (entries.size() != other.entries.size())
            out.emplace_back("<battery size>");
        return out;
    }

    [[nodiscard]] std::string to_string() const
    {
        std::ostringstream os;
        for (auto & e : entries)
            os << e.probe << " (" << e.order << "): hom " << e.counts.homomorphisms << ", epi "
               << e.counts.epimorphisms << '\n';
        return os.str();
    }
};

inline FingerprintReport fingerprint(const Presentation & pres, const std::vector<FiniteGroup> & probes)
{
    FingerprintReport report;
    for (auto & g : probes)
        report.entries.push_back({g.name(), g.order(), count_homomorphisms(pres, g)});
    return report;
}

namespace detail {

    inline std::vector<int> cycle_permutation(int degree, std::initializer_list<std::vector<int>> cycles)
    {
        std::vector<int> p(static_cast<std::size_t>(degree));
        for (int i = 0; i < degree; ++i)
            p[static_cast<std::size_t>(i)] = i;
        for (auto & c : cycles)
            for (std::size_t i = 0; i < c.size(); ++i)
                p[static_cast<std::size_t>(c[i] - 1)] = c[(i + 1) % c.size()] - 1;
        return p;
    }

    inline std::string abelian_presentation(const std::vector<int> & cyclic)
    {
        std::string gens, rels;
        for (std::size_t i = 0; i < cyclic.size(); ++i) {
            std::string g = "a" + std::to_string(i + 1);
            gens += (i ? "," : "") + g;
            rels += (rels.empty() ? "" : ", ") + g + "^" + std::to_string(cyclic[i]);
            for (std::size_t j = 0; j < i; ++j)
                rels += ", (a" + std::to_string(j + 1) + "," + g + ")";
        }
        return "<" + gens + " | " + rels + ">";
    }

} // namespace detail

/// All groups of order <= 24 (74 of them, up to isomorphism) plus S5, A5 and
/// PSL(2,7).
inline std::vector<PermutationGroup> standard_probe_battery()
{
    using detail::abelian_presentation;
    const std::vector<std::vector<int>> abelian = {
        {1}, {2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {2, 4}, {2, 2, 2}, {9}, {3, 3}, {10}, {11}, {12}, {2, 6},
        {13}, {14}, {15}, {16}, {4, 4}, {2, 8}, {2, 2, 4}, {2, 2, 2, 2}, {17}, {18}, {3, 6}, {19}, {20}, {2, 10},
        {21}, {22}, {23}, {24}, {2, 12}, {2, 2, 6}};
    const std::vector<std::pair<std::string, std::string>> nonabelian = {
        {"S3", "<a,b | a^3, b^2, (a*b)^2>"},
        {"D8", "<a,b | a^4, b^2, (a*b)^2>"},
        {"Q8", "<a,b | a^4, a^2*b^-2, b^-1*a*b*a>"},
        {"D10", "<a,b | a^5, b^2, (a*b)^2>"},
        {"D12", "<a,b | a^6, b^2, (a*b)^2>"},
        {"A4", "<a,b | a^2, b^3, (a*b)^3>"},
        {"Dic3", "<a,b | a^3, b^4, b^-1*a*b*a>"},
        {"D14", "<a,b | a^7, b^2, (a*b)^2>"},
        {"(C4xC2):C2", "<a,b,c | a^4, b^2, c^2, (a,b), (b,c), c*a*c*b^-1*a^-1>"},
        {"C4:C4", "<a,b | a^4, b^4, b^-1*a*b*a>"},
        {"M16", "<a,b | a^8, b^2, b*a*b*a^-5>"},
        {"D16", "<a,b | a^8, b^2, (a*b)^2>"},
        {"SD16", "<a,b | a^8, b^2, b*a*b*a^-3>"},
        {"Q16", "<a,b | a^8, a^4*b^-2, b^-1*a*b*a>"},
        {"C2xD8", "<a,b,c | a^4, b^2, (a*b)^2, c^2, (a,c), (b,c)>"},
        {"C2xQ8", "<a,b,c | a^4, a^2*b^-2, b^-1*a*b*a, c^2, (a,c), (b,c)>"},
        {"C4oD8", "<a,b,c | a^4, b^2, c^2, (a,b), (a,c), (b*c)^2*a^-2>"},
        {"D18", "<a,b | a^9, b^2, (a*b)^2>"},
        {"C3xS3", "<a,b,c | a^3, b^2, (a*b)^2, c^3, (a,c), (b,c)>"},
        {"(C3xC3):C2", "<a,b,c | a^3, b^3, (a,b), c^2, c*a*c*a, c*b*c*b>"},
        {"D20", "<a,b | a^10, b^2, (a*b)^2>"},
        {"Dic5", "<a,b | a^10, a^5*b^-2, b^-1*a*b*a>"},
        {"F20", "<a,b | a^5, b^4, b^-1*a*b*a^-2>"},
        {"C7:C3", "<a,b | a^7, b^3, b^-1*a*b*a^-2>"},
        {"D22", "<a,b | a^11, b^2, (a*b)^2>"},
        {"C3:C8", "<a,b | a^3, b^8, b^-1*a*b*a>"},
        {"SL(2,3)", "<s,t | s^3*t^-3, s^3*(s*t)^-2>"},
        {"Dic6", "<a,b | a^12, a^6*b^-2, b^-1*a*b*a>"},
        {"C4xS3", "<a,b,c | a^3, b^2, (a*b)^2, c^4, (a,c), (b,c)>"},
        {"D24", "<a,b | a^12, b^2, (a*b)^2>"},
        {"C2xDic3", "<a,b,c | a^3, b^4, b^-1*a*b*a, c^2, (a,c), (b,c)>"},
        {"C3:D8", "<a,b,c | a^3, b^4, c^2, (b*c)^2, b^-1*a*b*a, (a,c)>"},
        {"C3xD8", "<a,b,c | a^3, b^4, c^2, (b*c)^2, (a,b), (a,c)>"},
        {"C3xQ8", "<a,b,c | a^3, b^4, b^2*c^-2, c^-1*b*c*b, (a,b), (a,c)>"},
        {"S4", "<a,b | a^2, b^3, (a*b)^4>"},
        {"C2xA4", "<a,b,c | a^2, b^3, (a*b)^3, c^2, (a,c), (b,c)>"},
        {"C2xC2xS3", "<a,b,c,d | a^3, b^2, (a*b)^2, c^2, d^2, (a,c), (b,c), (a,d), (b,d), (c,d)>"},
    };
    std::vector<PermutationGroup> out;
    for (auto & inv : abelian) {
        std::string name;
        for (int c : inv)
            name += (name.empty() ? "C" : "xC") + std::to_string(c);
        out.push_back(permutation_group_from(name, parse_presentation(abelian_presentation(inv))));
    }
    for (auto & [name, text] : nonabelian)
        out.push_back(permutation_group_from(name, parse_presentation(text)));
    using detail::cycle_permutation;
    out.push_back({"A5", {cycle_permutation(5, {{1, 2, 3}}), cycle_permutation(5, {{1, 2, 3, 4, 5}})}, std::nullopt});
    out.push_back({"S5", {cycle_permutation(5, {{1, 2}}), cycle_permutation(5, {{1, 2, 3, 4, 5}})}, std::nullopt});
    // z -> z + 1 and z -> -1/z on the projective line over F7 (points 0..6 -> 1..7, infinity -> 8)
    out.push_back({"PSL(2,7)",
        {cycle_permutation(8, {{1, 2, 3, 4, 5, 6, 7}}), cycle_permutation(8, {{1, 8}, {2, 7}, {3, 4}, {5, 6}})},
        std::nullopt});
    std::stable_sort(out.begin(), out.end(), [](const PermutationGroup & a, const PermutationGroup & b) {
        return FiniteGroup(a).order() < FiniteGroup(b).order();
    });
    return out;
}

inline std::vector<FiniteGroup> build_probes(const std::vector<PermutationGroup> & battery)
{
    std::vector<FiniteGroup> out;
    out.reserve(battery.size());
    for (auto & g : battery)
        out.emplace_back(g);
    return out;
}

} // namespace fptower

#endif // FPTOWER_FINGERPRINT_HPP
