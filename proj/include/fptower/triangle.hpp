#ifndef FPTOWER_TRIANGLE_HPP
#define FPTOWER_TRIANGLE_HPP

#include <fptower/eisenstein.hpp>
#include <fptower/presentation.hpp>
#include <fptower/smith.hpp>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fptower {

/// The (3,3,3) triangle group realized inside Z[w] x| Z/3: x -> (0, 1),
/// y -> (1 - w, 1). Its translation lattice is L = (1 - w) Z[w].
struct TriangleModel {
    static AffineIsometry x() { return {{0, 0}, 1}; }
    static AffineIsometry y() { return {{1, -1}, 1}; }

    /// Does t lie in L? (a + bw is in L iff a + b = 0 mod 3.)
    static bool in_lattice(EisensteinInt t) { return ((t.a + t.b) % 3 + 3) % 3 == 0; }

    /// Coordinates of t = (1 - w) s, returning s. Requires in_lattice(t).
    static EisensteinInt lattice_coordinates(EisensteinInt t)
    {
        // 1 / (1 - w) = (2 + w) / 3
        EisensteinInt s = t * EisensteinInt{2, 1};
        return {s.a / 3, s.b / 3};
    }

    static bool contains(const AffineIsometry & g) { return in_lattice(g.t); }
};

inline AffineIsometry evaluate(const Word & w, std::span<const AffineIsometry> images)
{
    AffineIsometry acc;
    for (auto l : w) {
        const AffineIsometry & g = images[static_cast<std::size_t>(generator_of(l))];
        acc = acc * (l > 0 ? g : g.inverse());
    }
    return acc;
}

inline bool satisfies_relators(const Presentation & pres, std::span<const AffineIsometry> images)
{
    if (static_cast<int>(images.size()) != pres.generator_count())
        return false;
    for (auto & r : pres.relators())
        if (! evaluate(r, images).is_identity())
            return false;
    return true;
}

/// True iff the images generate the whole triangle group: some image rotates,
/// and the translation subgroup of the generated group (spanned by the
/// Schreier generators for the rotation quotient) is all of L.
inline bool surjectivity_check(std::span<const AffineIsometry> images)
{
    std::optional<AffineIsometry> rho;
    for (auto & g : images) {
        if (! TriangleModel::contains(g))
            return false;
        if (! rho && g.k == 1)
            rho = g;
        else if (! rho && g.k == 2)
            rho = g * g;
    }
    if (! rho)
        return false;
    const AffineIsometry transversal[3] = {AffineIsometry::identity(), *rho, *rho * *rho};
    std::vector<EisensteinInt> translations;
    for (auto & g : images)
        for (int i = 0; i < 3; ++i) {
            AffineIsometry s = transversal[i] * g * transversal[(i + g.k) % 3].inverse();
            if (! s.t.is_zero())
                translations.push_back(TriangleModel::lattice_coordinates(s.t));
        }
    if (translations.size() < 2)
        return false;
    IntMatrix m(2, static_cast<int>(translations.size()));
    for (std::size_t j = 0; j < translations.size(); ++j) {
        m.set(0, static_cast<int>(j), BigInt(static_cast<long>(translations[j].a)));
        m.set(1, static_cast<int>(j), BigInt(static_cast<long>(translations[j].b)));
    }
    auto snf = smith_normal_form(m, false);
    return snf.rank == 2 && snf.diagonal[1] == 1;
}

struct EpiSearchBudget {
    int max_radius = 3;                 ///< largest coefficient magnitude over the solution-lattice basis
    std::size_t max_candidates = 500'000;
};

namespace detail {

    // Translation part of a word as a Z[w]-linear form in the unknown
    // translations t_j, given fixed rotation exponents.
    inline std::vector<EisensteinInt> translation_form(const Word & w, const std::vector<int> & k, int generators)
    {
        std::vector<EisensteinInt> coef(static_cast<std::size_t>(generators));
        int rot = 0;
        for (auto l : w) {
            auto g = static_cast<std::size_t>(generator_of(l));
            if (l > 0) {
                coef[g] = coef[g] + EisensteinInt{1, 0}.rotate(rot);
                rot = (rot + k[g]) % 3;
            }
            else {
                rot = (rot + 3 - k[g]) % 3;
                coef[g] = coef[g] - EisensteinInt{1, 0}.rotate(rot);
            }
        }
        return coef;
    }

} // namespace detail

/// Enumerates homomorphisms onto the triangle group in a deterministic order
/// and reports each certified epimorphism to `visit` until it returns false.
/// For each nonzero rotation pattern (a homomorphism to Z/3) the relator
/// conditions on the translations are Z[w]-linear; their integer solution
/// lattice is searched by growing coefficient radius. Returns true if the
/// visitor stopped the search.
inline bool for_each_epi_to_triangle(const Presentation & pres, const EpiSearchBudget & budget,
    const std::function<bool(const std::vector<AffineIsometry> &)> & visit)
{
    const int n = pres.generator_count();
    auto patterns_basis = nullspace_mod_p(exponent_matrix(pres), 3);
    const int r = static_cast<int>(patterns_basis.size());
    if (r == 0)
        return false;
    long total = 1;
    for (int i = 0; i < r; ++i)
        total *= 3;
    std::size_t candidates = 0;
    for (long code = 1; code < total; ++code) {
        std::vector<int> k(static_cast<std::size_t>(n), 0);
        long c = code;
        for (int i = 0; i < r; ++i, c /= 3)
            for (int g = 0; g < n; ++g)
                k[static_cast<std::size_t>(g)] = static_cast<int>((k[static_cast<std::size_t>(g)] + (c % 3) * patterns_basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)]) % 3);

        // unknowns: t_j = (1 - w)(a_j + b_j w); columns (a_1, b_1, ..., a_n, b_n)
        IntMatrix system(2 * static_cast<int>(pres.relators().size()), 2 * n);
        for (std::size_t i = 0; i < pres.relators().size(); ++i) {
            auto form = detail::translation_form(pres.relators()[i], k, n);
            for (int j = 0; j < n; ++j) {
                auto p = form[static_cast<std::size_t>(j)].a, q = form[static_cast<std::size_t>(j)].b;
                // (p + q w)(a + b w) = (pa - qb) + (qa + (p - q) b) w
                system.set(2 * static_cast<int>(i), 2 * j, BigInt(static_cast<long>(p)));
                system.set(2 * static_cast<int>(i), 2 * j + 1, BigInt(static_cast<long>(-q)));
                system.set(2 * static_cast<int>(i) + 1, 2 * j, BigInt(static_cast<long>(q)));
                system.set(2 * static_cast<int>(i) + 1, 2 * j + 1, BigInt(static_cast<long>(p - q)));
            }
        }
        auto snf = smith_normal_form(system, true);
        std::vector<std::vector<long>> basis;
        for (int col = snf.rank; col < 2 * n; ++col) {
            std::vector<long> v(static_cast<std::size_t>(2 * n));
            for (int row = 0; row < 2 * n; ++row)
                v[static_cast<std::size_t>(row)] = snf.V->get(row, col).get_si();
            basis.push_back(std::move(v));
        }
        const int d = static_cast<int>(basis.size());
        if (d == 0)
            continue;

        auto try_coefficients = [&](const std::vector<int> & coeffs) {
            std::vector<long> s(static_cast<std::size_t>(2 * n), 0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < 2 * n; ++j)
                    s[static_cast<std::size_t>(j)] += coeffs[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            std::vector<AffineIsometry> images(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                EisensteinInt sj{s[static_cast<std::size_t>(2 * j)], s[static_cast<std::size_t>(2 * j + 1)]};
                images[static_cast<std::size_t>(j)] = {EisensteinInt{1, -1} * sj, k[static_cast<std::size_t>(j)]};
            }
            if (! satisfies_relators(pres, images))
                throw std::logic_error("triangle search: solution lattice vector violates a relator");
            return surjectivity_check(images) ? std::optional(images) : std::nullopt;
        };

        // Shells of growing max-norm radius, lexicographic within a shell.
        for (int radius = 1; radius <= budget.max_radius; ++radius) {
            std::vector<int> coeffs(static_cast<std::size_t>(d), -radius);
            for (;;) {
                bool on_shell = false;
                for (int x : coeffs)
                    on_shell = on_shell || x == radius || x == -radius;
                if (on_shell) {
                    if (++candidates > budget.max_candidates)
                        return false;
                    if (auto images = try_coefficients(coeffs); images && ! visit(*images))
                        return true;
                }
                int pos = d - 1;
                while (pos >= 0 && coeffs[static_cast<std::size_t>(pos)] == radius)
                    coeffs[static_cast<std::size_t>(pos--)] = -radius;
                if (pos < 0)
                    break;
                ++coeffs[static_cast<std::size_t>(pos)];
            }
        }
    }
    return false;
}

/// First certified epimorphism onto the triangle group, or nullopt when the
/// bounded search is inconclusive (not a proof of non-existence).
inline std::optional<std::vector<AffineIsometry>> find_epi_to_triangle(const Presentation & pres, const EpiSearchBudget & budget = {})
{
    std::optional<std::vector<AffineIsometry>> found;
    for_each_epi_to_triangle(pres, budget, [&](const std::vector<AffineIsometry> & images) {
        found = images;
        return false;
    });
    return found;
}

} // namespace fptower

#endif // FPTOWER_TRIANGLE_HPP
