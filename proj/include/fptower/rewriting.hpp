#ifndef FPTOWER_REWRITING_HPP
#define FPTOWER_REWRITING_HPP

#include <fptower/coset_table.hpp>
#include <fptower/presentation.hpp>
#include <fptower/word.hpp>

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

/// Prefix-closed coset representatives, stored as a BFS tree.
struct SchreierTransversal {
    std::vector<int> parent; ///< -1 for coset 0
    std::vector<Letter> edge; ///< letter leading from parent; 0 for coset 0

    [[nodiscard]] std::size_t size() const noexcept { return parent.size(); }

    [[nodiscard]] Word representative(int coset) const
    {
        std::vector<Letter> rev;
        for (int c = coset; parent.at(static_cast<std::size_t>(c)) >= 0; c = parent[static_cast<std::size_t>(c)])
            rev.push_back(edge[static_cast<std::size_t>(c)]);
        return Word(std::vector<Letter>(rev.rbegin(), rev.rend()));
    }
};

/// Breadth-first transversal scanning letters in column order (g1, g1^-1, g2, ...).
inline SchreierTransversal schreier_transversal(const CosetTable & table)
{
    SchreierTransversal t;
    std::size_t n = table.index();
    t.parent.assign(n, -2);
    t.edge.assign(n, 0);
    t.parent[0] = -1;
    std::vector<int> order{0};
    for (std::size_t k = 0; k < order.size(); ++k)
        for (int x = 0; x < table.columns(); ++x) {
            int d = table.entry(order[k], x);
            if (t.parent[static_cast<std::size_t>(d)] == -2) {
                t.parent[static_cast<std::size_t>(d)] = order[k];
                t.edge[static_cast<std::size_t>(d)] = letter_of_column(x);
                order.push_back(d);
            }
        }
    return t;
}

/// A finite-index subgroup presented on its own alphabet, with the maps
/// needed to move words between the ambient group and the subgroup.
struct SubgroupPresentation {
    std::shared_ptr<const Presentation> ambient;
    std::shared_ptr<const CosetTable> table;
    Presentation presentation;
    std::vector<Word> generator_words; ///< current generators as ambient words

    /// For coset c and ambient generator g: Schreier generator id at (c, g), or -1 on a tree edge.
    std::vector<int> schreier_id;
    /// Schreier generator id -> (coset, ambient generator).
    std::vector<std::pair<int, int>> schreier_pairs;
    /// Schreier generator id -> word in the current alphabet.
    std::vector<Word> schreier_image;

    bool budget_exhausted = false;

    [[nodiscard]] int generator_count() const noexcept { return presentation.generator_count(); }

    /// Rewrites an ambient word lying in the subgroup into the subgroup alphabet.
    /// Throws std::domain_error if the word is not in the subgroup.
    [[nodiscard]] Word rewrite(const Word & w) const
    {
        const int gens = table->generator_count();
        int c = 0;
        Word out;
        for (auto l : w) {
            int g = generator_of(l);
            if (l > 0) {
                int id = schreier_id[static_cast<std::size_t>(c * gens + g)];
                if (id >= 0)
                    out *= schreier_image[static_cast<std::size_t>(id)];
                c = table->act(c, l);
            }
            else {
                int d = table->act(c, l);
                int id = schreier_id[static_cast<std::size_t>(d * gens + g)];
                if (id >= 0)
                    out *= schreier_image[static_cast<std::size_t>(id)].inverse();
                c = d;
            }
        }
        if (c != 0)
            throw std::domain_error("rewrite: word does not lie in the subgroup");
        return out;
    }

    /// Expands a subgroup word back into the ambient alphabet.
    [[nodiscard]] Word expand(const Word & w) const
    {
        Word out;
        for (auto l : w) {
            const Word & g = generator_words.at(static_cast<std::size_t>(generator_of(l)));
            out *= l > 0 ? g : g.inverse();
        }
        return out;
    }

    /// Sidecar listing each generator's ambient word, one `name = word` per line.
    [[nodiscard]] std::string sidecar_text() const
    {
        std::ostringstream os;
        for (int g = 0; g < generator_count(); ++g)
            os << presentation.name(g) << " = " << ambient->format_word(generator_words[static_cast<std::size_t>(g)]) << '\n';
        return os.str();
    }
};

/// Reidemeister-Schreier presentation of the subgroup whose coset table is
/// `table`. Generators are the non-tree Schreier generators s_{c,g} =
/// rep(c) g rep(c g)^-1; relators are the rewrites of every relator from
/// every coset, coset-major.
inline SubgroupPresentation reidemeister_schreier(const Presentation & pres, const CosetTable & table)
{
    if (table.generator_count() != pres.generator_count())
        throw std::invalid_argument("reidemeister_schreier: table and presentation disagree on generators");
    SubgroupPresentation sp;
    sp.ambient = std::make_shared<const Presentation>(pres);
    sp.table = std::make_shared<const CosetTable>(table);
    const int gens = pres.generator_count();
    const int n = static_cast<int>(table.index());
    auto tr = schreier_transversal(table);
    std::vector<Word> reps(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        int p = tr.parent[static_cast<std::size_t>(c)];
        reps[static_cast<std::size_t>(c)] = p < 0 ? Word{} : reps[static_cast<std::size_t>(p)] * Word{tr.edge[static_cast<std::size_t>(c)]};
    }

    sp.schreier_id.assign(static_cast<std::size_t>(n * gens), -1);
    std::vector<std::string> names;
    for (int c = 0; c < n; ++c)
        for (int g = 0; g < gens; ++g) {
            int d = table.entry(c, 2 * g);
            bool tree = (tr.parent[static_cast<std::size_t>(d)] == c && tr.edge[static_cast<std::size_t>(d)] == make_letter(g))
                || (tr.parent[static_cast<std::size_t>(c)] == d && tr.edge[static_cast<std::size_t>(c)] == make_letter(g, true));
            if (tree)
                continue;
            int id = static_cast<int>(sp.schreier_pairs.size());
            sp.schreier_id[static_cast<std::size_t>(c * gens + g)] = id;
            sp.schreier_pairs.emplace_back(c, g);
            sp.generator_words.push_back(reps[static_cast<std::size_t>(c)] * Word::generator(g) * reps[static_cast<std::size_t>(d)].inverse());
            sp.schreier_image.push_back(Word::generator(id));
            names.push_back("s" + std::to_string(id + 1));
        }
    sp.presentation = Presentation(std::move(names));

    for (int c = 0; c < n; ++c)
        for (auto & r : pres.relators()) {
            // rewrite r read from coset c
            int e = c;
            Word out;
            for (auto l : r) {
                int g = generator_of(l);
                if (l > 0) {
                    int id = sp.schreier_id[static_cast<std::size_t>(e * gens + g)];
                    if (id >= 0)
                        out *= Word::generator(id);
                    e = table.act(e, l);
                }
                else {
                    int d = table.act(e, l);
                    int id = sp.schreier_id[static_cast<std::size_t>(d * gens + g)];
                    if (id >= 0)
                        out *= Word::generator(id, -1);
                    e = d;
                }
            }
            if (e != c)
                throw std::logic_error("reidemeister_schreier: relator does not close in the coset table");
            sp.presentation.add_relator(out);
        }
    return sp;
}

} // namespace fptower

#endif // FPTOWER_REWRITING_HPP
