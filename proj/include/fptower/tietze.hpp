#ifndef FPTOWER_TIETZE_HPP
#define FPTOWER_TIETZE_HPP

#include <fptower/presentation.hpp>
#include <fptower/rewriting.hpp>
#include <fptower/word.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace fptower {

struct TietzeBudget {
    int max_passes = 200;
    std::size_t max_relator_length = 40;  ///< longest relator used to eliminate a generator
    double expand_limit = 1.5;            ///< total length may grow by this factor within one pass
    double time_limit_seconds = 60.0;
};

/// Outcome of simplifying a bare presentation.
struct TietzeResult {
    Presentation presentation;
    /// Image of every input generator as a word in the output alphabet.
    std::vector<Word> generator_images;
    /// Output generator -> input generator it came from.
    std::vector<int> kept;
    bool budget_exhausted = false;
};

namespace detail {

    class TietzeWorker {
    public:
        TietzeWorker(const Presentation & pres, const TietzeBudget & budget, std::vector<bool> protect) :
            n_(pres.generator_count()), names_(pres.generator_names()), budget_(budget),
            alive_(static_cast<std::size_t>(n_), true), protect_(std::move(protect))
        {
            protect_.resize(static_cast<std::size_t>(n_), false);
            for (auto & r : pres.relators())
                rels_.push_back(r);
        }

        TietzeResult run()
        {
            auto start = std::chrono::steady_clock::now();
            bool exhausted = false;
            normalize();
            for (int pass = 0;; ++pass) {
                if (pass >= budget_.max_passes
                    || std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > budget_.time_limit_seconds) {
                    exhausted = true;
                    break;
                }
                bool changed = eliminate_round();
                changed = substring_round() || changed;
                normalize();
                if (! changed)
                    break;
            }
            return finish(exhausted);
        }

    private:
        std::size_t total_length() const
        {
            std::size_t t = 0;
            for (auto & r : rels_)
                t += r.size();
            return t;
        }

        void normalize()
        {
            std::set<Word> seen;
            std::vector<Word> out;
            for (auto & r : rels_) {
                Word c = cyclic_reduce(r).word;
                if (c.empty())
                    continue;
                if (seen.insert(cyclic_canonical(c)).second)
                    out.push_back(std::move(c));
            }
            rels_ = std::move(out);
        }

        static Word substitute(const Word & w, int g, const Word & image)
        {
            std::vector<Letter> out;
            out.reserve(w.size());
            const Word inv = image.inverse();
            for (auto l : w) {
                if (generator_of(l) != g)
                    out.push_back(l);
                else {
                    const Word & rep = l > 0 ? image : inv;
                    out.insert(out.end(), rep.begin(), rep.end());
                }
            }
            return Word(out);
        }

        // Greedy eliminations; stops when no candidate keeps the total length
        // within expand_limit of the length at the start of the round.
        bool eliminate_round()
        {
            bool changed = false;
            const double cap = static_cast<double>(total_length()) * budget_.expand_limit;
            for (;;) {
                std::vector<long> occ(static_cast<std::size_t>(n_), 0);
                for (auto & r : rels_)
                    for (auto l : r)
                        ++occ[static_cast<std::size_t>(generator_of(l))];
                long best_delta = 0;
                int best_g = -1;
                std::size_t best_r = 0;
                std::vector<int> count(static_cast<std::size_t>(n_), 0);
                for (std::size_t i = 0; i < rels_.size(); ++i) {
                    const Word & r = rels_[i];
                    if (r.size() > budget_.max_relator_length)
                        continue;
                    for (auto l : r)
                        ++count[static_cast<std::size_t>(generator_of(l))];
                    for (auto l : r) {
                        int g = generator_of(l);
                        if (count[static_cast<std::size_t>(g)] != 1 || protect_[static_cast<std::size_t>(g)])
                            continue;
                        long len = static_cast<long>(r.size());
                        long delta = (occ[static_cast<std::size_t>(g)] - 1) * (len - 2) - len;
                        if (best_g < 0 || delta < best_delta || (delta == best_delta && (g < best_g || (g == best_g && i < best_r)))) {
                            best_delta = delta;
                            best_g = g;
                            best_r = i;
                        }
                    }
                    for (auto l : r)
                        count[static_cast<std::size_t>(generator_of(l))] = 0;
                }
                if (best_g < 0)
                    break;
                if (best_delta > 0 && static_cast<double>(total_length()) + static_cast<double>(best_delta) > cap)
                    break;
                eliminate(best_g, best_r);
                changed = true;
            }
            return changed;
        }

        void eliminate(int g, std::size_t ri)
        {
            const Word r = rels_[ri];
            std::size_t pos = 0;
            while (generator_of(r[pos]) != g)
                ++pos;
            Word rot = rotate(r, pos); // g^e * C = 1
            Word rest(rot.letters().subspan(1));
            Word image = rot[0] > 0 ? rest.inverse() : rest;
            rels_.erase(rels_.begin() + static_cast<std::ptrdiff_t>(ri));
            for (auto & w : rels_)
                w = cyclic_reduce(substitute(w, g, image)).word;
            alive_[static_cast<std::size_t>(g)] = false;
            eliminations_.emplace_back(g, std::move(image));
            normalize();
        }

        // Replaces a cyclic subword of r that is more than half of another
        // relator s by the inverse of the rest of s.
        bool substring_round()
        {
            bool changed = false;
            for (bool again = true; again;) {
                again = false;
                std::vector<std::size_t> order(rels_.size());
                for (std::size_t i = 0; i < order.size(); ++i)
                    order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rels_[a].size() < rels_[b].size(); });
                // keyed by the first two letters of each rotation of s and s^-1
                std::map<std::pair<Letter, Letter>, std::vector<std::pair<std::size_t, Word>>> index;
                for (std::size_t si : order) {
                    const Word & s = rels_[si];
                    if (s.size() < 2)
                        continue;
                    for (const Word & v : {s, s.inverse()})
                        for (std::size_t k = 0; k < v.size(); ++k) {
                            Word rv = rotate(v, k);
                            index[{rv[0], rv[1]}].emplace_back(si, std::move(rv));
                        }
                }
                for (std::size_t ri = 0; ri < rels_.size() && ! again; ++ri) {
                    const Word r = rels_[ri];
                    const std::size_t len = r.size();
                    if (len < 2)
                        continue;
                    for (std::size_t i = 0; i < len && ! again; ++i) {
                        auto it = index.find({r[i], r[(i + 1) % len]});
                        if (it == index.end())
                            continue;
                        for (auto & [si, rv] : it->second) {
                            if (si == ri || rels_[si].size() > len)
                                continue;
                            std::size_t L = 0;
                            while (L < rv.size() && L < len && r[(i + L) % len] == rv[L])
                                ++L;
                            if (2 * L <= rv.size() || (L == len && rv.size() == len))
                                continue;
                            // r rotated to i is A C with A = rv[0..L) = (rv[L..])^-1
                            Word rest(rv.letters().subspan(L));
                            Word rest_inv = rest.inverse();
                            std::vector<Letter> next(rest_inv.begin(), rest_inv.end());
                            for (std::size_t k = L; k < len; ++k)
                                next.push_back(r[(i + k) % len]);
                            rels_[ri] = cyclic_reduce(Word(next)).word;
                            again = true;
                            changed = true;
                            break;
                        }
                    }
                }
                if (again)
                    normalize();
            }
            return changed;
        }

        TietzeResult finish(bool exhausted)
        {
            TietzeResult res;
            res.budget_exhausted = exhausted;
            std::vector<int> newid(static_cast<std::size_t>(n_), -1);
            std::vector<std::string> names;
            for (int g = 0; g < n_; ++g)
                if (alive_[static_cast<std::size_t>(g)]) {
                    newid[static_cast<std::size_t>(g)] = static_cast<int>(res.kept.size());
                    res.kept.push_back(g);
                    names.push_back(names_[static_cast<std::size_t>(g)]);
                }
            res.generator_images.assign(static_cast<std::size_t>(n_), Word{});
            for (int g = 0; g < n_; ++g)
                if (alive_[static_cast<std::size_t>(g)])
                    res.generator_images[static_cast<std::size_t>(g)] = Word::generator(newid[static_cast<std::size_t>(g)]);
            // Later eliminations only mention generators alive at that time.
            for (auto it = eliminations_.rbegin(); it != eliminations_.rend(); ++it)
                res.generator_images[static_cast<std::size_t>(it->first)] = map_word(it->second, res.generator_images);
            res.presentation = Presentation(std::move(names));
            for (auto & r : rels_)
                res.presentation.add_relator(map_word(r, res.generator_images));
            return res;
        }

        static Word map_word(const Word & w, const std::vector<Word> & images)
        {
            Word out;
            for (auto l : w) {
                const Word & im = images[static_cast<std::size_t>(generator_of(l))];
                out *= l > 0 ? im : im.inverse();
            }
            return out;
        }

        int n_;
        std::vector<std::string> names_;
        TietzeBudget budget_;
        std::vector<bool> alive_, protect_;
        std::vector<Word> rels_;
        std::vector<std::pair<int, Word>> eliminations_;
    };

} // namespace detail

/// Tietze simplification of a bare presentation. Generators flagged in
/// `protect` are never eliminated.
inline TietzeResult simplify_presentation(const Presentation & pres, const TietzeBudget & budget = {},
    std::vector<bool> protect = {})
{
    return detail::TietzeWorker(pres, budget, std::move(protect)).run();
}

/// Applies a simplification of sp.presentation to the subgroup presentation;
/// the rewriting maps and ambient generator words follow the surviving
/// generators.
inline SubgroupPresentation apply_tietze(const SubgroupPresentation & sp, TietzeResult res)
{
    SubgroupPresentation out = sp;
    out.presentation = std::move(res.presentation);
    out.generator_words.clear();
    for (int g : res.kept)
        out.generator_words.push_back(sp.generator_words[static_cast<std::size_t>(g)]);
    for (auto & img : out.schreier_image) {
        Word mapped;
        for (auto l : img) {
            const Word & im = res.generator_images[static_cast<std::size_t>(generator_of(l))];
            mapped *= l > 0 ? im : im.inverse();
        }
        img = std::move(mapped);
    }
    out.budget_exhausted = sp.budget_exhausted || res.budget_exhausted;
    return out;
}

inline SubgroupPresentation tietze_simplify(const SubgroupPresentation & sp, const TietzeBudget & budget = {})
{
    return apply_tietze(sp, simplify_presentation(sp.presentation, budget));
}

} // namespace fptower

#endif // FPTOWER_TIETZE_HPP
