#ifndef FPTOWER_WORD_HPP
#define FPTOWER_WORD_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

/// A signed generator reference: +(g+1) is generator g, -(g+1) its inverse.
using Letter = std::int32_t;

constexpr Letter make_letter(int generator, bool inverse = false) noexcept
{
    return inverse ? -(generator + 1) : (generator + 1);
}

constexpr int generator_of(Letter l) noexcept { return (l < 0 ? -l : l) - 1; }

constexpr bool is_inverse(Letter l) noexcept { return l < 0; }

class Word;

/// Freely reduces a raw letter sequence. When `generator_count` is
/// non-negative every letter must reference one of that many generators.
Word free_reduce(std::span<const Letter> letters, int generator_count = -1);

/// A freely reduced word. The empty word is the identity.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Letter> letters) : Word(std::span<const Letter>(letters.begin(), letters.size())) {}
    explicit Word(std::span<const Letter> letters) { *this = free_reduce(letters); }
    explicit Word(const std::vector<Letter> & letters) : Word(std::span<const Letter>(letters)) {}

    static Word generator(int g, int exponent = 1)
    {
        Word w;
        w.letters_.assign(static_cast<std::size_t>(std::abs(exponent)), make_letter(g, exponent < 0));
        return w;
    }

    [[nodiscard]] std::span<const Letter> letters() const noexcept { return letters_; }
    [[nodiscard]] const std::vector<Letter> & raw() const noexcept { return letters_; }
    [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
    [[nodiscard]] bool empty() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }
    auto begin() const noexcept { return letters_.begin(); }
    auto end() const noexcept { return letters_.end(); }

    [[nodiscard]] Word inverse() const
    {
        Word w;
        w.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
            w.letters_.push_back(-*it);
        return w;
    }

    [[nodiscard]] Word power(long n) const
    {
        if (n < 0)
            return inverse().power(-n);
        Word result;
        for (long i = 0; i < n; ++i)
            result *= *this;
        return result;
    }

    Word & operator*=(const Word & rhs)
    {
        std::size_t k = 0;
        while (k < rhs.letters_.size() && ! letters_.empty() && letters_.back() == -rhs.letters_[k]) {
            letters_.pop_back();
            ++k;
        }
        letters_.insert(letters_.end(), rhs.letters_.begin() + static_cast<std::ptrdiff_t>(k), rhs.letters_.end());
        return *this;
    }

    friend Word operator*(Word lhs, const Word & rhs) { return lhs *= rhs; }

    [[nodiscard]] int max_generator() const noexcept
    {
        int m = -1;
        for (auto l : letters_)
            m = std::max(m, generator_of(l));
        return m;
    }

    /// Exponent sum of generator g.
    [[nodiscard]] long exponent_sum(int g) const noexcept
    {
        long s = 0;
        for (auto l : letters_)
            if (generator_of(l) == g)
                s += l > 0 ? 1 : -1;
        return s;
    }

    friend bool operator==(const Word &, const Word &) = default;

    /// Shortlex order.
    friend std::strong_ordering operator<=>(const Word & a, const Word & b)
    {
        if (a.size() != b.size())
            return a.size() <=> b.size();
        return a.letters_ <=> b.letters_;
    }

private:
    friend Word free_reduce(std::span<const Letter>, int);
    std::vector<Letter> letters_;
};

inline Word free_reduce(std::span<const Letter> letters, int generator_count)
{
    Word w;
    w.letters_.reserve(letters.size());
    for (auto l : letters) {
        if (l == 0 || (generator_count >= 0 && generator_of(l) >= generator_count))
            throw std::invalid_argument("free_reduce: unknown generator reference " + std::to_string(l));
        if (! w.letters_.empty() && w.letters_.back() == -l)
            w.letters_.pop_back();
        else
            w.letters_.push_back(l);
    }
    return w;
}

inline Word invert(const Word & w) { return w.inverse(); }

/// x^g = g^-1 x g
inline Word conjugate(const Word & x, const Word & g) { return g.inverse() * x * g; }

/// (x,y) = x^-1 y^-1 x y
inline Word commutator(const Word & x, const Word & y) { return x.inverse() * y.inverse() * x * y; }

struct CyclicReduction {
    Word word;
    Word conjugator; ///< original == conjugate(word, conjugator)
};

inline CyclicReduction cyclic_reduce(const Word & w)
{
    auto letters = w.letters();
    std::size_t lo = 0, hi = letters.size();
    while (hi - lo >= 2 && letters[lo] == -letters[hi - 1]) {
        ++lo;
        --hi;
    }
    CyclicReduction r;
    r.word = Word(letters.subspan(lo, hi - lo));
    r.conjugator = Word(letters.subspan(hi)); // the trailing part equals the conjugator
    return r;
}

/// Cyclic rotation: letters [k..] followed by [..k).
inline Word rotate(const Word & w, std::size_t k)
{
    std::vector<Letter> v(w.begin(), w.end());
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k % std::max<std::size_t>(1, v.size())), v.end());
    return Word(v);
}

/// Canonical representative of the class of a cyclically reduced word under
/// rotation and inversion (least in shortlex order).
inline Word cyclic_canonical(const Word & w)
{
    if (w.empty())
        return w;
    Word best = w;
    const Word inv = w.inverse();
    std::vector<Letter> a(w.begin(), w.end()), b(inv.begin(), inv.end());
    std::vector<Letter> best_v = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        std::vector<Letter> ra(a.begin() + static_cast<std::ptrdiff_t>(k), a.end());
        ra.insert(ra.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<Letter> rb(b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
        rb.insert(rb.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k));
        if (ra < best_v)
            best_v = std::move(ra);
        if (rb < best_v)
            best_v = std::move(rb);
    }
    return Word(best_v);
}

} // namespace fptower

#endif // FPTOWER_WORD_HPP
