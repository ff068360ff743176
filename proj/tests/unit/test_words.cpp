#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fptower;

namespace {
constexpr Letter u = make_letter(0), U = make_letter(0, true);
constexpr Letter w = make_letter(1), W = make_letter(1, true);

Word from(std::initializer_list<Letter> l) { return Word(std::vector<Letter>(l)); }
} // namespace

TEST_CASE("free reduction", "[words]")
{
    CHECK(from({u, U, w}).raw() == std::vector<Letter>{w});
    CHECK(from({}).empty());
    std::vector<Letter> raw{u, w, W, u, u, U};
    CHECK(Word(raw).raw() == oracle::naive_reduce(raw));
    CHECK(Word(raw).raw() == std::vector<Letter>{u, u});
    CHECK_THROWS(free_reduce(std::vector<Letter>{make_letter(3)}, 2));
}

TEST_CASE("inversion", "[words]")
{
    CHECK(invert(from({u, W})).raw() == std::vector<Letter>{w, U});
    CHECK(invert(Word{}).empty());
    Word x = from({u, w, U, w, w});
    CHECK((x * invert(x)).empty());
}

TEST_CASE("conjugation and commutators", "[words]")
{
    Word uu = Word::generator(0), ww = Word::generator(1);
    CHECK(conjugate(ww, Word{}) == ww);
    CHECK(conjugate(ww, uu).raw() == std::vector<Letter>{U, w, u});
    CHECK(conjugate(ww, uu * ww).raw() == std::vector<Letter>{W, U, w, u, w});
    CHECK(commutator(uu, uu).empty());
    CHECK(commutator(uu, ww).raw() == std::vector<Letter>{U, W, u, w});
    CHECK(commutator(uu, ww.inverse()).raw() == std::vector<Letter>{U, w, u, W});
}

TEST_CASE("cyclic reduction", "[words]")
{
    auto r = cyclic_reduce(from({U, w, u}));
    CHECK(r.word.raw() == std::vector<Letter>{w});
    CHECK(r.conjugator.raw() == std::vector<Letter>{u});
    auto s = cyclic_reduce(from({w}));
    CHECK(s.word.raw() == std::vector<Letter>{w});
    CHECK(s.conjugator.empty());

    Word x = from({u, w, U});
    auto t = cyclic_reduce(x * x);
    CHECK(t.word.size() == 2);
    CHECK(t.word.raw() == std::vector<Letter>{w, w});
}

TEST_CASE("rotations and the cyclic canonical form", "[words]")
{
    Word x = from({u, w, w, U, W});
    auto cx = cyclic_canonical(cyclic_reduce(x).word);
    for (std::size_t k = 0; k < 3; ++k) {
        Word r = rotate(cyclic_reduce(x).word, k);
        CHECK(cyclic_canonical(r) == cx);
    }
}

TEST_CASE("shortlex order", "[words]")
{
    CHECK(Word{} < Word::generator(0));
    CHECK(Word::generator(0) < Word::generator(1));
    CHECK(Word::generator(1) < Word::generator(0, 2));
}

TEST_CASE("random word identities", "[words][property]")
{
    auto r = props::word_properties(10'000, 11);
    INFO((r.messages.empty() ? std::string() : r.messages.front()));
    CHECK(r.cases == 10'000);
    CHECK(r.failures == 0);
}
