#include "../support/fixtures.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fptower;

TEST_CASE("bracket syntax", "[presentation]")
{
    auto g = parse_presentation("\xE2\x9F\xA8u,w | u^3, w^3, (u, w*u*w^-1*u*w), (u*w)^8\xE2\x9F\xA9");
    CHECK(g.generator_count() == 2);
    REQUIRE(g.relators().size() == 4);
    CHECK(g.relators()[3].size() == 16);

    auto f = parse_presentation("\xE2\x9F\xA8x | \xE2\x9F\xA9");
    CHECK(f.generator_count() == 1);
    CHECK(f.relators().empty());

    auto t = parse_presentation("<x,y | x^3, y^3, (x*y)^3>");
    REQUIRE(t.relators().size() == 3);
    CHECK(t.relators()[2].size() == 6);
}

TEST_CASE("the bundled files", "[presentation]")
{
    auto g = fixtures::gamma();
    CHECK(g == parse_presentation("<u,w | u^3, w^3, (u, w*u*w^-1*u*w), (u*w)^8>"));
    CHECK(fixtures::triangle() == parse_presentation("<x,y | x^3, y^3, (x*y)^3>"));
    CHECK(fixtures::triangle_prime() == parse_presentation("<x,y | x^3, y^3, (x*y)^3*(y*x)^3>"));
}

TEST_CASE("exponent and conjugation notation", "[presentation]")
{
    auto g = fixtures::gamma();
    Word u = Word::generator(0), w = Word::generator(1);
    CHECK(parse_word("w^u", g) == conjugate(w, u));
    CHECK(parse_word("w^{u*w}", g) == conjugate(w, u * w));
    CHECK(parse_word("w^(w^u)", g) == conjugate(w, conjugate(w, u)));
    CHECK(parse_word("w^(u,w^-1)", g) == conjugate(w, commutator(u, w.inverse())));
    CHECK(parse_word("(u,w)", g) == commutator(u, w));
    CHECK(parse_word("u^-2", g) == u.inverse() * u.inverse());
    CHECK(parse_word("1", g).empty());
}

TEST_CASE("round trips through both text forms", "[presentation]")
{
    for (auto & fc : props::finite_cases()) {
        auto p = parse_presentation(fc.text);
        CHECK(parse_presentation(p.to_text()) == p);
        CHECK(parse_presentation(p.to_brackets()) == p);
    }
    auto g = fixtures::gamma();
    CHECK(parse_presentation(g.to_text()) == g);
    CHECK(parse_presentation(g.to_text()).hash() == g.hash());
}

TEST_CASE("malformed input is rejected with a position", "[presentation]")
{
    CHECK_THROWS_AS(parse_presentation("<x,y | x^3, z>"), ParseError);
    CHECK_THROWS_AS(parse_presentation("<x,x | x>"), ParseError);
    CHECK_THROWS_AS(parse_presentation("<x | x^>"), ParseError);
    CHECK_THROWS_AS(parse_presentation("x | x"), ParseError);
    CHECK_THROWS_AS(parse_presentation("<x | (x*x>"), ParseError);
    try {
        parse_presentation("<x,y | x^3, z>");
    }
    catch (const ParseError & e) {
        CHECK(e.position() > 0);
    }
}
