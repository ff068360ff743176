#include "../support/fixtures.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fptower;

TEST_CASE("small enumerations", "[coset]")
{
    auto c5 = parse_presentation("<x | x^5>");
    CHECK(todd_coxeter(c5, {}).index() == 5);

    auto s3 = parse_presentation("<x,y | x^2, y^3, (x*y)^2>");
    std::vector<oracle::Perm> model{oracle::cycles(3, {{0, 1}}), oracle::cycles(3, {{0, 1, 2}})};
    CHECK(todd_coxeter(s3, {}).index() == oracle::closure_order(model, 3));

    auto c3 = todd_coxeter(parse_presentation("<x | x^3>"), {});
    auto perms = permutation_representation(c3);
    REQUIRE(perms.size() == 1);
    CHECK(perms[0] == std::vector<int>{1, 2, 0});
}

TEST_CASE("infinite groups hit the limit", "[coset]")
{
    CHECK_THROWS_AS(todd_coxeter(parse_presentation("<x | >"), {}, {.max_cosets = 1000}), LimitExceeded);
    CHECK_THROWS_AS(todd_coxeter(fixtures::triangle(), {}, {.max_cosets = 5000}), LimitExceeded);
    CHECK_THROWS_AS(todd_coxeter(fixtures::triangle(), {}, {.max_cosets = 5000, .strategy = Strategy::felsch}), LimitExceeded);
}

TEST_CASE("trace and membership", "[coset]")
{
    auto t = todd_coxeter(parse_presentation("<x,y | x^2, y^3, (x*y)^2>"), {Word::generator(0)});
    CHECK(t.index() == 3);
    for (int c = 0; c < 3; ++c)
        CHECK(trace(t, Word{}, c) == c);
    CHECK(contains(t, Word{}));
    CHECK(contains(t, Word::generator(0)));
    CHECK_FALSE(contains(t, Word::generator(1)));
}

TEST_CASE("the index-288 subgroup of Gamma-bar", "[coset][gamma]")
{
    auto g = fixtures::gamma();
    auto gens = fixtures::g1_generators(g);
    auto & t = fixtures::g1_table();
    CHECK(t.index() == 288);
    for (auto & h : gens)
        CHECK(contains(t, h));
    CHECK(trace(t, gens[0], 0) == 0);
    props::SuiteResult r;
    props::check_table_laws(r, g, gens, t, "G1 ");
    CHECK(r.failures == 0);

    auto perms = permutation_representation(t);
    REQUIRE(perms.size() == 2);
    for (auto & p : perms) {
        CHECK(p.size() == 288);
        CHECK(oracle::compose(oracle::compose(p, p), p) == oracle::identity(288));
        CHECK(p != oracle::identity(288));
    }

    auto felsch = todd_coxeter(g, gens, {.strategy = Strategy::felsch});
    CHECK(felsch == t);
}

TEST_CASE("serialized tables", "[coset]")
{
    auto g = fixtures::gamma();
    auto & t = fixtures::g1_table();
    std::string text = t.serialize(g.hash());
    CHECK(text.starts_with("fptower-coset-table 1\n"));
    auto back = CosetTable::deserialize(text);
    CHECK(back.table == t);
    CHECK(back.presentation_hash == g.hash());
    CHECK_THROWS(CosetTable::deserialize("something else"));
    // A corrupted entry must not load as a table.
    std::string bad = text;
    bad.replace(bad.rfind('\n', bad.size() - 2) + 1, std::string::npos, "1 1 1 1\n");
    CHECK_THROWS(CosetTable::deserialize(bad));
}

TEST_CASE("tables from permutations are standardized", "[coset]")
{
    auto a = CosetTable::from_permutations({{2, 0, 1}});
    auto b = CosetTable::from_permutations({{1, 2, 0}});
    CHECK(a.index() == 3);
    CHECK(a.trace(Word::generator(0, 3)) == 0);
    CHECK(b.index() == 3);
    CHECK_THROWS(CosetTable::from_permutations({{1, 0, 2}})); // not transitive
}

TEST_CASE("coset table laws against brute-force orders", "[coset][property]")
{
    auto r = props::coset_table_properties();
    for (auto & m : r.messages)
        UNSCOPED_INFO(m);
    CHECK(r.cases == 20);
    CHECK(r.failures == 0);
}
