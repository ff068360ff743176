#include "../support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace fptower;

namespace {
std::string multiset(const std::vector<RecordPtr> & ks)
{
    std::vector<std::string> parts;
    for (auto & k : ks)
        parts.push_back(k->invariants.to_string());
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (auto & p : parts)
        s += (s.empty() ? "" : " ") + p;
    return s;
}

const ChainResult & chain_depth1()
{
    static ChainResult c = descend_chain(fixtures::g1(), 1,
        witness_selector({fixtures::g1_generators(fixtures::gamma())[0]}, fixtures::abc_root()));
    return c;
}
} // namespace

TEST_CASE("epimorphisms onto Z/3", "[quotient]")
{
    auto epis = epimorphisms_to_cyclic(fixtures::triangle(), 3);
    REQUIRE(epis.size() == 4);
    CHECK(epis[0].images == std::vector<long>{0, 1});
    CHECK(epis[1].images == std::vector<long>{1, 0});
    CHECK(epis[2].images == std::vector<long>{1, 1});
    CHECK(epis[3].images == std::vector<long>{1, 2});
    CHECK(epimorphisms_to_cyclic(parse_presentation("<x | x^2>"), 3).empty());

    // proportional image vectors give the same kernel
    CHECK(kernel_table({3, {1, 2}}) == kernel_table({3, {2, 1}}));
    CHECK_FALSE(kernel_table({3, {1, 2}}) == kernel_table({3, {1, 1}}));
}

TEST_CASE("kernel count matches the mod-3 corank", "[quotient]")
{
    for (auto rec : {fixtures::t_root(), fixtures::g1()}) {
        int r = rec->presentation.generator_count() - mod_p_rank(exponent_matrix(rec->presentation), 3);
        int expected = (static_cast<int>(std::pow(3, r)) - 1) / 2;
        CHECK(static_cast<int>(epimorphisms_to_cyclic(rec->presentation, 3).size()) == expected);
    }
}

TEST_CASE("index-3 normal subgroups", "[quotient]")
{
    auto tk = prime_index_normal_subgroups(fixtures::t_root(), 3);
    CHECK(multiset(tk) == "[0,0] [3,3] [3,3] [3,3]");
    CHECK(tk.front()->invariants.to_string() == "[0,0]"); // listing order
    CHECK(tk.front()->label == "T.k1");

    auto gk = prime_index_normal_subgroups(fixtures::g1(), 3);
    CHECK(multiset(gk) == "[0,0] [3,21] [3,3] [3,3]");
    for (auto & k : gk) {
        CHECK(k->index_in_parent == 3);
        CHECK(k->index_in_root == 864);
    }
}

TEST_CASE("commutator checks", "[quotient]")
{
    auto free2 = commutator_check(parse_presentation("<x,y | >"), {.max_cosets = 2000});
    CHECK_FALSE(free2.holds);
    CHECK_FALSE(free2.diagnostic.empty());
    CHECK(commutator_check(fixtures::triangle()).holds);
    CHECK(commutator_subgroup_check(*fixtures::g1()));
    CHECK_FALSE(commutator_check(parse_presentation("<x,y | x^3, y^9, (x,y)>")).holds);
}

TEST_CASE("quotients by normal closures", "[quotient]")
{
    CHECK(quotient_order(parse_presentation("<x | x^3>")) == 3u);
    CHECK_FALSE(quotient_order(parse_presentation("<x | >"), {.max_cosets = 1000}));

    auto g1 = fixtures::g1();
    CHECK(normal_closure_quotient(*g1, {}) == g1->presentation);
    std::vector<Word> all;
    for (int g = 0; g < g1->presentation.generator_count(); ++g)
        all.push_back(Word::generator(g));
    CHECK(quotient_order(normal_closure_quotient(*g1, all)) == 1u);

    // G1 modulo commutators and cubes of its generators
    auto q = g1->presentation;
    for (int i = 0; i < q.generator_count(); ++i) {
        q.add_relator(Word::generator(i, 3));
        for (int j = i + 1; j < q.generator_count(); ++j)
            q.add_relator(commutator(Word::generator(i), Word::generator(j)));
    }
    CHECK(quotient_order(q) == 9u);
}

TEST_CASE("G1 modulo a, b, c has order 3", "[quotient][gamma]")
{
    auto & o = fixtures::abcd();
    auto g1 = fixtures::g1();
    CHECK(quotient_order(normal_closure_quotient(*g1, {o.a, o.b, o.c})) == 3u);

    const auto & chain = chain_depth1();
    REQUIRE(chain.levels.size() == 2);
    auto G2 = chain.levels[1].group;
    auto cert = order3_generation_check(*G2, *g1, fixtures::abc_root());
    CHECK(cert.members);
    CHECK(cert.holds);
    CHECK(cert.quotient_order == 3u);

    // all generators kill everything
    std::vector<Word> all = g1->generators_in_root();
    CHECK_FALSE(order3_generation_check(*G2, *g1, all).holds);
}

TEST_CASE("one step of the chain", "[quotient][gamma]")
{
    CHECK(descend_chain(fixtures::g1(), 0, lexicographic_selector()).chain().empty());

    const auto & chain = chain_depth1();
    REQUIRE(chain.levels.size() == 2);
    auto G2 = chain.levels[1].group;
    CHECK(G2->label == "G2");
    CHECK(G2->invariants.to_string() == "[3,3]");
    CHECK(G2->contains_root_word(fixtures::g1_generators(fixtures::gamma())[0]));
    CHECK(multiset(chain.levels[1].kernels) == "[3,3] [3,3] [3,3] [7,0,0]");
    CHECK(commutator_subgroup_check(*G2));

    // the [7,0,0] kernel sits in H1 with index 3
    RecordPtr H1, K7;
    for (auto & k : chain.levels[0].kernels)
        if (k->invariants.to_string() == "[0,0]")
            H1 = k;
    for (auto & k : chain.levels[1].kernels)
        if (k->invariants.to_string() == "[7,0,0]")
            K7 = k;
    REQUIRE(H1);
    REQUIRE(K7);
    for (auto & g : K7->generators_in_root())
        CHECK(H1->contains_root_word(g));
    CHECK(K7->index_in_root == 3 * H1->index_in_root);

    // H2 is the derived subgroup of G1; H1 has the wrong index
    auto d = derived_subgroup_check(*fixtures::g1(), *K7);
    CHECK(d.holds);
    CHECK(d.index == 9);
    CHECK_FALSE(derived_subgroup_check(*fixtures::g1(), *H1).holds);
}

TEST_CASE("conjugacy witnesses", "[quotient]")
{
    auto tk = prime_index_normal_subgroups(fixtures::t_root(), 3);
    auto same = conjugacy_witness_search({tk[1], tk[1]}, {fixtures::t_root()}, 2);
    REQUIRE(same.size() == 1);
    CHECK(same[0].status == ConjugacyWitness::Status::found);
    CHECK(same[0].conjugator.empty());

    auto diff = conjugacy_witness_search({tk[0], tk[1]}, {fixtures::t_root()}, 2);
    REQUIRE(diff.size() == 1);
    CHECK(diff[0].status == ConjugacyWitness::Status::impossible);
}
