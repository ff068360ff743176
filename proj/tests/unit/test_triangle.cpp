#include "../support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace fptower;

namespace {
using Key = std::tuple<std::int64_t, std::int64_t, int>;
Key key(const AffineIsometry & g) { return {g.t.a, g.t.b, g.k}; }

// Bounded closure of the generated group inside a norm ball. Finding both
// basis translations of L and a rotation proves the images generate T.
bool generates_by_closure(const std::vector<AffineIsometry> & gens, std::int64_t ball = 600)
{
    std::vector<AffineIsometry> steps;
    for (auto & g : gens) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    std::set<Key> seen{key(AffineIsometry::identity())};
    std::vector<AffineIsometry> frontier{AffineIsometry::identity()};
    while (! frontier.empty()) {
        std::vector<AffineIsometry> next;
        for (auto & e : frontier)
            for (auto & s : steps) {
                auto p = e * s;
                if (p.t.norm() <= ball && seen.insert(key(p)).second)
                    next.push_back(p);
            }
        frontier = std::move(next);
    }
    bool rotation = false;
    for (auto & [a, b, k] : seen)
        rotation = rotation || k != 0;
    return rotation && seen.count({1, -1, 0}) && seen.count({1, 2, 0});
}
} // namespace

TEST_CASE("Eisenstein arithmetic", "[triangle]")
{
    EisensteinInt w = EisensteinInt::omega();
    CHECK(w * w * w == EisensteinInt{1, 0});
    CHECK(EisensteinInt{1, 0} + w + w * w == EisensteinInt{});
    CHECK(EisensteinInt{1, -1}.norm() == 3);
    CHECK(EisensteinInt{2, 3}.rotate(1) == w * EisensteinInt{2, 3});
    CHECK(EisensteinInt{-5, -1}.to_string() == "-5-w");
}

TEST_CASE("the model of T", "[triangle]")
{
    auto T = fixtures::triangle();
    std::vector<AffineIsometry> id{TriangleModel::x(), TriangleModel::y()};
    CHECK(satisfies_relators(T, id));
    CHECK(surjectivity_check(id));
    CHECK(evaluate(parse_word("(x*y)^3", T), id).is_identity());
    CHECK((TriangleModel::x() * TriangleModel::y()).order() == 3);
}

TEST_CASE("surjectivity examples", "[triangle]")
{
    AffineIsometry x{{0, 0}, 1};
    CHECK(surjectivity_check(std::vector<AffineIsometry>{x, {{1, -1}, 1}}));
    CHECK_FALSE(surjectivity_check(std::vector<AffineIsometry>{x, x}));
    CHECK_FALSE(surjectivity_check(std::vector<AffineIsometry>{x, {{3, -3}, 1}}));
    CHECK_FALSE(surjectivity_check(std::vector<AffineIsometry>{{{1, -1}, 0}, {{1, 2}, 0}})); // no rotation
}

TEST_CASE("surjectivity agrees with a closure oracle", "[triangle][property]")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> coord(-3, 3), rot(0, 2);
    int agree = 0, positives = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<AffineIsometry> gens;
        for (int j = 0; j < 2; ++j) {
            std::int64_t a = coord(rng), b = coord(rng);
            b -= (a + b) % 3; // into L
            gens.push_back({{a, b}, rot(rng)});
        }
        bool fast = surjectivity_check(gens);
        bool slow = generates_by_closure(gens);
        agree += fast == slow;
        positives += fast;
    }
    CHECK(agree == 200);
    CHECK(positives > 10);
}

TEST_CASE("epimorphism search", "[triangle]")
{
    auto T = fixtures::triangle();
    auto h = find_epi_to_triangle(T);
    REQUIRE(h);
    CHECK(satisfies_relators(T, *h));
    CHECK(surjectivity_check(*h));

    CHECK_FALSE(find_epi_to_triangle(parse_presentation("<x | >")));
    // an abelian group has no epimorphism onto T
    CHECK_FALSE(find_epi_to_triangle(parse_presentation("<a,b | (a,b)>")));
}

TEST_CASE("an epimorphism from G1 with the order-3 pattern", "[triangle][gamma]")
{
    auto g1 = fixtures::g1();
    auto h = find_epi_to_triangle(*g1);
    REQUIRE(h);
    CHECK(satisfies_relators(g1->presentation, *h));
    CHECK(surjectivity_check(*h));

    auto & o = fixtures::abcd();
    CHECK(satisfies_relators(g1->presentation, o.epimorphism));
    CHECK(surjectivity_check(o.epimorphism));
    CHECK(evaluate(o.a, o.epimorphism) == o.x);
    CHECK(evaluate(o.b, o.epimorphism) == o.x);
    CHECK(evaluate(o.c, o.epimorphism) == o.x);
    CHECK(evaluate(o.d, o.epimorphism) == o.y);
    CHECK(o.x.order() == 3);
    CHECK(o.y.order() == 3);
    CHECK(surjectivity_check(std::vector<AffineIsometry>{o.x, o.y}));
    CHECK(generates_by_closure({o.x, o.y}));
}
