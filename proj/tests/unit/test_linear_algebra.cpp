#include "../support/fixtures.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fptower;

namespace {
IntMatrix dense(std::vector<std::vector<long>> d, int cols = -1) { return IntMatrix::from_dense(d, cols); }

std::vector<BigInt> big(std::initializer_list<long> v)
{
    std::vector<BigInt> out;
    for (long x : v)
        out.emplace_back(x);
    return out;
}
} // namespace

TEST_CASE("exponent matrices", "[linalg]")
{
    CHECK(exponent_matrix(fixtures::triangle()) == dense({{3, 0}, {0, 3}, {3, 3}}));
    auto free2 = parse_presentation("<x,y | >");
    auto m = exponent_matrix(free2);
    CHECK(m.rows() == 0);
    CHECK(m.cols() == 2);
    CHECK(exponent_matrix(fixtures::triangle_prime()) == dense({{3, 0}, {0, 3}, {6, 6}}));
}

TEST_CASE("Smith normal form examples", "[linalg]")
{
    auto a = dense({{2, 0}, {0, 3}});
    auto s = smith_normal_form(a);
    CHECK(s.diagonal == big({1, 6}));
    CHECK(*s.U * a * *s.V == s.D);

    auto t = dense({{3, 0}, {0, 3}, {3, 3}});
    auto st = smith_normal_form(t);
    CHECK(st.diagonal == big({3, 3}));
    CHECK(*st.U * t * *st.V == st.D);

    IntMatrix z(3, 4);
    auto sz = smith_normal_form(z);
    CHECK(sz.rank == 0);
    CHECK(sz.D == z);
    CHECK(*sz.U == IntMatrix::identity(3));
    CHECK(*sz.V == IntMatrix::identity(4));
}

TEST_CASE("determinants agree with the Leibniz formula", "[linalg]")
{
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 5; ++n)
        for (int k = 0; k < 40; ++k) {
            auto m = props::random_matrix(rng, n, n);
            CHECK(determinant(m) == oracle::leibniz_det(m.dense()));
        }
}

TEST_CASE("abelian invariants", "[linalg]")
{
    CHECK(abelian_invariants(fixtures::triangle()).to_string() == "[3,3]");
    CHECK(abelian_invariants(fixtures::triangle_prime()).to_string() == "[3,3]");
    CHECK(abelian_invariants(parse_presentation("<x,y | >")).to_string() == "[0,0]");
    CHECK(abelian_invariants(parse_presentation("<x,y | x^4*y^6, x^2*y^-2>")).to_string() == "[2,10]");
    CHECK(fixtures::g1()->invariants.to_string() == "[3,3]");

    auto a = AbelianInvariants::from_string("[3,21,0,0]");
    CHECK(a.free_rank == 2);
    CHECK(a.torsion == big({3, 21}));
    CHECK(a.to_string() == "[3,21,0,0]");
    CHECK(a.p_rank(3) == 4);
    CHECK(a.p_rank(7) == 3);
    CHECK(AbelianInvariants::from_string("[]").to_string() == "[]");
}

TEST_CASE("ranks and null spaces mod p", "[linalg]")
{
    auto g1 = exponent_matrix(fixtures::g1()->presentation);
    CHECK(fixtures::g1()->presentation.generator_count() - mod_p_rank(g1, 3) == 2);
    CHECK(mod_p_rank(IntMatrix::identity(3), 2) == 3);
    CHECK(mod_p_rank(IntMatrix::identity(3), 7) == 3);
    CHECK(mod_p_rank(dense({{3, 0}, {0, 3}}), 3) == 0);
    CHECK_THROWS(mod_p_rank(IntMatrix::identity(2), 4));

    auto ns = nullspace_mod_p(dense({{1, 2, 0}, {0, 0, 1}}), 5);
    REQUIRE(ns.size() == 1);
    // the line spanned by (1,2,0); any nonzero multiple will do
    CHECK(ns[0][2] == 0);
    CHECK(ns[0][0] != 0);
    CHECK((ns[0][0] + 2 * ns[0][1]) % 5 == 0);
    CHECK(nullspace_mod_p(exponent_matrix(fixtures::triangle()), 3).size() == 2);
}

TEST_CASE("matrix market dumps", "[linalg]")
{
    auto m = dense({{0, -4, 0}, {7, 0, 0}});
    std::string text = m.to_market();
    CHECK(text == "2 3\n1 2 -4\n2 1 7\n");
    CHECK(IntMatrix::from_market(text) == m);
    auto g1 = exponent_matrix(fixtures::g1()->presentation);
    CHECK(IntMatrix::from_market(g1.to_market()) == g1);
    CHECK_THROWS(IntMatrix::from_market("2 2\n3 1 1\n"));
}

TEST_CASE("Smith normal form on random matrices", "[linalg][property]")
{
    auto r = props::snf_properties(1000, 23);
    for (auto & m : r.messages)
        UNSCOPED_INFO(m);
    CHECK(r.cases == 1000);
    CHECK(r.failures == 0);
}
