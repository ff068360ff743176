// Lazily built groups shared by the unit tests of one process.
#ifndef FPTOWER_TESTS_FIXTURES_HPP
#define FPTOWER_TESTS_FIXTURES_HPP

#include <fptower/repro.hpp>

namespace fixtures {

using namespace fptower;

inline Presentation gamma() { return load_presentation(default_data_dir() / "gamma-bar.pres"); }
inline Presentation triangle() { return load_presentation(default_data_dir() / "triangle-333.pres"); }
inline Presentation triangle_prime() { return load_presentation(default_data_dir() / "triangle-prime.pres"); }

inline std::vector<Word> g1_generators(const Presentation & g)
{
    return {parse_word("w^{u*w}", g), parse_word("w^(w^u)", g), parse_word("w^(u,w^-1)", g)};
}

inline RecordPtr root()
{
    static RecordPtr r = make_root_record("Gamma", gamma());
    return r;
}

inline const CosetTable & g1_table()
{
    static CosetTable t = todd_coxeter(root()->presentation, g1_generators(root()->presentation));
    return t;
}

inline RecordPtr g1()
{
    static RecordPtr r = make_subgroup_record(root(), "G1", g1_table(), RecordOptions{});
    return r;
}

inline RecordPtr t_root()
{
    static RecordPtr r = make_root_record("T", triangle());
    return r;
}

inline const Order3Generators & abcd()
{
    static Order3Generators o = [] {
        auto found = find_order3_generators(*g1(), {g1_generators(root()->presentation)[0]});
        if (! found)
            throw std::runtime_error("no a, b, c, d found");
        return *found;
    }();
    return o;
}

// a, b, c as words in Gamma-bar.
inline std::vector<Word> abc_root()
{
    auto & o = abcd();
    return {g1()->expand_to_root(o.a), g1()->expand_to_root(o.b), g1()->expand_to_root(o.c)};
}

} // namespace fixtures

#endif
