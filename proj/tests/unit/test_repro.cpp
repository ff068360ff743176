#include "../support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

using namespace fptower;

namespace {
fs::path scratch_dir(const std::string & name)
{
    auto dir = fs::temp_directory_path() / ("fptower-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Json without_timing(Json j)
{
    j.erase("timing");
    return j;
}
} // namespace

TEST_CASE("Tietze cache entries round trip", "[repro]")
{
    auto res = simplify_presentation(reidemeister_schreier(fixtures::triangle(), kernel_table({3, {1, 1}})).presentation);
    auto text = serialize_tietze_result(res);
    CHECK(text.starts_with("fptower-tietze 1\n"));
    auto back = deserialize_tietze_result(text);
    CHECK(back.presentation == res.presentation);
    CHECK(back.generator_images == res.generator_images);
    CHECK(back.kept == res.kept);
    CHECK(back.budget_exhausted == res.budget_exhausted);
    CHECK_THROWS(deserialize_tietze_result("garbage\n"));
}

TEST_CASE("the audited simplifier caches on disk", "[repro]")
{
    auto dir = scratch_dir("cache");
    auto pres = reidemeister_schreier(fixtures::triangle(), kernel_table({3, {0, 1}})).presentation;
    AuditedSimplifier first(dir);
    auto a = first.simplify(pres, {});
    CHECK(first.cache_hits() == 0);
    REQUIRE(first.audits().size() == 1);
    CHECK(first.audits()[0].agrees());

    AuditedSimplifier second(dir);
    auto b = second.simplify(pres, {});
    CHECK(second.cache_hits() == 1);
    CHECK(a.presentation == b.presentation);
    CHECK(a.generator_images == b.generator_images);
    fs::remove_all(dir);
}

TEST_CASE("configuration checks", "[repro]")
{
    ReproConfig c;
    CHECK_NOTHROW(c.validate());
    c.stretch_depth = 1;
    CHECK_THROWS(c.validate());
    c = {};
    c.max_cosets = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.probes = "huge";
    CHECK_THROWS(c.validate());
}

TEST_CASE("a starved run is inconclusive and deterministic", "[repro]")
{
    ReproConfig c;
    c.max_cosets = 100;
    c.stretch_depth = c.required_depth;
    c.cache_dir.clear();
    c.out_dir = scratch_dir("starved");
    auto r1 = run_repro(c);
    REQUIRE(r1.find("index-288"));
    CHECK(r1.find("index-288")->status == ExperimentStatus::inconclusive);
    CHECK(r1.overall() == ExperimentStatus::inconclusive);
    CHECK(r1.exit_code() == 2);
    CHECK(r1.find("tower")->status == ExperimentStatus::match);
    CHECK(r1.find("pattern-T")->status == ExperimentStatus::match);
    CHECK(fs::exists(c.out_dir / "report.json"));
    CHECK(fs::exists(c.out_dir / "report.md"));
    CHECK(fs::exists(c.out_dir / "chain-report.json"));

    auto r2 = run_repro(c);
    CHECK(without_timing(r1.to_json()).dump() == without_timing(r2.to_json()).dump());
    CHECK(r1.to_markdown(false) == r2.to_markdown(false));
    fs::remove_all(c.out_dir);
}

TEST_CASE("reports never count inconclusive as a match", "[repro]")
{
    ReproReport r;
    r.experiments.push_back({.id = "a", .status = ExperimentStatus::match});
    r.experiments.push_back({.id = "b", .status = ExperimentStatus::inconclusive, .required = false});
    CHECK(r.overall() == ExperimentStatus::match);
    r.experiments.push_back({.id = "c", .status = ExperimentStatus::inconclusive});
    CHECK(r.exit_code() == 2);
    r.experiments.push_back({.id = "d", .status = ExperimentStatus::mismatch});
    CHECK(r.exit_code() == 3);
    CHECK(r.to_json()["overall"] == "mismatch");
    CHECK(r.to_json().contains("timing"));
}
