#ifndef FPTOWER_REPRO_HPP
#define FPTOWER_REPRO_HPP

#include <fptower/fingerprint.hpp>
#include <fptower/quotient.hpp>
#include <fptower/tower.hpp>

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fptower {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline std::string read_text_file(const fs::path & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const fs::path & path, const std::string & text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (! out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline Presentation load_presentation(const fs::path & path) { return parse_presentation(read_text_file(path)); }

/// Default data directory: $FPTOWER_DATA_DIR, else the build-time location.
inline fs::path default_data_dir()
{
    if (const char * env = std::getenv("FPTOWER_DATA_DIR"); env && *env)
        return env;
#ifdef FPTOWER_DATA_DIR
    return FPTOWER_DATA_DIR;
#else
    return "data";
#endif
}

/// Cache directory from $FPTOWER_CACHE_DIR; empty disables caching.
inline fs::path default_cache_dir()
{
    if (const char * env = std::getenv("FPTOWER_CACHE_DIR"); env && *env)
        return env;
    return {};
}

// ---------------------------------------------------------------------------
// Tietze results on disk

namespace detail {
    inline std::uint64_t fnv1a(const std::string & s)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    inline std::string hex64(std::uint64_t v)
    {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << v;
        return os.str();
    }
} // namespace detail

inline std::string serialize_tietze_result(const TietzeResult & r)
{
    std::ostringstream os;
    os << "fptower-tietze 1\n";
    os << "exhausted " << (r.budget_exhausted ? 1 : 0) << '\n';
    os << "kept";
    for (int k : r.kept)
        os << ' ' << k;
    os << '\n' << "images " << r.generator_images.size() << '\n';
    for (auto & w : r.generator_images)
        os << r.presentation.format_word(w) << '\n';
    os << r.presentation.to_text();
    return os.str();
}

inline TietzeResult deserialize_tietze_result(const std::string & text)
{
    std::istringstream is(text);
    std::string line, tag;
    auto next = [&]() {
        if (! std::getline(is, line))
            throw std::invalid_argument("tietze cache: truncated");
        return line;
    };
    if (next() != "fptower-tietze 1")
        throw std::invalid_argument("tietze cache: bad header");
    TietzeResult r;
    r.budget_exhausted = next() == "exhausted 1";
    {
        std::istringstream ks(next());
        ks >> tag;
        for (int k; ks >> k;)
            r.kept.push_back(k);
    }
    std::size_t n = 0;
    {
        std::istringstream ns(next());
        ns >> tag >> n;
    }
    std::vector<std::string> images;
    for (std::size_t i = 0; i < n; ++i)
        images.push_back(next());
    std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    r.presentation = parse_presentation(rest);
    for (auto & s : images)
        r.generator_images.push_back(s == "1" ? Word{} : parse_word(s, r.presentation));
    return r;
}

/// Wraps simplify_presentation with an on-disk cache keyed by the input text
/// and budget, and records the abelian invariants on both sides of every call.
class AuditedSimplifier {
public:
    explicit AuditedSimplifier(fs::path cache_dir = {}) : cache_dir_(std::move(cache_dir)) {}

    [[nodiscard]] Simplifier simplifier()
    {
        return [this](const Presentation & p, const TietzeBudget & b) { return simplify(p, b); };
    }

    TietzeResult simplify(const Presentation & pres, const TietzeBudget & budget)
    {
        std::ostringstream key;
        key << pres.to_text() << '|' << budget.max_passes << '|' << budget.max_relator_length << '|' << budget.expand_limit
            << '|' << budget.time_limit_seconds;
        fs::path file;
        std::optional<TietzeResult> result;
        if (! cache_dir_.empty()) {
            file = cache_dir_ / ("tietze-" + detail::hex64(detail::fnv1a(key.str())) + ".txt");
            if (fs::exists(file)) {
                try {
                    result = deserialize_tietze_result(read_text_file(file));
                    ++hits_;
                }
                catch (const std::exception &) {
                    result.reset();
                }
            }
        }
        if (! result) {
            result = simplify_presentation(pres, budget);
            if (! file.empty())
                write_text_file(file, serialize_tietze_result(*result));
        }
        TietzeAudit audit;
        audit.label = std::to_string(pres.generator_count()) + "/" + std::to_string(pres.total_length()) + " -> "
            + std::to_string(result->presentation.generator_count()) + "/" + std::to_string(result->presentation.total_length());
        audit.before = abelian_invariants(pres);
        audit.after = abelian_invariants(result->presentation);
        {
            std::lock_guard lock(mutex_);
            audits_.push_back(audit);
        }
        return *result;
    }

    [[nodiscard]] const std::vector<TietzeAudit> & audits() const { return audits_; }
    [[nodiscard]] std::size_t cache_hits() const { return hits_; }

private:
    fs::path cache_dir_;
    std::vector<TietzeAudit> audits_;
    std::size_t hits_ = 0;
    std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// report

enum class ExperimentStatus { match, mismatch, inconclusive };

inline std::string status_name(ExperimentStatus s)
{
    switch (s) {
    case ExperimentStatus::match: return "match";
    case ExperimentStatus::mismatch: return "mismatch";
    default: return "inconclusive";
    }
}

struct Experiment {
    std::string id;
    std::string claim;    ///< the statement being tested
    std::string expected;
    std::string computed;
    ExperimentStatus status = ExperimentStatus::inconclusive;
    bool required = true;
    double seconds = 0;
    Json detail = Json::object();
};

struct ReproConfig {
    int required_depth = 3;
    int stretch_depth = 9;
    double stretch_seconds = 300;
    std::size_t max_cosets = 2'000'000;      ///< main enumerations
    std::size_t quotient_cosets = 1'000'000; ///< quotient and certificate enumerations
    TietzeBudget tietze;
    Order3Budget order3;
    int conjugacy_length = 4;
    int tower_levels = 40;
    std::string probes = "standard"; ///< "standard" or "small" (orders up to 24)
    fs::path data_dir = default_data_dir();
    fs::path out_dir;   ///< empty: nothing written
    fs::path cache_dir = default_cache_dir();
    std::uint64_t seed = 0;
    std::function<void(const std::string &)> log;

    void validate() const
    {
        if (required_depth < 1)
            throw std::invalid_argument("required depth must be at least 1");
        if (stretch_depth < required_depth)
            throw std::invalid_argument("stretch depth must not be below the required depth");
        if (max_cosets == 0 || quotient_cosets == 0 || tower_levels < 2 || conjugacy_length < 0)
            throw std::invalid_argument("limits must be positive");
        if (probes != "standard" && probes != "small")
            throw std::invalid_argument("unknown probe battery '" + probes + "'");
    }
};

struct ReproReport {
    std::vector<Experiment> experiments;
    std::vector<TietzeAudit> audits;
    Json chain = Json::object(); ///< the chain report
    std::size_t cache_hits = 0;

    [[nodiscard]] const Experiment * find(const std::string & id) const
    {
        for (auto & e : experiments)
            if (e.id == id)
                return &e;
        return nullptr;
    }

    [[nodiscard]] ExperimentStatus overall() const
    {
        bool inconclusive = false;
        for (auto & e : experiments) {
            if (! e.required)
                continue;
            if (e.status == ExperimentStatus::mismatch)
                return ExperimentStatus::mismatch;
            inconclusive = inconclusive || e.status == ExperimentStatus::inconclusive;
        }
        return inconclusive ? ExperimentStatus::inconclusive : ExperimentStatus::match;
    }

    [[nodiscard]] int exit_code() const
    {
        switch (overall()) {
        case ExperimentStatus::match: return 0;
        case ExperimentStatus::mismatch: return 3;
        default: return 2;
        }
    }

    [[nodiscard]] bool audits_agree() const
    {
        return std::all_of(audits.begin(), audits.end(), [](const TietzeAudit & a) { return a.agrees(); });
    }

    /// Deterministic part first; all wall times sit under "timing".
    [[nodiscard]] Json to_json() const
    {
        Json j;
        j["format"] = "fptower-repro-report";
        j["version"] = 1;
        j["overall"] = status_name(overall());
        j["exit_code"] = exit_code();
        Json ex = Json::array();
        for (auto & e : experiments)
            ex.push_back({{"id", e.id}, {"claim", e.claim}, {"expected", e.expected}, {"computed", e.computed},
                {"status", status_name(e.status)}, {"required", e.required}, {"detail", e.detail}});
        j["experiments"] = ex;
        Json au = Json::array();
        for (auto & a : audits)
            au.push_back({{"presentation", a.label}, {"before", a.before.to_string()}, {"after", a.after.to_string()}, {"agrees", a.agrees()}});
        j["tietze_audit"] = au;
        Json timing = Json::object();
        for (auto & e : experiments)
            timing[e.id] = e.seconds;
        j["timing"] = {{"experiments", timing}, {"cache_hits", cache_hits}};
        return j;
    }

    [[nodiscard]] std::string to_markdown(bool with_timing = true) const
    {
        std::ostringstream os;
        os << "# fptower reproduction report\n\n";
        os << "Overall: **" << status_name(overall()) << "** (exit code " << exit_code() << ")\n\n";
        os << "| experiment | required | status | expected | computed |\n";
        os << "|---|---|---|---|---|\n";
        auto cell = [](std::string s) {
            for (auto & c : s)
                if (c == '|' || c == '\n')
                    c = c == '|' ? '/' : ' ';
            return s;
        };
        for (auto & e : experiments)
            os << "| " << e.id << " | " << (e.required ? "yes" : "no") << " | " << status_name(e.status) << " | " << cell(e.expected)
               << " | " << cell(e.computed) << " |\n";
        os << "\n## Claims\n\n";
        for (auto & e : experiments)
            os << "- `" << e.id << "`: " << e.claim << "\n";
        std::size_t bad = 0;
        for (auto & a : audits)
            bad += ! a.agrees();
        os << "\n## Tietze audit\n\n" << audits.size() << " simplifications, " << bad << " changed the abelian invariants.\n";
        if (with_timing) {
            os << "\n## Timing\n\n| experiment | seconds |\n|---|---|\n";
            for (auto & e : experiments)
                os << "| " << e.id << " | " << std::fixed << std::setprecision(2) << e.seconds << " |\n";
        }
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// pipeline

namespace detail {
    inline std::string multiset(const std::vector<RecordPtr> & recs)
    {
        std::vector<AbelianInvariants> inv;
        for (auto & r : recs)
            inv.push_back(r->invariants);
        std::sort(inv.begin(), inv.end(), [](const AbelianInvariants & a, const AbelianInvariants & b) { return listing_before(a, b); });
        std::string s;
        for (auto & i : inv)
            s += (s.empty() ? "" : " ") + i.to_string();
        return s;
    }

    inline std::string sorted_multiset(std::vector<std::string> parts)
    {
        std::vector<AbelianInvariants> inv;
        for (auto & p : parts)
            inv.push_back(AbelianInvariants::from_string(p));
        std::sort(inv.begin(), inv.end(), [](const AbelianInvariants & a, const AbelianInvariants & b) { return listing_before(a, b); });
        std::string s;
        for (auto & i : inv)
            s += (s.empty() ? "" : " ") + i.to_string();
        return s;
    }

    inline RecordPtr kernel_with(const std::vector<RecordPtr> & kernels, const std::string & inv)
    {
        for (auto & k : kernels)
            if (k->invariants.to_string() == inv)
                return k;
        return nullptr;
    }

    inline std::string isometry_list(const std::vector<AffineIsometry> & v)
    {
        std::string s;
        for (auto & g : v)
            s += (s.empty() ? "" : " ") + g.to_string();
        return s;
    }

    inline Json record_json(const SubgroupRecord & r)
    {
        return {{"label", r.label}, {"index_in_root", r.index_in_root}, {"generators", r.presentation.generator_count()},
            {"relators", r.presentation.relators().size()}, {"relator_length", r.presentation.total_length()},
            {"invariants", r.invariants.to_string()}};
    }

    class Stage {
    public:
        Stage(ReproReport & report, const ReproConfig & config, std::string id, std::string claim, std::string expected, bool required = true) :
            report_(report), config_(config), t0_(std::chrono::steady_clock::now())
        {
            e_.id = std::move(id);
            e_.claim = std::move(claim);
            e_.expected = std::move(expected);
            e_.required = required;
            if (config_.log)
                config_.log("[" + e_.id + "] ...");
        }
        Stage(const Stage &) = delete;
        Stage & operator=(const Stage &) = delete;
        ~Stage() { finish(); }

        Experiment & operator*() { return e_; }
        Experiment * operator->() { return &e_; }

        void set(std::string computed, bool ok)
        {
            e_.computed = std::move(computed);
            e_.status = ok ? ExperimentStatus::match : ExperimentStatus::mismatch;
        }
        void add_seconds(double t) { extra_ += t; }
        void inconclusive(std::string computed)
        {
            e_.computed = std::move(computed);
            e_.status = ExperimentStatus::inconclusive;
        }

        void finish()
        {
            if (done_)
                return;
            done_ = true;
            e_.seconds = seconds_since(t0_) + extra_;
            if (config_.log)
                config_.log("[" + e_.id + "] " + status_name(e_.status) + ": " + e_.computed);
            report_.experiments.push_back(std::move(e_));
        }

    private:
        ReproReport & report_;
        const ReproConfig & config_;
        Experiment e_;
        std::chrono::steady_clock::time_point t0_;
        double extra_ = 0;
        bool done_ = false;
    };
} // namespace detail

/// Runs the full reproduction. Stages whose inputs are missing are reported
/// as inconclusive rather than skipped silently.
inline ReproReport run_repro(const ReproConfig & config)
{
    config.validate();
    using detail::Stage;
    ReproReport report;
    AuditedSimplifier audited(config.cache_dir);
    if (! config.cache_dir.empty())
        fs::create_directories(config.cache_dir);
    RecordOptions simplify_opts{.simplify = true, .budget = config.tietze, .simplifier = audited.simplifier()};
    ChainOptions chain_opts;
    chain_opts.selected = simplify_opts;
    const EnumerationLimits big{.max_cosets = config.max_cosets};
    const EnumerationLimits qlim{.max_cosets = config.quotient_cosets};
    Order3Budget o3budget = config.order3;
    if (config.seed != 0)
        o3budget.seed = config.seed;

    auto gamma = load_presentation(config.data_dir / "gamma-bar.pres");
    auto T = load_presentation(config.data_dir / "triangle-333.pres");
    auto Tprime = load_presentation(config.data_dir / "triangle-prime.pres");
    const std::vector<Word> H = {parse_word("w^{u*w}", gamma), parse_word("w^(w^u)", gamma), parse_word("w^(u,w^-1)", gamma)};
    const std::vector<Word> witness{H[0]};
    auto root = make_root_record("Gamma", gamma);

    auto write_artifact = [&](const std::string & name, const std::string & text) {
        if (! config.out_dir.empty())
            write_text_file(config.out_dir / name, text);
    };

    // (1) index
    std::optional<CosetTable> g1_table;
    {
        Stage s(report, config, "index-288", "<w^{uw}, w^{w^u}, w^{(u,w^-1)}> has index 288 in Gamma-bar", "288");
        try {
            g1_table = todd_coxeter(gamma, H, big);
            s.set(std::to_string(g1_table->index()), g1_table->index() == 288);
            write_artifact("G1.table", g1_table->serialize(gamma.hash()));
        }
        catch (const LimitExceeded & e) {
            s.inconclusive(e.what());
        }
    }

    // (2) G1 and its abelianization
    RecordPtr G1;
    {
        Stage s(report, config, "abel-G1", "Abel(G1) = Z/3 x Z/3", "[3,3]");
        if (g1_table) {
            G1 = make_subgroup_record(root, "G1", *g1_table, simplify_opts);
            s->detail = detail::record_json(*G1);
            s.set(G1->invariants.to_string(), G1->invariants.to_string() == "[3,3]");
            write_artifact("G1.pres", G1->presentation.to_text());
            write_artifact("G1-relations.mtx", exponent_matrix(G1->presentation).to_market());
        }
        else
            s.inconclusive("no coset table for G1");
    }

    // a, b, c, d and h : G1 -> T are needed to pick the chain below G2
    std::optional<Order3Generators> abcd;
    std::vector<Word> abc;
    double abcd_seconds = 0;
    if (G1) {
        auto t0 = std::chrono::steady_clock::now();
        abcd = find_order3_generators(*G1, witness, o3budget);
        abcd_seconds = detail::seconds_since(t0);
        if (abcd)
            abc = {G1->expand_to_root(abcd->a), G1->expand_to_root(abcd->b), G1->expand_to_root(abcd->c)};
    }

    ChainResult chain;
    double chain_seconds = 0;
    if (G1) {
        auto t0 = std::chrono::steady_clock::now();
        ChainOptions opts = chain_opts;
        opts.progress = [&](const ChainLevel & lv) {
            if (config.log)
                config.log("  chain: " + lv.group->label + " (" + std::to_string(lv.group->presentation.generator_count()) + " generators) kernels "
                    + detail::multiset(lv.kernels));
        };
        chain = descend_chain(G1, config.required_depth, witness_selector(witness, abc), opts);
        chain_seconds = detail::seconds_since(t0);
    }
    auto level_group = [&](int i) -> RecordPtr { // G_i
        return i >= 1 && static_cast<std::size_t>(i) <= chain.levels.size() ? chain.levels[static_cast<std::size_t>(i - 1)].group : nullptr;
    };
    auto level_kernels = [&](int i) -> const std::vector<RecordPtr> * {
        return i >= 1 && static_cast<std::size_t>(i) <= chain.levels.size() ? &chain.levels[static_cast<std::size_t>(i - 1)].kernels : nullptr;
    };

    // (3) the index-3 normal subgroups of G1
    RecordPtr H1;
    {
        Stage s(report, config, "normal3-G1", "G1 has four index-3 normal subgroups, abelianizations [0,0] [3,21] [3,3] [3,3]",
            "[0,0] [3,21] [3,3] [3,3]");
        if (auto ks = level_kernels(1)) {
            H1 = detail::kernel_with(*ks, "[0,0]");
            Json list = Json::array();
            for (auto & k : *ks)
                list.push_back({{"label", k->label}, {"images", k->epi->images}, {"invariants", k->invariants.to_string()}});
            s->detail["kernels"] = list;
            if (H1)
                s->detail["H1"] = H1->label;
            s.set(detail::multiset(*ks), detail::multiset(*ks) == s->expected && H1);
        }
        else
            s.inconclusive("G1 unavailable");
    }

    // (4) G2 by membership of w^{uw}
    {
        Stage s(report, config, "select-G2", "exactly one index-3 normal subgroup of G1 contains w^{uw}; it is G2", "1 kernel, [3,3]");
        if (auto ks = level_kernels(1)) {
            std::vector<std::string> hits;
            for (auto & k : *ks)
                if (k->contains_root_word(H[0]))
                    hits.push_back(k->label + " " + k->invariants.to_string());
            s->detail["containing"] = hits;
            auto G2 = level_group(2);
            s.set(std::to_string(hits.size()) + " kernel" + (hits.size() == 1 ? "" : "s") + (G2 ? ", " + G2->invariants.to_string() : ""),
                hits.size() == 1 && G2 && G2->invariants.to_string() == "[3,3]");
        }
        else
            s.inconclusive("G1 unavailable");
    }

    // (5) the pattern under G2, containment in H1, conjugacy
    const std::string eq1 = "[7,0,0] [3,3] [3,3] [3,3]";
    {
        Stage s(report, config, "pattern-G2", "the index-3 normal subgroups of G2 have abelianizations [7,0,0] [3,3] [3,3] [3,3]", eq1);
        if (auto ks = level_kernels(2))
            s.set(detail::multiset(*ks), detail::multiset(*ks) == eq1);
        else
            s.inconclusive("G2 unavailable");
    }
    {
        Stage s(report, config, "containment-H1", "the [7,0,0] subgroup of G2 lies in H1 with index 3", "contained, index 3");
        auto ks = level_kernels(2);
        RecordPtr k7 = ks ? detail::kernel_with(*ks, "[7,0,0]") : nullptr;
        if (k7 && H1) {
            auto gens = k7->generators_in_root();
            bool inside = std::all_of(gens.begin(), gens.end(), [&](const Word & g) { return H1->contains_root_word(g); });
            auto index = k7->index_in_root / H1->index_in_root;
            s.set(std::string(inside ? "contained" : "not contained") + ", index " + std::to_string(index), inside && index == 3);
        }
        else
            s.inconclusive("[7,0,0] subgroup or H1 unavailable");
    }
    {
        Stage s(report, config, "conjugacy-G2", "the three [3,3] subgroups of G2 are conjugate", "2 witnesses", false);
        if (auto ks = level_kernels(2); ks && G1) {
            std::vector<RecordPtr> s33;
            for (auto & k : *ks)
                if (k->invariants.to_string() == "[3,3]")
                    s33.push_back(k);
            auto ws = conjugacy_witness_search(s33, {level_group(2), G1, root}, config.conjugacy_length);
            std::size_t found = 0;
            Json list = Json::array();
            for (auto & w : ws) {
                found += w.status == ConjugacyWitness::Status::found;
                Json item{{"first", w.first}, {"second", w.second}, {"status", ConjugacyWitness::status_name(w.status)}};
                if (w.status == ConjugacyWitness::Status::found) {
                    const RecordPtr amb = w.ambient == "Gamma" ? root : w.ambient == "G1" ? G1 : level_group(2);
                    item["ambient"] = w.ambient;
                    item["conjugator"] = amb->presentation.format_word(w.conjugator);
                }
                else
                    item["note"] = w.note;
                list.push_back(item);
            }
            s->detail["witnesses"] = list;
            if (found == ws.size() && ws.size() == 2)
                s.set(std::to_string(found) + " witnesses", true);
            else if (std::any_of(ws.begin(), ws.end(), [](auto & w) { return w.status == ConjugacyWitness::Status::impossible; }))
                s.set(std::to_string(found) + " witnesses", false);
            else
                s.inconclusive(std::to_string(found) + " of " + std::to_string(ws.size()) + " witnesses within length "
                    + std::to_string(config.conjugacy_length));
        }
        else
            s.inconclusive("G2 unavailable");
    }

    // (6) the chain to the required depth
    {
        const int last = config.required_depth + 1;
        Stage s(report, config, "chain", "G2 ... G" + std::to_string(last) + " each have index-3 normal subgroups [7,0,0] [3,3] [3,3] [3,3]",
            "pattern at G2..G" + std::to_string(last));
        s.add_seconds(chain_seconds);
        std::string computed;
        bool ok = true, complete = true;
        for (int i = 2; i <= last; ++i) {
            auto ks = level_kernels(i);
            if (! ks) {
                complete = false;
                break;
            }
            bool hit = detail::multiset(*ks) == eq1;
            ok = ok && hit;
            computed += (computed.empty() ? "" : "; ") + level_group(i)->label + (hit ? " ok" : " " + detail::multiset(*ks));
        }
        if (! complete)
            s.inconclusive(computed + (computed.empty() ? "" : "; ") + "chain stopped: " + chain.diagnostic);
        else
            s.set(computed, ok);
    }

    // (7) H_{i+1} = [G_i, G_i]
    {
        Stage s(report, config, "derived", "the [7,0,0] subgroup of G_{i+1} is [G_i, G_i] for i = 1.." + std::to_string(config.required_depth)
                + ", and Abel(G" + std::to_string(config.required_depth + 1) + ") = (Z/3)^2",
            "holds for i = 1.." + std::to_string(config.required_depth));
        std::string computed;
        bool ok = true, complete = true;
        Json list = Json::array();
        for (int i = 1; i <= config.required_depth; ++i) {
            auto Gi = level_group(i);
            auto ks = level_kernels(i + 1);
            RecordPtr k7 = ks ? detail::kernel_with(*ks, "[7,0,0]") : nullptr;
            if (! Gi || ! k7) {
                complete = false;
                break;
            }
            auto c = derived_subgroup_check(*Gi, *k7, qlim);
            ok = ok && c.holds;
            list.push_back({{"group", Gi->label}, {"subgroup", k7->label}, {"holds", c.holds},
                {"abelianization_order", c.abelianization.quotient_order ? Json(*c.abelianization.quotient_order) : Json(nullptr)},
                {"index", c.index}, {"normal", c.normal}, {"abelian_quotient", c.abelian_quotient}});
            computed += (computed.empty() ? "" : "; ") + Gi->label + (c.holds ? " holds" : " fails: " + c.diagnostic);
        }
        // the deepest group has no H below it in the chain; check its abelianization alone
        if (auto Gl = level_group(config.required_depth + 1); complete && Gl) {
            auto c = commutator_check(Gl->presentation, qlim);
            ok = ok && c.holds;
            list.push_back({{"group", Gl->label}, {"holds", c.holds},
                {"abelianization_order", c.quotient_order ? Json(*c.quotient_order) : Json(nullptr)}});
            computed += "; " + Gl->label + (c.holds ? " abelianization (Z/3)^2" : " fails: " + c.diagnostic);
        }
        s->detail["levels"] = list;
        if (! complete)
            s.inconclusive(computed + (computed.empty() ? "" : "; ") + "chain incomplete");
        else
            s.set(computed, ok);
    }

    // (8) a, b, c, d and the epimorphism onto T
    {
        Stage s(report, config, "epi-T", "G1 maps onto T with h(a) = h(b) = h(c) = x and h(d) = y, order-3 rotations generating T",
            "certified epimorphism");
        s.add_seconds(abcd_seconds);
        if (abcd) {
            const auto & P = G1->presentation;
            bool relators = satisfies_relators(P, abcd->epimorphism);
            bool onto = surjectivity_check(abcd->epimorphism);
            std::vector<AffineIsometry> xy{abcd->x, abcd->y};
            bool onto_xy = surjectivity_check(xy);
            bool images = evaluate(abcd->a, abcd->epimorphism) == abcd->x && evaluate(abcd->b, abcd->epimorphism) == abcd->x
                && evaluate(abcd->c, abcd->epimorphism) == abcd->x && evaluate(abcd->d, abcd->epimorphism) == abcd->y;
            bool rotations = abcd->x.k != 0 && abcd->y.k != 0 && abcd->x.order() == 3 && abcd->y.order() == 3;
            bool generate = false;
            try {
                generate = todd_coxeter(P, {abcd->a, abcd->b, abcd->c, abcd->d}, qlim).index() == 1;
            }
            catch (const LimitExceeded &) {
            }
            s->detail = {{"a", P.format_word(abcd->a)}, {"b", P.format_word(abcd->b)}, {"c", P.format_word(abcd->c)}, {"d", P.format_word(abcd->d)},
                {"x", abcd->x.to_string()}, {"y", abcd->y.to_string()}, {"h", detail::isometry_list(abcd->epimorphism)},
                {"relators_hold", relators}, {"surjective", onto}, {"x_y_generate_T", onto_xy}, {"abcd_generate_G1", generate}};
            bool ok = relators && onto && onto_xy && images && rotations && generate;
            s.set("h(a)=h(b)=h(c)=" + abcd->x.to_string() + ", h(d)=" + abcd->y.to_string() + (ok ? ", certified" : ", certificate failed"), ok);
        }
        else
            s.inconclusive(G1 ? "no a, b, c, d within the search budget" : "G1 unavailable");
    }

    // (9) Q = G1 / <<ab^-1, bc^-1>>
    {
        Stage s(report, config, "Q-fingerprint", "Q = G1/<<ab^-1, bc^-1>> has Abel [3,3] and agrees with T' on every probe (evidence, not proof)",
            "[3,3], no disagreements");
        if (abcd) {
            auto Q = normal_closure_quotient(*G1, {abcd->a * abcd->b.inverse(), abcd->b * abcd->c.inverse()});
            auto Qs = audited.simplify(Q, config.tietze).presentation;
            auto battery = standard_probe_battery();
            if (config.probes == "small")
                std::erase_if(battery, [](const PermutationGroup & g) { return FiniteGroup(g).order() > 24; });
            auto probes = build_probes(battery);
            auto fq = fingerprint(Qs, probes);
            auto ft = fingerprint(Tprime, probes);
            auto diffs = fq.disagreements(ft);
            auto inv = abelian_invariants(Q).to_string();
            s->detail = {{"presentation", Qs.to_brackets()}, {"probes", probes.size()}, {"disagreements", diffs}};
            s.set(inv + ", " + std::to_string(diffs.size()) + " disagreements over " + std::to_string(probes.size()) + " probes",
                inv == "[3,3]" && diffs.empty());
        }
        else
            s.inconclusive("a, b, c, d unavailable");
    }

    // (10) generation by elements of order 3
    {
        Stage s(report, config, "order3-generators", "G1 is generated by the order-3 elements a, b, c, d", "index of <a,b,c,d> is 1");
        if (abcd) {
            try {
                auto idx = todd_coxeter(G1->presentation, {abcd->a, abcd->b, abcd->c, abcd->d}, qlim).index();
                s.set("index " + std::to_string(idx), idx == 1);
            }
            catch (const LimitExceeded & e) {
                s.inconclusive(e.what());
            }
        }
        else
            s.inconclusive("a, b, c, d unavailable");
    }
    Json order3_levels = Json::array();
    for (int i = 1; i <= config.required_depth; ++i) {
        auto Gi = level_group(i), Gn = level_group(i + 1);
        std::string lab = "G" + std::to_string(i);
        Stage s(report, config, "normal-closure-" + lab, "G" + std::to_string(i + 1) + " = <<a,b,c>> in " + lab + ", i.e. " + lab + "/<<a,b,c>> has order 3",
            "order 3");
        if (Gi && Gn && ! abc.empty()) {
            auto c = order3_generation_check(*Gn, *Gi, abc, qlim, config.tietze, audited.simplifier());
            s->detail = {{"members", c.members}, {"method", c.method}, {"diagnostic", c.diagnostic}};
            order3_levels.push_back({{"group", Gi->label}, {"next", Gn->label}, {"holds", c.holds}, {"method", c.method},
                {"quotient_order", c.quotient_order ? Json(*c.quotient_order) : Json(nullptr)}});
            if (c.quotient_order)
                s.set("order " + std::to_string(*c.quotient_order) + " (" + c.method + ")" + (c.members ? "" : ", a,b,c not in " + Gn->label), c.holds);
            else
                s.inconclusive("quotient did not close within " + std::to_string(config.quotient_cosets) + " cosets");
        }
        else
            s.inconclusive("chain or a, b, c unavailable");
    }

    // (11) the triangle group's own pattern
    RecordPtr troot = make_root_record("T", T);
    {
        Stage s(report, config, "pattern-T", "T has index-3 normal subgroups [0,0] [3,3] [3,3] [3,3]", "[0,0] [3,3] [3,3] [3,3]");
        auto ks = prime_index_normal_subgroups(troot, 3, simplify_opts);
        s.set(detail::multiset(ks), detail::multiset(ks) == s->expected);
        // an index-3 subgroup mapping onto T; the [0,0] one is abelian and cannot
        Json epis = Json::array();
        for (auto & k : ks) {
            auto h = find_epi_to_triangle(*k);
            epis.push_back({{"label", k->label}, {"invariants", k->invariants.to_string()}, {"epimorphism", h ? Json(detail::isometry_list(*h)) : Json(nullptr)}});
        }
        s->detail["epimorphisms_onto_T"] = epis;
    }

    // (12) the tower
    {
        Stage s(report, config, "tower", "closed forms match the triple-cover recurrences; K2 = 9 chi - 18 on X~_n (n > 1), K2 = 9 chi on S_n, c1^2 = 3 c2 - 72",
            "all identities for levels 1.." + std::to_string(config.tower_levels));
        auto c = verify_tower(config.tower_levels);
        s->detail["failures"] = c.failures;
        s.set(c.holds() ? "all identities hold" : std::to_string(c.failures.size()) + " failures", c.holds());
    }

    // stretch: keep descending under a time budget
    ChainResult stretch;
    if (config.stretch_depth > config.required_depth && level_group(config.required_depth + 1)) {
        Stage s(report, config, "chain-stretch", "the chain continues to G" + std::to_string(config.stretch_depth + 1),
            "G" + std::to_string(config.stretch_depth + 1) + " reached", false);
        ChainOptions opts = chain_opts;
        opts.time_limit_seconds = config.stretch_seconds;
        opts.progress = [&](const ChainLevel & lv) {
            if (config.log)
                config.log("  stretch: " + lv.group->label + " kernels " + detail::multiset(lv.kernels) + " (" + std::to_string(lv.seconds) + " s)");
        };
        const int extra = config.stretch_depth - config.required_depth;
        stretch = descend_chain(level_group(config.required_depth + 1), extra, witness_selector(abc, abc), opts);
        std::string computed;
        bool ok = true;
        for (std::size_t i = 1; i < stretch.levels.size(); ++i) {
            bool hit = detail::multiset(stretch.levels[i].kernels) == eq1;
            ok = ok && hit;
            computed += (computed.empty() ? "" : "; ") + stretch.levels[i].group->label + (hit ? " ok" : " " + detail::multiset(stretch.levels[i].kernels));
        }
        auto reached = stretch.levels.empty() ? level_group(config.required_depth + 1) : stretch.levels.back().group;
        if (! ok)
            s.set(computed, false);
        else if (static_cast<int>(stretch.levels.size()) == extra + 1)
            s.set(computed, true);
        else
            s.inconclusive("reached " + reached->label + (computed.empty() ? "" : " (" + computed + ")") + "; " + stretch.diagnostic);
    }

    // the next normal closure, past the required depth
    if (stretch.levels.size() >= 2 && ! abc.empty()) {
        auto Gi = stretch.levels[0].group, Gn = stretch.levels[1].group;
        Stage s(report, config, "normal-closure-" + Gi->label, Gn->label + " = <<a,b,c>> in " + Gi->label + " (beyond the required depth)", "order 3",
            false);
        auto c = order3_generation_check(*Gn, *Gi, abc, qlim, config.tietze, audited.simplifier());
        s->detail = {{"members", c.members}, {"method", c.method}, {"diagnostic", c.diagnostic}};
        if (c.quotient_order)
            s.set("order " + std::to_string(*c.quotient_order) + " (" + c.method + ")", c.holds);
        else
            s.inconclusive("quotient did not close within " + std::to_string(config.quotient_cosets) + " cosets");
    }

    // chain report
    {
        Json levels = Json::array();
        Json timing = Json::array();
        auto add = [&](const ChainLevel & lv, bool required) {
            Json l = detail::record_json(*lv.group);
            l["required"] = required;
            l["tietze_budget_exhausted"] = lv.group->budget_exhausted;
            Json ks = Json::array();
            for (std::size_t k = 0; k < lv.kernels.size(); ++k)
                ks.push_back({{"label", lv.kernels[k]->label}, {"images", lv.kernels[k]->epi->images},
                    {"invariants", lv.kernels[k]->invariants.to_string()}, {"selected", static_cast<int>(k) == lv.selected}});
            l["kernels"] = ks;
            l["pattern"] = detail::multiset(lv.kernels);
            levels.push_back(l);
            timing.push_back({{"label", lv.group->label}, {"seconds", lv.seconds}});
        };
        for (auto & lv : chain.levels)
            add(lv, true);
        for (std::size_t i = 1; i < stretch.levels.size(); ++i)
            add(stretch.levels[i], false);
        Json c;
        c["format"] = "fptower-chain-report";
        c["version"] = 1;
        c["root"] = {{"label", "Gamma"}, {"presentation", gamma.to_brackets()}};
        c["subgroup_generators"] = {gamma.format_word(H[0]), gamma.format_word(H[1]), gamma.format_word(H[2])};
        c["selector"] = {{"first", "contains " + gamma.format_word(H[0])}, {"deeper", abc.empty() ? "least [3,3] kernel" : "contains a, b, c"}};
        if (abcd)
            c["abcd"] = {{"a", gamma.format_word(abc[0])}, {"b", gamma.format_word(abc[1])}, {"c", gamma.format_word(abc[2])},
                {"d", gamma.format_word(G1->expand_to_root(abcd->d))}};
        c["required_depth"] = config.required_depth;
        c["stretch_depth"] = config.stretch_depth;
        c["levels"] = levels;
        c["order3_certificates"] = order3_levels;
        c["diagnostic"] = stretch.diagnostic.empty() ? chain.diagnostic : stretch.diagnostic;
        c["timing"] = timing;
        report.chain = c;
    }

    for (auto & lv : chain.levels)
        if (lv.group->label != "G1")
            write_artifact(lv.group->label + ".pres", lv.group->presentation.to_text());

    report.audits = audited.audits();
    report.cache_hits = audited.cache_hits();
    {
        Stage s(report, config, "tietze-audit", "every Tietze simplification of the run preserved the abelian invariants",
            "no changes");
        std::size_t bad = 0;
        for (auto & a : report.audits)
            bad += ! a.agrees();
        s.set(std::to_string(report.audits.size()) + " simplifications, " + std::to_string(bad) + " changed", bad == 0);
    }
    write_artifact("chain-report.json", report.chain.dump(2) + "\n");
    write_artifact("report.json", report.to_json().dump(2) + "\n");
    write_artifact("report.md", report.to_markdown());
    return report;
}

} // namespace fptower

#endif // FPTOWER_REPRO_HPP
