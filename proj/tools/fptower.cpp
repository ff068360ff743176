// fptower command-line front end.
#include <fptower/repro.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace fptower;

namespace {

struct Globals {
    std::size_t limit = 2'000'000;
    double budget = 60;
    std::string out;
    std::string format = "md";
};

// Standard labels resolve against the bundled data; anything else is a file.
class Session {
public:
    explicit Session(const Globals & g) : g_(g)
    {
        opts_.budget.time_limit_seconds = g.budget;
        opts_.simplifier = audited_.simplifier();
    }

    RecordPtr resolve(const std::string & what)
    {
        if (what == "Gamma")
            return root();
        if (what == "T")
            return make_root_record("T", load_presentation(default_data_dir() / "triangle-333.pres"));
        if (what == "T'")
            return make_root_record("T'", load_presentation(default_data_dir() / "triangle-prime.pres"));
        if (what == "Q")
            return q();
        if (what == "H1") {
            for (auto & k : kernels(1))
                if (k->invariants.to_string() == "[0,0]")
                    return k;
            throw std::runtime_error("no [0,0] subgroup of G1");
        }
        if (what.size() > 1 && what[0] == 'G' && std::isdigit(static_cast<unsigned char>(what[1]))) {
            auto dot = what.find(".k");
            int level = std::stoi(what.substr(1, dot == std::string::npos ? std::string::npos : dot - 1));
            if (dot == std::string::npos)
                return group(level);
            auto ks = kernels(level);
            std::size_t k = std::stoul(what.substr(dot + 2));
            if (k < 1 || k > ks.size())
                throw std::runtime_error("no kernel " + what);
            return ks[k - 1];
        }
        return make_root_record(fs::path(what).stem().string(), load_presentation(what));
    }

    RecordPtr root()
    {
        if (! root_)
            root_ = make_root_record("Gamma", load_presentation(default_data_dir() / "gamma-bar.pres"));
        return root_;
    }

    std::vector<Word> witnesses()
    {
        auto & p = root()->presentation;
        return {parse_word("w^{u*w}", p), parse_word("w^(w^u)", p), parse_word("w^(u,w^-1)", p)};
    }

    RecordPtr g1()
    {
        if (! g1_)
            g1_ = make_subgroup_record(root(), "G1", todd_coxeter(root()->presentation, witnesses(), {.max_cosets = g_.limit}), opts_);
        return g1_;
    }

    const std::optional<Order3Generators> & abcd()
    {
        if (! searched_) {
            abcd_ = find_order3_generators(*g1(), {witnesses()[0]});
            searched_ = true;
        }
        return abcd_;
    }

    std::vector<Word> abc()
    {
        auto & o = abcd();
        if (! o)
            return {};
        return {g1()->expand_to_root(o->a), g1()->expand_to_root(o->b), g1()->expand_to_root(o->c)};
    }

    // G1 / <<ab^-1, bc^-1>>
    RecordPtr q()
    {
        auto & o = abcd();
        if (! o)
            throw std::runtime_error("no a, b, c, d in G1 within the search budget");
        auto pres = normal_closure_quotient(*g1(), {o->a * o->b.inverse(), o->b * o->c.inverse()});
        return make_root_record("Q", audited_.simplify(pres, opts_.budget).presentation);
    }

    ChainResult chain(int depth, const std::function<void(const ChainLevel &)> & progress = {}, double seconds = 0)
    {
        ChainOptions opts;
        opts.selected = opts_;
        opts.progress = progress;
        opts.time_limit_seconds = seconds;
        return descend_chain(g1(), depth, witness_selector({witnesses()[0]}, abc()), opts);
    }

    RecordPtr group(int level)
    {
        if (level < 1)
            throw std::runtime_error("chain levels start at G1");
        ensure(level);
        return chain_.levels[static_cast<std::size_t>(level - 1)].group;
    }

    std::vector<RecordPtr> kernels(int level)
    {
        ensure(level);
        return chain_.levels[static_cast<std::size_t>(level - 1)].kernels;
    }

private:
    void ensure(int level)
    {
        if (static_cast<int>(chain_.levels.size()) >= level)
            return;
        chain_ = chain(level - 1);
        if (static_cast<int>(chain_.levels.size()) < level)
            throw std::runtime_error("chain stopped before G" + std::to_string(level) + ": " + chain_.diagnostic);
    }

    const Globals & g_;
    AuditedSimplifier audited_{default_cache_dir()};
    RecordOptions opts_;
    RecordPtr root_, g1_;
    std::optional<Order3Generators> abcd_;
    bool searched_ = false;
    ChainResult chain_;
};

void emit(const Globals & g, const std::string & text)
{
    if (g.out.empty())
        std::cout << text;
    else
        write_text_file(g.out, text);
}

std::string tower_table(int levels, const std::string & format)
{
    std::ostringstream os;
    auto ratio = [](const Rational & r) { return r.get_str(); };
    if (format == "json") {
        Json rows = Json::array();
        for (int n = 1; n <= levels; ++n) {
            auto r = tower_row(n);
            auto s = bmy_diagnostics(r.s);
            rows.push_back({{"level", n}, {"K2_X", r.x_tilde.K2.get_str()}, {"chi_X", r.x_tilde.chi.get_str()}, {"K2_S", r.s.K2.get_str()},
                {"chi_S", r.s.chi.get_str()}, {"residual_X", r.residual.get_str()}, {"residual_S", s.residual_line.get_str()},
                {"ratio", ratio(r.ratio)}});
        }
        os << rows.dump(2) << '\n';
    }
    else if (format == "csv") {
        os << "level,K2_X,chi_X,K2_S,chi_S,residual_X,residual_S,ratio\n";
        for (int n = 1; n <= levels; ++n) {
            auto r = tower_row(n);
            os << n << ',' << r.x_tilde.K2 << ',' << r.x_tilde.chi << ',' << r.s.K2 << ',' << r.s.chi << ',' << r.residual << ','
               << bmy_diagnostics(r.s).residual_line << ',' << ratio(r.ratio) << '\n';
        }
    }
    else if (format == "md") {
        os << "| n | K2(X~) | chi(X~) | K2(S) | chi(S) | 9chi-18-K2 (X~) | K2-9chi (S) | K2/chi (X~) |\n";
        os << "|---|---|---|---|---|---|---|---|\n";
        for (int n = 1; n <= levels; ++n) {
            auto r = tower_row(n);
            os << "| " << n << " | " << r.x_tilde.K2 << " | " << r.x_tilde.chi << " | " << r.s.K2 << " | " << r.s.chi << " | " << r.residual
               << " | " << bmy_diagnostics(r.s).residual_line << " | " << ratio(r.ratio) << " |\n";
        }
    }
    else
        throw std::runtime_error("unknown format '" + format + "'");
    return os.str();
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"fptower: finitely presented groups, index-3 towers and surface invariants"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--limit", g.limit, "coset enumeration limit")->check(CLI::PositiveNumber);
    app.add_option("--budget", g.budget, "Tietze time budget per simplification, seconds")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output file (output directory for repro)");
    app.add_option("--format", g.format, "md, json, csv or text")->check(CLI::IsMember({"md", "json", "csv", "text"}));
    app.fallthrough();

    auto * enum_cmd = app.add_subcommand("enum", "coset enumeration; prints the index");
    std::string pres_file;
    std::vector<std::string> subgroup;
    std::string save, strategy = "hlt";
    enum_cmd->add_option("presentation", pres_file, "presentation file")->required();
    enum_cmd->add_option("--subgroup,-H", subgroup, "subgroup generator words");
    enum_cmd->add_option("--save", save, "write the coset table here");
    enum_cmd->add_option("--strategy", strategy, "hlt or felsch")->check(CLI::IsMember({"hlt", "felsch"}));

    auto * abel_cmd = app.add_subcommand("abel", "abelian invariants of a presentation file or chain label (G1, G3, H1, G2.k1, T, ...)");
    std::string target;
    std::string matrix_out;
    abel_cmd->add_option("target", target)->required();
    abel_cmd->add_option("--matrix", matrix_out, "dump the relation matrix (matrix market)");

    auto * normal_cmd = app.add_subcommand("normal3", "index-3 normal subgroups and their abelian invariants");
    normal_cmd->add_option("target", target)->required();

    auto * chain_cmd = app.add_subcommand("chain", "descend the index-3 chain below G1");
    int depth = 3;
    double chain_seconds = 0;
    chain_cmd->add_option("--depth", depth, "levels below G1")->check(CLI::PositiveNumber);
    chain_cmd->add_option("--seconds", chain_seconds, "stop descending after this many seconds (0 = no limit)");

    auto * fp_cmd = app.add_subcommand("fingerprint", "hom/epi counts into the probe battery");
    std::string against;
    fp_cmd->add_option("target", target)->required();
    fp_cmd->add_option("--against", against, "second target; report disagreements");

    auto * tower_cmd = app.add_subcommand("tower", "invariants of the surface tower");
    int levels = 10;
    tower_cmd->add_option("--levels", levels)->check(CLI::Range(1, 100000));

    auto * repro_cmd = app.add_subcommand("repro", "run every experiment and write a report");
    ReproConfig rc;
    repro_cmd->add_option("--required-depth", rc.required_depth);
    repro_cmd->add_option("--stretch-depth", rc.stretch_depth);
    repro_cmd->add_option("--stretch-seconds", rc.stretch_seconds);
    repro_cmd->add_option("--quotient-limit", rc.quotient_cosets, "coset limit for quotient certificates");
    repro_cmd->add_option("--probes", rc.probes)->check(CLI::IsMember({"standard", "small"}));
    repro_cmd->add_option("--seed", rc.seed, "nonzero shuffles the a,b,c,d search order");
    bool quiet = false;
    repro_cmd->add_flag("--quiet", quiet);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        Session session(g);
        if (*enum_cmd) {
            auto pres = load_presentation(pres_file);
            std::vector<Word> words;
            for (auto & s : subgroup)
                words.push_back(parse_word(s, pres));
            try {
                auto table = todd_coxeter(pres, words,
                    {.max_cosets = g.limit, .strategy = strategy == "felsch" ? Strategy::felsch : Strategy::hlt});
                if (! save.empty())
                    write_text_file(save, table.serialize(pres.hash()));
                emit(g, std::to_string(table.index()) + "\n");
                return 0;
            }
            catch (const LimitExceeded & e) {
                std::cerr << e.what() << "\n";
                return 2;
            }
        }
        if (*abel_cmd) {
            auto rec = session.resolve(target);
            if (! matrix_out.empty())
                write_text_file(matrix_out, exponent_matrix(rec->presentation).to_market());
            emit(g, rec->invariants.to_string() + "\n");
            return 0;
        }
        if (*normal_cmd) {
            auto rec = session.resolve(target);
            auto ks = prime_index_normal_subgroups(rec, 3, {.simplify = false});
            std::ostringstream os;
            if (g.format == "json") {
                Json list = Json::array();
                for (auto & k : ks)
                    list.push_back({{"label", k->label}, {"images", k->epi->images}, {"invariants", k->invariants.to_string()}});
                os << list.dump(2) << '\n';
            }
            else
                for (auto & k : ks)
                    os << k->label << "  " << k->epi->to_string() << "  " << k->invariants.to_string() << '\n';
            emit(g, os.str());
            return 0;
        }
        if (*chain_cmd) {
            auto res = session.chain(depth, [&](const ChainLevel & lv) {
                std::cerr << lv.group->label << ": " << lv.group->presentation.generator_count() << " generators, length "
                          << lv.group->presentation.total_length() << ", kernels " << detail::multiset(lv.kernels) << " (" << lv.seconds << " s)\n";
            }, chain_seconds);
            std::ostringstream os;
            if (g.format == "json") {
                Json levels = Json::array();
                for (auto & lv : res.levels) {
                    Json l = detail::record_json(*lv.group);
                    l["pattern"] = detail::multiset(lv.kernels);
                    l["seconds"] = lv.seconds;
                    levels.push_back(l);
                }
                os << Json{{"levels", levels}, {"diagnostic", res.diagnostic}}.dump(2) << '\n';
            }
            else {
                os << "| group | generators | length | index-3 kernels | seconds |\n|---|---|---|---|---|\n";
                for (auto & lv : res.levels)
                    os << "| " << lv.group->label << " | " << lv.group->presentation.generator_count() << " | " << lv.group->presentation.total_length()
                       << " | " << detail::multiset(lv.kernels) << " | " << lv.seconds << " |\n";
                if (! res.diagnostic.empty())
                    os << "\n" << res.diagnostic << "\n";
            }
            emit(g, os.str());
            return res.budget_exhausted ? 2 : 0;
        }
        if (*fp_cmd) {
            auto probes = build_probes(standard_probe_battery());
            auto a = session.resolve(target);
            auto fa = fingerprint(a->presentation, probes);
            std::ostringstream os;
            if (! against.empty()) {
                auto fb = fingerprint(session.resolve(against)->presentation, probes);
                auto diffs = fa.disagreements(fb);
                os << diffs.size() << " disagreements over " << probes.size() << " probes";
                for (auto & d : diffs)
                    os << (&d == &diffs.front() ? ": " : ", ") << d;
                os << '\n';
                emit(g, os.str());
                return diffs.empty() ? 0 : 3;
            }
            if (g.format == "json") {
                Json list = Json::array();
                for (auto & e : fa.entries)
                    list.push_back({{"probe", e.probe}, {"order", e.order}, {"homomorphisms", e.counts.homomorphisms}, {"epimorphisms", e.counts.epimorphisms}});
                os << list.dump(2) << '\n';
            }
            else
                os << fa.to_string();
            emit(g, os.str());
            return 0;
        }
        if (*tower_cmd) {
            emit(g, tower_table(levels, g.format == "text" ? "md" : g.format));
            return 0;
        }
        if (*repro_cmd) {
            rc.max_cosets = g.limit;
            rc.tietze.time_limit_seconds = g.budget;
            rc.out_dir = g.out.empty() ? fs::path("repro-out") : fs::path(g.out);
            if (! quiet)
                rc.log = [](const std::string & s) { std::cerr << s << std::endl; };
            auto report = run_repro(rc);
            std::cout << (g.format == "json" ? report.to_json().dump(2) + "\n" : report.to_markdown());
            return report.exit_code();
        }
    }
    catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
