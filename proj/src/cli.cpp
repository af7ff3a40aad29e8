#include "pom/cli.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "pom/harness.hpp"

namespace pom {

namespace {

std::string read_input(const std::string& path, std::istream& in) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
    } else {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open input file: " + path);
        buf << f.rdbuf();
    }
    return buf.str();
}

// Positive syntax is recognized by its bracketed entries; a lone head
// variable parses the same either way.
bool looks_positive(const std::string& text) {
    return text.find('[') != std::string::npos &&
           (text.find("<-") != std::string::npos ||
            text.find("\xe2\x86\x90") != std::string::npos);
}

const PositiveTerm* parse_input(const std::string& text, bool force_positive,
                                bool force_lambda, TermArena& arena,
                                NameSupply& supply) {
    bool positive = force_positive || (!force_lambda && looks_positive(text));
    if (positive) return parse_positive(text, arena, supply);
    return crumble(arena, parse_lambda(text, arena, supply), supply);
}

nlohmann::json metrics_json(const std::string& machine, const RunReport& r,
                            const std::string* readback) {
    std::size_t rename = 0, copy = 0;
    for (const StepInfo& s : r.cost_samples) {
        if (s.label == Label::m || s.label == Label::sea3) rename += s.cost;
        if (s.label == Label::e) copy += s.cost;
    }
    std::size_t search = r.counts.sea1 + r.counts.sea2;
    nlohmann::json j = {
        {"machine", machine},
        {"term_size", r.initial_size},
        {"counts",
         {{"m", r.counts.m},
          {"e", r.counts.e},
          {"sea1", r.counts.sea1},
          {"sea2", r.counts.sea2},
          {"sea3", r.counts.sea3}}},
        {"cost",
         {{"rename", rename},
          {"copy", copy},
          {"search", search},
          {"total", rename + copy + search}}},
        {"status",
         r.status == RunStatus::Normal ? "normal" : "budget_exhausted"}};
    if (readback) j["readback"] = *readback;
    return j;
}

// One machine run that optionally prints a trace line per state. Labels and
// counts agree with natural_run/sliced_run by determinism.
template <typename State, typename PeekFn, typename StepFn>
RunReport drive(State s, PeekFn peek, StepFn step, std::size_t budget, bool trace,
                std::ostream& out, const NameSupply& supply, std::size_t initial_size) {
    RunReport r;
    r.initial_size = initial_size;
    if (trace) out << trace_line(s, "init", supply) << "\n";
    std::size_t principal = 0;
    while (auto next = peek(s)) {
        if (is_principal(*next) && principal == budget) {
            r.status = RunStatus::BudgetExhausted;
            break;
        }
        auto info = step(s);
        if (is_principal(info->label)) ++principal;
        r.counts.of(info->label) += 1;
        r.cost_samples.push_back(*info);
        if (trace) out << trace_line(s, label_name(info->label), supply) << "\n";
    }
    if constexpr (std::is_same_v<State, NaturalState>) {
        r.final_natural = std::move(s);
    } else {
        r.final_sliced = std::move(s);
    }
    return r;
}

int do_crumble(const std::string& path, std::istream& in, std::ostream& out) {
    TermArena arena;
    NameSupply supply;
    const LambdaTerm* l = parse_lambda(read_input(path, in), arena, supply);
    out << to_string(crumble(arena, l, supply), supply) << "\n";
    return 0;
}

int do_eval(const std::string& path, std::size_t max_steps, bool force_positive,
            bool force_lambda, std::istream& in, std::ostream& out) {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t =
        parse_input(read_input(path, in), force_positive, force_lambda, arena, supply);
    RightEvalResult ev = right_eval(arena, t, supply, max_steps);
    for (const auto& [label, reduct] : ev.steps) {
        out << label_name(label) << " | " << to_string(reduct, supply) << "\n";
    }
    out << to_string(ev.term, supply) << "\n";
    if (ev.normal) {
        out << "normal in " << ev.steps.size() << " steps\n";
    } else {
        out << "budget exhausted after " << ev.steps.size() << " steps\n";
    }
    return 0;
}

int do_run(const std::string& path, const std::string& machine, std::size_t max_steps,
           bool trace, const std::string& metrics, bool check_invariants,
           bool force_positive, bool force_lambda, std::istream& in, std::ostream& out,
           std::ostream& err) {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t =
        parse_input(read_input(path, in), force_positive, force_lambda, arena, supply);

    RunReport report;
    std::vector<std::string> violations;
    bool need_trace_drive = trace || !check_invariants;
    if (machine == "natural") {
        if (need_trace_drive) {
            report = drive(
                natural_init(arena, t, supply),
                [](const NaturalState& s) { return natural_peek(s); },
                [&](NaturalState& s) { return natural_step(arena, s, supply); },
                max_steps, trace, out, supply, t->size);
        }
        if (check_invariants) {
            CheckedRun c = checked_natural_run(arena, t, supply, max_steps);
            report = std::move(c.report);
            violations = std::move(c.violations);
        }
    } else {
        if (need_trace_drive) {
            report = drive(
                sliced_init(arena, t, supply),
                [](const SlicedState& s) { return sliced_peek(s); },
                [&](SlicedState& s) { return sliced_step(arena, s, supply); },
                max_steps, trace, out, supply, t->size);
        }
        if (check_invariants) {
            CheckedRun c = checked_sliced_run(arena, t, supply, max_steps);
            report = std::move(c.report);
            violations = std::move(c.violations);
        }
    }

    std::string readback =
        machine == "natural"
            ? to_string(natural_read_back(arena, *report.final_natural), supply)
            : to_string(read_back(arena, *report.final_sliced, &supply), supply);

    if (metrics == "json") {
        out << metrics_json(machine, report, &readback).dump(2) << "\n";
    } else if (!trace) {
        const LabelCounts& c = report.counts;
        out << "machine: " << machine << "\n";
        out << "status: "
            << (report.status == RunStatus::Normal ? "normal" : "budget exhausted")
            << " (m=" << c.m << " e=" << c.e << " sea1=" << c.sea1 << " sea2=" << c.sea2
            << " sea3=" << c.sea3 << ")\n";
        out << "read-back: " << readback << "\n";
    }
    if (!violations.empty()) {
        for (const std::string& v : violations) err << "invariant violation: " << v << "\n";
        return 1;
    }
    return 0;
}

int do_check(std::uint64_t seed, std::size_t corpus, std::ostream& out, std::ostream& err) {
    bool all_ok = true;
    auto verdict = [&](const std::string& suite, bool ok, std::size_t items,
                       const std::string& detail) {
        out << suite << ": " << (ok ? "ok" : "FAIL") << " (" << items << " checks)\n";
        if (!ok) {
            err << suite << ": " << detail << "\n";
            all_ok = false;
        }
    };
    auto item_seed = [&](std::size_t i) { return seed * 1000003ull + i; };

    {  // machine-vs-strategy bisimulation, both machines
        bool ok = true;
        std::string detail;
        std::size_t runs = 0;
        for (std::size_t i = 0; i < corpus && ok; ++i) {
            TermArena arena;
            NameSupply supply;
            const LambdaTerm* l =
                gen_random_lambda(arena, supply, item_seed(i), 4 + i % 37);
            const PositiveTerm* t = crumble(arena, l, supply);
            for (MachineKind kind : {MachineKind::Sliced, MachineKind::Natural}) {
                BisimReport r = bisimulate(arena, t, supply, 500, kind);
                ++runs;
                if (!r.pass()) {
                    ok = false;
                    detail = "seed " + std::to_string(item_seed(i)) + ": " +
                             (r.mismatches.empty() ? "count mismatch"
                                                   : r.mismatches.front().detail);
                    break;
                }
            }
        }
        verdict("bisimulation", ok, runs, detail);
    }
    {  // one-step diamond; alternate in redex-rich terms so pairs exist
        bool ok = true;
        std::string detail;
        std::size_t checked = 0;
        for (std::size_t i = 0; i < corpus && ok; ++i) {
            TermArena arena;
            NameSupply supply;
            const LambdaTerm* l =
                i % 2 == 0 ? gen_random_lambda(arena, supply, item_seed(i), 4 + i % 21)
                           : gen_redex_rich_lambda(arena, supply, item_seed(i));
            DiamondResult d = diamond_check(arena, crumble(arena, l, supply), supply);
            checked += d.pairs_checked;
            if (!d.pass) {
                ok = false;
                detail = "seed " + std::to_string(item_seed(i)) + ": " + d.counterexample;
            }
        }
        if (ok && checked < corpus) {
            ok = false;
            detail = "corpus joined only " + std::to_string(checked) +
                     " peak pairs; not representative";
        }
        verdict("diamond", ok, checked, detail);
    }
    {  // strategy determinism / no premature stops
        bool ok = true;
        std::string detail;
        std::size_t checked = 0;
        for (std::size_t i = 0; i < corpus && ok; ++i) {
            TermArena arena;
            NameSupply supply;
            const LambdaTerm* l =
                gen_random_lambda(arena, supply, item_seed(i), 4 + i % 21);
            StrategyResult s = strategy_checks(arena, crumble(arena, l, supply), supply);
            checked += s.terms_checked;
            if (!s.pass) {
                ok = false;
                detail = "seed " + std::to_string(item_seed(i)) + ": " + s.detail;
            }
        }
        verdict("strategy", ok, checked, detail);
    }
    {  // right-context predicate agreement
        AgreementResult a = right_ctx_agreement(3, 3);
        verdict("right-context agreement", a.pass,
                static_cast<std::size_t>(a.contexts_checked),
                a.pass ? "" : "disagree on " + a.counterexample);
    }
    {  // per-run invariants plus transition/cost bounds
        bool ok = true;
        std::string detail;
        std::size_t runs = 0;
        for (std::size_t i = 0; i < corpus && ok; ++i) {
            TermArena arena;
            NameSupply supply;
            const LambdaTerm* l =
                gen_random_lambda(arena, supply, item_seed(i), 4 + i % 37);
            const PositiveTerm* t = crumble(arena, l, supply);
            CheckedRun cs = checked_sliced_run(arena, t, supply, 500);
            CheckedRun cn = checked_natural_run(arena, t, supply, 500);
            BoundsResult b = check_bounds(cs.report);
            runs += 2;
            if (!cs.violations.empty() || !cn.violations.empty() || !b.pass) {
                ok = false;
                detail = "seed " + std::to_string(item_seed(i)) + ": " +
                         (!cs.violations.empty()  ? cs.violations.front()
                          : !cn.violations.empty() ? cn.violations.front()
                                                   : b.violations.front());
            }
        }
        verdict("invariants and bounds", ok, runs, detail);
    }
    return all_ok ? 0 : 1;
}

int do_bench(const std::string& family, const std::vector<std::size_t>& budgets,
             const std::string& metrics, std::ostream& out) {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t = family == "tau3"
                                ? gen_tau3_loop(arena, supply)
                                : crumble(arena, gen_church_app(arena, supply, 3, 3), supply);

    std::vector<RunReport> nat, sl;
    for (std::size_t k : budgets) {
        nat.push_back(natural_run(arena, t, supply, k));
        sl.push_back(sliced_run(arena, t, supply, k));
    }

    if (metrics == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < budgets.size(); ++i) {
            arr.push_back(metrics_json("natural", nat[i], nullptr));
            arr.push_back(metrics_json("sliced", sl[i], nullptr));
        }
        out << arr.dump(2) << "\n";
        return 0;
    }

    out << "family " << family << ", term size " << t->size << "\n";
    out << std::left << std::setw(8) << "budget" << std::setw(10) << "natural"
        << std::setw(10) << "sliced" << std::setw(11) << "nat-ratio"
        << "sl-ratio" << "\n";
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        std::size_t nc = nat[i].principal_cost();
        std::size_t sc = sl[i].principal_cost();
        out << std::left << std::setw(8) << budgets[i] << std::setw(10) << nc
            << std::setw(10) << sc;
        if (i == 0) {
            out << std::setw(11) << "-" << "-" << "\n";
        } else {
            auto ratio = [](std::size_t now, std::size_t before) {
                return before == 0 ? 0.0
                                   : static_cast<double>(now) / static_cast<double>(before);
            };
            std::ostringstream nr, sr;
            nr << std::fixed << std::setprecision(2)
               << ratio(nc, nat[i - 1].principal_cost());
            sr << std::fixed << std::setprecision(2)
               << ratio(sc, sl[i - 1].principal_cost());
            out << std::setw(11) << nr.str() << sr.str() << "\n";
        }
    }
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"positive-calculus toolbox: crumbling, right-strategy evaluation, "
                 "abstract machines, property checks, benchmarks"};
    app.require_subcommand(1);

    std::string input;
    std::string machine;
    std::string metrics;
    std::string family = "tau3";
    std::size_t max_steps = 10000;
    std::uint64_t seed = 1;
    std::size_t corpus = 100;
    std::vector<std::size_t> budgets = {64, 128, 256, 512};
    bool trace = false, check_invariants = false;
    bool force_positive = false, force_lambda = false;

    CLI::App* sc_crumble =
        app.add_subcommand("crumble", "translate a lambda term to a positive term");
    sc_crumble->add_option("input", input, "input file, or - for stdin")->required();

    CLI::App* sc_eval =
        app.add_subcommand("eval", "run the right strategy, printing each step");
    sc_eval->add_option("input", input, "input file, or - for stdin")->required();
    sc_eval->add_option("--max-steps", max_steps, "principal-step budget");
    CLI::Option* ep = sc_eval->add_flag("--positive", force_positive,
                                        "parse input as a positive term");
    sc_eval->add_flag("--lambda", force_lambda, "parse input as a lambda term")
        ->excludes(ep);

    CLI::App* sc_run = app.add_subcommand("run", "run an abstract machine");
    sc_run->add_option("input", input, "input file, or - for stdin")->required();
    sc_run->add_option("--machine", machine, "natural or sliced")
        ->required()
        ->check(CLI::IsMember({"natural", "sliced"}));
    sc_run->add_option("--max-steps", max_steps, "principal-transition budget");
    sc_run->add_flag("--trace", trace, "print one line per machine state");
    sc_run->add_option("--metrics", metrics, "metrics format (json)")
        ->check(CLI::IsMember({"json"}));
    sc_run->add_flag("--check-invariants", check_invariants,
                     "verify state invariants at every step");
    CLI::Option* rp = sc_run->add_flag("--positive", force_positive,
                                       "parse input as a positive term");
    sc_run->add_flag("--lambda", force_lambda, "parse input as a lambda term")
        ->excludes(rp);

    CLI::App* sc_check = app.add_subcommand("check", "run the full property suite");
    sc_check->add_option("--seed", seed, "base seed for the random corpus");
    sc_check->add_option("--corpus", corpus, "number of random corpus items");

    CLI::App* sc_bench = app.add_subcommand("bench", "scaling benchmark");
    sc_bench->add_option("--family", family, "term family")
        ->check(CLI::IsMember({"tau3", "church"}));
    sc_bench->add_option("--budgets", budgets, "principal budgets")->delimiter(',');
    sc_bench->add_option("--metrics", metrics, "metrics format (json)")
        ->check(CLI::IsMember({"json"}));

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*sc_crumble) return do_crumble(input, in, out);
        if (*sc_eval)
            return do_eval(input, max_steps, force_positive, force_lambda, in, out);
        if (*sc_run)
            return do_run(input, machine, max_steps, trace, metrics, check_invariants,
                          force_positive, force_lambda, in, out, err);
        if (*sc_check) return do_check(seed, corpus, out, err);
        if (*sc_bench) return do_bench(family, budgets, metrics, out);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        err << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace pom
