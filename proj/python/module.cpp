// Python bindings for the positive-calculus toolkit.
//
// A Session owns the term arena and the name supply, so every operation is a
// plain string -> string/dict function and no term pointers ever cross the
// language boundary. Module-level helpers run each call in a fresh Session,
// which makes their output (fresh-name choices included) deterministic.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstddef>
#include <optional>
#include <string>

#include "pom/calculus.hpp"
#include "pom/crumble.hpp"
#include "pom/machines.hpp"
#include "pom/syntax.hpp"

namespace py = pybind11;

namespace {

// Same sniffing rule as the command-line tool: positive syntax is recognized
// by an explicit substitution bracket with an arrow inside the input.
bool looks_positive(const std::string& text) {
    return text.find('[') != std::string::npos &&
           (text.find("<-") != std::string::npos ||
            text.find("\xe2\x86\x90") != std::string::npos);
}

class Session {
public:
    Session() = default;
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    // Parse `text` as a positive term; lambda syntax is translated first.
    // `positive` forces the reading (true = positive, false = lambda);
    // std::nullopt autodetects.
    const pom::PositiveTerm* parse_any(const std::string& text,
                                       std::optional<bool> positive) {
        bool as_positive = positive ? *positive : looks_positive(text);
        if (as_positive) return pom::parse_positive(text, arena_, supply_);
        return pom::crumble(arena_, pom::parse_lambda(text, arena_, supply_), supply_);
    }

    std::string parse(const std::string& text, std::optional<bool> positive) {
        return pom::to_string(parse_any(text, positive), supply_);
    }

    std::string crumble(const std::string& lambda_text) {
        const pom::LambdaTerm* t = pom::parse_lambda(lambda_text, arena_, supply_);
        return pom::to_string(pom::crumble(arena_, t, supply_), supply_);
    }

    std::string unfold(const std::string& text, std::size_t node_budget,
                       std::optional<bool> positive) {
        const pom::PositiveTerm* t = parse_any(text, positive);
        return pom::to_string(pom::unfold(arena_, t, supply_, node_budget), supply_);
    }

    std::size_t size(const std::string& text, std::optional<bool> positive) {
        return parse_any(text, positive)->size;
    }

    bool alpha_eq(const std::string& a, const std::string& b,
                  std::optional<bool> positive) {
        return pom::alpha_eq(parse_any(a, positive), parse_any(b, positive));
    }

    py::dict eval(const std::string& text, std::size_t max_steps,
                  std::optional<bool> positive) {
        const pom::PositiveTerm* t = parse_any(text, positive);
        pom::RightEvalResult r = pom::right_eval(arena_, t, supply_, max_steps);
        py::list steps;
        for (const auto& [label, reduct] : r.steps) {
            py::dict step;
            step["label"] = pom::label_name(label);
            step["term"] = pom::to_string(reduct, supply_);
            steps.append(step);
        }
        py::dict out;
        out["term"] = pom::to_string(r.term, supply_);
        out["steps"] = steps;
        out["m"] = r.m_count;
        out["e"] = r.e_count;
        out["normal"] = r.normal;
        return out;
    }

    py::dict run(const std::string& text, const std::string& machine,
                 std::size_t max_steps, std::optional<bool> positive) {
        const pom::PositiveTerm* t = parse_any(text, positive);
        pom::RunReport r;
        const pom::PositiveTerm* final_term = nullptr;
        if (machine == "natural") {
            r = pom::natural_run(arena_, t, supply_, max_steps);
            final_term = pom::natural_read_back(arena_, *r.final_natural);
        } else if (machine == "sliced") {
            r = pom::sliced_run(arena_, t, supply_, max_steps);
            final_term = pom::read_back(arena_, *r.final_sliced, &supply_);
        } else {
            throw py::value_error("machine must be \"natural\" or \"sliced\"");
        }

        std::size_t rename = 0, copy = 0;
        for (const pom::StepInfo& s : r.cost_samples) {
            if (s.label == pom::Label::m || s.label == pom::Label::sea3) rename += s.cost;
            if (s.label == pom::Label::e) copy += s.cost;
        }
        std::size_t search = r.counts.sea1 + r.counts.sea2;

        py::dict counts;
        counts["m"] = r.counts.m;
        counts["e"] = r.counts.e;
        counts["sea1"] = r.counts.sea1;
        counts["sea2"] = r.counts.sea2;
        counts["sea3"] = r.counts.sea3;
        py::dict cost;
        cost["rename"] = rename;
        cost["copy"] = copy;
        cost["search"] = search;
        cost["total"] = rename + copy + search;
        py::dict out;
        out["machine"] = machine;
        out["term_size"] = r.initial_size;
        out["counts"] = counts;
        out["cost"] = cost;
        out["status"] =
            r.status == pom::RunStatus::Normal ? "normal" : "budget_exhausted";
        out["readback"] = pom::to_string(final_term, supply_);
        return out;
    }

private:
    pom::TermArena arena_;
    pom::NameSupply supply_;
};

}  // namespace

PYBIND11_MODULE(pom, m) {
    m.doc() =
        "Positive-calculus toolkit: sharing-preserving translation from the "
        "lambda-calculus, the right-to-left evaluation strategy, and the two "
        "abstract machines that implement it.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<pom::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<pom::UnfoldOverflow>(m, "UnfoldOverflow",
                                                PyExc_RuntimeError);

    py::class_<Session>(m, "Session",
                        "A parsing/evaluation workspace with its own term arena "
                        "and fresh-name supply. Names allocated by one call stay "
                        "taken for later calls on the same Session.")
        .def(py::init<>())
        .def("parse", &Session::parse, py::arg("text"),
             py::arg("positive") = py::none(),
             "Parse and pretty-print a term (lambda input is translated to a "
             "positive term first).")
        .def("crumble", &Session::crumble, py::arg("lambda_text"),
             "Translate a lambda-term into a positive term.")
        .def("unfold", &Session::unfold, py::arg("text"),
             py::arg("node_budget") = static_cast<std::size_t>(1'000'000),
             py::arg("positive") = py::none(),
             "Eliminate every explicit substitution by meta-level substitution; "
             "raises UnfoldOverflow beyond `node_budget` built nodes.")
        .def("size", &Session::size, py::arg("text"),
             py::arg("positive") = py::none(), "Size measure of the term.")
        .def("alpha_eq", &Session::alpha_eq, py::arg("a"), py::arg("b"),
             py::arg("positive") = py::none(),
             "Alpha-equivalence after parsing both inputs (lambda inputs are "
             "translated first, which preserves and reflects alpha-equality).")
        .def("eval", &Session::eval, py::arg("text"),
             py::arg("max_steps") = static_cast<std::size_t>(10'000),
             py::arg("positive") = py::none(),
             "Run the right-to-left strategy for at most `max_steps` steps; "
             "returns the final term, the labelled steps, and the step counts.")
        .def("run", &Session::run, py::arg("text"), py::arg("machine"),
             py::arg("max_steps") = static_cast<std::size_t>(10'000),
             py::arg("positive") = py::none(),
             "Run the \"natural\" or \"sliced\" machine for at most `max_steps` "
             "principal transitions; returns the metrics record with the "
             "read-back of the final state.");

    m.def(
        "crumble",
        [](const std::string& lambda_text) { return Session().crumble(lambda_text); },
        py::arg("lambda_text"),
        "Translate a lambda-term into a positive term (fresh Session per call).");
    m.def(
        "unfold",
        [](const std::string& text, std::size_t node_budget,
           std::optional<bool> positive) {
            return Session().unfold(text, node_budget, positive);
        },
        py::arg("text"), py::arg("node_budget") = static_cast<std::size_t>(1'000'000),
        py::arg("positive") = py::none(),
        "Eliminate every explicit substitution (fresh Session per call).");
    m.def(
        "eval",
        [](const std::string& text, std::size_t max_steps,
           std::optional<bool> positive) {
            return Session().eval(text, max_steps, positive);
        },
        py::arg("text"), py::arg("max_steps") = static_cast<std::size_t>(10'000),
        py::arg("positive") = py::none(),
        "Run the right-to-left strategy (fresh Session per call).");
    m.def(
        "run",
        [](const std::string& text, const std::string& machine,
           std::size_t max_steps, std::optional<bool> positive) {
            return Session().run(text, machine, max_steps, positive);
        },
        py::arg("text"), py::arg("machine"),
        py::arg("max_steps") = static_cast<std::size_t>(10'000),
        py::arg("positive") = py::none(),
        "Run one abstract machine (fresh Session per call).");
    m.def(
        "alpha_eq",
        [](const std::string& a, const std::string& b, std::optional<bool> positive) {
            return Session().alpha_eq(a, b, positive);
        },
        py::arg("a"), py::arg("b"), py::arg("positive") = py::none(),
        "Alpha-equivalence of two terms (fresh Session per call).");
}
