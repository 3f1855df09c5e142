#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stitkit/axioms.hpp"
#include "stitkit/btac.hpp"
#include "stitkit/cli.hpp"
#include "stitkit/kripke.hpp"
#include "stitkit/solver.hpp"
#include "stitkit/syntax.hpp"
#include "stitkit/translate.hpp"

namespace py = pybind11;
using namespace stitkit;

namespace {

solver::SolverConfig make_config(Agent agents, std::optional<std::uint64_t> bound, const std::string& engine,
                                 std::uint64_t timeout_ms, unsigned threads) {
  solver::SolverConfig cfg;
  cfg.agent_universe = agents;
  cfg.world_bound_override = bound;
  if (engine == "oracle")
    cfg.engine = solver::Engine::Oracle;
  else if (engine != "search")
    throw py::value_error("engine must be 'search' or 'oracle'");
  cfg.timeout = std::chrono::milliseconds(timeout_ms);
  cfg.threads = threads;
  return cfg;
}

py::dict stats_dict(const solver::SatStats& s) {
  py::dict d;
  d["engine"] = s.engine;
  d["bound_exponent"] = s.bound_exponent;
  d["bound_used"] = s.bound_used;
  d["box_candidates"] = s.box_candidates;
  d["points"] = s.points;
  d["families"] = s.families;
  d["models_explored"] = s.models_explored;
  d["exhausted"] = s.exhausted;
  d["bounded_unsat"] = s.bounded_unsat;
  d["witness_worlds"] = s.witness_worlds;
  if (s.kripke_class_verdict) d["kripke_class_verdict"] = solver::to_string(*s.kripke_class_verdict);
  return d;
}

// First word of the first line that is neither blank nor a comment.
std::string first_word(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line.substr(0, line.find('#')));
    std::string w;
    if (words >> w) return w;
  }
  return {};
}

py::dict result_dict(const solver::SatResult& r) {
  py::dict d;
  d["verdict"] = solver::to_string(r.verdict);
  d["witness"] = r.witness ? py::cast(kripke::write_model(*r.witness)) : py::none();
  d["world"] = r.witness ? py::cast(r.witness->worlds.at(*r.witness_world)) : py::none();
  d["stats"] = stats_dict(r.stats);
  return d;
}

}  // namespace

PYBIND11_MODULE(_stitkit, m) {
  m.doc() = "Decision procedures for CSTIT and DSTIT";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<translate::TranslateError>(m, "TranslateError", PyExc_ValueError);
  py::register_exception<axioms::AxiomError>(m, "AxiomError", PyExc_ValueError);
  static py::exception<solver::SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const solver::SolverError& e) {
      solver_error(e.what());
    }
  });

  py::class_<Formula>(m, "Formula")
      .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
      .def("__str__", [](const Formula& f) { return print(f, PrintStyle::Sugared); })
      .def("__repr__", [](const Formula& f) { return "Formula('" + print(f, PrintStyle::Sugared) + "')"; })
      .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
      .def("__hash__", [](const Formula& f) { return f.hash(); })
      .def("canonical", [](const Formula& f) { return print(f); })
      .def_property_readonly("length", [](const Formula& f) { return length(f); })
      .def_property_readonly("agents", [](const Formula& f) { return agents(f); })
      .def_property_readonly("atoms", [](const Formula& f) { return atoms(f); })
      .def("subformulas", [](const Formula& f) { return subformulas(f); })
      .def("in_language", [](const Formula& f, const std::string& tag) {
        if (tag == "cstit") return in_language(f, LanguageTag::Cstit);
        if (tag == "dstit") return in_language(f, LanguageTag::Dstit);
        if (tag == "mixed") return in_language(f, LanguageTag::Mixed);
        throw py::value_error("language must be cstit, dstit or mixed");
      });

  m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));

  m.def(
      "sat",
      [](const Formula& f, Agent agents, std::optional<std::uint64_t> bound, const std::string& engine,
         std::uint64_t timeout_ms, unsigned threads) {
        const auto cfg = make_config(agents, bound, engine, timeout_ms, threads);
        py::gil_scoped_release release;
        auto r = solver::sat(f, cfg);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("formula"), py::kw_only(), py::arg("agents"), py::arg("bound") = py::none(),
      py::arg("engine") = "search", py::arg("timeout_ms") = 0, py::arg("threads") = 1);

  m.def(
      "valid",
      [](const Formula& f, Agent agents, std::optional<std::uint64_t> bound, const std::string& engine,
         std::uint64_t timeout_ms, unsigned threads) {
        const auto cfg = make_config(agents, bound, engine, timeout_ms, threads);
        py::gil_scoped_release release;
        return solver::valid(f, cfg);
      },
      py::arg("formula"), py::kw_only(), py::arg("agents"), py::arg("bound") = py::none(),
      py::arg("engine") = "search", py::arg("timeout_ms") = 0, py::arg("threads") = 1);

  m.def(
      "sat_single_agent",
      [](const Formula& f) {
        solver::SolverConfig cfg;
        return result_dict(solver::sat_single_agent(f, cfg));
      },
      py::arg("formula"));

  m.def(
      "oracle",
      [](const Formula& f, std::size_t max_worlds, std::optional<Agent> agents) {
        solver::SolverConfig cfg;
        const auto ags = stitkit::agents(f);
        cfg.agent_universe = agents ? *agents : (ags.empty() ? 1 : *ags.rbegin() + 1);
        return result_dict(solver::oracle(f, max_worlds, cfg));
      },
      py::arg("formula"), py::kw_only(), py::arg("max_worlds") = 4, py::arg("agents") = py::none());

  m.def(
      "translate",
      [](const Formula& f, const std::string& to) {
        if (to != "cstit" && to != "dstit") throw py::value_error("to must be 'cstit' or 'dstit'");
        auto t = translate::translate(f, to == "cstit" ? translate::Direction::ToCstit : translate::Direction::ToDstit);
        py::dict d;
        d["formula"] = t.formula;
        d["surface_length"] = t.surface_length;
        d["primitive_length"] = t.primitive_length;
        py::list table;
        for (const auto& [sub, name] : t.table.entries()) table.append(py::make_tuple(name, sub));
        d["table"] = table;
        return d;
      },
      py::arg("formula"), py::kw_only(), py::arg("to"));

  m.def(
      "check",
      [](const std::string& model_text, const std::string& at, const Formula& f) {
        if (first_word(model_text) == "btac") {
          auto b = btac::read_model(model_text);
          return btac::eval(b, btac::parse_index(b, at), f);
        }
        auto any = kripke::read_model(model_text);
        return std::visit(
            [&](const auto& model) {
              const auto w = model.find_world(at);
              if (!w) throw py::key_error("unknown world '" + at + "'");
              return kripke::mc(model, *w, f);
            },
            any);
      },
      py::arg("model"), py::arg("at"), py::arg("formula"));

  m.def(
      "prove",
      [](const std::string& derivation_text) {
        auto r = axioms::check(axioms::parse_derivation(derivation_text));
        py::dict d;
        d["accepted"] = r.accepted;
        d["line"] = r.accepted ? py::none() : py::cast(r.label);
        d["message"] = r.message;
        return d;
      },
      py::arg("derivation"));

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command-line invocation; returns (exit_code, stdout, stderr).");
}
