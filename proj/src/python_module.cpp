#include <memory>
#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coach/coach.hpp"
#include "coach/errors.hpp"
#include "coach/profiler.hpp"
#include "coach/semantics.hpp"
#include "coach/supertagger.hpp"

namespace py = pybind11;

namespace {

py::dict stats_dict(const coach::ParseStats& s) {
  py::dict d;
  d["edges_built"] = s.edges_built;
  d["unification_attempts"] = s.unification_attempts;
  d["unification_failures"] = s.unification_failures;
  d["filter_prunes_rule"] = s.filter_prunes_rule;
  d["filter_prunes_supertag"] = s.filter_prunes_supertag;
  d["readings_found"] = s.readings_found;
  d["wall_time_ms"] = s.wall_time_ms;
  d["gaps"] = s.gaps;
  return d;
}

py::list dependency_list(const coach::MrsLite& m) {
  py::list out;
  coach::DependencyGraph g = coach::to_dependencies(m);
  for (const auto& a : g.arcs) out.append(py::make_tuple(g.nodes.at(a.head), a.role, g.nodes.at(a.dependent)));
  return out;
}

py::dict reading_dict(const coach::Reading& r) {
  py::dict d;
  d["derivation"] = r.derivation_string;
  py::list uses;
  for (const auto& u : r.learner_uses) uses.append(py::make_tuple(u.rule, u.start, u.end));
  d["learner_uses"] = uses;
  py::list rels;
  for (const auto& p : r.semantics.rels) rels.append(p.predicate);
  d["predications"] = rels;
  d["dependencies"] = dependency_list(r.semantics);
  d["semantics"] = r.semantics.to_string();
  return d;
}

py::dict verdict_dict(const coach::Verdict& v, const std::string& version) {
  py::dict d;
  d["sentence"] = v.sentence;
  d["verdict"] = std::string(coach::to_string(v.kind));
  py::list feedback;
  for (const auto& f : v.feedback) {
    py::dict item;
    item["category"] = f.category;
    item["start"] = f.char_start;
    item["end"] = f.char_end;
    item["surface"] = f.surface;
    item["expected"] = f.expected;
    item["message"] = f.message;
    item["rule"] = f.rule;
    feedback.append(item);
  }
  d["feedback"] = feedback;
  d["corrected"] = v.corrected ? py::object(py::str(*v.corrected)) : py::object(py::none());
  d["dependencies"] = v.reading ? dependency_list(v.reading->semantics) : py::list();
  d["derivation"] = v.reading ? py::object(py::str(v.reading->derivation_string)) : py::object(py::none());
  d["diagnostics"] = v.diagnostics;
  d["grammar_version"] = version;
  return d;
}

class Engine {
 public:
  Engine(const std::string& grammar, const std::optional<std::string>& supertag_model)
      : coach_(std::make_unique<coach::Coach>(coach::Coach::from_file(grammar))) {
    if (supertag_model) model_ = coach::load_supertag_model(*supertag_model);
  }

  py::dict check(const std::string& sentence, std::size_t supertag_k) const {
    coach::ParseOptions opts = options(true, supertag_k);
    coach::Verdict v;
    {
      py::gil_scoped_release release;
      v = coach_->check(sentence, opts);
    }
    return verdict_dict(v, coach_->learner().version_label);
  }

  py::dict parse(const std::string& sentence, const std::string& mode, bool rule_filter, std::size_t supertag_k) const {
    const coach::Parser& p = parser(mode);
    coach::ParseOptions opts = options(rule_filter, supertag_k);
    coach::ParseResult r;
    {
      py::gil_scoped_release release;
      r = p.parse(sentence, opts);
    }
    py::dict d;
    py::list readings;
    for (const auto& rd : r.readings) readings.append(reading_dict(rd));
    d["readings"] = readings;
    d["stats"] = stats_dict(r.stats);
    return d;
  }

  py::list analyze(const std::string& token) const {
    py::list out;
    for (const auto& a : coach::analyze_token(token, coach_->strict())) out.append(py::make_tuple(a.token, a.lemma, a.tag));
    return out;
  }

  std::string profile(const std::string& suite, const std::string& mode, bool rule_filter, std::size_t supertag_k,
                      std::size_t threads) const {
    const coach::Grammar& g = parser(mode).grammar();
    auto path = coach::resolve_suite_path(suite);
    coach::ProfileOptions opts;
    opts.parse = options(rule_filter, supertag_k);
    opts.threads = threads;
    opts.suite_name = path.stem().string();
    auto items = coach::read_suite(path.string());
    py::gil_scoped_release release;
    return coach::profile_to_json(coach::run_profile(items, g, opts));
  }

  std::string version(const std::string& mode) const {
    return parser(mode).grammar().version_label;
  }

 private:
  const coach::Parser& parser(const std::string& mode) const {
    if (mode == "strict") return coach_->strict_parser();
    if (mode == "learner") return coach_->learner_parser();
    throw coach::InputError("mode must be 'strict' or 'learner', got '" + mode + "'");
  }

  coach::ParseOptions options(bool rule_filter, std::size_t supertag_k) const {
    if (supertag_k > 0 && !model_) throw coach::InputError("supertag_k > 0 needs a supertagger model");
    coach::ParseOptions opts;
    opts.rule_filter = rule_filter;
    opts.supertag_k = supertag_k;
    opts.supertag_model = model_ ? &*model_ : nullptr;
    return opts;
  }

  std::unique_ptr<coach::Coach> coach_;
  std::optional<coach::SupertagModel> model_;
};

py::list validate(const std::string& grammar, const std::string& mode) {
  py::list errors;
  try {
    coach::load_grammar_file(coach::resolve_grammar_path(grammar), coach::parse_mode(mode));
  } catch (const coach::GrammarError& e) {
    py::dict d;
    d["kind"] = e.kind();
    d["location"] = e.location();
    d["detail"] = e.detail();
    errors.append(d);
  }
  return errors;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spanish grammar coaching over typed feature structure unification";

  py::register_exception<coach::GrammarError>(m, "GrammarError", PyExc_ValueError);
  py::register_exception<coach::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<coach::PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<coach::InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::string&, const std::optional<std::string>&>(), py::arg("grammar") = "toy",
           py::arg("supertag_model") = py::none())
      .def("check", &Engine::check, py::arg("sentence"), py::arg("supertag_k") = 0)
      .def("parse", &Engine::parse, py::arg("sentence"), py::arg("mode") = "strict", py::arg("rule_filter") = true,
           py::arg("supertag_k") = 0)
      .def("analyze", &Engine::analyze, py::arg("token"))
      .def("profile_json", &Engine::profile, py::arg("suite"), py::arg("mode") = "strict",
           py::arg("rule_filter") = true, py::arg("supertag_k") = 0, py::arg("threads") = 1)
      .def("version", &Engine::version, py::arg("mode") = "learner");

  m.def("validate", &validate, py::arg("grammar"), py::arg("mode") = "learner");
  m.def("bundled_supertag_model", [] { return coach::bundled_supertag_model_path().string(); });
  m.def("data_dir", [] { return coach::data_dir().string(); });
}
