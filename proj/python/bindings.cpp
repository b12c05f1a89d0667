#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sci/edit.hpp"
#include "sci/error.hpp"
#include "sci/graph_view.hpp"
#include "sci/induction.hpp"
#include "sci/instantiation.hpp"
#include "sci/sdf.hpp"
#include "sci/validate.hpp"

namespace py = pybind11;
using namespace sci;

// Everything crosses the boundary as JSON text; the Python package decodes it.

namespace {

std::string validate_text(const std::string& text, bool strict) {
  return validate(parse_schema(text), {strict}).to_json().dump();
}

std::string graph_text(const std::string& text) { return build_graph_view(parse_schema(text)).to_json().dump(); }

std::string dot_text(const std::string& text) { return to_dot(build_graph_view(parse_schema(text))); }

std::string induce_text(const std::string& scenario, const std::vector<std::string>& chapters, const std::string& fixture,
                        const std::optional<std::string>& catalog, double edge_threshold, double grounding_threshold,
                        int expansion_depth) {
  induction::StubBackend backend(Json::parse(fixture));
  induction::InductionConfig config;
  config.edge_threshold = edge_threshold;
  config.grounding_threshold = grounding_threshold;
  config.expansion_depth = expansion_depth;
  std::optional<induction::QnodeCatalog> cat;
  if (catalog) cat = induction::QnodeCatalog::from_json(Json::parse(*catalog));
  return serialize_schema(induction::induce(backend, {scenario, chapters, {}}, config, cat ? &*cat : nullptr));
}

std::string coverage_text(const std::string& schema, const std::string& instances, double tau, bool include_descriptions,
                          const std::optional<std::vector<std::string>>& stoplist) {
  instantiation::MatcherConfig config;
  config.tau = tau;
  config.include_descriptions = include_descriptions;
  config.check();
  auto stop = instantiation::Stoplist::defaults();
  if (stoplist) {
    stop.lemmas.clear();
    for (const auto& w : *stoplist) {
      std::string lower = w;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      stop.lemmas.insert(lower);
    }
  }
  return instantiation::run_pipeline(parse_schema(schema), instantiation::parse_instances(Json::parse(instances)), stop, config)
      .to_json()
      .dump();
}

std::string stats_text(const std::vector<std::string>& documents) {
  std::vector<SchemaDocument> library;
  for (const auto& d : documents) library.push_back(parse_schema(d));
  return instantiation::coverage_stats(library).to_json().dump();
}

class PySession {
 public:
  PySession(const std::string& text, bool strict) : session_(parse_schema(text), EditOptions{strict}) {}

  std::string apply(const std::string& envelope) {
    auto env = parse_envelope(Json::parse(envelope));
    auto result = session_.apply(env.command, env.expect_version);
    return Json{{"doc_version", session_.version()}, {"created_ids", result.created_ids}}.dump();
  }
  void undo() { session_.undo(); }
  void redo() { session_.redo(); }
  std::string version() const { return session_.version(); }
  bool can_undo() const { return session_.can_undo(); }
  bool can_redo() const { return session_.can_redo(); }
  std::string document() const { return serialize_schema(session_.document()); }

 private:
  EditSession session_;
};

}  // namespace

PYBIND11_MODULE(_sci, m) {
  m.doc() = "Native core of sci_curation";

  static py::exception<Error> error_type(m, "SciError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(e.code_name()), std::string(e.what()));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    } catch (const Json::exception& e) {
      py::tuple args = py::make_tuple(std::string("BadInput"), std::string(e.what()));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.def("canonicalize", [](const std::string& text) { return serialize_schema(parse_schema(text)); }, py::arg("text"));
  m.def("validate", &validate_text, py::arg("text"), py::arg("strict") = false);
  m.def("temporal_order", [](const std::string& text, const std::string& chapter) { return temporal_order(parse_schema(text), chapter); },
        py::arg("text"), py::arg("chapter"));
  m.def("graph_view", &graph_text, py::arg("text"));
  m.def("to_dot", &dot_text, py::arg("text"));
  m.def("induce", &induce_text, py::arg("scenario"), py::arg("chapters"), py::arg("fixture"), py::arg("catalog") = std::nullopt,
        py::arg("edge_threshold") = 0.5, py::arg("grounding_threshold") = 0.5, py::arg("expansion_depth") = 1);
  m.def("coverage", &coverage_text, py::arg("schema"), py::arg("instances"), py::arg("tau") = 0.7,
        py::arg("include_descriptions") = false, py::arg("stoplist") = std::nullopt);
  m.def("coverage_stats", &stats_text, py::arg("documents"));
  m.def("increase_pct", &instantiation::increase_pct, py::arg("induced"), py::arg("curated"));

  py::class_<PySession>(m, "EditSession")
      .def(py::init<const std::string&, bool>(), py::arg("text"), py::arg("strict") = false)
      .def("apply", &PySession::apply, py::arg("envelope"))
      .def("undo", &PySession::undo)
      .def("redo", &PySession::redo)
      .def_property_readonly("version", &PySession::version)
      .def_property_readonly("can_undo", &PySession::can_undo)
      .def_property_readonly("can_redo", &PySession::can_redo)
      .def("document", &PySession::document);
}
