#include "vcsim/chain.hpp"
#include "vcsim/error.hpp"
#include "vcsim/io.hpp"
#include "vcsim/kpi.hpp"
#include "vcsim/satisfaction.hpp"
#include "vcsim/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace vcsim;

namespace {

Scenario prepare(const std::optional<std::string> &yaml, const std::string &base_dir,
                 const std::optional<std::string> &mode, std::optional<std::uint64_t> seed,
                 std::optional<double> horizon) {
  RunMode m = mode && *mode == "vcor" ? RunMode::kVcor : RunMode::kScor;
  if (mode && *mode != "scor" && *mode != "vcor")
    throw ConfigError("unknown_mode", "mode must be scor or vcor, got " + *mode);
  Scenario s = yaml ? parse_scenario(*yaml, base_dir) : case_study_profile(m);
  if (seed)
    s.seed = *seed;
  if (horizon)
    s.horizon = *horizon;
  if (mode)
    force_mode(s, m);
  validate(s);
  return s;
}

struct PyRun {
  Scenario scenario;
  RunResult result;

  std::string kpi() const { return kpi_json(result.report); }
  std::string trace() const { return trace_jsonl(result.artifacts); }
  std::string ledger() const {
    return ledger_jsonl(result.artifacts.ledger, result.artifacts.scenario_digest,
                        result.artifacts.seed);
  }
  std::string costs() const { return costs_jsonl(result.artifacts); }
  std::string satisfaction() const { return satisfaction_csv(result.report); }
  std::string delivery_times() const { return delivery_times_csv(result.report); }
  std::string stock_levels() const { return stock_levels_csv(result.artifacts); }
  void write(const std::filesystem::path &dir) const { write_run_artifacts(dir, result, scenario); }
};

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Value chain simulator core";

  static py::exception<Error> base(m, "VcsimError");
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  static py::exception<InvariantViolation> invariant(m, "InvariantViolation", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  static py::exception<ComparisonError> comparison(m, "ComparisonError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    // Raise the matching Python type with the error code attached.
    auto raise = [](py::handle type, const Error &e) {
      py::object err = type(e.what());
      err.attr("code") = e.code();
      PyErr_SetObject(type.ptr(), err.ptr());
    };
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const ComparisonError &e) {
      raise(comparison, e);
    } catch (const ConfigError &e) {
      raise(config, e);
    } catch (const ValidationError &e) {
      raise(validation, e);
    } catch (const InvariantViolation &e) {
      raise(invariant, e);
    } catch (const IoError &e) {
      raise(io, e);
    } catch (const Error &e) {
      raise(base, e);
    }
  });

  py::class_<PyRun>(m, "Run")
      .def_property_readonly("kpi_json", &PyRun::kpi)
      .def_property_readonly("trace_jsonl", &PyRun::trace)
      .def_property_readonly("ledger_jsonl", &PyRun::ledger)
      .def_property_readonly("costs_jsonl", &PyRun::costs)
      .def_property_readonly("satisfaction_csv", &PyRun::satisfaction)
      .def_property_readonly("delivery_times_csv", &PyRun::delivery_times)
      .def_property_readonly("stock_levels_csv", &PyRun::stock_levels)
      .def_property_readonly("scenario_yaml",
                             [](const PyRun &r) { return serialize_scenario(r.scenario); })
      .def("write", &PyRun::write, py::arg("out_dir"));

  m.def(
      "run",
      [](std::optional<std::string> yaml, std::string base_dir, std::optional<std::string> mode,
         std::optional<std::uint64_t> seed, std::optional<double> horizon) {
        PyRun r;
        r.scenario = prepare(yaml, base_dir, mode, seed, horizon);
        py::gil_scoped_release release;
        r.result = run_scenario(r.scenario);
        return r;
      },
      py::arg("scenario_yaml") = py::none(), py::arg("base_dir") = ".",
      py::arg("mode") = py::none(), py::arg("seed") = py::none(),
      py::arg("horizon") = py::none());

  m.def("case_study_yaml",
        [](const std::string &mode) {
          return serialize_scenario(case_study_profile(mode == "vcor" ? RunMode::kVcor
                                                                      : RunMode::kScor));
        },
        py::arg("mode") = "scor");
  m.def("validate_scenario",
        [](const std::string &yaml, const std::string &base_dir) {
          const Scenario s = parse_scenario(yaml, base_dir);
          return py::make_tuple(s.name, scenario_digest(s));
        },
        py::arg("scenario_yaml"), py::arg("base_dir") = ".");
  m.def("compare_json",
        [](const std::string &scor_kpi, const std::string &vcor_kpi) {
          return comparison_json(compare_runs(parse_kpi_json(scor_kpi), parse_kpi_json(vcor_kpi)));
        },
        py::arg("scor_kpi_json"), py::arg("vcor_kpi_json"));

  m.def("sri", &sri, py::arg("sales_profit"), py::arg("mean_stock_value"));
  m.def("smi", &smi, py::arg("period"), py::arg("sri"));
  m.def("spi", &spi, py::arg("sales_profit"), py::arg("costs"));

  m.def("firm_f", &firm_f, py::arg("x"), py::arg("alpha"));
  m.def("update_vote",
        [](double x, double u, double alpha) {
          SatisfactionParams p;
          p.alpha = alpha;
          validate(p);
          return update_vote(VoteState{x, 0}, u, p).x;
        },
        py::arg("x"), py::arg("u"), py::arg("alpha"));
  m.def("innovation_step",
        [](double x, double alpha) {
          SatisfactionParams p;
          p.alpha = alpha;
          p.xi = p.beta = p.delta = p.phi = p.eta = 0.0;
          InputSignals s;
          s.innovation = true;
          return firm_update(VoteState{x, 0}, s, p).x;
        },
        py::arg("x"), py::arg("alpha"));
  m.def("decay_trajectory", &decay_trajectory, py::arg("x0"), py::arg("alpha"), py::arg("n"));
  m.def("innovation_step_bound", &innovation_step_bound, py::arg("x"), py::arg("alpha"));
}
