#include "varflow/config.hpp"
#include "varflow/flow.hpp"
#include "varflow/iteration.hpp"
#include "varflow/mesh_gen.hpp"
#include "varflow/nucleation.hpp"
#include "varflow/output.hpp"
#include "varflow/suites.hpp"
#include "varflow/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace varflow;

namespace {

Eigen::MatrixXd vertex_matrix(const DiscreteVarifold& v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.num_vertices()), v.ambient());
  for (std::size_t i = 0; i < v.num_vertices(); ++i) m.row(static_cast<Eigen::Index>(i)) = v.vertex(i).transpose();
  return m;
}

Eigen::MatrixXi face_matrix(const DiscreteVarifold& v) {
  Eigen::MatrixXi m(static_cast<Eigen::Index>(v.num_faces()), v.face_size());
  for (std::size_t f = 0; f < v.num_faces(); ++f)
    for (int j = 0; j < v.face_size(); ++j) m(static_cast<Eigen::Index>(f), j) = v.faces()[f].v[j];
  return m;
}

DiscreteVarifold from_arrays(const Eigen::MatrixXd& verts, const Eigen::MatrixXi& faces,
                             std::vector<int> multiplicity, std::vector<std::uint8_t> boundary) {
  const int ambient = static_cast<int>(verts.cols());
  if (faces.cols() != ambient) throw InvalidArgument("faces need one column per ambient dimension");
  std::vector<Vec> vs;
  for (Eigen::Index i = 0; i < verts.rows(); ++i) vs.emplace_back(verts.row(i).transpose());
  std::vector<Face> fs(static_cast<std::size_t>(faces.rows()));
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int j = 0; j < ambient; ++j) fs[f].v[j] = faces(f, j);
    if (!multiplicity.empty()) fs[f].multiplicity = multiplicity.at(static_cast<std::size_t>(f));
  }
  return DiscreteVarifold(ambient, std::move(vs), std::move(fs), std::move(boundary));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete varifold flow core";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<PreconditionFailed>(m, "PreconditionFailed", PyExc_RuntimeError);
  py::register_exception<ResolutionExhausted>(m, "ResolutionExhausted", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Plane>(m, "Plane")
      .def_static("coordinate", &Plane::coordinate, py::arg("ambient"), py::arg("k"))
      .def_property_readonly("dim", &Plane::dim)
      .def_property_readonly("proj", &Plane::proj);

  py::class_<DiscreteVarifold>(m, "DiscreteVarifold")
      .def(py::init(&from_arrays), py::arg("vertices"), py::arg("faces"),
           py::arg("multiplicity") = std::vector<int>{}, py::arg("boundary") = std::vector<std::uint8_t>{})
      .def_property_readonly("ambient", &DiscreteVarifold::ambient)
      .def_property_readonly("dim", &DiscreteVarifold::dim)
      .def_property_readonly("vertices", &vertex_matrix)
      .def_property_readonly("faces", &face_matrix)
      .def_property_readonly("multiplicity",
                             [](const DiscreteVarifold& v) {
                               std::vector<int> out;
                               for (const auto& f : v.faces()) out.push_back(f.multiplicity);
                               return out;
                             })
      .def("mass", &DiscreteVarifold::mass)
      .def("__len__", &DiscreteVarifold::num_faces);

  m.def("hex_disk", &hex_disk, py::arg("level"), py::arg("radius"));
  m.def(
      "icosphere", [](int level, double radius) { return icosphere(level, radius); }, py::arg("level"),
      py::arg("radius") = 1.0);
  m.def(
      "make_fixture",
      [](const std::string& kind, int q, int level) { return make_fixture(parse_fixture_kind(kind), q, level); },
      py::arg("kind") = "branched_disk", py::arg("q") = 2, py::arg("level") = 5);
  m.def("load_dvar", &load_dvar, py::arg("path"));
  m.def("save_dvar", &save_dvar, py::arg("path"), py::arg("varifold"), py::arg("header") = "");

  m.def(
      "mean_curvature",
      [](const DiscreteVarifold& v) {
        const MeanCurvature h = mean_curvature(v);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(h.h.size()), v.ambient());
        for (std::size_t i = 0; i < h.h.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = h.h[i].transpose();
        return out;
      },
      py::arg("varifold"));

  m.def("squash_normal", &squash_normal, py::arg("delta"), py::arg("rho"), py::arg("z"));
  m.def(
      "nucleate",
      [](const DiscreteVarifold& v, double eps, double delta) {
        return nucleate(v, Plane::coordinate(v.ambient(), v.dim()), eps, SquashMap{delta});
      },
      py::arg("varifold"), py::arg("eps"), py::arg("delta") = 0.2);
  m.def(
      "verify_nucleation",
      [](const DiscreteVarifold& before, const DiscreteVarifold& after, double eps, int q, double alpha, double r0) {
        const NucleationReport r = verify_nucleation(before, after, Plane::coordinate(before.ambient(), before.dim()), eps,
                                               GrowthEnvelope(alpha, r0), q);
        py::dict d;
        d["locality"] = r.locality;
        d["height"] = r.height;
        d["mass_bound"] = r.mass_bound;
        d["hole"] = r.hole;
        d["mass_hole_after"] = r.mass_hole_after;
        d["mass_hole_rhs"] = r.mass_hole_rhs;
        d["pass"] = r.all_checked_pass();
        return d;
      },
      py::arg("before"), py::arg("after"), py::arg("eps"), py::arg("q") = 2, py::arg("alpha") = 0.51,
      py::arg("r0") = 0.1);

  py::class_<FlowTrajectory>(m, "FlowTrajectory")
      .def_property_readonly("times",
                             [](const FlowTrajectory& tr) {
                               std::vector<double> t;
                               for (const auto& s : tr.snapshots) t.push_back(s.t);
                               return t;
                             })
      .def_property_readonly("masses",
                             [](const FlowTrajectory& tr) {
                               std::vector<double> out;
                               for (const auto& s : tr.snapshots) out.push_back(s.v.mass());
                               return out;
                             })
      .def_property_readonly("final", [](const FlowTrajectory& tr) { return tr.snapshots.back().v; })
      .def_readonly("valid", &FlowTrajectory::valid)
      .def_readonly("ledger_excess", &FlowTrajectory::ledger_excess)
      .def("ledger_csv", [](const FlowTrajectory& tr) {
        std::ostringstream os;
        write_ledger_csv(os, tr);
        return os.str();
      });

  m.def(
      "evolve",
      [](const DiscreteVarifold& v, double duration, double cadence, double dt_factor) {
        FlowOptions opt;
        opt.cadence = cadence;
        opt.dt_factor = dt_factor;
        return evolve(v, duration, opt);
      },
      py::arg("varifold"), py::arg("duration"), py::arg("cadence") = 0.05, py::arg("dt_factor") = 0.1);

  m.def(
      "a_q_squared", [](long q, double alpha, int n) { return static_cast<double>(a_q_squared(q, alpha, n)); },
      py::arg("q"), py::arg("alpha"), py::arg("n") = 2);
  m.def(
      "tail_sum", [](long k, double alpha, int n) { return static_cast<double>(tail_sum(k, alpha, n)); },
      py::arg("k"), py::arg("alpha"), py::arg("n") = 2);
  m.def(
      "schedule",
      [](long j, long k, double alpha, double r0) {
        std::ostringstream os;
        write_schedule_json(os, make_schedule(j, k, alpha, 2, r0));
        return os.str();
      },
      py::arg("J") = 200, py::arg("K") = 50, py::arg("alpha") = 0.51, py::arg("r0") = 0.1);

  m.def("git_blob_hash", &git_blob_hash, py::arg("content"));
  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed) {
        const SuiteResult r = run_suite(name, seed);
        return py::make_tuple(r.pass, r.lines);
      },
      py::arg("name"), py::arg("seed") = 0);
}
