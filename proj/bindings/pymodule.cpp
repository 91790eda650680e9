// Python bindings for the core operations: dense/odeco tensor types,
// spectral-norm estimation, decomposition, tuple enumeration, and the
// perturbation-bound reports.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "odeco/decompose.hpp"
#include "odeco/experiments.hpp"
#include "odeco/incoherent.hpp"
#include "odeco/perturb.hpp"

namespace py = pybind11;
using namespace odeco;

namespace {

DenseTensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  std::vector<std::size_t> dims(a.ndim());
  for (py::ssize_t i = 0; i < a.ndim(); ++i) dims[i] = static_cast<std::size_t>(a.shape(i));
  std::vector<double> values(a.data(), a.data() + a.size());
  return DenseTensor(std::move(dims), std::move(values));
}

py::array_t<double> tensor_to_array(const DenseTensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<double> a(shape);
  std::copy(t.values().begin(), t.values().end(), a.mutable_data());
  return a;
}

py::array_t<double> matrix_to_array(const Matrix& m) {
  py::array_t<double> a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), a.mutable_data());
  return a;
}

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

}  // namespace

PYBIND11_MODULE(pyodeco, m) {
  m.doc() = "odeco tensor decomposition, spectral-norm estimation, and perturbation bounds";

  py::class_<DenseTensor>(m, "DenseTensor")
      .def(py::init(&tensor_from_array), py::arg("array"))
      .def_property_readonly("dims", [](const DenseTensor& t) { return t.dims(); })
      .def("to_numpy", &tensor_to_array)
      .def("__repr__", [](const DenseTensor& t) {
        std::ostringstream os;
        os << "DenseTensor(order=" << t.order() << ", size=" << t.size() << ")";
        return os.str();
      });

  py::class_<OdecoTensor>(m, "OdecoTensor")
      .def(py::init([](const std::vector<std::size_t>& dims, const std::vector<double>& lambdas,
                       const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& factors) {
             std::vector<Matrix> f;
             for (const auto& a : factors) f.push_back(matrix_from_array(a));
             return OdecoTensor(dims, lambdas, std::move(f));
           }),
           py::arg("dims"), py::arg("lambdas"), py::arg("factors"))
      .def_property_readonly("dims", [](const OdecoTensor& t) { return t.dims(); })
      .def_property_readonly("lambdas", [](const OdecoTensor& t) { return t.lambdas(); })
      .def_property_readonly("rank", &OdecoTensor::rank)
      .def("factor", [](const OdecoTensor& t, std::size_t q) { return matrix_to_array(t.factor(q)); },
           py::arg("mode"))
      .def("to_dense", [](const OdecoTensor& t) { return to_dense(t); });

  py::class_<SingularTuple>(m, "SingularTuple")
      .def_readonly("value", &SingularTuple::value)
      .def_readonly("vectors", &SingularTuple::vectors)
      .def_readonly("active_set", &SingularTuple::active_set)
      .def_readonly("signs", &SingularTuple::signs);

  m.def("read_tensor", &read_tensor_file, py::arg("path"));
  m.def("write_tensor", &write_tensor_file, py::arg("path"), py::arg("tensor"));
  m.def("read_odeco", &read_odeco_file, py::arg("path"));
  m.def("write_odeco", &write_odeco_file, py::arg("path"), py::arg("tensor"));

  m.def("random_odeco", &random_odeco, py::arg("dims"), py::arg("r"), py::arg("lambdas"),
        py::arg("seed"));

  m.def(
      "spectral_norm",
      [](const DenseTensor& t, int restarts, double tol, int max_iter, std::uint64_t seed) {
        NormConfig cfg{restarts, tol, max_iter, seed};
        SpectralNormResult r = spectral_norm(t, cfg);
        return py::make_tuple(r.value, r.argmax.factors);
      },
      py::arg("tensor"), py::arg("restarts") = 1000, py::arg("tol") = 1e-10,
      py::arg("max_iter") = 500, py::arg("seed") = 0,
      "Multi-start lower-bound estimate of the tensor spectral norm; returns "
      "(value, argmax factors).");

  m.def(
      "decompose",
      [](const DenseTensor& t, std::size_t r, int restarts, double tol, int max_iter,
         const std::string& deflation, std::uint64_t seed) {
        IterationConfig cfg;
        cfg.restarts = restarts;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        if (deflation == "subtract")
          cfg.deflation = DeflationMode::subtract;
        else if (deflation != "orthogonal_complement")
          throw std::invalid_argument("deflation must be orthogonal_complement or subtract");
        DecomposeResult res = decompose_odeco(t, r, cfg, seed);
        return py::make_tuple(res.tensor, res.complete);
      },
      py::arg("tensor"), py::arg("r"), py::arg("restarts") = 50, py::arg("tol") = 1e-12,
      py::arg("max_iter") = 1000, py::arg("deflation") = "orthogonal_complement",
      py::arg("seed") = 0,
      "Gradient iteration with random restarts and deflation; returns "
      "(OdecoTensor, complete).");

  m.def("hosvd", &hosvd, py::arg("tensor"));

  m.def(
      "enumerate_tuple",
      [](const OdecoTensor& t, const std::vector<std::size_t>& subset,
         const std::vector<std::vector<int>>& signs) { return enumerate_tuple(t, subset, signs); },
      py::arg("tensor"), py::arg("subset"), py::arg("signs"),
      "Closed-form singular tuple for a subset of components; signs give "
      "chi for modes 2..p per subset element.");

  m.def("sin_angle", &sin_angle, py::arg("u"), py::arg("v"));

  m.def(
      "constants",
      [](double epsilon, std::size_t p) {
        PerturbConstants c = constants(epsilon, p);
        py::dict d;
        d["epsilon"] = c.epsilon;
        d["c_epsilon"] = c.c_epsilon;
        d["objective"] = c.objective;
        d["h1_inv"] = c.h1_inv;
        d["h2_inv"] = c.h2_inv;
        d["h3_inv"] = c.h3_inv;
        d["h4_inv"] = c.h4_inv;
        return d;
      },
      py::arg("epsilon"), py::arg("p") = 3);

  m.def(
      "verify_bounds",
      [](const OdecoTensor& a, const OdecoTensor& b, double epsilon, int restarts,
         std::uint64_t seed) {
        NormConfig cfg{restarts, 1e-10, 500, seed};
        PerturbationReport rep = verify_bounds(a, b, epsilon, cfg);
        py::dict d;
        d["delta"] = rep.delta;
        d["c_epsilon"] = rep.c_epsilon;
        d["all_pass"] = rep.all_pass;
        py::list rows;
        for (const BoundRow& r : rep.rows) {
          py::dict row;
          row["k"] = r.k;
          row["lambda"] = r.lambda;
          row["lambda_tilde"] = r.lambda_tilde;
          row["gap"] = r.gap;
          row["max_sin"] = r.max_sin;
          row["sharp"] = r.sharp;
          row["bound_value"] = r.bound_value;
          row["bound_davis"] = r.bound_davis;
          row["second_order_resid"] = r.second_order_resid;
          row["second_order_bound"] = r.second_order_bound;
          row["pass"] = r.pass;
          rows.append(row);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("epsilon") = 0.05, py::arg("restarts") = 200,
      py::arg("seed") = 0);

  m.def("polar_factor", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return matrix_to_array(polar_factor(matrix_from_array(a)));
  });
  m.def("isometry_delta", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return isometry_delta(matrix_from_array(a));
  });
}
