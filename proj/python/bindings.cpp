// Python bindings for the core operations: algebra/GNS data, free-product
// elements, Fock-window representations, Khintchine verification, norm
// enclosures, free-group checks, Schur multiplier cb-norms, and the JSON
// task runner.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freeprod/free_group.hpp"
#include "freeprod/instance_gen.hpp"
#include "freeprod/khintchine.hpp"
#include "freeprod/runner.hpp"
#include "freeprod/schur.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace freeprod;

namespace {

FamilyPtr family_from(const std::vector<std::pair<int, Matrix>>& algebras) {
    std::vector<AlgebraWithState> algs;
    for (const auto& [n, rho] : algebras) algs.push_back(make_algebra(n, rho));
    return make_family(std::move(algs));
}

FreeElement element_from(const FamilyPtr& family, cxd scalar,
                         const std::vector<std::pair<cxd, std::vector<std::pair<int, Matrix>>>>& terms) {
    std::vector<FreeElement::Term> ts;
    for (const auto& [coeff, letters] : terms) {
        std::vector<Letter> ls;
        for (const auto& [alg, m] : letters) ls.push_back(Letter{alg, m});
        ts.push_back(FreeElement::Term{coeff, std::move(ls)});
    }
    return FreeElement::from_terms(family, scalar, std::move(ts));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "certified numerics for reduced free products";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "FreeprodError");

    py::class_<AlgebraWithState>(m, "Algebra")
        .def(py::init([](int n, const Matrix& rho) { return make_algebra(n, rho); }))
        .def_property_readonly("n", &AlgebraWithState::n)
        .def_property_readonly("gns_dim", &AlgebraWithState::gns_dim)
        .def_property_readonly("hbar_dim", &AlgebraWithState::hbar_dim)
        .def("state", &AlgebraWithState::state)
        .def("center", [](const AlgebraWithState& a, const Matrix& x) {
            return a.center(x).matrix;
        })
        .def("gns_left_mult", &AlgebraWithState::gns_left_mult)
        .def("hbar_basis", &AlgebraWithState::hbar_basis);

    py::class_<AlgebraFamily, std::shared_ptr<AlgebraFamily>>(m, "Family")
        .def(py::init([](const std::vector<std::pair<int, Matrix>>& algebras) {
            auto fam = family_from(algebras);
            return std::const_pointer_cast<AlgebraFamily>(fam);
        }))
        .def_property_readonly("size", &AlgebraFamily::size);

    py::class_<FreeElement>(m, "FreeElement")
        .def_property_readonly("degree", &FreeElement::degree)
        .def_property_readonly("scalar", &FreeElement::scalar)
        .def("__add__", &FreeElement::operator+)
        .def("__sub__", &FreeElement::operator-)
        .def("__mul__", [](const FreeElement& x, cxd c) { return x * c; })
        .def("__matmul__", [](const FreeElement& x, const FreeElement& y) {
            return multiply(x, y);
        });

    m.def("bernoulli_family", [](int n) {
        return std::const_pointer_cast<AlgebraFamily>(bernoulli_family(n));
    });
    m.def("bernoulli_symbol", &bernoulli_symbol);
    m.def("scalar_element", [](const std::shared_ptr<AlgebraFamily>& fam, cxd c) {
        return FreeElement::scalar_element(fam, c);
    });
    m.def("letter_element",
          [](const std::shared_ptr<AlgebraFamily>& fam, int algebra, const Matrix& a, cxd coeff) {
              return FreeElement::letter_element(fam, algebra, a, coeff);
          },
          py::arg("family"), py::arg("algebra"), py::arg("matrix"),
          py::arg("coeff") = cxd(1.0));
    m.def("element_from_terms", &element_from);
    m.def("multiply", &multiply);
    m.def("adjoint", &adjoint);
    m.def("free_state", &free_state);
    m.def("homogeneous_part", &homogeneous_part);
    m.def("truncate_degree", &truncate_degree);
    m.def("poisson", &poisson);
    m.def("truncated_poisson_bound", &truncated_poisson_bound);
    m.def("generate_element", [](const std::shared_ptr<AlgebraFamily>& fam, int degree, std::uint64_t seed,
                                 double letter_scale, int terms_per_degree,
                                 bool homogeneous) {
              GeneratorSpec spec;
              spec.degree = degree;
              spec.seed = seed;
              spec.letter_scale = letter_scale;
              spec.terms_per_degree = terms_per_degree;
              spec.homogeneous = homogeneous;
              return generate_element(fam, spec);
          },
          py::arg("family"), py::arg("degree"), py::arg("seed") = 0,
          py::arg("letter_scale") = 1.0, py::arg("terms_per_degree") = 1,
          py::arg("homogeneous") = false);

    m.def("fock_dim", [](const std::shared_ptr<AlgebraFamily>& fam, int L) {
        return make_fock(fam, L)->dim();
    });
    m.def("represent_dense",
          [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int domain_L) {
              FockPtr fock = make_fock(fam, domain_L + x.degree());
              BandOperator op = represent_element(fock, x, domain_L);
              if (op.rows() * op.cols() > 40'000'000)
                  throw BadParameter("window too large to densify");
              return Matrix(op.mat);
          });
    m.def("truncated_norm", [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int L) {
        FockPtr fock = make_fock(fam, L + x.degree());
        return truncated_norm(fock, AmplifiedElement::from(x), L).value;
    });
    m.def("ed_norm", [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int d) {
        FockPtr fock = make_fock(fam, std::max(1, d));
        return ed_norm(fock, x, d);
    });
    m.def("verify_kd", [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int d, int L) {
        FockPtr fock = make_fock(fam, L + d);
        KdReport r = verify_kd(fock, AmplifiedElement::from(x), d, L);
        return py::dict("ed"_a = r.ed, "t_L"_a = r.t_L, "constant"_a = r.constant,
                        "ratio"_a = r.ratio, "pass"_a = r.pass(),
                        "finite_family_constant"_a = r.alt_constant);
    });
    m.def("enclose_norm", [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int L) {
        int d = x.degree();
        FockPtr fock = make_fock(fam, std::max(L, d) + d);
        NormEnclosure e = enclose_norm(fock, x, L);
        return py::dict("lower"_a = e.lower, "upper"_a = e.upper,
                        "band_route"_a = e.band_route,
                        "khintchine_route"_a = e.khintchine_route,
                        "band_norms"_a = e.band_norms);
    });
    m.def("stagnation_profile",
          [](const std::shared_ptr<AlgebraFamily>& fam, const FreeElement& x, int n, int p_max) {
              FockPtr fock = make_fock(fam, p_max + x.degree());
              return stagnation_profile(fock, x, n, p_max);
          });

    py::class_<GroupBall>(m, "GroupBall")
        .def(py::init<int, int>())
        .def_property_readonly("generators", &GroupBall::generators)
        .def_property_readonly("radius", &GroupBall::radius)
        .def("dim", py::overload_cast<int>(&GroupBall::dim, py::const_))
        .def("word_at", &GroupBall::word_at)
        .def("index_of", &GroupBall::index_of);

    m.def("haagerup_check",
          [](const GroupBall& ball,
             const std::vector<std::pair<GroupWord, cxd>>& coeffs, int R) {
              HaagerupReport r = haagerup_check(ball, coeffs, R);
              return py::dict("l2"_a = r.l2, "t_R"_a = r.t_R,
                              "constant"_a = r.constant, "pass"_a = r.pass());
          });
    m.def("leinert_check",
          [](const GroupBall& ball, const std::vector<Matrix>& xs, int R) {
              LeinertReport r = leinert_check(ball, xs, R);
              return py::dict("t_R"_a = r.t_R, "col"_a = r.col, "row"_a = r.row,
                              "bound"_a = r.bound, "pass"_a = r.pass());
          });
    m.def("radial_symbol", &radial_symbol);

    m.def("cb_norm", [](const Matrix& a, double tol) {
        CbResult r = cb_norm(a, tol);
        return py::dict("value"_a = r.value, "lo"_a = r.lo, "hi"_a = r.hi,
                        "x"_a = r.fact.x, "y"_a = r.fact.y,
                        "certificate"_a = r.certificate,
                        "reconstruction_error"_a = r.fact.reconstruction_error(a));
    }, py::arg("a"), py::arg("tol") = 1e-6);
    m.def("polarize", [](const Matrix& x, const Matrix& y, double eps) {
        PolarizeResult p = polarize(x, y, eps);
        return py::dict("a"_a = p.a, "b"_a = p.b,
                        "diag_correction"_a = p.diag_correction,
                        "max_half_diff_sq"_a = p.max_half_diff_sq);
    });

    m.def("run_config", [](const std::string& config_text) {
        std::string report, error;
        int code = run_to_stream(config_text, {}, report, error);
        return py::make_tuple(code, code == 2 ? error : report);
    });
}
