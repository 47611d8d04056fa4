#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "worm/blowup.hpp"
#include "worm/cli.hpp"
#include "worm/geometry.hpp"
#include "worm/kernel.hpp"
#include "worm/oracle.hpp"
#include "worm/poles.hpp"
#include "worm/rational.hpp"
#include "worm/types.hpp"
#include "worm/weight.hpp"

namespace py = pybind11;
using namespace worm;

namespace {

rational::Rational make_rational(long long num, long long den) {
    if (den == 0) throw validation_error("zero denominator");
    return rational::Rational(num, den);
}

py::dict pole_to_dict(const poles::Pole& q) {
    py::dict d;
    d["location"] = q.location;
    d["source"] = q.source == poles::PoleSource::CosineFactor ? "cosine" : "annulus";
    d["multiplicity"] = q.multiplicity;
    d["abs_g"] = q.residual_abs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Worm-domain Bergman kernel numerics";
    m.attr("__version__") = kVersion;

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<WormParams>(m, "WormParams")
        .def_readonly("alpha", &WormParams::alpha)
        .def_readonly("beta", &WormParams::beta)
        .def_readonly("smoothing_m", &WormParams::smoothing_m)
        .def_readonly("dim", &WormParams::dim)
        .def_readonly("nu", &WormParams::nu)
        .def_readonly("mu", &WormParams::mu)
        .def("total_winding", &WormParams::total_winding);
    m.def("make_params", &make_params, py::arg("alpha"), py::arg("beta"),
          py::arg("smoothing_m"), py::arg("dim"));

    py::class_<ModeIndex>(m, "ModeIndex")
        .def_readonly("j_multi", &ModeIndex::j_multi)
        .def_readonly("k", &ModeIndex::k)
        .def_readonly("j_abs", &ModeIndex::j_abs);
    m.def("make_mode", &make_mode, py::arg("j_multi"), py::arg("k"));
    m.def("zero_mode", &zero_mode, py::arg("dim"), py::arg("k"));

    py::class_<CPoint>(m, "CPoint")
        .def(py::init([](cplx z1, std::vector<cplx> zprime, cplx zn) {
                 return CPoint{z1, std::move(zprime), zn};
             }),
             py::arg("z1"), py::arg("zprime"), py::arg("zn"))
        .def_readwrite("z1", &CPoint::z1)
        .def_readwrite("zprime", &CPoint::zprime)
        .def_readwrite("zn", &CPoint::zn);

    py::class_<Rect>(m, "Rect")
        .def(py::init([](double a, double b, double c, double d) {
                 return Rect{a, b, c, d};
             }),
             py::arg("re_lo"), py::arg("re_hi"), py::arg("im_lo"), py::arg("im_hi"));

    // geometry
    m.def("sigma", &geometry::sigma, py::arg("t"), py::arg("m_amp"));
    m.def("defining_function", &geometry::defining_function, py::arg("z"), py::arg("params"));
    m.def("r_infinity", &geometry::r_infinity, py::arg("z"), py::arg("params"));
    m.def("complex_gradient", &geometry::complex_gradient, py::arg("z"), py::arg("params"));
    m.def("complex_hessian", &geometry::complex_hessian, py::arg("z"), py::arg("params"));
    m.def(
        "tangential_levi_min_eig",
        [](const CPoint& z, const WormParams& p) {
            const auto rep = geometry::tangential_levi_min_eig(z, p);
            py::dict d;
            d["min_tangential_eigenvalue"] = rep.min_tangential_eigenvalue;
            d["tangent_dimension"] = rep.tangent_dimension;
            d["gradient_norm"] = rep.gradient_norm;
            return d;
        },
        py::arg("z"), py::arg("params"));
    m.def("distance_to_weak_set", &geometry::distance_to_weak_set, py::arg("z"),
          py::arg("params"));
    m.def("boundary_sample", &geometry::boundary_sample, py::arg("params"), py::arg("seed"),
          py::arg("index"));
    m.def(
        "pseudoconvexity_scan",
        [](const WormParams& p, int samples, std::uint64_t seed) {
            const auto rep = geometry::pseudoconvexity_scan(p, samples, seed);
            py::dict d;
            d["min_eig"] = rep.min_eig;
            d["near_zero_count"] = rep.near_zero.size();
            double worst = 0.0;
            for (auto i : rep.near_zero)
                worst = std::max(worst, rep.samples[i].dist_weak);
            d["max_near_zero_distance_to_weak_set"] = worst;
            d["samples"] = rep.samples.size();
            return d;
        },
        py::arg("params"), py::arg("samples"), py::arg("seed"));
    m.def(
        "scaled_defining",
        [](double lam, const CPoint& z, const WormParams& p) {
            const auto sv = geometry::scaled_defining(lam, z, p);
            return py::make_tuple(sv.r_lambda, sv.r_infinity);
        },
        py::arg("lam"), py::arg("z"), py::arg("params"));

    // weight
    m.def("cnj_constant", &weight::cnj_constant, py::arg("dim"), py::arg("j_multi"));
    m.def(
        "weight_direct",
        [](double theta, const ModeIndex& mode, const WormParams& p) {
            return weight::weight_direct(theta, weight::make_weight_spec(mode, p));
        },
        py::arg("theta1"), py::arg("mode"), py::arg("params"));
    m.def(
        "weight_fourier_closed",
        [](cplx xi, const ModeIndex& mode, const WormParams& p) {
            const auto tv = weight::weight_fourier_closed(xi, weight::make_weight_spec(mode, p));
            return py::make_tuple(tv.value, tv.removable);
        },
        py::arg("xi"), py::arg("mode"), py::arg("params"));
    m.def(
        "transform_m2i",
        [](cplx zeta, const ModeIndex& mode, const WormParams& p) {
            return weight::transform_m2i(zeta, weight::make_weight_spec(mode, p));
        },
        py::arg("zeta"), py::arg("mode"), py::arg("params"));
    m.def(
        "sum_eval",
        [](int j, std::pair<long long, long long> alpha, std::pair<long long, long long> xi) {
            const auto r = rational::sum_eval(j, make_rational(alpha.first, alpha.second),
                                              make_rational(xi.first, xi.second));
            return py::make_tuple(r.lhs.str(), r.rhs.str());
        },
        py::arg("j"), py::arg("alpha"), py::arg("xi"),
        "Both sides of the partial-fraction identity as exact fraction strings; "
        "alpha and xi are (numerator, denominator) pairs.");

    // poles and residues
    m.def(
        "poles_predicted",
        [](const ModeIndex& mode, const WormParams& p, const Rect& r) {
            py::list out;
            for (const auto& q : poles::poles_predicted(mode, p, r).poles)
                out.append(pole_to_dict(q));
            return out;
        },
        py::arg("mode"), py::arg("params"), py::arg("region"));
    m.def(
        "poles_numeric",
        [](const ModeIndex& mode, const WormParams& p, const Rect& r, double tol) {
            py::list out;
            for (const auto& q : poles::poles_numeric(mode, p, r, tol).poles)
                out.append(pole_to_dict(q));
            return out;
        },
        py::arg("mode"), py::arg("params"), py::arg("region"), py::arg("tol") = 1e-10);
    m.def("next_pole_depth", &poles::next_pole_depth, py::arg("mode"), py::arg("params"));
    m.def(
        "residue_series",
        [](const ModeIndex& mode, const WormParams& p, double eps) {
            const auto ex = poles::residue_series(mode, p, eps);
            py::dict d;
            py::list terms;
            for (const auto& t : ex.discrete_terms) {
                py::dict td;
                td["ell"] = t.ell;
                td["coeff"] = t.coeff;
                td["exponent"] = t.exponent;
                terms.append(td);
            }
            d["discrete_terms"] = terms;
            d["winding_coeff"] = ex.winding_term.coeff;
            d["winding_exponent"] = ex.winding_term.exponent;
            d["remainder_order"] = ex.remainder_order;
            return d;
        },
        py::arg("mode"), py::arg("params"), py::arg("depth_epsilon") = 0.0);
    m.def(
        "double_pole_detect",
        [](const ModeIndex& mode, const WormParams& p) {
            py::list out;
            for (const auto& h : poles::double_pole_detect(mode, p)) {
                py::dict d;
                d["location"] = h.location;
                d["m_cos"] = h.m_cos;
                d["m_ann"] = h.m_ann;
                out.append(d);
            }
            return out;
        },
        py::arg("mode"), py::arg("params"));

    // kernel
    m.def(
        "strip_kernel_quadrature",
        [](cplx z, cplx w, const ModeIndex& mode, const WormParams& p, double tol) {
            kernel::KernelEvalConfig cfg;
            cfg.tol = tol;
            const auto kv = kernel::strip_kernel_quadrature(z, w, mode, p, cfg);
            return py::make_tuple(kv.value, kv.est_error);
        },
        py::arg("z"), py::arg("w"), py::arg("mode"), py::arg("params"),
        py::arg("tol") = 1e-10);
    m.def(
        "strip_kernel_residue",
        [](cplx z, cplx w, const ModeIndex& mode, const WormParams& p, double eps) {
            return kernel::strip_kernel_residue(z, w, poles::residue_series(mode, p, eps));
        },
        py::arg("z"), py::arg("w"), py::arg("mode"), py::arg("params"),
        py::arg("depth_epsilon") = 0.0);
    m.def(
        "model_kernel",
        [](cplx logz1, std::vector<cplx> zp, cplx zn, cplx logw1, std::vector<cplx> wp, cplx wn,
           const ModeIndex& mode, const WormParams& p) {
            return kernel::model_kernel(logz1, zp, zn, logw1, wp, wn, mode, p);
        },
        py::arg("logz1"), py::arg("zprime"), py::arg("zn"), py::arg("logw1"), py::arg("wprime"),
        py::arg("wn"), py::arg("mode"), py::arg("params"));
    m.def(
        "reproducing_check",
        [](cplx center, double scale, cplx w, const ModeIndex& mode, const WormParams& p) {
            return kernel::reproducing_check(kernel::Gaussian{center, scale}, w, mode, p);
        },
        py::arg("center"), py::arg("scale"), py::arg("w"), py::arg("mode"), py::arg("params"));
    m.def(
        "mode_project",
        [](const std::function<cplx(const CPoint&)>& f, const CPoint& base,
           const ModeIndex& mode, const WormParams& p, int grid) {
            return kernel::mode_project(f, base, mode, p, grid);
        },
        py::arg("f"), py::arg("base"), py::arg("mode"), py::arg("params"),
        py::arg("grid_per_axis"));

    // blowup analysis
    m.def(
        "threshold_and_range",
        [](double pexp, const WormParams& p) {
            const auto t = blowup::threshold_and_range(pexp, p);
            py::dict d;
            d["s_star"] = t.s_star;
            if (t.has_lp_range) d["lp_range"] = py::make_tuple(t.p_min, t.p_max);
            return d;
        },
        py::arg("p"), py::arg("params"));
    m.def(
        "sobolev_tail_integral",
        [](double pexp, double s, const WormParams& params, double eps, bool leading_only,
           double delta) {
            const auto region = blowup::make_probe_region(params, delta);
            const auto ex = poles::residue_series(zero_mode(params.dim, -2), params, 0.0);
            return blowup::sobolev_tail_integral(
                blowup::make_sobolev(pexp, s), region, params, eps, ex,
                leading_only ? blowup::KernelModel::LeadingTerm
                             : blowup::KernelModel::ResidueSeries);
        },
        py::arg("p"), py::arg("s"), py::arg("params"), py::arg("eps"),
        py::arg("leading_only") = false, py::arg("delta") = 0.0);
    m.def(
        "divergence_scan",
        [](std::vector<double> pg, std::vector<double> sg, const WormParams& params,
           double delta) {
            const auto region = blowup::make_probe_region(params, delta);
            py::list out;
            for (const auto& row : blowup::divergence_scan(
                     pg, sg, params, region, blowup::KernelModel::ResidueSeries)) {
                py::dict d;
                d["p"] = row.p;
                d["s"] = row.s;
                d["s_star"] = row.s_star;
                d["classification"] = blowup::classification_name(row.cls);
                d["slope"] = row.slope;
                d["r_squared"] = row.r_squared;
                d["eps"] = row.eps;
                d["integral"] = row.integral;
                out.append(d);
            }
            return out;
        },
        py::arg("p_grid"), py::arg("s_grid"), py::arg("params"), py::arg("delta") = 0.0);
    m.def(
        "corollary2_check",
        [](double pexp, const WormParams& params) {
            const auto region = blowup::make_probe_region(params);
            const auto ex = poles::residue_series(zero_mode(params.dim, -2), params, 0.0);
            const auto res = blowup::corollary2_check(pexp, params, region, ex,
                                                      blowup::KernelModel::ResidueSeries);
            py::dict d;
            d["p"] = res.p;
            d["p_conj"] = res.p_conj;
            d["divergent"] = res.divergent;
            return d;
        },
        py::arg("p"), py::arg("params"));

    // oracles
    m.def(
        "dirichlet_constant",
        [](int dim, std::vector<int> j, int level) {
            return oracle::dirichlet_constant(dim, j, level);
        },
        py::arg("dim"), py::arg("j_multi"), py::arg("level") = 1);
    m.def(
        "numeric_fourier",
        [](double start, double step, std::vector<cplx> values, double xi) {
            const auto r = oracle::numeric_fourier({start, step, std::move(values)}, xi);
            return py::make_tuple(r.value, r.est_error, r.support_clipped);
        },
        py::arg("start"), py::arg("step"), py::arg("values"), py::arg("xi"));
    m.def("finite_difference_hessian", &oracle::finite_difference_hessian, py::arg("z"),
          py::arg("params"), py::arg("step"));

    // CLI entry point (same exit-code contract as the binary)
    m.def("run_cli", &cli::run, py::arg("args"));
}
