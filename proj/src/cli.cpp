#include "worm/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>

#include "worm/blowup.hpp"
#include "worm/csv.hpp"
#include "worm/geometry.hpp"
#include "worm/kernel.hpp"
#include "worm/oracle.hpp"
#include "worm/poles.hpp"
#include "worm/quadrature.hpp"
#include "worm/types.hpp"
#include "worm/weight.hpp"

namespace worm::cli {

namespace {

using nlohmann::json;

struct Options {
    int n = 4;
    double alpha = 1.0;
    double beta = std::exp(1.0);
    double m_amp = 20.0;
    std::string j_csv;  // comma multi-index; empty = zeros
    int k = -2;
    double p = 2.0;
    double s = -1.0;
    std::string s_grid;    // lo:hi:step
    std::string eps_grid;  // comma list
    std::string region = "-3,3,-3,3";
    double delta = 0.0;
    std::uint64_t seed = 12345;
    double tol = 1e-10;
    int samples = 10000;
    std::string out;
    bool dry_run = false;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        vals.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return vals;
}

std::vector<double> parse_grid(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw validation_error("grid must be lo:hi:step");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) throw validation_error("grid must satisfy lo <= hi, step > 0");
    std::vector<double> vals;
    for (double v = lo; v <= hi + 0.5 * step; v += step) vals.push_back(v);
    return vals;
}

Rect parse_region(const std::string& text) {
    const auto vals = parse_list(text);
    if (vals.size() != 4) throw validation_error("region must be re_lo,re_hi,im_lo,im_hi");
    return Rect{vals[0], vals[1], vals[2], vals[3]};
}

std::vector<int> parse_multi_index(const std::string& text, int dim) {
    std::vector<int> j(static_cast<std::size_t>(dim - 2), 0);
    if (text.empty()) return j;
    const auto vals = parse_list(text);
    if (static_cast<int>(vals.size()) != dim - 2)
        throw validation_error("--j must list dim - 2 entries");
    for (std::size_t i = 0; i < vals.size(); ++i) j[i] = static_cast<int>(std::lround(vals[i]));
    return j;
}

json config_json(const Options& o, const std::string& sub) {
    json cfg;
    cfg["subcommand"] = sub;
    cfg["n"] = o.n;
    cfg["alpha"] = o.alpha;
    cfg["beta"] = o.beta;
    cfg["m_amp"] = o.m_amp;
    cfg["j"] = o.j_csv;
    cfg["k"] = o.k;
    cfg["p"] = o.p;
    cfg["s"] = o.s;
    cfg["s_grid"] = o.s_grid;
    cfg["eps_grid"] = o.eps_grid;
    cfg["region"] = o.region;
    cfg["delta"] = o.delta;
    cfg["seed"] = o.seed;
    cfg["tol"] = o.tol;
    cfg["samples"] = o.samples;
    cfg["out"] = o.out;
    cfg["dry_run"] = o.dry_run;
    return cfg;
}

// ---- subcommand bodies; each returns extra sidecar fields ------------------

json run_pseudoconvexity(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    if (o.dry_run)
        return json{{"planned_samples", o.samples}, {"bisection_tol", 1e-12}};
    const auto rep = geometry::pseudoconvexity_scan(p, o.samples, o.seed);

    std::vector<std::string> cols;
    for (int c = 1; c <= o.n; ++c) {
        cols.push_back("z" + std::to_string(c) + "_re");
        cols.push_back("z" + std::to_string(c) + "_im");
    }
    cols.insert(cols.end(), {"min_eig", "gradient_norm", "distance_to_weak_set"});
    csv::Writer w(csv_path, cols);
    for (const auto& smp : rep.samples) {
        std::vector<std::string> cells;
        cells.push_back(csv::fmt(smp.point.z1.real()));
        cells.push_back(csv::fmt(smp.point.z1.imag()));
        for (const auto& zp : smp.point.zprime) {
            cells.push_back(csv::fmt(zp.real()));
            cells.push_back(csv::fmt(zp.imag()));
        }
        cells.push_back(csv::fmt(smp.point.zn.real()));
        cells.push_back(csv::fmt(smp.point.zn.imag()));
        cells.push_back(csv::fmt(smp.min_eig));
        cells.push_back(csv::fmt(smp.gradient_norm));
        cells.push_back(csv::fmt(smp.dist_weak));
        w.write_row(cells);
    }

    double worst_near_zero_dist = 0.0;
    for (auto idx : rep.near_zero)
        worst_near_zero_dist = std::max(worst_near_zero_dist, rep.samples[idx].dist_weak);
    json extra;
    extra["min_eig"] = rep.min_eig;
    extra["near_zero_count"] = rep.near_zero.size();
    extra["max_near_zero_distance_to_weak_set"] = worst_near_zero_dist;
    extra["hint"] = "most negative eigenvalue found; rerun with larger --m-amp if below -1e-8";
    return extra;
}

json run_weight(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto mode = make_mode(parse_multi_index(o.j_csv, o.n), o.k);
    const auto spec = weight::make_weight_spec(mode, p);
    const double lo = -20.0, hi = 20.0, step = 0.25;
    if (o.dry_run)
        return json{{"planned_xi_points", static_cast<int>((hi - lo) / step) + 1}};
    csv::Writer w(csv_path, {"xi_re", "xi_im", "val_re", "val_im", "removable_flag"});
    for (double xi = lo; xi <= hi + 1e-9; xi += step) {
        const auto tv = weight::weight_fourier_closed(cplx(xi, 0.0), spec);
        w.row(xi, 0.0, tv.value.real(), tv.value.imag(), tv.removable ? 1 : 0);
    }
    json extra;
    extra["c_nj"] = spec.c_nj;
    extra["cos_power"] = spec.cos_power;
    return extra;
}

json run_poles(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto mode = make_mode(parse_multi_index(o.j_csv, o.n), o.k);
    const Rect region = parse_region(o.region);
    if (o.dry_run) {
        const auto pred = poles::poles_predicted(mode, p, region);
        return json{{"predicted_count", pred.poles.size()}, {"contour_nodes", 4096}};
    }
    const auto spec = weight::make_weight_spec(mode, p);
    const auto pred = poles::poles_predicted(mode, p, region);
    const auto refined = poles::poles_numeric(mode, p, region, o.tol > 0 ? o.tol : 1e-10);
    csv::Writer w(csv_path, {"stage", "re", "im", "source", "multiplicity", "abs_g"});
    auto src = [](poles::PoleSource s) {
        return s == poles::PoleSource::CosineFactor ? std::string("cosine") : std::string("annulus");
    };
    for (const auto& q : pred.poles)
        w.row(std::string("predicted"), q.location.real(), q.location.imag(), src(q.source),
              q.multiplicity, std::abs(weight::transform_m2i(q.location, spec)));
    for (const auto& q : refined.poles)
        w.row(std::string("refined"), q.location.real(), q.location.imag(), src(q.source),
              q.multiplicity, q.residual_abs);
    double max_shift = 0.0;
    for (std::size_t i = 0; i < pred.poles.size(); ++i)
        max_shift = std::max(max_shift,
                             std::abs(pred.poles[i].location - refined.poles[i].location));
    json extra;
    extra["predicted_count"] = pred.poles.size();
    extra["max_refinement_shift"] = max_shift;
    return extra;
}

json run_kernel(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto mode = make_mode(parse_multi_index(o.j_csv, o.n), o.k);
    const double yw = p.alpha * std::log(p.beta);
    const cplx w(0.0, yw);
    kernel::KernelEvalConfig cfg;
    cfg.tol = o.tol;
    if (o.dry_run) {
        const auto spec = weight::make_weight_spec(mode, p);
        const auto plan = kernel::plan_quadrature(cplx(-2.0, yw) - std::conj(w), spec, cfg);
        return json{{"xi_max", plan.xi_max},
                    {"panels", plan.panels},
                    {"order", plan.order},
                    {"margin_pos", plan.margin_pos},
                    {"margin_neg", plan.margin_neg}};
    }
    const auto expansion = poles::residue_series(mode, p, 0.0);
    csv::Writer wtr(csv_path,
                    {"x_re", "y_im", "w_re", "w_im", "k_re", "k_im", "method", "est_error"});
    std::vector<double> xs, logdiff;
    for (double x = -8.0; x <= -1.0 + 1e-9; x += 0.5) {
        const cplx z(x, yw);
        const auto kq = kernel::strip_kernel_quadrature(z, w, mode, p, cfg);
        const cplx kr = kernel::strip_kernel_residue(z, w, expansion);
        wtr.row(x, yw, w.real(), w.imag(), kq.value.real(), kq.value.imag(),
                std::string("quad"), kq.est_error);
        wtr.row(x, yw, w.real(), w.imag(), kr.real(), kr.imag(), std::string("residue"), 0.0);
        const double d = std::abs(kq.value - kr);
        if (d > 0.0 && x <= -2.0) {
            xs.push_back(x);
            logdiff.push_back(std::log(d));
        }
    }
    const auto fit = quad::linear_fit(xs, logdiff);
    json extra;
    extra["fit_slope"] = fit.slope;
    extra["fit_r_squared"] = fit.r_squared;
    extra["next_pole_depth"] = poles::next_pole_depth(mode, p);
    return extra;
}

json run_reproduce(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto mode = make_mode(parse_multi_index(o.j_csv, o.n), o.k);
    const double yw = p.alpha * std::log(p.beta);
    const std::vector<cplx> points{{1.0, yw},
                                   {-0.75, 0.5 * yw},
                                   {0.0, yw},
                                   {0.5, 1.4 * yw},
                                   {-0.25, 0.8 * yw}};
    if (o.dry_run) return json{{"planned_points", points.size()}, {"x_truncation", 6.0}};
    kernel::ReproducingConfig cfg;
    cfg.kernel.tol = o.tol;
    csv::Writer w(csv_path, {"idx", "w_re", "w_im", "rel_error"});
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double err =
            kernel::reproducing_check(kernel::Gaussian{0.0, 1.0}, points[i], mode, p, cfg);
        worst = std::max(worst, err);
        w.row(i, points[i].real(), points[i].imag(), err);
    }
    json extra;
    extra["max_rel_error"] = worst;
    if (worst > 1e-3) throw numeric_error("reproducing-property error exceeds 1e-3");
    return extra;
}

json run_blowup(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto region = blowup::make_probe_region(p, o.delta);
    const auto thr = blowup::threshold_and_range(o.p, p);
    std::vector<double> sgrid;
    if (!o.s_grid.empty())
        sgrid = parse_grid(o.s_grid);
    else if (o.s >= 0.0)
        sgrid = {o.s};
    else
        for (double s = thr.s_star - 0.2; s <= thr.s_star + 0.2 + 1e-9; s += 0.05)
            sgrid.push_back(std::max(0.0, s));
    std::vector<double> eps =
        o.eps_grid.empty() ? blowup::default_eps_grid() : parse_list(o.eps_grid);
    if (o.dry_run) {
        const int octaves = static_cast<int>(eps.size());
        return json{{"planned_s_points", sgrid.size()},
                    {"planned_eps_octaves", octaves},
                    {"radial_panels_per_octave", 3},
                    {"s_star", thr.s_star}};
    }
    const double pg[1] = {o.p};
    const auto rows = blowup::divergence_scan(pg, sgrid, p, region,
                                              blowup::KernelModel::ResidueSeries);
    csv::Writer w(csv_path, {"p", "s", "s_star", "eps", "I_eps", "fit_slope", "classification",
                             "r_squared"});
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.eps.size(); ++i)
            w.row(row.p, row.s, row.s_star, row.eps[i], row.integral[i], row.slope,
                  std::string(blowup::classification_name(row.cls)), row.r_squared);

    // boundary: midpoint between the last convergent and first divergent s
    double last_conv = -1.0, first_div = -1.0;
    for (const auto& row : rows) {
        const bool div = row.cls == blowup::Classification::PowerDivergent ||
                         row.cls == blowup::Classification::LogDivergent;
        if (!div && (first_div < 0.0)) last_conv = row.s;
        if (div && first_div < 0.0) first_div = row.s;
    }
    json extra;
    extra["s_star"] = thr.s_star;
    if (thr.has_lp_range) {
        extra["p_min"] = thr.p_min;
        extra["p_max"] = thr.p_max;
    }
    if (last_conv >= 0.0 && first_div >= 0.0)
        extra["boundary_estimate"] = 0.5 * (last_conv + first_div);
    return extra;
}

json run_scaling(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    if (o.dry_run) return json{{"planned_points", 100}, {"lambdas", {1.0, 10.0, 100.0}}};
    csv::Writer w(csv_path, {"idx", "lambda", "r_lambda", "r_infinity", "residual",
                             "predicted_residual", "deviation"});
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::mt19937_64 rng(substream_seed(o.seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        CPoint z;
        z.z1 = cplx(2.0 * u(rng), 2.0 * u(rng));
        z.zprime.assign(static_cast<std::size_t>(o.n - 2), cplx(0.0, 0.0));
        for (auto& v : z.zprime) v = cplx(u(rng), u(rng));
        const double r = 1.0 + (p.beta - 1.0) * 0.5 * (u(rng) + 1.0);
        z.zn = std::polar(r, std::numbers::pi * u(rng));
        for (double lambda : {1.0, 10.0, 100.0}) {
            const auto sv = geometry::scaled_defining(lambda, z, p);
            const double residual = sv.r_lambda - sv.r_infinity;
            const double predicted = std::norm(z.z1) / (4.0 * lambda * lambda);
            const double dev = std::abs(residual - predicted);
            worst = std::max(worst, dev);
            w.row(i, lambda, sv.r_lambda, sv.r_infinity, residual, predicted, dev);
        }
    }
    json extra;
    extra["max_deviation"] = worst;
    if (worst > 1e-12) throw numeric_error("scaling residual deviates from |z1|^2/(4 lambda^2)");
    return extra;
}

json run_calibrate(const Options& o, const std::string& csv_path) {
    const WormParams p = make_params(o.alpha, o.beta, o.m_amp, o.n);
    const auto mode = make_mode(parse_multi_index(o.j_csv, o.n), o.k);
    const auto spec = weight::make_weight_spec(mode, p);
    if (o.dry_run) return json{{"planned_checks", 4}};
    csv::Writer w(csv_path, {"check", "target", "measured", "error", "tolerance", "pass"});
    bool all_pass = true;

    {  // normalization constant vs the high-precision ratio oracle
        const double closed = weight::cnj_constant(o.n, mode.j_multi);
        const double oracle = oracle::dirichlet_constant(o.n, mode.j_multi);
        const double err = std::abs(closed - oracle) / oracle;
        const bool pass = err < 1e-10;
        all_pass &= pass;
        w.row(std::string("c_nj_oracle"), oracle, closed, err, 1e-10, pass ? 1 : 0);
    }
    {  // closed-form transform vs segment quadrature of the defining integral
        std::vector<double> cuts{spec.support_lo(), spec.support_hi()};
        for (double kk : spec.interior_kinks()) cuts.push_back(kk);
        std::vector<cplx> closed, numeric;
        for (double xi = -20.0; xi <= 20.0 + 1e-9; xi += 0.25) {
            closed.push_back(weight::weight_fourier_closed(cplx(xi, 0.0), spec).value);
            numeric.push_back(oracle::fourier_segments(
                [&](double y) { return weight::weight_direct(y, spec); }, cuts, xi));
        }
        double scale = 0.0;
        for (const cplx& v : numeric) scale = std::max(scale, std::abs(v));
        double max_rel = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) {
            // denominator floored at 1e-6 of the grid scale: the transform has
            // exact zeros on the integer grid where a pointwise ratio is 0/0
            max_rel = std::max(max_rel, std::abs(closed[i] - numeric[i]) /
                                            std::max(std::abs(numeric[i]), 1e-6 * scale));
        }
        const bool pass = max_rel < 1e-6;
        all_pass &= pass;
        w.row(std::string("transform_vs_oracle_max_rel"), 0.0, max_rel, max_rel, 1e-6,
              pass ? 1 : 0);
    }
    {  // Parseval spot check: int W dy = sqrt(2 pi) F(W)(0)
        const auto kinks = spec.interior_kinks();
        const double direct = quad::integrate_split(
            [&](double y) { return weight::weight_direct(y, spec); }, spec.support_lo(),
            spec.support_hi(), kinks, 8, 16);
        const double viaF =
            std::sqrt(2.0 * std::numbers::pi) *
            weight::weight_fourier_closed(cplx(0.0, 0.0), spec).value.real();
        const double err = std::abs(direct - viaF);
        const bool pass = err < 1e-8;
        all_pass &= pass;
        w.row(std::string("parseval"), direct, viaF, err, 1e-8, pass ? 1 : 0);
    }
    {  // composite normalization audit through the reproducing identity
        const double yw = p.alpha * std::log(p.beta);
        const double err = kernel::reproducing_check(kernel::Gaussian{0.0, 1.0},
                                                     cplx(1.0, yw), mode, p, {});
        const bool pass = err < 1e-3;
        all_pass &= pass;
        w.row(std::string("reproducing_identity"), 0.0, err, err, 1e-3, pass ? 1 : 0);
    }
    if (!all_pass) throw numeric_error("calibration checks failed; see report");
    return json{{"all_pass", all_pass}};
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"worm-domain Bergman kernel experiments"};
    app.require_subcommand(1);

    Options o;
    const std::vector<std::string> subs{"pseudoconvexity", "weight", "poles", "kernel",
                                        "reproduce", "blowup", "scaling", "calibrate"};
    for (const auto& name : subs) {
        auto* sc = app.add_subcommand(name);
        sc->add_option("--n", o.n);
        sc->add_option("--alpha", o.alpha);
        sc->add_option("--beta", o.beta);
        sc->add_option("--m-amp", o.m_amp);
        sc->add_option("--j", o.j_csv);
        sc->add_option("--k", o.k);
        sc->add_option("--p", o.p);
        sc->add_option("--s", o.s);
        sc->add_option("--s-grid", o.s_grid);
        sc->add_option("--eps-grid", o.eps_grid);
        sc->add_option("--region", o.region);
        sc->add_option("--delta", o.delta);
        sc->add_option("--seed", o.seed);
        sc->add_option("--tol", o.tol);
        sc->add_option("--samples", o.samples);
        sc->add_option("--out", o.out);
        sc->add_flag("--dry-run", o.dry_run);
    }

    std::vector<const char*> argv;
    argv.push_back("worm");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 1;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    const std::string base = o.out.empty() ? sub : o.out;
    const std::string csv_path = base + ".csv";
    const std::string json_path = base + ".json";

    json sidecar;
    sidecar["config"] = config_json(o, sub);
    sidecar["version"] = kVersion;
    sidecar["seed"] = o.seed;

    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        json extra;
        if (sub == "pseudoconvexity")
            extra = run_pseudoconvexity(o, csv_path);
        else if (sub == "weight")
            extra = run_weight(o, csv_path);
        else if (sub == "poles")
            extra = run_poles(o, csv_path);
        else if (sub == "kernel")
            extra = run_kernel(o, csv_path);
        else if (sub == "reproduce")
            extra = run_reproduce(o, csv_path);
        else if (sub == "blowup")
            extra = run_blowup(o, csv_path);
        else if (sub == "scaling")
            extra = run_scaling(o, csv_path);
        else if (sub == "calibrate")
            extra = run_calibrate(o, csv_path);
        sidecar["result"] = extra;
        sidecar["status"] = "ok";
    } catch (const validation_error& e) {
        sidecar["status"] = "validation_error";
        sidecar["error"] = e.what();
        std::cerr << "validation error: " << e.what() << "\n";
        code = 1;
    } catch (const numeric_error& e) {
        sidecar["status"] = "numeric_error";
        sidecar["error"] = e.what();
        std::cerr << "numeric failure: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        sidecar["status"] = "validation_error";
        sidecar["error"] = e.what();
        std::cerr << "error: " << e.what() << "\n";
        code = 1;
    }
    const auto t1 = std::chrono::steady_clock::now();
    sidecar["runtime_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    if (o.dry_run) sidecar["dry_run"] = true;

    std::ofstream jf(json_path);
    jf << sidecar.dump(2) << "\n";
    if (o.dry_run && code == 0) std::cout << sidecar["result"].dump(2) << "\n";
    return code;
}

}  // namespace worm::cli
