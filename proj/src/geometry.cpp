#include "worm/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace worm::geometry {

namespace {

constexpr double kSigmaUnderflow = 1e-300;  // t below this: e^{-1/t}/t^4 underflows anyway

void require_zn(const CPoint& z) {
    if (z.zn == cplx(0.0, 0.0)) throw validation_error("zn must be nonzero (ln|zn| undefined)");
}

void require_point(const CPoint& z, const WormParams& p) {
    require_zn(z);
    if (static_cast<int>(z.zprime.size()) != p.dim - 2)
        throw validation_error("zprime must have length dim - 2");
}

// e^{2 i alpha ln|zn|}, the center of the boundary disk at height |zn|
cplx disk_center(const CPoint& z, const WormParams& p) {
    return std::polar(1.0, 2.0 * p.alpha * std::log(std::abs(z.zn)));
}

}  // namespace

double sigma(double t, double m_amp) {
    if (t <= kSigmaUnderflow) return 0.0;
    return m_amp * std::exp(-1.0 / t);
}

double sigma_d1(double t, double m_amp) {
    if (t <= kSigmaUnderflow) return 0.0;
    return m_amp * std::exp(-1.0 / t) / (t * t);
}

double sigma_d2(double t, double m_amp) {
    if (t <= kSigmaUnderflow) return 0.0;
    return m_amp * std::exp(-1.0 / t) * (1.0 - 2.0 * t) / (t * t * t * t);
}

double defining_function(const CPoint& z, const WormParams& p) {
    require_point(z, p);
    const cplx a = disk_center(z, p);
    double zp2 = 0.0;
    for (const cplx& v : z.zprime) zp2 += std::norm(v);
    const double zn2 = std::norm(z.zn);
    return std::norm(z.z1 - a) + zp2 - 1.0 + sigma(zn2 - p.beta * p.beta, p.smoothing_m) +
           sigma(1.0 - zn2, p.smoothing_m);
}

Eigen::VectorXcd complex_gradient(const CPoint& z, const WormParams& p) {
    require_point(z, p);
    const int n = p.dim;
    const cplx a = disk_center(z, p);
    const cplx abar = std::conj(a);
    const double zn2 = std::norm(z.zn);
    Eigen::VectorXcd g(n);
    g(0) = std::conj(z.z1) - abar;
    for (int i = 0; i < n - 2; ++i) g(i + 1) = std::conj(z.zprime[static_cast<std::size_t>(i)]);
    // phi = z1 abar + conj(z1) a;  dphi/dzn = (i alpha / zn)(conj(z1) a - z1 abar)
    const cplx ialpha = cplx(0.0, p.alpha);
    const cplx dphi = (ialpha / z.zn) * (std::conj(z.z1) * a - z.z1 * abar);
    const double s1 = sigma_d1(zn2 - p.beta * p.beta, p.smoothing_m);
    const double s2 = sigma_d1(1.0 - zn2, p.smoothing_m);
    g(n - 1) = -dphi + (s1 - s2) * std::conj(z.zn);
    return g;
}

Eigen::MatrixXcd complex_hessian(const CPoint& z, const WormParams& p) {
    require_point(z, p);
    const int n = p.dim;
    const cplx a = disk_center(z, p);
    const cplx abar = std::conj(a);
    const double zn2 = std::norm(z.zn);

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n - 1; ++i) h(i, i) = 1.0;

    // cross terms of phi = 2 Re(z1 abar):
    //   d^2 phi / dz1 dznbar   = -i alpha abar / znbar
    //   d^2 phi / dzn dz1bar   =  i alpha a / zn
    //   d^2 phi / dzn dznbar   = -(alpha^2/|zn|^2) * phi
    const cplx dz1_dznbar = -cplx(0.0, p.alpha) * abar / std::conj(z.zn);
    h(0, n - 1) = -dz1_dznbar;               // r carries -phi
    h(n - 1, 0) = std::conj(h(0, n - 1));
    const double phi = 2.0 * std::real(z.z1 * abar);
    const double m = p.smoothing_m;
    const double hess_sigma = zn2 * (sigma_d2(zn2 - p.beta * p.beta, m) + sigma_d2(1.0 - zn2, m)) +
                              sigma_d1(zn2 - p.beta * p.beta, m) - sigma_d1(1.0 - zn2, m);
    h(n - 1, n - 1) = (p.alpha * p.alpha / zn2) * phi + hess_sigma;
    return h;
}

double distance_to_weak_set(const CPoint& z, const WormParams& p) {
    double d2 = std::norm(z.z1);
    for (const cplx& v : z.zprime) d2 += std::norm(v);
    const double r = std::abs(z.zn);
    double dr = 0.0;
    if (r > p.beta)
        dr = r - p.beta;
    else if (r < 1.0)
        dr = 1.0 - r;
    return std::sqrt(d2 + dr * dr);
}

LeviReport tangential_levi_min_eig(const CPoint& z, const WormParams& p) {
    const int n = p.dim;
    const Eigen::VectorXcd g = complex_gradient(z, p);
    const double gnorm = g.norm();
    if (gnorm < 1e-10) throw validation_error("degenerate gradient at requested boundary point");
    const double r = defining_function(z, p);
    if (std::abs(r) > 1e-8 * std::max(1.0, gnorm))
        throw validation_error("point is not on the boundary within tolerance");

    // tangent space = orthogonal complement of conj(gradient); orthonormal
    // basis via Householder completion
    Eigen::VectorXcd normal = g.conjugate() / gnorm;
    Eigen::MatrixXcd basis(n, n - 1);
    {
        // Householder vector mapping e_1 to normal
        Eigen::VectorXcd v = normal;
        const double theta = std::arg(v(0) == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : v(0));
        const cplx phase = std::polar(1.0, theta);
        v(0) += phase;
        const double vn2 = v.squaredNorm();
        for (int c = 1; c < n; ++c) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
            e(c) = 1.0;
            // Q e_c with Q = (I - 2 v v^H / |v|^2) * diag(-phase,...) trick:
            Eigen::VectorXcd q = e - (2.0 * (v.dot(e)) / vn2) * v;
            basis.col(c - 1) = q;
        }
        // Householder reflects e_1 to -phase*normal; columns 2..n stay orthonormal
        // and orthogonal to normal, which is all we need.
    }

    const Eigen::MatrixXcd h = complex_hessian(z, p);
    // Levi form sum H_jk w_j conj(w_k) on w = B x is the standard quadratic
    // form of B^T H conj(B) in x
    const Eigen::MatrixXcd t = basis.transpose() * h * basis.conjugate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (t + t.adjoint()));
    LeviReport rep;
    rep.point = z;
    rep.min_tangential_eigenvalue = es.eigenvalues().minCoeff();
    rep.tangent_dimension = n - 1;
    rep.gradient_norm = gnorm;
    return rep;
}

CPoint boundary_sample(const WormParams& p, std::uint64_t seed, std::uint64_t index) {
    std::mt19937_64 rng(substream_seed(seed, index));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = p.dim;

    // anchor at the boundary-disk center over a random annulus height: r = -1 there
    const double rn = 1.0 + (p.beta - 1.0) * unif(rng);
    const double phase_n = 2.0 * std::numbers::pi * unif(rng);
    CPoint anchor;
    anchor.zn = std::polar(rn, phase_n);
    anchor.zprime.assign(static_cast<std::size_t>(n - 2), cplx(0.0, 0.0));
    anchor.z1 = std::polar(1.0, 2.0 * p.alpha * std::log(rn));

    // random direction in C^n
    std::vector<cplx> dir(static_cast<std::size_t>(n));
    double dn = 0.0;
    for (auto& d : dir) {
        d = cplx(gauss(rng), gauss(rng));
        dn += std::norm(d);
    }
    dn = std::sqrt(dn);
    for (auto& d : dir) d /= dn;

    auto at = [&](double t) {
        CPoint q = anchor;
        q.z1 += t * dir[0];
        for (int i = 0; i < n - 2; ++i)
            q.zprime[static_cast<std::size_t>(i)] += t * dir[static_cast<std::size_t>(i + 1)];
        q.zn += t * dir[static_cast<std::size_t>(n - 1)];
        return q;
    };

    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (defining_function(at(hi), p) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw numeric_error("boundary bracket not found along ray");
    }
    CPoint q = at(hi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        q = at(mid);
        const double r = defining_function(q, p);
        if (std::abs(r) < 1e-12) break;
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return q;
}

ScanReport pseudoconvexity_scan(const WormParams& p, int sample_count, std::uint64_t seed) {
    if (sample_count < 1) throw validation_error("sample_count must be >= 1");
    if (!(p.smoothing_m > std::exp(2.0)))
        throw validation_error("smoothing amplitude must satisfy M > e^2 (boundedness precondition)");
    ScanReport rep;
    rep.samples.reserve(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i) {
        CPoint q = boundary_sample(p, seed, static_cast<std::uint64_t>(i));
        LeviReport lr = tangential_levi_min_eig(q, p);
        ScanSample s;
        s.point = q;
        s.min_eig = lr.min_tangential_eigenvalue;
        s.gradient_norm = lr.gradient_norm;
        s.dist_weak = distance_to_weak_set(q, p);
        if (rep.samples.empty() || s.min_eig < rep.min_eig) {
            rep.min_eig = s.min_eig;
            rep.argmin = rep.samples.size();
        }
        if (s.min_eig < 1e-6) rep.near_zero.push_back(rep.samples.size());
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

ScalingFrame::ScalingFrame(double lambda_) : lambda(lambda_) {
    if (!(lambda > 0.0)) throw validation_error("lambda must satisfy lambda > 0");
}

CPoint ScalingFrame::apply(const CPoint& z) const {
    CPoint w = z;
    w.z1 *= 2.0 * lambda * lambda;
    for (auto& v : w.zprime) v *= lambda;
    return w;
}

CPoint ScalingFrame::inverse(const CPoint& z) const {
    CPoint w = z;
    w.z1 /= 2.0 * lambda * lambda;
    for (auto& v : w.zprime) v /= lambda;
    return w;
}

double r_infinity(const CPoint& z, const WormParams& p) {
    require_point(z, p);
    double zp2 = 0.0;
    for (const cplx& v : z.zprime) zp2 += std::norm(v);
    const cplx abar = std::conj(disk_center(z, p));
    return zp2 - std::real(z.z1 * abar);
}

ScaledValue scaled_defining(double lambda, const CPoint& z, const WormParams& p) {
    if (!(lambda > 0.0)) throw validation_error("lambda must satisfy lambda > 0");
    require_zn(z);
    // lambda^2 r(tau^-1 z) expanded so the |.|^2 - 1 cancellation is exact:
    //   r_lambda = |z1|^2/(4 lambda^2) + lambda^2 (sigma+ + sigma-) + r_inf
    const double zn2 = std::norm(z.zn);
    const double tail = std::norm(z.z1) / (4.0 * lambda * lambda) +
                        lambda * lambda *
                            (sigma(zn2 - p.beta * p.beta, p.smoothing_m) +
                             sigma(1.0 - zn2, p.smoothing_m));
    const double rinf = r_infinity(z, p);
    return ScaledValue{tail + rinf, rinf};
}

}  // namespace worm::geometry
