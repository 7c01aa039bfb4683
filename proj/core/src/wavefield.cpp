#include "photoemission/wavefield.hpp"
#include "photoemission/errors.hpp"
#include "photoemission/faddeeva.hpp"
#include "photoemission/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace pem {

namespace {

const cplx I(0.0, 1.0);
constexpr double PHI_SPLIT = 32.0;  // Fresnel phase at the tail split point
constexpr double PHI_PANEL = 3.0;   // max phase per quadrature panel
constexpr int TAIL_DEG = 6;         // local amplitude fit on [t-ell, t]

// Fresnel moments M_m(U) = int_U^inf u^{-2m} e^{i u^2/2} du, m = 0..mmax,
// by upward recursion from the erfc closed form (the recursion contracts
// errors for U > 1). J2 = int_U^inf u^2 e^{iu^2/2} du, Abel-regularised.
struct Moments {
    std::array<cplx, TAIL_DEG + 3> M;
    cplx J2;
};

Moments fresnel_moments(double U) {
    Moments mo;
    const cplx rot = std::polar(1.0, -M_PI / 4.0);
    const cplx eiU2 = std::polar(1.0, 0.5 * U * U);
    mo.M[0] = std::sqrt(0.5 * M_PI) * std::polar(1.0, M_PI / 4.0) *
              erfc_complex(rot * U / std::sqrt(2.0));
    double Upow = 1.0 / U; // U^{-(2m+1)}
    for (int m = 0; m + 1 < static_cast<int>(mo.M.size()); ++m) {
        mo.M[m + 1] = (Upow * eiU2 + I * mo.M[m]) / double(2 * m + 1);
        Upow /= U * U;
    }
    mo.J2 = I * (mo.M[0] + U * eiU2);
    return mo;
}

// Monomial coefficients (in zeta = (t-s)/ell, on [0,1]) of a degree-D fit.
struct TailFit {
    std::array<cplx, TAIL_DEG + 1> c{};
};

class TailFitter {
public:
    TailFitter() {
        // Chebyshev points of [0,1] and the inverse Vandermonde, built once
        const int n = TAIL_DEG + 1;
        Eigen::MatrixXd V(n, n);
        for (int i = 0; i < n; ++i) {
            zeta_[i] = 0.5 * (1.0 + std::cos(M_PI * double(i) / TAIL_DEG));
            double p = 1.0;
            for (int j = 0; j < n; ++j) {
                V(i, j) = p;
                p *= zeta_[i];
            }
        }
        inv_ = V.inverse();
    }
    const std::array<double, TAIL_DEG + 1>& nodes() const { return zeta_; }
    TailFit fit(const std::array<cplx, TAIL_DEG + 1>& vals) const {
        TailFit f;
        for (int j = 0; j <= TAIL_DEG; ++j) {
            cplx acc = 0.0;
            for (int i = 0; i <= TAIL_DEG; ++i) acc += inv_(j, i) * vals[i];
            f.c[j] = acc;
        }
        return f;
    }

private:
    std::array<double, TAIL_DEG + 1> zeta_;
    Eigen::MatrixXd inv_;
};

const TailFitter& tail_fitter() {
    static TailFitter f;
    return f;
}

// sum_m c_m ell^{-m} int_0^ell delta^{m+shift-3/2} e^{i x^2/(2 delta)} d delta
// with the closed form  int_0^ell delta^{n-3/2} e^{i x^2/(2 delta)} d delta
//   = 2 |x|^{2n-1} M_n(U),  U = |x|/sqrt(ell),
// so shift = 1 is the delta^{-1/2} family, 0 is delta^{-3/2}, -1 is
// delta^{-5/2}; the index -1 "moment" is the regularised J2.
cplx tail_sum(const TailFit& f, const Moments& mo, double ax, double ell, int shift) {
    cplx acc = 0.0;
    double ellpow = 1.0;
    for (int m = 0; m <= TAIL_DEG; ++m) {
        const int idx = m + shift;
        const cplx mom = (idx >= 0) ? mo.M[idx] : mo.J2;
        acc += f.c[m] / ellpow * 2.0 * std::pow(ax, 2 * idx - 1) * mom;
        ellpow *= ell;
    }
    return acc;
}

struct SideIntegrals {
    cplx val; // the reconstruction integral
    cplx dx;  // its x-derivative
};

// Panel boundaries in sigma = sqrt(t-s): each panel advances the Fresnel
// phase x^2/(2 sigma^2) by at most PHI_PANEL and grows sigma by at most a
// fixed ratio, so both the oscillation and the 1/sigma^2 amplitude factor
// stay resolvable per panel.
void fresnel_panels(double ax, double sg_lo, double sg_hi, std::vector<double>& bounds) {
    constexpr double RATIO = 1.3;
    bounds.clear();
    bounds.push_back(sg_lo);
    double sg = sg_lo;
    int guard = 0;
    while (guard++ < 160) {
        const double phi = 0.5 * ax * ax / (sg * sg);
        double nxt = sg * RATIO;
        if (phi - 0.5 * ax * ax / (nxt * nxt) > PHI_PANEL)
            nxt = ax / std::sqrt(2.0 * (phi - PHI_PANEL));
        if (nxt >= sg_hi * 0.999) break;
        bounds.push_back(nxt);
        sg = nxt;
    }
    bounds.push_back(sg_hi);
}

} // namespace

WavefieldEvaluator::WavefieldEvaluator(const BoundaryTrace& trace)
    : trace_(trace), ctx_(trace.ctx()) {
    const double s2pi = 2.0 * std::sqrt(2.0 * M_PI);
    pref_minus_ = std::polar(1.0, M_PI / 4.0) / s2pi;
    pref_plus_ = std::polar(1.0, -M_PI / 4.0) / s2pi;
}

namespace {

// One quadrature point of the s-side integrals, left side:
//   psi:  (dxpsi0 + i psi0 x/delta) e^{i x^2/(2 delta)} delta^{-1/2}
//   dpsi: (i psi0/delta + (dxpsi0 + i psi0 x/delta)(i x/delta)) e^{...}
// The delta^{-1/2} factor is already folded into the weight.
inline void accum_left(double x, double delta, cplx psi0v, cplx dx0v, double wq,
                       SideIntegrals& out) {
    const cplx phase = std::polar(1.0, 0.5 * x * x / delta);
    const cplx amp = dx0v + I * psi0v * x / delta;
    out.val += wq * amp * phase;
    out.dx += wq * (I * psi0v / delta + amp * I * x / delta) * phase;
}

// Right side: amplitude Gamma_+ = C + x psi0/delta against e^{i F},
// F = r(s) + x^2/(2 delta), r = f + x (E/w^2)(cos wt - cos ws)/delta.
inline void accum_right(const KernelContext& ctx, double x, double s, double t, double delta,
                        cplx psi0v, cplx dx0v, double wq, SideIntegrals& out) {
    const double dcd = dcos_over_dt(ctx, s, t);
    const double r = f_phase(ctx, s, t) + x * ctx.E_over_w2 * dcd;
    const cplx phase = std::polar(1.0, r + 0.5 * x * x / delta);
    const cplx C = gamma_plus_bounded(ctx, s, t, psi0v, dx0v);
    const cplx amp = C + x * psi0v / delta;
    const double dxr = ctx.E_over_w2 * dcd;
    out.val += wq * amp * phase;
    out.dx += wq * (psi0v / delta + amp * I * (dxr + x / delta)) * phase;
}

} // namespace

WavefieldSample WavefieldEvaluator::sample_minus(double x, double t) const {
    WavefieldSample out;
    out.x = x;
    out.t = t;
    const double ax = std::abs(x);

    // split: s-side on [0, t-ell], moment tail on [t-ell, t]
    const double base_len = ctx_.cfg.period / trace_.params().windows_per_period;
    const double ell = std::min({t, ax * ax / (2.0 * PHI_SPLIT), 0.5 * base_len});
    const double scap = t - ell;

    SideIntegrals si{0.0, 0.0};
    thread_local std::vector<double> xs, ws;

    // s-side over trace windows
    for (const auto& w : trace_.windows()) {
        if (w.t0 >= scap) break;
        const double cap = std::min(w.t1, scap);
        const double dphi =
            0.5 * ax * ax * (1.0 / (t - cap) - 1.0 / (t - w.t0));
        const bool far_ok = (cap == w.t1) && (t - w.t1 >= 0.25 * w.len()) && (dphi < 0.5);
        if (far_ok) {
            for (size_t q = 0; q < w.fs.size(); ++q) {
                const double delta = t - w.fs[q];
                accum_left(x, delta, w.fpsi0[q], w.fdx[q], w.fw[q] / std::sqrt(delta), si);
            }
            continue;
        }
        // sigma = sqrt(t-u) panels; window 0 additionally peels its sqrt(u)
        // structure with a v = sqrt(u) rule on the left half
        double lo_u = w.t0;
        if (w.sqrt_basis) {
            const double m0 = 0.5 * std::min(cap, w.t1);
            const int n = trace_.params().n_near;
            legendre_mapped(n, 0.0, std::sqrt(m0), xs, ws);
            for (int q = 0; q < n; ++q) {
                const double v = xs[q], u = v * v;
                accum_left(x, t - u, trace_.psi0(u), trace_.dx_psi0(u),
                           ws[q] * 2.0 * v / std::sqrt(t - u), si);
            }
            lo_u = m0;
        }
        // the seam with the moment tail must sit at delta = ell exactly;
        // sqrt(t - cap) would round it by ~eps*t, which the delta^-2
        // amplitudes amplify enormously
        const double sg_lo = (cap == scap) ? std::sqrt(ell) : std::sqrt(t - cap);
        const double sg_hi = std::sqrt(t - lo_u);
        if (sg_hi <= sg_lo) continue;
        thread_local std::vector<double> pb;
        fresnel_panels(ax, sg_lo, sg_hi, pb);
        for (size_t pn = 0; pn + 1 < pb.size(); ++pn) {
            const int n = trace_.params().n_near;
            legendre_mapped(n, pb[pn], pb[pn + 1], xs, ws);
            for (int q = 0; q < n; ++q) {
                const double sg = xs[q];
                const double u = std::clamp(t - sg * sg, 0.0, cap);
                accum_left(x, sg * sg, trace_.psi0(u), trace_.dx_psi0(u), ws[q] * 2.0, si);
            }
        }
    }

    // moment tail over [t-ell, t]
    if (ell > 0.0 && ax > 0.0) {
        const auto& tf = tail_fitter();
        std::array<cplx, TAIL_DEG + 1> bv, qv;
        for (int i = 0; i <= TAIL_DEG; ++i) {
            const double s = t - ell * tf.nodes()[i];
            bv[i] = trace_.dx_psi0(s);
            qv[i] = trace_.psi0(s);
        }
        const TailFit B = tf.fit(bv), Qf = tf.fit(qv);
        const double U = ax / std::sqrt(ell);
        const Moments mo = fresnel_moments(U);
        si.val += tail_sum(B, mo, ax, ell, 1) + I * x * tail_sum(Qf, mo, ax, ell, 0);
        si.dx += I * tail_sum(Qf, mo, ax, ell, 0) + I * x * tail_sum(B, mo, ax, ell, 0) -
                 x * x * tail_sum(Qf, mo, ax, ell, -1);
    }

    out.psi = h_minus(ctx_, x, t) + pref_minus_ * si.val;
    out.dpsi = dx_h_minus(ctx_, x, t) + pref_minus_ * si.dx;
    out.j = std::imag(std::conj(out.psi) * out.dpsi);
    return out;
}

WavefieldSample WavefieldEvaluator::sample_plus(double x, double t) const {
    WavefieldSample out;
    out.x = x;
    out.t = t;
    const double ax = x;

    const double base_len = ctx_.cfg.period / trace_.params().windows_per_period;
    const double ell = std::min({t, ax * ax / (2.0 * PHI_SPLIT), 0.5 * base_len});
    const double scap = t - ell;

    SideIntegrals si{0.0, 0.0};
    thread_local std::vector<double> xs, ws;

    for (const auto& w : trace_.windows()) {
        if (w.t0 >= scap) break;
        const double cap = std::min(w.t1, scap);
        const double dphi = 0.5 * ax * ax * (1.0 / (t - cap) - 1.0 / (t - w.t0));
        const bool far_ok = (cap == w.t1) && (t - w.t1 >= 0.25 * w.len()) && (dphi < 0.5);
        if (far_ok) {
            for (size_t q = 0; q < w.fs.size(); ++q) {
                const double u = w.fs[q];
                accum_right(ctx_, x, u, t, t - u, w.fpsi0[q], w.fdx[q],
                            w.fw[q] / std::sqrt(t - u), si);
            }
            continue;
        }
        double lo_u = w.t0;
        if (w.sqrt_basis) {
            const double m0 = 0.5 * std::min(cap, w.t1);
            const int n = trace_.params().n_near;
            legendre_mapped(n, 0.0, std::sqrt(m0), xs, ws);
            for (int q = 0; q < n; ++q) {
                const double v = xs[q], u = v * v;
                accum_right(ctx_, x, u, t, t - u, trace_.psi0(u), trace_.dx_psi0(u),
                            ws[q] * 2.0 * v / std::sqrt(t - u), si);
            }
            lo_u = m0;
        }
        const double sg_lo = (cap == scap) ? std::sqrt(ell) : std::sqrt(t - cap);
        const double sg_hi = std::sqrt(t - lo_u);
        if (sg_hi <= sg_lo) continue;
        thread_local std::vector<double> pb;
        fresnel_panels(ax, sg_lo, sg_hi, pb);
        for (size_t pn = 0; pn + 1 < pb.size(); ++pn) {
            const int n = trace_.params().n_near;
            legendre_mapped(n, pb[pn], pb[pn + 1], xs, ws);
            for (int q = 0; q < n; ++q) {
                const double sg = xs[q];
                const double u = std::clamp(t - sg * sg, 0.0, cap);
                accum_right(ctx_, x, u, t, sg * sg, trace_.psi0(u), trace_.dx_psi0(u),
                            ws[q] * 2.0, si);
            }
        }
    }

    if (ell > 0.0 && ax > 0.0) {
        // local fits of the slow amplitudes times e^{i r(s)}
        const auto& tf = tail_fitter();
        std::array<cplx, TAIL_DEG + 1> Bv, Qv, Bdv, Qdv;
        for (int i = 0; i <= TAIL_DEG; ++i) {
            const double s = t - ell * tf.nodes()[i];
            const double dcd = dcos_over_dt(ctx_, s, t);
            const double r = f_phase(ctx_, s, t) + x * ctx_.E_over_w2 * dcd;
            const cplx eir = std::polar(1.0, r);
            const cplx p0v = trace_.psi0(s), d0v = trace_.dx_psi0(s);
            const cplx C = gamma_plus_bounded(ctx_, s, t, p0v, d0v);
            const double dxr = ctx_.E_over_w2 * dcd;
            Bv[i] = C * eir;
            Qv[i] = p0v * eir;
            Bdv[i] = C * dxr * eir;
            Qdv[i] = p0v * dxr * eir;
        }
        const TailFit B = tf.fit(Bv), Qf = tf.fit(Qv), Bd = tf.fit(Bdv), Qd = tf.fit(Qdv);
        const double U = ax / std::sqrt(ell);
        const Moments mo = fresnel_moments(U);
        si.val += tail_sum(B, mo, ax, ell, 1) + x * tail_sum(Qf, mo, ax, ell, 0);
        si.dx += tail_sum(Qf, mo, ax, ell, 0)            // psi0/delta
                 + I * tail_sum(Bd, mo, ax, ell, 1)      // i C dxr
                 + I * x * tail_sum(B, mo, ax, ell, 0)   // i x C /delta
                 + I * x * tail_sum(Qd, mo, ax, ell, 0)  // i x psi0 dxr /delta
                 + I * x * x * tail_sum(Qf, mo, ax, ell, -1); // i x^2 psi0/delta^2
    }

    const double gauge_arg = ctx_.E_over_w * x * std::sin(ctx_.omega * t);
    const cplx gauge = std::polar(1.0, gauge_arg);
    const cplx Ipart = pref_plus_ * si.val;
    out.psi = h_plus(ctx_, x, t) + gauge * Ipart;
    out.dpsi = dx_h_plus(ctx_, x, t) +
               I * ctx_.E_over_w * std::sin(ctx_.omega * t) * gauge * Ipart +
               gauge * pref_plus_ * si.dx;
    out.j = std::imag(std::conj(out.psi) * out.dpsi);
    return out;
}

WavefieldSample WavefieldEvaluator::sample(double x, double t) const {
    if (!(t >= 0.0)) throw validation_error("wavefield: t must be >= 0");
    if (t > trace_.t_end() * (1.0 + 1e-12))
        throw validation_error("wavefield: t beyond the solved trace");
    if (t == 0.0) {
        WavefieldSample s;
        s.x = x;
        s.t = 0.0;
        s.psi = phi0(ctx_, x);
        const cplx ik(0.0, ctx_.k);
        s.dpsi = (x < 0.0) ? ik * std::exp(ik * x) - ik * ctx_.refl * std::exp(-ik * x)
                           : -ctx_.kappa * ctx_.trans * std::exp(-ctx_.kappa * x);
        s.j = std::imag(std::conj(s.psi) * s.dpsi);
        return s;
    }
    if (x == 0.0) {
        WavefieldSample s;
        s.x = 0.0;
        s.t = t;
        s.psi = trace_.psi0(t);
        s.dpsi = trace_.dx_psi0(t);
        s.j = std::imag(std::conj(s.psi) * s.dpsi);
        return s;
    }
    return x < 0.0 ? sample_minus(x, t) : sample_plus(x, t);
}

cplx WavefieldEvaluator::psi(double x, double t) const { return sample(x, t).psi; }
cplx WavefieldEvaluator::dpsi_dx(double x, double t) const { return sample(x, t).dpsi; }
double WavefieldEvaluator::current(double x, double t) const { return sample(x, t).j; }

cplx psi_minus(const WavefieldEvaluator& ev, double x, double t) {
    if (x > 0.0) throw validation_error("psi_minus: requires x <= 0");
    return ev.psi(x, t);
}
cplx psi_plus(const WavefieldEvaluator& ev, double x, double t) {
    if (x < 0.0) throw validation_error("psi_plus: requires x >= 0");
    return ev.psi(x, t);
}

} // namespace pem
