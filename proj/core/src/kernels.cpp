#include "photoemission/kernels.hpp"
#include "photoemission/errors.hpp"
#include "photoemission/faddeeva.hpp"

#include <cmath>
#include <string>

namespace pem {

namespace {
const cplx I(0.0, 1.0);
const double SQRT2PI = std::sqrt(2.0 * M_PI);

inline double sinc(double z) {
    if (std::abs(z) < 1e-6) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

inline void check_order(double s, double t, const char* who, bool strict) {
    if (s > t || (strict && s == t))
        throw validation_error(std::string(who) + ": requires s " + (strict ? "<" : "<=") +
                               " t");
}
} // namespace

KernelContext::KernelContext(const PhysicalConfig& c) : cfg(c) {
    E = c.E;
    omega = c.omega;
    U = c.U;
    k = c.k;
    kappa = c.kappa0();
    E_over_w = E / omega;
    E_over_w2 = E / (omega * omega);
    Up = E * E / (4.0 * omega * omega);
    E2_8w3 = E * E / (8.0 * omega * omega * omega);
    U_plus_Up = U + Up;
    cplx ik(0.0, k);
    refl = (ik + kappa) / (ik - kappa);
    trans = 2.0 * ik / (ik - kappa);
    // 1/sqrt(2 i pi) = e^{-i pi/4}/sqrt(2 pi)
    pref_L1 = E / (2.0 * omega * SQRT2PI) * std::polar(1.0, -M_PI / 4.0);
    half_deriv = std::sqrt(2.0 / M_PI) * std::polar(1.0, -M_PI / 4.0);
}

cplx phi0(const KernelContext& ctx, double x) {
    if (x < 0.0)
        return std::exp(I * ctx.k * x) + ctx.refl * std::exp(-I * ctx.k * x);
    return ctx.trans * std::exp(-ctx.kappa * x);
}

double dcos_over_dt(const KernelContext& ctx, double s, double t) {
    // (cos wt - cos ws)/(t-s) = -w sin(w(t+s)/2) sinc(w(t-s)/2)
    const double w = ctx.omega;
    return -w * std::sin(0.5 * w * (t + s)) * sinc(0.5 * w * (t - s));
}

double kernel_alpha(const KernelContext& ctx, double s, double t) {
    check_order(s, t, "alpha", false);
    return std::sin(ctx.omega * s) + dcos_over_dt(ctx, s, t) / ctx.omega;
}

double f_phase(const KernelContext& ctx, double s, double t) {
    check_order(s, t, "f_phase", false);
    const double w = ctx.omega, dt = t - s;
    const double sh = std::sin(0.5 * w * (t + s));
    const double sd = std::sin(0.5 * w * dt);
    // E^2 (cos wt - cos ws)^2 / (2 w^4 (t-s)) with the half-angle product;
    // sin^2(w dt/2)/dt stays finite on the diagonal.
    double first = (dt == 0.0) ? 0.0
                               : 2.0 * ctx.E * ctx.E / (w * w * w * w) * sh * sh * sd * sd / dt;
    double third = ctx.E2_8w3 * 2.0 * std::cos(w * (t + s)) * std::sin(w * dt);
    return first - ctx.U_plus_Up * dt + third;
}

double ds_f(const KernelContext& ctx, double s, double t) {
    const double a = kernel_alpha(ctx, s, t);
    return ctx.U + 0.5 * ctx.E * ctx.E / (ctx.omega * ctx.omega) * a * a;
}

cplx g_reduced(const KernelContext& ctx, double s, double t) {
    check_order(s, t, "g_reduced", false);
    const double dt = t - s;
    const double dsf = ds_f(ctx, s, t);
    if (dt < 1e-14 * (std::abs(t) + 1.0)) return 0.5 * I * dsf;
    const double f = f_phase(ctx, s, t);
    const double sf = std::sin(f), s2 = std::sin(0.5 * f);
    const cplx eif(std::cos(f), sf);
    // e^{if} - 1 = -2 sin^2(f/2) + i sin f, no cancellation
    const cplx em1(-2.0 * s2 * s2, sf);
    return em1 / (2.0 * dt) + I * dsf * eif;
}

cplx g_kernel(const KernelContext& ctx, double s, double t) {
    check_order(s, t, "g_kernel", true);
    return g_reduced(ctx, s, t) / std::sqrt(t - s);
}

double capital_F(const KernelContext& ctx, double x, double s, double t) {
    check_order(s, t, "capital_F", true);
    return f_phase(ctx, s, t) + x * ctx.E_over_w2 * dcos_over_dt(ctx, s, t) +
           x * x / (2.0 * (t - s));
}

cplx gamma_plus_bounded(const KernelContext& ctx, double s, double t, cplx psi0v,
                        cplx dxpsi0v) {
    return -I * dxpsi0v +
           (ctx.E_over_w * std::sin(ctx.omega * s) + ctx.E_over_w2 * dcos_over_dt(ctx, s, t)) *
               psi0v;
}

cplx gamma_plus(const KernelContext& ctx, double s, double x, double t, cplx psi0v,
                cplx dxpsi0v) {
    check_order(s, t, "gamma_plus", true);
    return gamma_plus_bounded(ctx, s, t, psi0v, dxpsi0v) + x / (t - s) * psi0v;
}

cplx h_minus(const KernelContext& ctx, double x, double t) {
    if (x > 0.0) throw validation_error("h_minus: requires x <= 0");
    if (t < 0.0) throw validation_error("h_minus: requires t >= 0");
    if (t == 0.0) return (x == 0.0) ? 0.5 * ctx.trans : phi0(ctx, x);
    const cplx rot = std::polar(1.0, -M_PI / 4.0);
    const double sq = std::sqrt(0.5 * t), sq2t = std::sqrt(2.0 * t);
    const cplx w1 = rot * (-sq * ctx.k + x / sq2t);
    const cplx w2 = rot * (sq * ctx.k + x / sq2t);
    const cplx phase = std::exp(-I * (0.5 * ctx.k * ctx.k * t));
    return 0.5 * phase *
           (std::exp(I * ctx.k * x) * erfc_complex(w1) +
            ctx.refl * std::exp(-I * ctx.k * x) * erfc_complex(w2));
}

cplx dx_h_minus(const KernelContext& ctx, double x, double t) {
    if (x > 0.0) throw validation_error("dx_h_minus: requires x <= 0");
    if (t <= 0.0) {
        cplx ik(0.0, ctx.k);
        cplx v = ik * std::exp(ik * x) - ik * ctx.refl * std::exp(-ik * x);
        return (t == 0.0 && x == 0.0) ? 0.5 * v : v;
    }
    const cplx rot = std::polar(1.0, -M_PI / 4.0);
    const double sq = std::sqrt(0.5 * t), sq2t = std::sqrt(2.0 * t);
    const cplx w1 = rot * (-sq * ctx.k + x / sq2t);
    const cplx w2 = rot * (sq * ctx.k + x / sq2t);
    const cplx phase = std::exp(-I * (0.5 * ctx.k * ctx.k * t));
    const cplx ik(0.0, ctx.k);
    const cplx derf = -2.0 / std::sqrt(M_PI) * rot / sq2t; // d/dx of the erfc arguments
    return 0.5 * phase *
           (std::exp(ik * x) * (ik * erfc_complex(w1) + derf * std::exp(-w1 * w1)) +
            ctx.refl * std::exp(-ik * x) *
                (-ik * erfc_complex(w2) + derf * std::exp(-w2 * w2)));
}

namespace {
// Shared pieces of h_plus and its derivative. The growing exponential in
// the prefactor cancels Re(w^2) of the erfc argument exactly, so everything
// is evaluated through erfcx and a purely imaginary residual phase.
struct HPlusParts {
    cplx w;          // erfc argument
    double re_w;     // its real part
    double im_PmW2;  // Im(P - w^2); Re(P - w^2) = 0 analytically
    double re_P;     // Re(P) = kappa (E/w^2)(1-cos wt) - kappa x
    double im_P;
};

HPlusParts hplus_parts(const KernelContext& ctx, double x, double t) {
    const double a = std::sqrt(0.5 * t) * ctx.kappa;
    const double onemc = 1.0 - std::cos(ctx.omega * t);
    const double b = ctx.E_over_w2 * onemc / std::sqrt(2.0 * t);
    const double c = x / std::sqrt(2.0 * t);
    HPlusParts p;
    const cplx rot = std::polar(1.0, -M_PI / 4.0);
    p.w = rot * (cplx(0.0, a) + (b - c));
    p.re_w = (a + (b - c)) / std::sqrt(2.0);
    // w^2 = 2a(b-c) - i((b-c)^2 - a^2); Re(w^2) = 2a(b-c) equals the growing
    // part of Re(P) up to the -kappa x term, which both sides carry.
    const double im_w2 = -((b - c) * (b - c) - a * a);
    p.re_P = ctx.kappa * ctx.E_over_w2 * onemc - ctx.kappa * x;
    p.im_P = ctx.E_over_w * std::sin(ctx.omega * t) * x -
             (0.5 * ctx.k * ctx.k + ctx.Up) * t + ctx.E2_8w3 * std::sin(2.0 * ctx.omega * t);
    p.im_PmW2 = p.im_P - im_w2;
    return p;
}
} // namespace

cplx h_plus(const KernelContext& ctx, double x, double t) {
    if (x < 0.0) throw validation_error("h_plus: requires x >= 0");
    if (t < 0.0) throw validation_error("h_plus: requires t >= 0");
    if (t == 0.0) return (x == 0.0) ? 0.5 * ctx.trans : phi0(ctx, x);
    const cplx pre = 0.5 * ctx.trans;
    const auto p = hplus_parts(ctx, x, t);
    const cplx rot_phase = std::exp(cplx(0.0, p.im_PmW2));
    if (p.re_w >= 0.0) return pre * rot_phase * erfcx_complex(p.w);
    // erfc(w) = 2 - erfc(-w); Re(P) < 0 here so e^P stays bounded
    return 2.0 * pre * std::exp(cplx(p.re_P, p.im_P)) - pre * rot_phase * erfcx_complex(-p.w);
}

cplx dx_h_plus(const KernelContext& ctx, double x, double t) {
    if (x < 0.0) throw validation_error("dx_h_plus: requires x >= 0");
    if (t <= 0.0) {
        cplx v = -ctx.kappa * ctx.trans * std::exp(-ctx.kappa * x);
        return (t == 0.0 && x == 0.0) ? 0.5 * v : v;
    }
    const auto p = hplus_parts(ctx, x, t);
    // d/dx [prefactor phases] = i (E/w) sin(wt) - kappa, and
    // d/dx erfc(w) = -(2/sqrt(pi)) e^{-w^2} dw/dx with dw/dx = -rot/sqrt(2t);
    // e^{P} e^{-w^2} = e^{i Im(P - w^2)} exactly.
    const cplx dlog = cplx(-ctx.kappa, ctx.E_over_w * std::sin(ctx.omega * t));
    const cplx rot = std::polar(1.0, -M_PI / 4.0);
    const cplx pre = 0.5 * ctx.trans;
    return dlog * h_plus(ctx, x, t) +
           pre * (2.0 / std::sqrt(M_PI)) * rot / std::sqrt(2.0 * t) *
               std::exp(cplx(0.0, p.im_PmW2));
}

} // namespace pem
