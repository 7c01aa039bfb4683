#ifndef PHOTOEMISSION_KERNELS_HPP
#define PHOTOEMISSION_KERNELS_HPP

#include "photoemission/units.hpp"

#include <complex>

namespace pem {

using cplx = std::complex<double>;

// Precomputed constants for the boundary-integral kernels. The potential
// height entering the phase f is the step height U (the field-free limit
// and the stationary solution force this identification).
struct KernelContext {
    PhysicalConfig cfg;
    double E, omega, U, k, kappa;
    double E_over_w;   // E / omega
    double E_over_w2;  // E / omega^2
    double Up;         // E^2 / (4 omega^2), ponderomotive
    double E2_8w3;     // E^2 / (8 omega^3)
    double U_plus_Up;  // U + Up
    cplx refl;         // (ik + kappa)/(ik - kappa)
    cplx trans;        // 2ik/(ik - kappa) = phi0(0)
    cplx pref_L1;      // E/(2 w sqrt(2 i pi)), prefactor of the first term of L
    cplx half_deriv;   // sqrt(2/(i pi)), prefactor of the dx psi0 relation

    explicit KernelContext(const PhysicalConfig& c);
};

// Field-free scattering state: incoming e^{ikx} plus reflected wave for
// x < 0, evanescent tail for x > 0.
cplx phi0(const KernelContext& ctx, double x);

// alpha(s,t) = sin(ws) + (cos wt - cos ws)/(w (t-s)); removable at s = t.
double kernel_alpha(const KernelContext& ctx, double s, double t);

// Phase f(s,t); real, vanishes linearly on the diagonal.
double f_phase(const KernelContext& ctx, double s, double t);

// Analytic d f / d s = U + (E^2 / 2 w^2) alpha^2.
double ds_f(const KernelContext& ctx, double s, double t);

// G(s,t) = g(s,t) sqrt(t-s) = (e^{if}-1)/(2(t-s)) + i (ds f) e^{if};
// bounded up to the diagonal where it equals i U / 2.
cplx g_reduced(const KernelContext& ctx, double s, double t);

// Full kernel g(s,t) = G(s,t)/sqrt(t-s); requires s < t.
cplx g_kernel(const KernelContext& ctx, double s, double t);

// (cos wt - cos ws)/(t-s), stable half-angle form.
double dcos_over_dt(const KernelContext& ctx, double s, double t);

// F(x,s,t) = f(s,t) + x (E/w^2)(cos wt - cos ws)/(t-s) + x^2/(2(t-s));
// the phase of the x>0 reconstruction integrand, real. Requires s < t.
double capital_F(const KernelContext& ctx, double x, double s, double t);

// Gamma_+(s,x,t) for the x>0 reconstruction; psi0/dxpsi0 are trace values.
cplx gamma_plus(const KernelContext& ctx, double s, double x, double t, cplx psi0v,
                cplx dxpsi0v);
// Gamma_+ without the x/(t-s) psi0 term (the bounded part used by the
// oscillatory-tail split).
cplx gamma_plus_bounded(const KernelContext& ctx, double s, double t, cplx psi0v,
                        cplx dxpsi0v);

// Free evolution of the two halves of phi0, in closed erfc form.
// h_minus: x <= 0; h_plus: x >= 0. t = 0 returns the analytic limits
// (phi0 on the open half-lines, phi0(0)/2 at the interface).
cplx h_minus(const KernelContext& ctx, double x, double t);
cplx h_plus(const KernelContext& ctx, double x, double t);
// Spatial derivatives of the closed forms (t > 0; t = 0 gives the
// derivatives of the halved initial data).
cplx dx_h_minus(const KernelContext& ctx, double x, double t);
cplx dx_h_plus(const KernelContext& ctx, double x, double t);

} // namespace pem

#endif
