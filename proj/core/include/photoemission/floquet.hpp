#ifndef PHOTOEMISSION_FLOQUET_HPP
#define PHOTOEMISSION_FLOQUET_HPP

#include "photoemission/kernels.hpp"

#include <vector>

namespace pem {

// Scaled Fourier coefficient of the periodic channel factor: value is the
// coefficient of the unit-normalised generator, the true coefficient being
// value * exp(log_scale). Keeping the scale separate avoids overflow for
// deep closed channels where kappa E / w^2 is large.
struct ScaledCoeff {
    cplx value;
    double log_scale;
};

struct FloquetChannel {
    int m = 0;
    cplx kappa;       // sqrt(2U - k^2 + E^2/(2 w^2) - 2 m w), outgoing branch
    cplx pL;          // left momentum sqrt(k^2 + 2 m w), decaying branch if closed
    bool open_left = false;
    bool open_right = false;
    double pR = 0.0;  // sqrt(2(m w - w_c)) for open right channels
};

struct FloquetSolution {
    PhysicalConfig cfg;
    int N = 0; // harmonics m in [-N, N]
    std::vector<FloquetChannel> channels;
    std::vector<cplx> R;        // reflection amplitudes
    std::vector<cplx> T;        // transmission amplitudes (unscaled; may underflow to 0)
    std::vector<cplx> T_scaled; // T_m e^{Re kappa_m E/w^2}
    double flux_defect = 0.0;   // |k - sum p|R|^2 - sum pR |T|^2| / k
    double condition = 0.0;     // matching-system condition estimate

    const FloquetChannel& channel(int m) const { return channels[m + N]; }
    cplx refl(int m) const { return R[m + N]; }
    cplx trans(int m) const { return T[m + N]; }
};

// kappa_m with the outgoing/decaying branch convention.
cplx floquet_kappa(int m, const PhysicalConfig& cfg);

// Fourier coefficient g_q of the periodic factor of an x>0 channel with
// exponent kappa. Spectrally accurate trapezoidal quadrature over one
// period; the result is scaled as described above.
ScaledCoeff floquet_g_coeff(int q, cplx kappa, const PhysicalConfig& cfg);
// Unscaled value; throws accuracy_error if it would overflow.
cplx floquet_g_coeff_unscaled(int q, cplx kappa, const PhysicalConfig& cfg);

// Builds and solves the 2(2N+1) matching system at x = 0. N < 1 selects the
// truncation automatically (smallest N with converged amplitudes, capped).
FloquetSolution floquet_match(const PhysicalConfig& cfg, int N = -1);

// Long-time wavefunction psi(x,t) ~ e^{-i k^2 t/2} psi_bar(x,t).
cplx floquet_wave(const FloquetSolution& sol, double x, double t);

// Period-averaged transmitted current sum_open pR |T|^2 (x-independent).
double floquet_current(const FloquetSolution& sol);

// |i dt psi - (-1/2 dxx psi + Theta(x)(U - E x cos wt) psi)| at (x,t) by
// high-order finite differences; the a-posteriori check of the state.
double floquet_pde_residual(const FloquetSolution& sol, double x, double t);

} // namespace pem

#endif
