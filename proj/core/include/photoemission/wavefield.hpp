#ifndef PHOTOEMISSION_WAVEFIELD_HPP
#define PHOTOEMISSION_WAVEFIELD_HPP

#include "photoemission/volterra.hpp"

namespace pem {

struct WavefieldSample {
    double x = 0.0, t = 0.0;
    cplx psi;
    cplx dpsi; // d psi / dx
    double j;  // Im(conj(psi) dpsi)
};

// Reconstructs psi(x,t) on both sides of the interface from the solved
// boundary trace. Evaluations are independent and thread-safe.
class WavefieldEvaluator {
public:
    explicit WavefieldEvaluator(const BoundaryTrace& trace);

    cplx psi(double x, double t) const;
    cplx dpsi_dx(double x, double t) const;
    double current(double x, double t) const;
    // psi and dpsi in one pass (they share all quadratures).
    WavefieldSample sample(double x, double t) const;

private:
    const BoundaryTrace& trace_;
    const KernelContext& ctx_;
    cplx pref_minus_, pref_plus_;

    WavefieldSample sample_minus(double x, double t) const;
    WavefieldSample sample_plus(double x, double t) const;
};

// Convenience wrappers matching the reconstruction formulas.
cplx psi_minus(const WavefieldEvaluator& ev, double x, double t); // x <= 0
cplx psi_plus(const WavefieldEvaluator& ev, double x, double t);  // x >= 0

} // namespace pem

#endif
