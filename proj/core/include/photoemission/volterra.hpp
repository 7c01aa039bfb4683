#ifndef PHOTOEMISSION_VOLTERRA_HPP
#define PHOTOEMISSION_VOLTERRA_HPP

#include "photoemission/chebyshev.hpp"
#include "photoemission/kernels.hpp"

#include <vector>

namespace pem {

struct SolverParams {
    int windows_per_period = 16; // uniform window length tau / this
    int degree = 32;             // Chebyshev degree per window
    int ramp_levels = 4;         // first window tau/16/2^4 = tau/256, doubling ramp
    int n_far = 24;              // quadrature points per well-separated window
    int n_near = 32;             // sigma-substitution points near the singular end
    int n_theta = 48;            // theta-rule points on the sqrt(t) window
    int n_abel = 24;             // Abel-history quadrature points
    double residual_guard = 1e-6; // solve() fails above this (diagnostic probes)
    bool check_residual = true;

    SolverParams refined() const {
        SolverParams p = *this;
        p.windows_per_period *= 2;
        p.degree *= 2;
        p.n_far *= 2;
        p.n_near *= 2;
        p.n_theta *= 2;
        p.n_abel *= 2;
        return p;
    }
};

// One collocation window of the boundary trace. Window 0 stores its series
// in the variable v = sqrt(t) (the solution starts with half-integer powers
// of t); all other windows use t directly.
struct TraceWindow {
    double t0 = 0.0, t1 = 0.0;
    bool sqrt_basis = false;
    ChebyshevSeries psi0;   // psi(0,t)
    ChebyshevSeries Q;      // int_0^t psi0(u) (t-u)^{-1/2} du
    ChebyshevSeries Qh;     // same Abel transform of h_-(0, .)
    ChebyshevSeries hm;     // h_-(0, t)
    ChebyshevSeries dxpsi0; // d/dx psi(x,t) at x = 0
    ChebyshevSeries dps;    // d psi0 / d(local coordinate)
    ChebyshevSeries dhm;    // d hm / d(local coordinate)

    // cached quadrature nodes/weights for integrals against this window when
    // the singular point lies well outside; weights carry all jacobians.
    std::vector<double> fs, fw;
    std::vector<cplx> fpsi0, fQ, fQh, fhm, fdx;

    double coord(double t) const { return sqrt_basis ? std::sqrt(t) : t; }
    double len() const { return t1 - t0; }
};

struct SolveDiagnostics {
    double max_window_jump = 0.0;   // continuity defect across window seams
    double max_tail_fraction = 0.0; // trailing-coefficient diagnostic
    double max_probe_residual = 0.0;
    double wall_seconds = 0.0;
};

class BoundaryTrace {
public:
    BoundaryTrace(const PhysicalConfig& cfg, SolverParams params)
        : ctx_(cfg), params_(params) {}

    const KernelContext& ctx() const { return ctx_; }
    const SolverParams& params() const { return params_; }
    const std::vector<TraceWindow>& windows() const { return windows_; }
    std::vector<TraceWindow>& windows() { return windows_; }
    const SolveDiagnostics& diagnostics() const { return diag_; }
    SolveDiagnostics& diagnostics() { return diag_; }

    double t_end() const { return windows_.empty() ? 0.0 : windows_.back().t1; }
    int window_index(double t) const;

    cplx psi0(double t) const;
    cplx dx_psi0(double t) const;
    double current0(double t) const; // j(0,t) = Im(conj(psi0) dx_psi0)
    cplx q_abel(double t) const;     // Abel transform of psi0
    cplx qh_abel(double t) const;
    cplx hminus0(double t) const;

    // d psi0 / dt at t = 0+ (the analytic drift of the onset).
    cplx dpsi0_dt_at0() const;

    // test hook: scales the psi0/Q channels (apply_L is linear in them)
    void scale_psi_channels_for_test(cplx factor);

private:
    KernelContext ctx_;
    SolverParams params_;
    std::vector<TraceWindow> windows_;
    SolveDiagnostics diag_;
};

// Marches the collocation solve of  psi0 = h + L psi0  to time T.
BoundaryTrace solve_boundary(const PhysicalConfig& cfg, double T,
                             const SolverParams& params = SolverParams());

// (L psi0)(t) for a solved (or test-scaled) trace covering [0, t].
cplx apply_L(const BoundaryTrace& trace, double t);

// Source term h(t) = h_+(0,t) + h_-(0,t) - (1/pi) int_0^t Qh(s) g(s,t) ds.
// With check_convergence the quadrature orders are doubled and the two
// values compared; disagreement beyond tol raises accuracy_error.
cplx h_source(const BoundaryTrace& trace, double t, bool check_convergence = false,
              double tol = 1e-9);

// max_t |psi0(t) - h(t) - (L psi0)(t)| over the given samples.
double residual_max(const BoundaryTrace& trace, const std::vector<double>& ts);

} // namespace pem

#endif
