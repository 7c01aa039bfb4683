#include "photoemission/volterra.hpp"
#include "photoemission/errors.hpp"
#include "photoemission/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>

namespace pem {

namespace {

const cplx I(0.0, 1.0);
constexpr double INV_2PI = 1.0 / (2.0 * M_PI);
constexpr double INV_PI = 1.0 / M_PI;

// All kernel factors of the combined right-hand-side integrand at one (s,t):
//   F(s,t) = pref_L1 psi0(s) alpha e^{if} + G(s,t) [Q(s)/(2pi) - Qh(s)/pi]
// evaluated against the weight (t-s)^{-1/2}.
struct KernelPoint {
    double alpha;
    cplx pref_eif; // pref_L1 * alpha * e^{if}
    cplx G;
};

inline KernelPoint kernel_point(const KernelContext& c, double s, double t) {
    const double w = c.omega, dt = t - s;
    const double hs = 0.5 * w * (t + s), hd = 0.5 * w * dt;
    const double sh = std::sin(hs);
    const double sd = std::sin(hd), cd = std::cos(hd);
    const double sws = std::sin(w * s);
    const double sinc_hd = (std::abs(hd) < 1e-6) ? 1.0 - hd * hd / 6.0 : sd / hd;

    KernelPoint kp;
    kp.alpha = sws - sh * sinc_hd;

    const double first =
        (dt == 0.0) ? 0.0
                    : 2.0 * c.E * c.E / (w * w * w * w) * sh * sh * sd * sd / dt;
    const double cos_sum = 1.0 - 2.0 * sh * sh;   // cos(w(t+s))
    const double sin_wdt = 2.0 * sd * cd;         // sin(w dt)
    const double f = first - c.U_plus_Up * dt + c.E2_8w3 * 2.0 * cos_sum * sin_wdt;
    const double dsf = c.U + 0.5 * c.E * c.E / (w * w) * kp.alpha * kp.alpha;

    const double sf2 = std::sin(0.5 * f), cf2 = std::cos(0.5 * f);
    const double sf = 2.0 * sf2 * cf2;
    const cplx eif(1.0 - 2.0 * sf2 * sf2, sf);
    kp.pref_eif = c.pref_L1 * kp.alpha * eif;
    if (dt < 1e-13 * (std::abs(t) + 1.0)) {
        kp.G = cplx(0.0, 0.5 * dsf);
    } else {
        // e^{if} - 1 = -2 sin^2(f/2) + i sin f
        kp.G = cplx(-2.0 * sf2 * sf2, sf) / (2.0 * dt) + I * dsf * eif;
    }
    return kp;
}


struct Scratch {
    std::vector<double> x1, w1, x2, w2, card;
};
Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

// Generic integral of  F(u) (tref-u)^{-1/2}  over one window (clipped at
// tref). Fval(u) must evaluate the smooth numerator; Fcached(q) may be used
// when use_cache says the nodes are the window's cached far nodes.
template <class FVal, class FCached>
cplx window_integral(const TraceWindow& w, double tref, int n_near, int n_theta,
                     bool allow_cache, FVal&& Fval, FCached&& Fcached) {
    auto& sc = scratch();
    cplx acc = 0.0;
    const double upper = std::min(w.t1, tref);
    if (upper <= w.t0) return acc;

    if (w.sqrt_basis) {
        const double t1 = w.t1;
        if (tref <= t1 * (1.0 + 1e-12)) {
            // theta rule on [0, tref]: u = tref sin^2(th) absorbs both the
            // sqrt(u) structure of the trace and the right-end singularity
            legendre_mapped(n_theta, 0.0, 0.5 * M_PI, sc.x1, sc.w1);
            const double sq = std::sqrt(tref);
            for (int q = 0; q < n_theta; ++q) {
                const double sth = std::sin(sc.x1[q]);
                const double u = tref * sth * sth;
                acc += sc.w1[q] * 2.0 * sq * sth * Fval(std::min(u, tref));
            }
            return acc;
        }
        if (tref < 1.25 * t1 || !allow_cache) {
            // [0, t1/2] in v = sqrt(u); [t1/2, t1] in sigma = sqrt(tref-u)
            const double mid = 0.5 * t1;
            legendre_mapped(n_near, 0.0, std::sqrt(mid), sc.x1, sc.w1);
            for (int q = 0; q < n_near; ++q) {
                const double v = sc.x1[q], u = v * v;
                acc += sc.w1[q] * 2.0 * v / std::sqrt(tref - u) * Fval(u);
            }
            legendre_mapped(n_near, std::sqrt(tref - t1), std::sqrt(tref - mid), sc.x2, sc.w2);
            for (int q = 0; q < n_near; ++q) {
                const double sg = sc.x2[q], u = tref - sg * sg;
                acc += sc.w2[q] * 2.0 * Fval(u);
            }
            return acc;
        }
        for (size_t q = 0; q < w.fs.size(); ++q)
            acc += w.fw[q] / std::sqrt(tref - w.fs[q]) * Fcached(static_cast<int>(q));
        return acc;
    }

    if (tref <= w.t1 * (1.0 + 1e-15) || tref < w.t1 + 0.25 * w.len() || !allow_cache) {
        // sigma substitution over [t0, upper]
        const double lo = std::sqrt(std::max(0.0, tref - upper));
        const double hi = std::sqrt(tref - w.t0);
        if (hi <= lo) return acc;
        legendre_mapped(n_near, lo, hi, sc.x1, sc.w1);
        for (int q = 0; q < n_near; ++q) {
            const double sg = sc.x1[q];
            double u = tref - sg * sg;
            u = std::clamp(u, w.t0, upper);
            acc += sc.w1[q] * 2.0 * Fval(u);
        }
        return acc;
    }
    for (size_t q = 0; q < w.fs.size(); ++q)
        acc += w.fw[q] / std::sqrt(tref - w.fs[q]) * Fcached(static_cast<int>(q));
    return acc;
}

// Combined RHS integrand over one window with known trace data.
cplx integrate_window_rhs(const BoundaryTrace& tr, const TraceWindow& w, double tref,
                          double wpsi, double wQ, double wQh, bool fresh_eval = false) {
    const KernelContext& ctx = tr.ctx();
    const SolverParams& p = tr.params();
    const int n_near = fresh_eval ? 2 * p.n_near : p.n_near;
    const int n_theta = fresh_eval ? 2 * p.n_theta : p.n_theta;
    auto Fval = [&](double u) -> cplx {
        KernelPoint kp = kernel_point(ctx, u, tref);
        cplx val = 0.0;
        if (wpsi != 0.0) val += wpsi * kp.pref_eif * w.psi0.eval_unchecked(w.coord(u));
        cplx qc = 0.0;
        if (wQ != 0.0) qc += wQ * INV_2PI * w.Q.eval_unchecked(w.coord(u));
        if (wQh != 0.0) qc -= wQh * INV_PI * w.Qh.eval_unchecked(w.coord(u));
        val += kp.G * qc;
        return val;
    };
    auto Fcached = [&](int q) -> cplx {
        KernelPoint kp = kernel_point(ctx, w.fs[q], tref);
        cplx val = 0.0;
        if (wpsi != 0.0) val += wpsi * kp.pref_eif * w.fpsi0[q];
        cplx qc = 0.0;
        if (wQ != 0.0) qc += wQ * INV_2PI * w.fQ[q];
        if (wQh != 0.0) qc -= wQh * INV_PI * w.fQh[q];
        val += kp.G * qc;
        return val;
    };
    return window_integral(w, tref, n_near, n_theta, !fresh_eval, Fval, Fcached);
}

// Abel transform contribution of one window: int f(u) (s-u)^{-1/2} du,
// where f is the window's psi0 (sel = 0) or h_-(0,.) fit (sel = 1).
cplx integrate_window_abel(const BoundaryTrace& tr, const TraceWindow& w, double s, int sel) {
    const SolverParams& p = tr.params();
    auto Fval = [&](double u) -> cplx {
        return sel == 0 ? w.psi0.eval_unchecked(w.coord(u)) : w.hm.eval_unchecked(w.coord(u));
    };
    auto Fcached = [&](int q) -> cplx { return sel == 0 ? w.fpsi0[q] : w.fhm[q]; };
    return window_integral(w, s, p.n_abel, p.n_theta, true, Fval, Fcached);
}

cplx rhs_all_windows(const BoundaryTrace& tr, double t, double wpsi, double wQ, double wQh,
                     bool fresh_eval = false) {
    cplx acc = 0.0;
    for (const auto& w : tr.windows()) {
        if (w.t0 >= t) break;
        acc += integrate_window_rhs(tr, w, t, wpsi, wQ, wQh, fresh_eval);
    }
    return acc;
}

std::vector<std::pair<double, double>> window_bounds(double T, double tau,
                                                     const SolverParams& p) {
    const double base = tau / p.windows_per_period;
    const double first = base / double(1 << p.ramp_levels);
    std::vector<std::pair<double, double>> bounds;
    double t = 0.0, len = first;
    // doubling ramp: first, first, 2 first, ... up to the uniform length
    int level = 0;
    const double t_eps = 1e-9 * std::max(T, base);
    while (t < T - t_eps) {
        double next = (t + len >= T - t_eps) ? T : t + len;
        bounds.emplace_back(t, next);
        t = next;
        if (level < p.ramp_levels) {
            if (level > 0) len *= 2.0;
            ++level;
        } else {
            len = base;
        }
    }
    return bounds;
}

} // namespace

int BoundaryTrace::window_index(double t) const {
    if (windows_.empty()) throw validation_error("trace: empty");
    const double slack = 1e-12 * (t_end() + 1.0);
    if (t < -slack || t > t_end() + slack)
        throw validation_error("trace: t outside the solved range");
    t = std::clamp(t, 0.0, t_end());
    int lo = 0, hi = static_cast<int>(windows_.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (windows_[mid].t1 < t)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

cplx BoundaryTrace::psi0(double t) const {
    const auto& w = windows_[window_index(t)];
    return w.psi0.eval_unchecked(w.coord(std::clamp(t, w.t0, w.t1)));
}
cplx BoundaryTrace::dx_psi0(double t) const {
    const auto& w = windows_[window_index(t)];
    return w.dxpsi0.eval_unchecked(w.coord(std::clamp(t, w.t0, w.t1)));
}
double BoundaryTrace::current0(double t) const {
    return std::imag(std::conj(psi0(t)) * dx_psi0(t));
}
cplx BoundaryTrace::q_abel(double t) const {
    const auto& w = windows_[window_index(t)];
    return w.Q.eval_unchecked(w.coord(std::clamp(t, w.t0, w.t1)));
}
cplx BoundaryTrace::qh_abel(double t) const {
    const auto& w = windows_[window_index(t)];
    return w.Qh.eval_unchecked(w.coord(std::clamp(t, w.t0, w.t1)));
}
cplx BoundaryTrace::hminus0(double t) const {
    const auto& w = windows_[window_index(t)];
    return w.hm.eval_unchecked(w.coord(std::clamp(t, w.t0, w.t1)));
}

cplx BoundaryTrace::dpsi0_dt_at0() const {
    const auto& w0 = windows_.front();
    // psi0 = series in v = sqrt(t); d psi/dt (0+) = psi_vv(0)/2
    return w0.psi0.derivative().derivative().eval_unchecked(0.0) * 0.5;
}

void BoundaryTrace::scale_psi_channels_for_test(cplx factor) {
    for (auto& w : windows_) {
        auto scale = [&](ChebyshevSeries& s) {
            std::vector<cplx> c = s.coef();
            for (auto& v : c) v *= factor;
            s = ChebyshevSeries(s.a(), s.b(), std::move(c));
        };
        scale(w.psi0);
        scale(w.Q);
        for (auto& v : w.fpsi0) v *= factor;
        for (auto& v : w.fQ) v *= factor;
    }
}

namespace {

// Abel transform of the window's own cardinal basis:
// A_k(s) = int_{t0}^{s} l_k(u) (s-u)^{-1/2} du, s inside the window.
// Uses its own local buffers so callers may hold scratch() rows.
void abel_cardinal_row(const TraceWindow& w, const std::vector<double>& loc_nodes, double s,
                       int n_aux, std::vector<double>& out) {
    const int N = static_cast<int>(loc_nodes.size());
    out.assign(N, 0.0);
    thread_local std::vector<double> xs, ws, card;
    card.resize(N);
    if (w.sqrt_basis) {
        // u = s sin^2(th), cardinal argument v = sqrt(s) sin(th)
        legendre_mapped(n_aux, 0.0, 0.5 * M_PI, xs, ws);
        const double sq = std::sqrt(s);
        for (int q = 0; q < n_aux; ++q) {
            const double sth = std::sin(xs[q]);
            chebyshev_cardinals(loc_nodes, std::min(sq * sth, loc_nodes.back()), card.data());
            const double wq = ws[q] * 2.0 * sq * sth;
            for (int k = 0; k < N; ++k) out[k] += wq * card[k];
        }
        return;
    }
    if (s <= w.t0) return;
    legendre_mapped(n_aux, 0.0, std::sqrt(s - w.t0), xs, ws);
    for (int q = 0; q < n_aux; ++q) {
        const double sg = xs[q];
        const double u = std::clamp(s - sg * sg, w.t0, w.t1);
        chebyshev_cardinals(loc_nodes, u, card.data());
        for (int k = 0; k < N; ++k) out[k] += ws[q] * 2.0 * card[k];
    }
}

// Quadrature order that integrates the cardinal Abel rows to roundoff.
int abel_row_order(const TraceWindow& w, const SolverParams& p, int N) {
    return w.sqrt_basis ? std::max(p.n_theta, N + 2) : std::max(p.n_abel, N + 2);
}

void build_far_cache(TraceWindow& w, int n_far) {
    auto& x = w.fs;
    auto& wt = w.fw;
    std::vector<double> nodes, wq;
    if (w.sqrt_basis) {
        legendre_mapped(n_far, 0.0, std::sqrt(w.t1), nodes, wq);
        x.resize(n_far);
        wt.resize(n_far);
        for (int q = 0; q < n_far; ++q) {
            x[q] = nodes[q] * nodes[q];
            wt[q] = wq[q] * 2.0 * nodes[q];
        }
    } else {
        legendre_mapped(n_far, w.t0, w.t1, x, wt);
    }
    const int n = static_cast<int>(x.size());
    w.fpsi0.resize(n);
    w.fQ.resize(n);
    w.fQh.resize(n);
    w.fhm.resize(n);
    w.fdx.assign(n, 0.0);
    for (int q = 0; q < n; ++q) {
        const double c = w.coord(x[q]);
        w.fpsi0[q] = w.psi0.eval_unchecked(c);
        w.fQ[q] = w.Q.eval_unchecked(c);
        w.fQh[q] = w.Qh.eval_unchecked(c);
        w.fhm[q] = w.hm.eval_unchecked(c);
    }
}

// d/dt [Q - 2 Qh](t) = int_0^t (psi0' - 2 hm')(u) (t-u)^{-1/2} du: the
// t^{-1/2} boundary terms of the two Abel transforms cancel exactly since
// psi0(0) = 2 h_-(0,0). Integrating the differentiated series avoids the
// noise amplification of differentiating the fitted transforms.
cplx deriv_diff_eval(const TraceWindow& w, double u) {
    if (!w.sqrt_basis)
        return w.dps.eval_unchecked(u) - 2.0 * w.dhm.eval_unchecked(u);
    const double v = std::sqrt(u);
    // D ~ const/v near v = 0; the window quadratures carry a 2v jacobian
    return (w.dps.eval_unchecked(v) - 2.0 * w.dhm.eval_unchecked(v)) / (2.0 * v);
}

cplx abel_of_deriv(const BoundaryTrace& tr, double t) {
    const SolverParams& p = tr.params();
    cplx acc = 0.0;
    for (const auto& w : tr.windows()) {
        if (w.t0 >= t) break;
        auto Fval = [&](double u) { return deriv_diff_eval(w, u); };
        acc += window_integral(w, t, p.n_abel, p.n_theta, /*allow_cache=*/false, Fval, Fval);
    }
    return acc;
}

} // namespace

BoundaryTrace solve_boundary(const PhysicalConfig& cfg, double T, const SolverParams& params) {
    if (!(T > 0.0)) throw validation_error("solve_boundary: need T > 0");
    const auto t_start = std::chrono::steady_clock::now();

    BoundaryTrace trace(cfg, params);
    const KernelContext& ctx = trace.ctx();
    const int N = params.degree;
    const auto bounds = window_bounds(T, cfg.period, params);

    for (size_t j = 0; j < bounds.size(); ++j) {
        TraceWindow w;
        w.t0 = bounds[j].first;
        w.t1 = bounds[j].second;
        w.sqrt_basis = (j == 0);

        const double ca = w.sqrt_basis ? 0.0 : w.t0;
        const double cb = w.sqrt_basis ? std::sqrt(w.t1) : w.t1;
        const auto loc_nodes = ChebyshevSeries::nodes(N, ca, cb);
        std::vector<double> ts(N + 1);
        for (int i = 0; i <= N; ++i) ts[i] = w.sqrt_basis ? loc_nodes[i] * loc_nodes[i] : loc_nodes[i];

        // h_-(0,.) fit on this window
        {
            std::vector<cplx> hv(N + 1);
            for (int i = 0; i <= N; ++i) hv[i] = h_minus(ctx, 0.0, ts[i]);
            w.hm = ChebyshevSeries::fit(ca, cb, hv);
            w.dhm = w.hm.derivative();
        }

        // Qh on this window: Abel history over previous windows plus the
        // fresh part over [t0, t_i]
        {
            std::vector<cplx> qh(N + 1);
            std::vector<double> arow;
            std::vector<cplx> hm_nodes(N + 1);
            for (int i = 0; i <= N; ++i) hm_nodes[i] = w.hm.eval_unchecked(loc_nodes[i]);
            for (int i = 0; i <= N; ++i) {
                cplx acc = 0.0;
                for (size_t p = 0; p < j; ++p)
                    acc += integrate_window_abel(trace, trace.windows()[p], ts[i], 1);
                abel_cardinal_row(w, loc_nodes, ts[i], abel_row_order(w, params, N), arow);
                for (int k = 0; k <= N; ++k) acc += arow[k] * hm_nodes[k];
                qh[i] = acc;
            }
            w.Qh = ChebyshevSeries::fit(ca, cb, qh);
        }

        // Abel history of psi0 on this window. Its s-derivative blows up
        // like (s - t0)^{-1/2} at the left edge, so it is fitted in the
        // variable mu = sqrt(s - t0) where it is analytic. Window 0 has no
        // history.
        const double mu_max = std::sqrt(w.t1 - w.t0);
        ChebyshevSeries Qhist(0.0, mu_max, std::vector<cplx>{0.0, 0.0});
        if (j > 0) {
            auto mu_nodes = ChebyshevSeries::nodes(N, 0.0, mu_max);
            std::vector<cplx> qv(N + 1, cplx(0.0));
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i <= N; ++i) {
                const double s = w.t0 + mu_nodes[i] * mu_nodes[i];
                for (size_t p = 0; p < j; ++p)
                    qv[i] += integrate_window_abel(trace, trace.windows()[p], s, 0);
            }
            Qhist = ChebyshevSeries::fit(0.0, mu_max, qv);
        }
        auto qhist_at = [&](double u) -> cplx {
            if (j == 0) return cplx(0.0);
            return Qhist.eval_unchecked(std::sqrt(std::max(0.0, u - w.t0)));
        };

        // collocation system
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N + 1, N + 1);
        Eigen::VectorXcd rhs(N + 1);

#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i <= N; ++i) {
            const double ti = ts[i];
            cplx b = h_plus(ctx, 0.0, ti) + h_minus(ctx, 0.0, ti);
            for (size_t p = 0; p < j; ++p)
                b += integrate_window_rhs(trace, trace.windows()[p], ti, 1.0, 1.0, 1.0);

            if (i > 0 || j > 0) {
                // Current-window quadrature: unknown psi0 and its Abel rows,
                // known Qhist and Qh. The Abel rows behave like
                // sqrt(u - t0) at the left edge, so the regular-window
                // integral is split at the midpoint: mu = sqrt(u - t0) on
                // the left half, sigma = sqrt(ti - u) on the right. The
                // theta rule of window 0 absorbs both ends at once.
                std::vector<double> xs, wsq, card(N + 1), arow(N + 1);
                auto add_point = [&](double u, double wq, cplx& acc) {
                    if (wq == 0.0) return;
                    u = std::clamp(u, w.t0, ti);
                    KernelPoint kp = kernel_point(ctx, u, ti);
                    cplx qc_known = INV_2PI * qhist_at(u) -
                                    INV_PI * w.Qh.eval_unchecked(w.coord(u));
                    acc += wq * kp.G * qc_known;
                    chebyshev_cardinals(loc_nodes, w.coord(u), card.data());
                    abel_cardinal_row(w, loc_nodes, u, abel_row_order(w, params, N), arow);
                    for (int k = 0; k <= N; ++k)
                        M(i, k) -= wq * (kp.pref_eif * card[k] + kp.G * INV_2PI * arow[k]);
                };
                if (w.sqrt_basis) {
                    legendre_mapped(params.n_theta, 0.0, 0.5 * M_PI, xs, wsq);
                    const double sq = std::sqrt(ti);
                    for (int q = 0; q < params.n_theta; ++q) {
                        const double sth = std::sin(xs[q]);
                        add_point(ti * sth * sth, wsq[q] * 2.0 * sq * sth, b);
                    }
                } else if (ti > w.t0) {
                    const double mid = 0.5 * (w.t0 + ti);
                    legendre_mapped(params.n_near, 0.0, std::sqrt(mid - w.t0), xs, wsq);
                    for (int q = 0; q < params.n_near; ++q) {
                        const double mu = xs[q], u = w.t0 + mu * mu;
                        add_point(u, wsq[q] * 2.0 * mu / std::sqrt(ti - u), b);
                    }
                    legendre_mapped(params.n_near, 0.0, std::sqrt(ti - mid), xs, wsq);
                    for (int q = 0; q < params.n_near; ++q)
                        add_point(ti - xs[q] * xs[q], wsq[q] * 2.0, b);
                }
            }
            rhs(i) = b;
        }

        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
        Eigen::VectorXcd c = lu.solve(rhs);
        const double relerr = (M * c - rhs).norm() / std::max(1e-300, rhs.norm());
        if (!c.allFinite() || relerr > 1e-9)
            throw solver_error("solve_boundary: window " + std::to_string(j) +
                               " linear solve failed (relative defect " +
                               std::to_string(relerr) + ")");

        // continuity with the previous window
        if (j > 0) {
            cplx prev = trace.psi0(w.t0);
            trace.diagnostics().max_window_jump =
                std::max(trace.diagnostics().max_window_jump, std::abs(prev - c(0)));
        }

        std::vector<cplx> cv(c.data(), c.data() + N + 1);
        w.psi0 = ChebyshevSeries::fit(ca, cb, cv);
        w.dps = w.psi0.derivative();

        // full Abel transform of psi0 on this window (history + fresh part
        // recombine into a smooth function of the window coordinate)
        {
            std::vector<cplx> qv(N + 1);
            std::vector<double> arow;
            for (int i = 0; i <= N; ++i) {
                cplx acc = qhist_at(ts[i]);
                abel_cardinal_row(w, loc_nodes, ts[i], abel_row_order(w, params, N), arow);
                for (int k = 0; k <= N; ++k) acc += arow[k] * cv[k];
                qv[i] = acc;
            }
            w.Q = ChebyshevSeries::fit(ca, cb, qv);
        }

        trace.diagnostics().max_tail_fraction =
            std::max(trace.diagnostics().max_tail_fraction, w.psi0.tail_fraction(3));
        trace.windows().push_back(std::move(w));

        // derivative trace on this window, now that the trace covers it
        {
            TraceWindow& wb = trace.windows().back();
            std::vector<cplx> dval(N + 1);
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i <= N; ++i) {
                dval[i] = (ts[i] == 0.0) ? -ctx.kappa * ctx.trans
                                         : ctx.half_deriv * abel_of_deriv(trace, ts[i]);
            }
            wb.dxpsi0 = ChebyshevSeries::fit(ca, cb, dval);
            build_far_cache(wb, params.n_far);
            for (size_t q = 0; q < wb.fs.size(); ++q)
                wb.fdx[q] = wb.dxpsi0.eval_unchecked(wb.coord(wb.fs[q]));
        }
    }

    // spot-check the integral equation on a subsample of windows
    if (params.check_residual) {
        const auto& ws = trace.windows();
        const size_t stride = std::max<size_t>(1, ws.size() / 24);
        double worst = 0.0;
        for (size_t j = 0; j < ws.size(); j += stride) {
            const double t = 0.5 * (ws[j].t0 + ws[j].t1);
            const cplx lhs = trace.psi0(t);
            const cplx rhs_v = h_plus(trace.ctx(), 0.0, t) + h_minus(trace.ctx(), 0.0, t) +
                               rhs_all_windows(trace, t, 1.0, 1.0, 1.0);
            worst = std::max(worst, std::abs(lhs - rhs_v));
        }
        trace.diagnostics().max_probe_residual = worst;
        if (worst > params.residual_guard)
            throw solver_error("solve_boundary: residual probe " + std::to_string(worst) +
                               " above guard " + std::to_string(params.residual_guard));
    }

    trace.diagnostics().wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return trace;
}

cplx apply_L(const BoundaryTrace& trace, double t) {
    if (t < 0.0 || t > trace.t_end() * (1.0 + 1e-12))
        throw validation_error("apply_L: trace does not cover t");
    if (t == 0.0) return 0.0;
    return rhs_all_windows(trace, t, 1.0, 1.0, 0.0);
}

cplx h_source(const BoundaryTrace& trace, double t, bool check_convergence, double tol) {
    if (t < 0.0 || t > trace.t_end() * (1.0 + 1e-12))
        throw validation_error("h_source: trace does not cover t");
    const KernelContext& ctx = trace.ctx();
    cplx base = h_plus(ctx, 0.0, t) + h_minus(ctx, 0.0, t);
    if (t == 0.0) return base;
    cplx val = base + rhs_all_windows(trace, t, 0.0, 0.0, 1.0);
    if (check_convergence) {
        cplx fine = base + rhs_all_windows(trace, t, 0.0, 0.0, 1.0, /*fresh_eval=*/true);
        if (std::abs(fine - val) > tol)
            throw accuracy_error("h_source: quadrature for h(t) not converged at t = " +
                                 std::to_string(t) + " (delta " +
                                 std::to_string(std::abs(fine - val)) + ")");
        val = fine;
    }
    return val;
}

double residual_max(const BoundaryTrace& trace, const std::vector<double>& ts) {
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        cplx r = trace.psi0(t) - h_plus(trace.ctx(), 0.0, t) - h_minus(trace.ctx(), 0.0, t) -
                 rhs_all_windows(trace, t, 1.0, 1.0, 1.0);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

} // namespace pem
