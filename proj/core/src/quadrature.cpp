#include "photoemission/quadrature.hpp"
#include "photoemission/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

namespace pem {

void QuadratureRule::map_to(double a, double b, std::vector<double>& xs,
                            std::vector<double>& ws) const {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    xs.resize(x.size());
    ws.resize(w.size());
    const double wfac = std::pow(h, alpha + beta) * h;
    for (size_t i = 0; i < x.size(); ++i) {
        xs[i] = m + h * x[i];
        ws[i] = w[i] * wfac;
    }
}

static double ln_gamma(double z) { return std::lgamma(z); }

// Golub-Welsch on the symmetric Jacobi matrix of the three-term recurrence.
QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw validation_error("gauss_jacobi: need n >= 1");
    if (alpha <= -1.0 || beta <= -1.0)
        throw validation_error("gauss_jacobi: weight exponents must be > -1");

    Eigen::VectorXd diag(n), sub(std::max(0, n - 1));
    const double ab = alpha + beta;
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        // 2k + ab > 0 here since ab > -2
        diag[k] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        double den = (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) *
                     (2.0 * k + ab - 1.0);
        sub[k - 1] = std::sqrt(num / den);
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) J(k, k) = diag[k];
    for (int k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = sub[k];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw solver_error("gauss_jacobi: eigen decomposition failed");

    // mu0 = int (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
    const double mu0 =
        std::exp((ab + 1.0) * std::log(2.0) + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) -
                 ln_gamma(ab + 2.0));

    QuadratureRule rule;
    rule.kind = (alpha == 0.0 && beta == 0.0) ? QuadKind::Legendre : QuadKind::Jacobi;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.n = n;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.x[k] = es.eigenvalues()[k];
        double v = es.eigenvectors()(0, k);
        rule.w[k] = mu0 * v * v;
    }
    return rule;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

void legendre_mapped(int n, double a, double b, std::vector<double>& x,
                     std::vector<double>& w) {
    const QuadratureRule& r = legendre_cached(n);
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = m + h * r.x[i];
        w[i] = h * r.w[i];
    }
}

const QuadratureRule& legendre_cached(int n) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

} // namespace pem
