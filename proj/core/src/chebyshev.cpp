#include "photoemission/chebyshev.hpp"
#include "photoemission/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pem {

ChebyshevSeries::ChebyshevSeries(double a, double b, std::vector<cplx> coef)
    : a_(a), b_(b), coef_(std::move(coef)) {
    if (!(a < b)) throw validation_error("ChebyshevSeries: need a < b");
    if (coef_.empty()) throw validation_error("ChebyshevSeries: empty coefficients");
}

std::vector<double> ChebyshevSeries::nodes(int N, double a, double b) {
    if (N < 1) throw validation_error("ChebyshevSeries: need degree >= 1");
    std::vector<double> x(N + 1);
    for (int j = 0; j <= N; ++j) {
        // ascending: j = 0 -> a, j = N -> b
        double c = std::cos(M_PI * double(N - j) / double(N));
        x[j] = a + (b - a) * 0.5 * (1.0 + c);
    }
    x.front() = a;
    x.back() = b;
    return x;
}

ChebyshevSeries ChebyshevSeries::fit(double a, double b, const std::vector<cplx>& samples) {
    const int N = static_cast<int>(samples.size()) - 1;
    if (N < 1) throw validation_error("ChebyshevSeries::fit: need at least 2 samples");
    // DCT-I of the samples reordered to descending nodes (x_j = cos(j pi /N)).
    std::vector<cplx> coef(N + 1);
    for (int k = 0; k <= N; ++k) {
        cplx acc = 0.5 * (samples[N] + (k % 2 == 0 ? samples[0] : -samples[0]));
        for (int j = 1; j < N; ++j)
            acc += samples[N - j] * std::cos(M_PI * double(j * k) / double(N));
        coef[k] = acc * (2.0 / N);
    }
    coef[0] *= 0.5;
    coef[N] *= 0.5;
    return ChebyshevSeries(a, b, std::move(coef));
}

cplx ChebyshevSeries::eval_unchecked(double x) const {
    const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
    const int n = static_cast<int>(coef_.size()) - 1;
    // Clenshaw
    cplx b1 = 0.0, b2 = 0.0;
    for (int k = n; k >= 1; --k) {
        cplx tmp = 2.0 * t * b1 - b2 + coef_[k];
        b2 = b1;
        b1 = tmp;
    }
    return t * b1 - b2 + coef_[0];
}

cplx ChebyshevSeries::eval(double x) const {
    const double slack = 1e-12 * (b_ - a_) + 1e-300;
    if (x < a_ - slack || x > b_ + slack)
        throw validation_error("ChebyshevSeries::eval: argument " + std::to_string(x) +
                               " outside [" + std::to_string(a_) + ", " + std::to_string(b_) +
                               "] (extrapolation refused)");
    return eval_unchecked(std::clamp(x, a_, b_));
}

void ChebyshevSeries::eval_many(const double* x, cplx* out, int n) const {
    for (int i = 0; i < n; ++i) out[i] = eval(x[i]);
}

ChebyshevSeries ChebyshevSeries::derivative() const {
    const int n = static_cast<int>(coef_.size()) - 1;
    std::vector<cplx> d(std::max(1, n), 0.0);
    if (n >= 1) {
        // c'_{k-1} = c'_{k+1} + 2k c_k  downward, c'_0 halved at the end
        std::vector<cplx> dp(n + 2, 0.0);
        for (int k = n; k >= 1; --k) dp[k - 1] = dp[k + 1] + 2.0 * double(k) * coef_[k];
        dp[0] *= 0.5;
        for (int k = 0; k < n; ++k) d[k] = dp[k] * (2.0 / (b_ - a_));
    }
    return ChebyshevSeries(a_, b_, std::move(d));
}

double ChebyshevSeries::tail_fraction(int count) const {
    double mx = 0.0;
    for (const auto& c : coef_) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return 0.0;
    double tail = 0.0;
    int n = static_cast<int>(coef_.size());
    for (int k = std::max(0, n - count); k < n; ++k)
        tail = std::max(tail, std::abs(coef_[k]));
    return tail / mx;
}

void chebyshev_cardinals(const std::vector<double>& nodes, double x, double* card) {
    const int n = static_cast<int>(nodes.size());
    // exact node hit
    for (int j = 0; j < n; ++j) {
        if (x == nodes[j]) {
            std::fill(card, card + n, 0.0);
            card[j] = 1.0;
            return;
        }
    }
    // barycentric weights for second-kind points (ascending order):
    // w_j = (-1)^j * delta, halved at the ends; constant factors cancel.
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w *= 0.5;
        card[j] = w / (x - nodes[j]);
        denom += card[j];
    }
    for (int j = 0; j < n; ++j) card[j] /= denom;
}

} // namespace pem
