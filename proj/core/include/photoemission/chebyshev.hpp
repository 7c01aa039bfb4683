#ifndef PHOTOEMISSION_CHEBYSHEV_HPP
#define PHOTOEMISSION_CHEBYSHEV_HPP

#include <complex>
#include <vector>

namespace pem {

using cplx = std::complex<double>;

// Chebyshev interpolant  f(x) = sum_k c[k] T_k(m(x))  on [a,b], built from
// samples at the second-kind points x_j = a + (b-a)(1+cos(j pi/N))/2.
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    ChebyshevSeries(double a, double b, std::vector<cplx> coef);

    // samples[j] = f(node(N, a, b)[j]) with N+1 samples, nodes ascending.
    static ChebyshevSeries fit(double a, double b, const std::vector<cplx>& samples);
    // Nodes in ascending order; N+1 points including both endpoints.
    static std::vector<double> nodes(int N, double a, double b);

    cplx eval(double x) const;                // throws outside [a,b] (eps slack)
    void eval_many(const double* x, cplx* out, int n) const;
    ChebyshevSeries derivative() const;

    cplx eval_unchecked(double x) const;      // no interval check (internal hot path)

    double a() const { return a_; }
    double b() const { return b_; }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<cplx>& coef() const { return coef_; }

    // max |c_k| over the trailing `count` coefficients divided by max |c_k|;
    // the usual resolved-expansion diagnostic.
    double tail_fraction(int count = 3) const;

private:
    double a_ = -1.0, b_ = 1.0;
    std::vector<cplx> coef_;
};

// Barycentric weights and cardinal-function evaluation at the second-kind
// points; used to assemble collocation rows.
// card[k] = l_k(x) with l_k(node_j) = delta_jk. Nodes ascending, size N+1.
void chebyshev_cardinals(const std::vector<double>& nodes, double x, double* card);

} // namespace pem

#endif
