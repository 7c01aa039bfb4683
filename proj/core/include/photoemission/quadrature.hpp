#ifndef PHOTOEMISSION_QUADRATURE_HPP
#define PHOTOEMISSION_QUADRATURE_HPP

#include <vector>

namespace pem {

enum class QuadKind { Legendre, Jacobi };

// Nodes/weights on the reference interval [-1,1] for
//   int_{-1}^{1} (1-x)^alpha (1+x)^beta f(x) dx ~= sum w_i f(x_i).
// Legendre is the (0,0) special case.
struct QuadratureRule {
    QuadKind kind = QuadKind::Legendre;
    double alpha = 0.0, beta = 0.0;
    int n = 0;
    std::vector<double> x, w;

    // Affine image of the rule on [a,b]; for Jacobi weights the endpoint
    // factors transform as ((b-a)/2)^(alpha+beta) on top of the jacobian.
    void map_to(double a, double b, std::vector<double>& xs, std::vector<double>& ws) const;
};

QuadratureRule gauss_legendre(int n);
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

// Cached lookups (rules are immutable once built; safe for concurrent use).
const QuadratureRule& legendre_cached(int n);

// Cached Legendre rule mapped to [a,b]; x and w are overwritten.
void legendre_mapped(int n, double a, double b, std::vector<double>& x,
                     std::vector<double>& w);

} // namespace pem

#endif
