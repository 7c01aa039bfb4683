#ifndef PHOTOEMISSION_FADDEEVA_HPP
#define PHOTOEMISSION_FADDEEVA_HPP

#include <complex>

namespace pem {

// Faddeeva function w(z) = e^{-z^2} erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva_w(std::complex<double> z);

// Complementary error function for complex argument. Relative accuracy is
// a few 1e-15 .. 1e-14 over |z| <= 30 away from the zeros of erfc; the
// kernels only call it along the e^{+-i pi/4} and imaginary directions
// where |e^{-z^2}| = 1.
std::complex<double> erfc_complex(std::complex<double> z);

// Scaled variant erfcx(z) = e^{z^2} erfc(z); finite wherever Re z >= 0.
// For Re z < 0 it grows like 2 e^{z^2} and may overflow, as the true
// function does.
std::complex<double> erfcx_complex(std::complex<double> z);

} // namespace pem

#endif
