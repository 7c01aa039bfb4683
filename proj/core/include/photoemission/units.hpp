#ifndef PHOTOEMISSION_UNITS_HPP
#define PHOTOEMISSION_UNITS_HPP

#include <optional>

namespace pem {

// Conversion constants (CODATA). Single source of truth for the whole
// library and the CLI; the unit-conversion oracle in the test suite keeps
// its own copy on purpose.
namespace units {
inline constexpr double hartree_eV = 27.211386;      // 1 hartree in eV
inline constexpr double field_au_V_per_nm = 514.2207; // 1 a.u. field in V/nm
inline constexpr double time_au_as = 24.188843;       // 1 a.u. time in attoseconds
inline constexpr double time_au_fs = time_au_as * 1e-3;
inline constexpr double bohr_nm = 0.0529177210903;    // 1 bohr in nm

double eV_to_hartree(double ev);
double hartree_to_eV(double ha);
double V_per_nm_to_au(double f);
double au_to_V_per_nm(double f);
double au_time_to_fs(double t);
double nm_to_bohr(double x);
double bohr_to_nm(double x);
} // namespace units

// Model parameters for the oscillating-field surface-emission problem,
// in laboratory units and in atomic units (hbar = m = e = 1).
struct PhysicalConfig {
    // inputs
    double fermi_energy_eV = 0.0;
    double work_function_eV = 0.0;
    double field_V_per_nm = 0.0;
    double photon_energy_eV = 0.0;

    // derived, atomic units
    double fermi_energy = 0.0;  // hartree
    double work_function = 0.0; // hartree
    double k = 0.0;             // incoming momentum, sqrt(2 E_F) unless overridden
    double U = 0.0;             // step height E_F + W, hartree
    double E = 0.0;             // field amplitude
    double omega = 0.0;         // angular frequency
    double period = 0.0;        // 2 pi / omega

    double kappa0() const; // sqrt(2U - k^2), decay rate of the field-free evanescent tail
};

struct Thresholds {
    double ponderomotive; // U_p = E^2/(4 w^2), hartree
    double omega_c;       // one-photon threshold W + U_p, hartree
    double omega_c_beam;  // U + U_p - k^2/2; equals omega_c when k^2/2 = E_F
    double ponderomotive_eV;
    double omega_c_eV;
};

// Validates inputs and fills in the atomic-unit fields. k defaults to
// sqrt(2 E_F); pass k_override (atomic units) to study other beam momenta.
PhysicalConfig build_config(double fermi_eV, double work_eV, double field_V_per_nm,
                            double photon_eV,
                            std::optional<double> k_override = std::nullopt);

// Keldysh parameter  gamma = omega sqrt(2 W) / E  (atomic units).
// Throws validation_error when E = 0.
double keldysh(const PhysicalConfig& cfg);

Thresholds thresholds(const PhysicalConfig& cfg);

// Solves omega - omega_c(omega) = offset for omega (both in hartree), where
// omega_c = W + E^2/(4 omega^2) depends on omega through the ponderomotive
// term. Used by the frequency scans around the emission threshold.
double omega_for_threshold_offset(const PhysicalConfig& cfg, double offset_hartree);

} // namespace pem

#endif
