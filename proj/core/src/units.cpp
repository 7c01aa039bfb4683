#include "photoemission/units.hpp"
#include "photoemission/errors.hpp"

#include <cmath>
#include <string>

namespace pem {

namespace units {
double eV_to_hartree(double ev) { return ev / hartree_eV; }
double hartree_to_eV(double ha) { return ha * hartree_eV; }
double V_per_nm_to_au(double f) { return f / field_au_V_per_nm; }
double au_to_V_per_nm(double f) { return f * field_au_V_per_nm; }
double au_time_to_fs(double t) { return t * time_au_fs; }
double nm_to_bohr(double x) { return x / bohr_nm; }
double bohr_to_nm(double x) { return x * bohr_nm; }
} // namespace units

double PhysicalConfig::kappa0() const { return std::sqrt(2.0 * U - k * k); }

static void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw validation_error(std::string("non-finite parameter: ") + name);
}

PhysicalConfig build_config(double fermi_eV, double work_eV, double field_V_per_nm,
                            double photon_eV, std::optional<double> k_override) {
    require_finite(fermi_eV, "fermi_energy_ev");
    require_finite(work_eV, "work_function_ev");
    require_finite(field_V_per_nm, "field_v_per_nm");
    require_finite(photon_eV, "photon_energy_ev");
    if (fermi_eV <= 0.0) throw validation_error("fermi_energy_ev must be positive");
    if (work_eV <= 0.0) throw validation_error("work_function_ev must be positive");
    if (photon_eV <= 0.0) throw validation_error("photon_energy_ev must be positive");
    if (field_V_per_nm < 0.0) throw validation_error("field_v_per_nm must be >= 0");

    PhysicalConfig cfg;
    cfg.fermi_energy_eV = fermi_eV;
    cfg.work_function_eV = work_eV;
    cfg.field_V_per_nm = field_V_per_nm;
    cfg.photon_energy_eV = photon_eV;

    cfg.fermi_energy = units::eV_to_hartree(fermi_eV);
    cfg.work_function = units::eV_to_hartree(work_eV);
    cfg.U = cfg.fermi_energy + cfg.work_function;
    cfg.E = units::V_per_nm_to_au(field_V_per_nm);
    cfg.omega = units::eV_to_hartree(photon_eV);
    cfg.period = 2.0 * M_PI / cfg.omega;

    cfg.k = k_override ? *k_override : std::sqrt(2.0 * cfg.fermi_energy);
    require_finite(cfg.k, "k");
    if (cfg.k <= 0.0) throw validation_error("beam momentum k must be positive");
    if (cfg.k * cfg.k >= 2.0 * cfg.U)
        throw validation_error("incoming energy k^2/2 must lie below the step U");
    return cfg;
}

double keldysh(const PhysicalConfig& cfg) {
    if (cfg.E <= 0.0)
        throw validation_error("undefined Keldysh parameter: field is zero");
    return cfg.omega * std::sqrt(2.0 * cfg.work_function) / cfg.E;
}

Thresholds thresholds(const PhysicalConfig& cfg) {
    Thresholds th;
    th.ponderomotive = cfg.E * cfg.E / (4.0 * cfg.omega * cfg.omega);
    th.omega_c = cfg.work_function + th.ponderomotive;
    th.omega_c_beam = cfg.U + th.ponderomotive - 0.5 * cfg.k * cfg.k;
    th.ponderomotive_eV = units::hartree_to_eV(th.ponderomotive);
    th.omega_c_eV = units::hartree_to_eV(th.omega_c);
    return th;
}

double omega_for_threshold_offset(const PhysicalConfig& cfg, double offset_hartree) {
    // omega = W + offset + E^2/(4 omega^2); the ponderomotive correction is
    // small, so plain fixed-point iteration converges in a few steps.
    double w = cfg.work_function + offset_hartree;
    if (w <= 0.0) throw validation_error("threshold offset puts omega below zero");
    for (int it = 0; it < 64; ++it) {
        double next = cfg.work_function + offset_hartree + cfg.E * cfg.E / (4.0 * w * w);
        if (std::abs(next - w) < 1e-15 * w) { w = next; break; }
        w = next;
    }
    return w;
}

} // namespace pem
