#pragma once

namespace casimix {

// hbar*c in eV·nm; all frequencies in this library are photon energies in eV,
// all lengths in nm, so wave vectors are eV/(hbar*c) = 1/nm.
inline constexpr double hbar_c_ev_nm = 197.3269804;

// 1 eV/nm^3 expressed in Pa (J/m^3).
inline constexpr double ev_per_nm3_in_pa = 1.602176634e8;

inline constexpr double pi = 3.14159265358979323846;

// Magnitude of the ideal-conductor Casimir pressure hbar*c*pi^2/(240 L^4),
// in eV/nm^3. Multiply by ev_per_nm3_in_pa for Pa.
inline double ideal_pressure_ev_nm3(double separation_nm) {
    double l2 = separation_nm * separation_nm;
    return hbar_c_ev_nm * pi * pi / (240.0 * l2 * l2);
}

}  // namespace casimix
