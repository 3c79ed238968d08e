#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace qpot {

/// CODATA 2018 fine-structure constant.
inline constexpr double fine_structure = 7.2973525693e-3;

/// Physical constants of one particle species in a consistent unit system.
///
/// The presets use energy in eV, length in angstrom and time in femtoseconds,
/// so that hbar*c = 1973.27 eV*A. Derived quantities are always recomputed
/// from (hbar, mass, c) and never stored.
class PhysicalParams {
public:
  PhysicalParams(double hbar, double mass, double c) : hbar_(hbar), mass_(mass), c_(c) {
    if (!(hbar > 0.0) || !(mass > 0.0) || !(c > 0.0)) {
      throw std::invalid_argument("PhysicalParams: hbar, mass and c must be strictly positive");
    }
  }

  static constexpr double hbar_eV_fs = 0.6582119569;
  static constexpr double c_A_per_fs = 2997.92458;

  /// Builds a species from its rest energy in eV (eV / A / fs system).
  static PhysicalParams from_rest_energy_eV(double rest_energy_eV) {
    return PhysicalParams(hbar_eV_fs, rest_energy_eV / (c_A_per_fs * c_A_per_fs), c_A_per_fs);
  }

  static PhysicalParams electron() { return from_rest_energy_eV(510998.95); }
  static PhysicalParams proton() { return from_rest_energy_eV(938272088.16); }

  /// hbar = m = 1 with a configurable speed of light.
  static PhysicalParams natural(double c) { return PhysicalParams(1.0, 1.0, c); }

  /// Preset lookup by name: "electron", "proton" or "natural" (c = 137.036).
  static PhysicalParams preset(const std::string& name) {
    if (name == "electron") return electron();
    if (name == "proton") return proton();
    if (name == "natural") return natural(1.0 / fine_structure);
    throw std::invalid_argument("unknown units preset '" + name + "'");
  }

  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double c() const { return c_; }

  double rest_energy() const { return mass_ * c_ * c_; }
  double compton_wavelength() const { return 2.0 * std::numbers::pi * hbar_ / (mass_ * c_); }
  /// hbar / (m c), the length that converts gradients to p/(mc).
  double reduced_compton_wavelength() const { return hbar_ / (mass_ * c_); }
  double hbar_c() const { return hbar_ * c_; }

  /// Bohr radius for this mass bound to a unit charge, hbar / (m c alpha).
  double bohr_radius() const { return hbar_ / (mass_ * c_ * fine_structure); }

private:
  double hbar_;
  double mass_;
  double c_;
};

}  // namespace qpot
