#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sivcav::levels {

// Effective parameters of one orbital-doublet branch (ground or excited).
// All energies in Hz. The spin-orbit splitting separates the two Kramers
// doublets at zero field; strain couples the orbital states; the orbital
// Zeeman response is quenched by the host lattice.
struct BranchParams {
    double spin_orbit = 0.0;       // lambda_SO [Hz]
    double strain_alpha = 0.0;     // [Hz]
    double strain_beta = 0.0;      // [Hz]
    double orbital_g_quench = 0.1; // in [0,1]
};

struct FieldConfig {
    double magnitude = 0.0;    // [T]
    double polar_angle = 0.0;  // angle between B and the symmetry axis [rad]
    double spin_g = 2.0;
    double orbital_g = 1.0;
};

void validate(const BranchParams& params);
void validate(const FieldConfig& field);

// Branch Hamiltonian in the basis {|e+ up>, |e+ dn>, |e- up>, |e- dn>}:
// spin-orbit Lz Sz, orbital strain (e+ <-> e-), spin Zeeman with the
// longitudinal and transverse field components, and the quenched orbital
// Zeeman term along the symmetry axis. Entries in Hz.
Eigen::Matrix4cd branch_hamiltonian(const BranchParams& params, const FieldConfig& field);

// Eigenvalues sorted ascending [Hz].
Eigen::Vector4d branch_eigenvalues(const BranchParams& params, const FieldConfig& field);

struct Transition {
    std::string label;              // C1..C4, ascending frequency
    double offset = 0.0;            // [Hz] relative to the zero-field line C
    double dipole_strength = 0.0;   // squared overlap, in [0,1]
    bool spin_conserving = false;
};

struct TransitionSet {
    std::array<Transition, 4> transitions;
    double zero_field_line = 0.0;  // absolute frequency of line C [Hz]
    bool degenerate = false;       // eigenstates degenerate; dipole data unreliable
};

// Optical transitions between the lowest excited doublet and the lowest
// ground doublet under the given field. Each doublet is the Kramers pair
// adiabatically connected to the zero-field lower doublet, so the selection
// stays on the same orbital branch past the field where the Zeeman energy
// crosses the spin-orbit gap. Offsets are relative to the zero-field line C
// of the same parameter set.
TransitionSet transition_spectrum(const BranchParams& ground, const BranchParams& excited,
                                  const FieldConfig& field);

// Same spectrum derived from explicitly supplied branch Hamiltonians. When
// the zero-field references are given, doublets are selected by their weight
// on the reference's lower eigenspace; otherwise the two lowest eigenstates
// are used.
TransitionSet spectrum_from_hamiltonians(
    const Eigen::Matrix4cd& ground, const Eigen::Matrix4cd& excited, double zero_field_line,
    const std::optional<Eigen::Matrix4cd>& ground_zero_field = std::nullopt,
    const std::optional<Eigen::Matrix4cd>& excited_zero_field = std::nullopt);

// Spin-conserving C2-C3 splitting [Hz] for one field configuration.
double spin_conserving_splitting(const BranchParams& ground, const BranchParams& excited,
                                 const FieldConfig& field);

struct SplittingPoint {
    double field = 0.0;      // [T]
    double splitting = 0.0;  // [Hz]
};

struct SplittingSeries {
    std::vector<SplittingPoint> points;
    double slope = 0.0;        // d(splitting)/dB [Hz/T], least squares
    double slope_sigma = 0.0;  // 0 when fewer than 3 points
};

// Splitting for each field magnitude (template field carries angle and
// g-factors) plus the least-squares slope through the points.
SplittingSeries splitting_vs_field(const BranchParams& ground, const BranchParams& excited,
                                   const FieldConfig& field_template,
                                   std::span<const double> magnitudes);

// Solve for the excited-branch orbital quench that places transition C3 at
// the requested offset for the given field. Bisection on
// [ground quench, upper]; throws if the target is not bracketed.
double solve_excited_quench_for_c3(const BranchParams& ground, BranchParams excited,
                                   const FieldConfig& field, double c3_target_hz,
                                   double upper = 1.0, double tolerance_hz = 1e3);

}  // namespace sivcav::levels
