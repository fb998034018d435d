#include "sivcav/levels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "sivcav/constants.hpp"

namespace sivcav::levels {

using complexd = std::complex<double>;

void validate(const BranchParams& params) {
    if (params.spin_orbit < 0.0)
        throw std::invalid_argument("branch params: spin-orbit splitting must be >= 0");
    if (params.orbital_g_quench < 0.0 || params.orbital_g_quench > 1.0)
        throw std::invalid_argument("branch params: orbital quench must lie in [0,1]");
}

void validate(const FieldConfig& field) {
    if (field.magnitude < 0.0)
        throw std::invalid_argument("field config: magnitude must be >= 0");
    if (field.polar_angle < 0.0 || field.polar_angle > constants::pi)
        throw std::invalid_argument("field config: polar angle must lie in [0, pi]");
}

Eigen::Matrix4cd branch_hamiltonian(const BranchParams& params, const FieldConfig& field) {
    validate(params);
    validate(field);

    // Basis {|e+ up>, |e+ dn>, |e- up>, |e- dn>}; orbital index major.
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();

    const double so = params.spin_orbit;
    // Lz Sz with Lz = +-1, Sz = +-1/2.
    h(0, 0) += complexd(+0.5 * so, 0.0);
    h(1, 1) += complexd(-0.5 * so, 0.0);
    h(2, 2) += complexd(-0.5 * so, 0.0);
    h(3, 3) += complexd(+0.5 * so, 0.0);

    // Strain couples e+ <-> e- for both spin projections.
    const complexd strain(params.strain_alpha, -params.strain_beta);
    h(0, 2) += strain;
    h(2, 0) += std::conj(strain);
    h(1, 3) += strain;
    h(3, 1) += std::conj(strain);

    const double mu_b = constants::bohr_magneton_hz_per_t;
    const double b_par = field.magnitude * std::cos(field.polar_angle);
    const double b_perp = field.magnitude * std::sin(field.polar_angle);

    // Spin Zeeman: longitudinal Sz plus transverse Sx.
    const double zs = field.spin_g * mu_b;
    for (int orb = 0; orb < 2; ++orb) {
        const int up = 2 * orb;
        const int dn = 2 * orb + 1;
        h(up, up) += complexd(+0.5 * zs * b_par, 0.0);
        h(dn, dn) += complexd(-0.5 * zs * b_par, 0.0);
        h(up, dn) += complexd(0.5 * zs * b_perp, 0.0);
        h(dn, up) += complexd(0.5 * zs * b_perp, 0.0);
    }

    // Orbital Zeeman survives only along the symmetry axis, quenched.
    const double zo = params.orbital_g_quench * field.orbital_g * mu_b * b_par;
    h(0, 0) += complexd(+zo, 0.0);
    h(1, 1) += complexd(+zo, 0.0);
    h(2, 2) += complexd(-zo, 0.0);
    h(3, 3) += complexd(-zo, 0.0);

    return h;
}

Eigen::Vector4d branch_eigenvalues(const BranchParams& params, const FieldConfig& field) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(
        branch_hamiltonian(params, field), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();  // ascending
}

namespace {

struct Doublet {
    Eigen::Vector2d energies;
    Eigen::Matrix<complexd, 4, 2> states;
    double gap = 0.0;  // splitting within the doublet
};

// Two lowest eigenpairs of a branch Hamiltonian.
Doublet lowest_doublet(const Eigen::Matrix4cd& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(hamiltonian);
    Doublet doublet;
    doublet.energies = solver.eigenvalues().head<2>();
    doublet.states.col(0) = solver.eigenvectors().col(0);
    doublet.states.col(1) = solver.eigenvectors().col(1);
    doublet.gap = doublet.energies(1) - doublet.energies(0);
    return doublet;
}

// The Kramers pair adiabatically connected to the reference's lower doublet:
// the two eigenstates with the largest weight on that eigenspace. Energy
// ordering alone would swap branch members once the Zeeman splitting exceeds
// the zero-field gap.
Doublet branch_doublet(const Eigen::Matrix4cd& hamiltonian, const Eigen::Matrix4cd& reference) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> ref(reference);
    const Eigen::Matrix<complexd, 4, 2> lower = ref.eigenvectors().leftCols<2>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(hamiltonian);

    std::array<int, 4> order = {0, 1, 2, 3};
    std::array<double, 4> weight;
    for (int i = 0; i < 4; ++i)
        weight[i] = (lower.adjoint() * solver.eigenvectors().col(i)).squaredNorm();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (weight[a] != weight[b]) return weight[a] > weight[b];
        return solver.eigenvalues()(a) < solver.eigenvalues()(b);
    });
    int a = order[0];
    int b = order[1];
    if (solver.eigenvalues()(a) > solver.eigenvalues()(b)) std::swap(a, b);

    Doublet doublet;
    doublet.energies << solver.eigenvalues()(a), solver.eigenvalues()(b);
    doublet.states.col(0) = solver.eigenvectors().col(a);
    doublet.states.col(1) = solver.eigenvectors().col(b);
    doublet.gap = doublet.energies(1) - doublet.energies(0);
    return doublet;
}

}  // namespace

TransitionSet spectrum_from_hamiltonians(const Eigen::Matrix4cd& ground,
                                         const Eigen::Matrix4cd& excited, double zero_field_line,
                                         const std::optional<Eigen::Matrix4cd>& ground_zero_field,
                                         const std::optional<Eigen::Matrix4cd>& excited_zero_field) {
    const Doublet g =
        ground_zero_field ? branch_doublet(ground, *ground_zero_field) : lowest_doublet(ground);
    const Doublet e = excited_zero_field ? branch_doublet(excited, *excited_zero_field)
                                         : lowest_doublet(excited);

    struct Raw {
        double frequency;
        double dipole;
    };
    std::array<Raw, 4> raw;
    int idx = 0;
    for (int ie = 0; ie < 2; ++ie) {
        for (int ig = 0; ig < 2; ++ig) {
            // ZPL dipole operator is orbital-diagonal and spin-diagonal, so
            // the strength reduces to the squared state overlap.
            const complexd overlap = e.states.col(ie).dot(g.states.col(ig));
            raw[idx++] = {e.energies(ie) - g.energies(ig), std::norm(overlap)};
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const Raw& a, const Raw& b) { return a.frequency < b.frequency; });

    TransitionSet set;
    set.zero_field_line = zero_field_line;
    const double scale = std::max({std::abs(raw[0].frequency), std::abs(raw[3].frequency),
                                   1.0});
    set.degenerate = std::min(g.gap, e.gap) < 1e-9 * scale;
    static const char* kLabels[4] = {"C1", "C2", "C3", "C4"};
    for (int i = 0; i < 4; ++i) {
        set.transitions[i].label = kLabels[i];
        set.transitions[i].offset = raw[i].frequency - zero_field_line;
        set.transitions[i].dipole_strength = std::min(raw[i].dipole, 1.0);
        set.transitions[i].spin_conserving = raw[i].dipole >= 0.5;
    }
    return set;
}

TransitionSet transition_spectrum(const BranchParams& ground, const BranchParams& excited,
                                  const FieldConfig& field) {
    FieldConfig zero_field = field;
    zero_field.magnitude = 0.0;
    const Eigen::Matrix4cd g0 = branch_hamiltonian(ground, zero_field);
    const Eigen::Matrix4cd e0 = branch_hamiltonian(excited, zero_field);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> gs(g0, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(e0, Eigen::EigenvaluesOnly);
    const double line_c = es.eigenvalues()(0) - gs.eigenvalues()(0);
    return spectrum_from_hamiltonians(branch_hamiltonian(ground, field),
                                      branch_hamiltonian(excited, field), line_c, g0, e0);
}

double spin_conserving_splitting(const BranchParams& ground, const BranchParams& excited,
                                 const FieldConfig& field) {
    const TransitionSet set = transition_spectrum(ground, excited, field);
    double lo = 0.0, hi = 0.0;
    int found = 0;
    for (const auto& t : set.transitions) {
        if (!t.spin_conserving) continue;
        (found == 0 ? lo : hi) = t.offset;
        ++found;
    }
    if (found == 2) return std::abs(hi - lo);
    // Degenerate or strongly mixed case: fall back to the inner pair.
    return set.transitions[2].offset - set.transitions[1].offset;
}

SplittingSeries splitting_vs_field(const BranchParams& ground, const BranchParams& excited,
                                   const FieldConfig& field_template,
                                   std::span<const double> magnitudes) {
    if (magnitudes.empty())
        throw std::invalid_argument("splitting_vs_field: field list must not be empty");
    if (!std::is_sorted(magnitudes.begin(), magnitudes.end()))
        throw std::invalid_argument("splitting_vs_field: fields must be sorted ascending");

    SplittingSeries series;
    series.points.reserve(magnitudes.size());
    for (double b : magnitudes) {
        FieldConfig field = field_template;
        field.magnitude = b;
        series.points.push_back({b, spin_conserving_splitting(ground, excited, field)});
    }

    // Least-squares slope of splitting vs field (with intercept).
    const auto n = static_cast<double>(series.points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : series.points) {
        sx += p.field;
        sy += p.splitting;
        sxx += p.field * p.field;
        sxy += p.field * p.splitting;
    }
    const double denom = n * sxx - sx * sx;
    if (denom > 0.0) {
        series.slope = (n * sxy - sx * sy) / denom;
        if (series.points.size() > 2) {
            const double intercept = (sy - series.slope * sx) / n;
            double ss_res = 0.0;
            for (const auto& p : series.points) {
                const double r = p.splitting - (intercept + series.slope * p.field);
                ss_res += r * r;
            }
            series.slope_sigma = std::sqrt(ss_res / (n - 2.0) * n / denom);
        }
    } else {
        // Single field value: slope through the origin.
        series.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return series;
}

double solve_excited_quench_for_c3(const BranchParams& ground, BranchParams excited,
                                   const FieldConfig& field, double c3_target_hz,
                                   double upper, double tolerance_hz) {
    auto c3_offset = [&](double quench) {
        excited.orbital_g_quench = quench;
        return transition_spectrum(ground, excited, field).transitions[2].offset;
    };
    double lo = ground.orbital_g_quench;
    double hi = std::min(upper, 1.0);
    double f_lo = c3_offset(lo) - c3_target_hz;
    double f_hi = c3_offset(hi) - c3_target_hz;
    if (f_lo * f_hi > 0.0)
        throw std::runtime_error("solve_excited_quench_for_c3: target not bracketed");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = c3_offset(mid) - c3_target_hz;
        if (std::abs(f_mid) < tolerance_hz) return mid;
        if (f_lo * f_mid <= 0.0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace sivcav::levels
