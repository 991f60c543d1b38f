#pragma once

#include "gqfi/correlation.hpp"
#include "gqfi/qfi.hpp"
#include "gqfi/states.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gqfi {

/// Raw interference trace tr(Gamma_dot_A J Gamma_dot_B J), each derivative
/// taken under its own side's generator alone.
inline double interference_trace(const GaussianState& state, const GeneratorSpec& spec_a,
                                 const GeneratorSpec& spec_b) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("interference_trace: expected a two-mode state");
    }
    const Eigen::MatrixXd j = symplectic_form(2);
    const Eigen::MatrixXd ga = gamma_dot(state.cov, build_generator(spec_a));
    const Eigen::MatrixXd gb = gamma_dot(state.cov, build_generator(spec_b));
    return (ga * j * gb * j).trace();
}

/// Interference term C of the total-QFI decomposition
///
///   F^2(K_A + K_B) = F^2(K_A) + F^2(K_B) + 2 C.
///
/// On the isotropic class C = tr(Gamma_dot_A J Gamma_dot_B J) / (8 (nu^2+1)),
/// the prefactor that makes the decomposition an exact identity with the
/// isotropic QFI.  Outside the class the defining half-difference of QFIs is
/// evaluated instead.
inline double interference_term(const GaussianState& state, const GeneratorSpec& spec_a,
                                const GeneratorSpec& spec_b) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("interference_term: expected a two-mode state");
    }
    if (const std::optional<double> nu = isotropic_nu(state.cov)) {
        return interference_trace(state, spec_a, spec_b) / (8.0 * (*nu * *nu + 1.0));
    }
    const Generator ka = build_generator(spec_a);
    const Generator kb = build_generator(spec_b);
    const Generator sum{ka.matrix + kb.matrix};
    return 0.5 * (qfi_general(state, sum) - qfi_general(state, ka) - qfi_general(state, kb));
}

/// Closed form of the interference term on the symmetric family,
///
///   C = 4 (a_x b_x + a_y b_y - a_z b_z) d^2 / (8 (nu^2 + 1)),
///
/// for unit directions a, b on sides A and B.
inline double interference_closed(const Eigen::Vector3d& dir_a, const Eigen::Vector3d& dir_b,
                                  const SymmetricCMParams& p) {
    if (std::abs(dir_a.norm() - 1.0) > 1e-12 || std::abs(dir_b.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("interference_closed: directions must be unit vectors");
    }
    detail::require_physical(p);
    const double nu_sq = p.a * p.a - p.d * p.d;
    const double angular = dir_a.x() * dir_b.x() + dir_a.y() * dir_b.y() - dir_a.z() * dir_b.z();
    return 4.0 * angular * p.d * p.d / (8.0 * (nu_sq + 1.0));
}

/// QFI of the combined generator K_A + K_B.  Equals
/// lqfi_a + lqfi_b + 2 * interference identically.
inline double total_qfi(const GaussianState& state, const GeneratorSpec& spec_a,
                        const GeneratorSpec& spec_b) {
    if (spec_a.side() == spec_b.side()) {
        throw std::invalid_argument("total_qfi: generators must act on opposite sides");
    }
    const Generator sum{build_generator(spec_a).matrix + build_generator(spec_b).matrix};
    if (isotropic_nu(state.cov)) {
        return qfi_isotropic(state, sum);
    }
    return qfi_general(state, sum);
}

/// |C| <= sqrt(F_A^2 F_B^2) with slack 1e-12.
inline bool schwarz_check(const GaussianState& state, const GeneratorSpec& spec_a,
                          const GeneratorSpec& spec_b) {
    const double c = interference_term(state, spec_a, spec_b);
    const double fa = lqfi(state, spec_a);
    const double fb = lqfi(state, spec_b);
    return std::abs(c) <= std::sqrt(fa * fb) + 1e-12;
}

/// One row of a theta sweep with the same generator direction on both sides.
struct MetrologyPoint {
    double theta;
    double phi;
    double lqfi_a;
    double tqfi;
    double interference;
    /// tqfi / lqfi_a.  At an exact 0/0 point (uncorrelated states at the
    /// phase-rotation direction) the product-state limit 2 is reported.
    double ratio;
};

inline MetrologyPoint metrology_point(const GaussianState& state, double theta, double phi) {
    const GeneratorSpec spec_a = GeneratorSpec::from_angles(theta, phi, Side::A);
    const GeneratorSpec spec_b = GeneratorSpec::from_angles(theta, phi, Side::B);
    MetrologyPoint pt{};
    pt.theta = theta;
    pt.phi = phi;
    pt.lqfi_a = lqfi(state, spec_a);
    pt.interference = interference_term(state, spec_a, spec_b);
    pt.tqfi = total_qfi(state, spec_a, spec_b);
    const double lqfi_b = lqfi(state, spec_b);
    const double residual = std::abs(pt.tqfi - (pt.lqfi_a + lqfi_b + 2.0 * pt.interference));
    if (residual > 1e-12 * std::max(1.0, std::abs(pt.tqfi))) {
        throw std::logic_error("metrology_point: QFI decomposition identity violated");
    }
    constexpr double tiny = 1e-15;
    if (pt.lqfi_a > tiny) {
        pt.ratio = pt.tqfi / pt.lqfi_a;
    } else {
        pt.ratio = pt.tqfi <= tiny ? 2.0 : std::numeric_limits<double>::infinity();
    }
    return pt;
}

/// Sweeps theta over [0, pi] at fixed phi.  With phi = 0 the ratio peaks at
/// exactly 4 at theta = pi/2 for the symmetric family.
inline std::vector<MetrologyPoint> ratio_profile(const GaussianState& state, double phi,
                                                 int theta_grid) {
    if (theta_grid < 2) {
        throw std::invalid_argument("ratio_profile: theta_grid must be >= 2");
    }
    std::vector<MetrologyPoint> out;
    out.reserve(static_cast<std::size_t>(theta_grid));
    for (int i = 0; i < theta_grid; ++i) {
        const double theta = std::numbers::pi * i / (theta_grid - 1);
        out.push_back(metrology_point(state, theta, phi));
    }
    return out;
}

/// Quantum Cramer-Rao interval (1/sqrt(p2), 1/sqrt(q2)); the upper end is
/// +infinity for uncorrelated states.
inline std::pair<double, double> qcr_interval(const GaussianState& state, int grid_steps = 64,
                                              double refine_tol = 1e-9) {
    const CorrelationReport rep = correlation_report(state, grid_steps, refine_tol);
    return {rep.qcr_low, rep.qcr_high};
}

}  // namespace gqfi
