#pragma once

#include "gqfi/qfi.hpp"
#include "gqfi/states.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace gqfi {

/// Normalization of the correlation measure: the spherical minimum of the
/// local QFI on the symmetric family is exactly a quarter of the closed
/// form 2 min[d^2, 2a^2 - d^2] / (1 + a^2 - d^2), so the reported value is
/// four times the minimum.  Pinned by a dense-scan regression test.
inline constexpr double q2_normalization = 4.0;

/// Reported q2 values at or below this are treated as a flat zero minimum
/// (uncorrelated state).
inline constexpr double q2_degenerate_tol = 1e-12;

namespace detail {

inline void require_physical(const SymmetricCMParams& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.d) || p.a <= 0.0
        || p.a * p.a - p.d * p.d < vacuum_nu * vacuum_nu - 1e-12) {
        throw std::invalid_argument("symmetric-CM parameters violate physicality");
    }
}

/// Golden-section minimization over [lo, hi] with a fixed iteration count.
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters, double& arg_out) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if (f1 <= f2) {
        arg_out = x1;
        return f1;
    }
    arg_out = x2;
    return f2;
}

struct SphericalMin {
    double theta;
    double phi;
    double value;
};

/// Coarse (theta, phi) grid followed by coordinate-descent refinement with
/// shrinking golden-section windows.  Deterministic and seed-free; grid
/// ties go to the smaller theta, then the smaller phi.
template <typename F>
SphericalMin minimize_on_sphere(F&& objective, int grid_steps, double refine_tol, int max_passes = 60) {
    constexpr double pi = std::numbers::pi;
    SphericalMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < grid_steps; ++i) {
        const double theta = pi * i / (grid_steps - 1);
        for (int j = 0; j < grid_steps; ++j) {
            const double phi = 2.0 * pi * j / grid_steps;
            const double v = objective(theta, phi);
            if (v < best.value) {
                best = {theta, phi, v};
            }
        }
    }

    double w_theta = pi / (grid_steps - 1);
    double w_phi = 2.0 * pi / grid_steps;
    for (int pass = 0; pass < max_passes; ++pass) {
        const double prev = best.value;
        {
            const double lo = std::max(0.0, best.theta - w_theta);
            const double hi = std::min(pi, best.theta + w_theta);
            double arg = best.theta;
            const double v = golden_min([&](double t) { return objective(t, best.phi); }, lo, hi, 64, arg);
            if (v < best.value) {
                best.theta = arg;
                best.value = v;
            }
        }
        {
            double arg = best.phi;
            const double v = golden_min([&](double p) { return objective(best.theta, p); },
                                        best.phi - w_phi, best.phi + w_phi, 64, arg);
            if (v < best.value) {
                best.phi = arg;
                best.value = v;
            }
        }
        w_theta = std::max(0.5 * w_theta, 1e-9);
        w_phi = std::max(0.5 * w_phi, 1e-9);
        if (pass > 0 && prev - best.value <= refine_tol * std::max(1.0, std::abs(best.value))) {
            return best;
        }
    }
    throw std::runtime_error("minimize_on_sphere: refinement did not converge");
}

}  // namespace detail

/// Closed-form correlation measure on the symmetric family,
///   q2 = 2 min[d^2, 2a^2 - d^2] / (1 + a^2 - d^2).
/// Vanishes iff d = 0.
inline double q2_closed(const SymmetricCMParams& p) {
    detail::require_physical(p);
    const double d2 = p.d * p.d;
    const double alt = 2.0 * p.a * p.a - d2;
    return 2.0 * std::min(d2, alt) / (1.0 + p.a * p.a - d2);
}

/// Closed-form maximum of the normalized local QFI,
///   p2 = 2 max[d^2, 2a^2 - d^2] / (1 + a^2 - d^2).
inline double p2_closed(const SymmetricCMParams& p) {
    detail::require_physical(p);
    const double d2 = p.d * p.d;
    const double alt = 2.0 * p.a * p.a - d2;
    return 2.0 * std::max(d2, alt) / (1.0 + p.a * p.a - d2);
}

/// q2 in squeezed-thermal parameters,
///   q2 = 2 (1 + 2N)^2 sinh^2(2m) / (4 + (1 + 2N)^2).
/// Identical to q2_closed(sts_cm_params(p)).
inline double q2_sts(const STSParams& p) {
    if (!std::isfinite(p.n_thermal) || !std::isfinite(p.m_squeeze)
        || p.n_thermal < 0.0 || p.m_squeeze < 0.0) {
        throw std::invalid_argument("q2_sts: parameters must be finite and non-negative");
    }
    const double s = 1.0 + 2.0 * p.n_thermal;
    const double sh = std::sinh(2.0 * p.m_squeeze);
    return 2.0 * s * s * sh * sh / (4.0 + s * s);
}

/// Extremal normalized local QFI together with the extremizing direction.
struct ExtremalResult {
    double value;
    Eigen::Vector3d direction;
};

/// Numerical q2: grid scan plus refinement of the local QFI over unit
/// generator directions on side A, times q2_normalization.  When the
/// minimum is flat at zero (d = 0 states) the direction is reported as
/// (0, 1, 0) by convention.
inline ExtremalResult q2_numeric(const GaussianState& state, int grid_steps = 64,
                                 double refine_tol = 1e-9) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("q2_numeric: expected a two-mode state");
    }
    if (grid_steps < 16) {
        throw std::invalid_argument("q2_numeric: grid_steps must be >= 16");
    }
    const auto objective = [&](double theta, double phi) {
        return lqfi(state, GeneratorSpec::from_angles(theta, phi, Side::A));
    };
    const detail::SphericalMin m = detail::minimize_on_sphere(objective, grid_steps, refine_tol);
    ExtremalResult r{q2_normalization * m.value,
                     GeneratorSpec::from_angles(m.theta, m.phi, Side::A).direction()};
    if (r.value <= q2_degenerate_tol) {
        r.direction = Eigen::Vector3d(0.0, 1.0, 0.0);
    }
    return r;
}

/// Numerical p2: same machinery, maximization.
inline ExtremalResult p2_numeric(const GaussianState& state, int grid_steps = 64,
                                 double refine_tol = 1e-9) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("p2_numeric: expected a two-mode state");
    }
    if (grid_steps < 16) {
        throw std::invalid_argument("p2_numeric: grid_steps must be >= 16");
    }
    const auto objective = [&](double theta, double phi) {
        return -lqfi(state, GeneratorSpec::from_angles(theta, phi, Side::A));
    };
    const detail::SphericalMin m = detail::minimize_on_sphere(objective, grid_steps, refine_tol);
    return ExtremalResult{-q2_normalization * m.value,
                          GeneratorSpec::from_angles(m.theta, m.phi, Side::A).direction()};
}

/// Consolidated diagnostics for one two-mode state.
struct CorrelationReport {
    double q2;
    double p2;
    Eigen::Vector3d argmin_direction;
    double log_neg;
    double nu_tilde;
    double purity;
    double qcr_low;   ///< 1 / sqrt(p2)
    double qcr_high;  ///< 1 / sqrt(q2); +infinity when q2 = 0
};

inline CorrelationReport correlation_report(const GaussianState& state, int grid_steps = 64,
                                            double refine_tol = 1e-9) {
    if (state.cov.n_modes() != 2) {
        throw std::invalid_argument("correlation_report: expected a two-mode state");
    }
    const ExtremalResult qmin = q2_numeric(state, grid_steps, refine_tol);
    const ExtremalResult pmax = p2_numeric(state, grid_steps, refine_tol);
    CorrelationReport rep{};
    rep.q2 = qmin.value;
    rep.p2 = pmax.value;
    rep.argmin_direction = qmin.direction;
    rep.nu_tilde = pt_min_symplectic_eigenvalue(state);
    rep.log_neg = std::max(0.0, -std::log(rep.nu_tilde));
    const std::vector<double> nus = symplectic_spectrum_sqrt(state.cov);
    rep.purity = 1.0 / (4.0 * nus[0] * nus[1]);
    rep.qcr_low = 1.0 / std::sqrt(rep.p2);
    rep.qcr_high = rep.q2 > q2_degenerate_tol ? 1.0 / std::sqrt(rep.q2)
                                              : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace gqfi
