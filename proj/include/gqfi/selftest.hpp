#pragma once

#include "gqfi/correlation.hpp"
#include "gqfi/metrology.hpp"
#include "gqfi/qfi.hpp"
#include "gqfi/states.hpp"
#include "gqfi/sweeps.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace gqfi {

struct SelftestOptions {
    /// Normalization constant the suite validates.  The shipped value is
    /// q2_normalization; overriding it (say to 3.9) must make the
    /// normalization check fail, which is how the harness itself is tested.
    double kappa = q2_normalization;
};

struct CheckResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

struct SelftestReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

namespace detail {

inline std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

inline Eigen::Vector3d random_unit_vector(std::mt19937& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    } while (v.norm() < 1e-6);
    return v.normalized();
}

inline Eigen::Matrix2d rotation_2x2(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
    return r;
}

inline CheckResult check_fig3a_values() {
    const GaussianState state = make_sts({3.0, 0.4});
    const CorrelationReport rep = correlation_report(state);
    const double dq = std::abs(rep.q2 - 1.4584);
    const double dn = std::abs(rep.nu_tilde - 1.5727);
    const bool separable = !is_entangled(state, 0.5) && !is_entangled(state, 1.0);
    const bool pass = dq <= 0.005 && dn <= 0.005 && separable;
    return {1, "fig3a-paper-values", pass,
            strf("q2=%.6f (|d|=%.2e<=5e-3), nu_tilde=%.6f (|d|=%.2e<=5e-3), separable=%s",
                 rep.q2, dq, rep.nu_tilde, dn, separable ? "yes" : "no")};
}

inline CheckResult check_fig3b_values() {
    const GaussianState state = make_sts({1.0, 0.6});
    const CorrelationReport rep = correlation_report(state);
    const double dq = std::abs(rep.q2 - 3.1549);
    const double dn = std::abs(rep.nu_tilde - 0.4518);
    const bool entangled = is_entangled(state, 0.5);
    const bool pass = dq <= 0.0005 && dn <= 0.005 && entangled;
    return {2, "fig3b-paper-values", pass,
            strf("q2=%.6f (|d|=%.2e<=5e-4), nu_tilde=%.6f (|d|=%.2e<=5e-3), entangled=%s",
                 rep.q2, dq, rep.nu_tilde, dn, entangled ? "yes" : "no")};
}

inline CheckResult check_ratio4() {
    bool pass = true;
    std::string detail;
    const STSParams params[] = {{3.0, 0.4}, {1.0, 0.6}};
    for (const STSParams& p : params) {
        const GaussianState state = make_sts(p);
        const std::vector<MetrologyPoint> profile = ratio_profile(state, 0.0, 181);
        const MetrologyPoint& mid = profile[90];  // theta = pi/2
        const double dr = std::abs(mid.ratio - 4.0);
        const double q2c = q2_closed(sts_cm_params(p));
        const double dmin = std::abs(q2_normalization * mid.lqfi_a - q2c) / std::max(1.0, q2c);
        pass = pass && dr <= 1e-9 && dmin <= 1e-9;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += strf("N=%g,m=%g: ratio=%.12f (|d|=%.2e<=1e-9), 4*lqfi vs q2 rel=%.2e",
                       p.n_thermal, p.m_squeeze, mid.ratio, dr, dmin);
    }
    const bool separable = !is_entangled(make_sts(params[0]), 0.5);
    pass = pass && separable;
    detail += separable ? "; fig3a separable" : "; fig3a NOT separable";
    return {3, "ratio4-heisenberg-point", pass, detail};
}

inline CheckResult check_eq4_consistency() {
    std::mt19937 rng(20250810);
    const double n_values[] = {0.0, 0.25, 1.0, 2.0, 3.0};
    const double m_values[] = {0.05, 0.25, 0.45, 0.65, 0.85};
    std::vector<Eigen::Vector3d> dirs;
    for (int i = 0; i < 40; ++i) {
        dirs.push_back(random_unit_vector(rng));
    }
    double worst = 0.0;
    int count = 0;
    for (double n : n_values) {
        for (double m : m_values) {
            const GaussianState state = make_sts({n, m});
            for (const Eigen::Vector3d& dir : dirs) {
                const Generator k = build_generator(GeneratorSpec(dir, Side::A));
                const double fg = qfi_general(state, k);
                const double fi = qfi_isotropic(state, k);
                worst = std::max(worst, std::abs(fg - fi) / (1.0 + fg));
                ++count;
            }
        }
    }
    return {4, "eq4-superoperator-consistency", worst <= 1e-9,
            strf("max rel |general-isotropic| = %.3e over %d points (<=1e-9)", worst, count)};
}

inline CheckResult check_kappa_and_optimizer(const SelftestOptions& opts) {
    // Dense-scan estimate of the normalization constant.
    double worst_kappa = 0.0;
    const STSParams scan_params[] = {{3.0, 0.4}, {1.0, 0.6}};
    for (const STSParams& p : scan_params) {
        const GaussianState state = make_sts(p);
        constexpr int grid = 600;
        double raw_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            const double theta = std::numbers::pi * i / (grid - 1);
            for (int j = 0; j < grid; ++j) {
                const double phi = 2.0 * std::numbers::pi * j / grid;
                raw_min = std::min(raw_min, lqfi(state, GeneratorSpec::from_angles(theta, phi, Side::A)));
            }
        }
        const double kappa_est = q2_closed(sts_cm_params(p)) / raw_min;
        worst_kappa = std::max(worst_kappa, std::abs(kappa_est - opts.kappa));
    }
    // Optimizer against the closed form, with the normalization under test.
    double worst_rel = 0.0;
    for (int ni = 0; ni <= 10; ++ni) {
        for (int mi = 0; mi <= 10; ++mi) {
            const STSParams p{0.5 * ni, 0.1 * mi};
            const GaussianState state = make_sts(p);
            const double numeric = opts.kappa * (q2_numeric(state).value / q2_normalization);
            const double closed = q2_closed(sts_cm_params(p));
            worst_rel = std::max(worst_rel, std::abs(numeric - closed) / std::max(1.0, closed));
        }
    }
    const bool pass = worst_kappa <= 1e-3 && worst_rel <= 1e-6;
    return {5, "kappa-normalization-and-optimizer", pass,
            strf("scan |kappa_est-%.3f| = %.3e (<=1e-3); numeric vs closed rel = %.3e (<=1e-6)",
                 opts.kappa, worst_kappa, worst_rel)};
}

inline CheckResult check_sts_identity() {
    double worst = 0.0;
    for (int ni = 0; ni <= 10; ++ni) {
        for (int mi = 0; mi <= 10; ++mi) {
            const STSParams p{0.5 * ni, 0.1 * mi};
            const double lhs = q2_sts(p);
            const double rhs = q2_closed(sts_cm_params(p));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
        }
    }
    return {6, "sts-closed-form-identity", worst <= 1e-12,
            strf("max rel |q2_sts - q2_closed| = %.3e over 121 points (<=1e-12)", worst)};
}

inline CheckResult check_separability_boundary() {
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
        const double n = 0.5 * i;
        const double nm_star = n * n / (1.0 + 2.0 * n);
        const double m_star = std::asinh(std::sqrt(nm_star));
        const double nu = pt_min_symplectic_eigenvalue(make_sts({n, m_star}));
        worst = std::max(worst, std::abs(nu - 0.5));
    }
    // Log-negativity onset for purity 1/9: nu_tilde crosses 1 at m = ln(3/2)/2.
    const double n_onset = n_thermal_from_purity(1.0 / 9.0);
    const double m_onset = 0.5 * std::log(1.5);
    const double nu_at_onset = pt_min_symplectic_eigenvalue(make_sts({n_onset, m_onset}));
    const double d_onset = std::abs(nu_at_onset - 1.0);
    const bool flip = log_negativity(make_sts({n_onset, m_onset - 1e-6})) == 0.0
                      && log_negativity(make_sts({n_onset, m_onset + 1e-6})) > 0.0
                      && !is_entangled(make_sts({n_onset, m_onset - 1e-6}), 1.0)
                      && is_entangled(make_sts({n_onset, m_onset + 1e-6}), 1.0);
    const bool pass = worst <= 1e-12 && d_onset <= 1e-12 && flip;
    return {7, "separability-boundary", pass,
            strf("max |nu_tilde-1/2| = %.3e (<=1e-12); onset m=%.6f: |nu_tilde-1| = %.3e, flip=%s",
                 worst, m_onset, d_onset, flip ? "yes" : "no")};
}

inline CheckResult check_interference_closed_form() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> un(0.0, 5.0);
    std::uniform_real_distribution<double> um(0.05, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const STSParams p{un(rng), um(rng)};
        const GaussianState state = make_sts(p);
        const Eigen::Vector3d da = random_unit_vector(rng);
        const Eigen::Vector3d db = random_unit_vector(rng);
        const double term = interference_term(state, GeneratorSpec(da, Side::A),
                                              GeneratorSpec(db, Side::B));
        const double closed = interference_closed(da, db, sts_cm_params(p));
        worst = std::max(worst, std::abs(term - closed) / std::max(1.0, std::abs(term)));
    }
    // Product states: identically zero.
    bool product_zero = true;
    for (double a : {0.5, 1.0, 2.5}) {
        const GaussianState state = make_two_mode_symmetric({a, 0.0});
        for (int trial = 0; trial < 5; ++trial) {
            const double c = interference_term(state, GeneratorSpec(random_unit_vector(rng), Side::A),
                                               GeneratorSpec(random_unit_vector(rng), Side::B));
            product_zero = product_zero && c == 0.0;
        }
    }
    const bool pass = worst <= 1e-10 && product_zero;
    return {8, "interference-closed-form", pass,
            strf("max rel |term-closed| = %.3e (<=1e-10); product states exactly zero: %s",
                 worst, product_zero ? "yes" : "no")};
}

inline CheckResult check_schwarz_bound() {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> un(0.0, 5.0);
    std::uniform_real_distribution<double> um(0.0, 1.0);
    int violations = 0;
    constexpr int trials = 10000;
    for (int trial = 0; trial < trials; ++trial) {
        const GaussianState state = make_sts({un(rng), um(rng)});
        const GeneratorSpec sa(random_unit_vector(rng), Side::A);
        const GeneratorSpec sb(random_unit_vector(rng), Side::B);
        if (!schwarz_check(state, sa, sb)) {
            ++violations;
        }
    }
    // Equality at the phase-rotation pair on the fig3a state.
    const GaussianState state = make_sts({3.0, 0.4});
    const GeneratorSpec ya(Eigen::Vector3d(0, 1, 0), Side::A);
    const GeneratorSpec yb(Eigen::Vector3d(0, 1, 0), Side::B);
    const double c = interference_term(state, ya, yb);
    const double bound = std::sqrt(lqfi(state, ya) * lqfi(state, yb));
    const double gap = std::abs(std::abs(c) - bound);
    const bool pass = violations == 0 && gap <= 1e-12;
    return {9, "schwarz-bound", pass,
            strf("violations=%d/%d; equality gap at (0,1,0)/(0,1,0) = %.3e (<=1e-12)",
                 violations, trials, gap)};
}

inline CheckResult check_monotonicity() {
    const double mu = 1.0 / 9.0;
    const double n_fixed = n_thermal_from_purity(mu);
    bool increasing = true;
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double q2 = q2_sts({n_fixed, 0.05 * i});
        increasing = increasing && q2 > prev;
        prev = q2;
    }
    bool decreasing = true;
    prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 20; ++i) {
        const double q2 = q2_sts({n_thermal_from_purity(0.05 * i), 0.4});
        decreasing = decreasing && q2 < prev;
        prev = q2;
    }
    bool loss_monotone = true;
    double worst_gap = 0.0;
    const GaussianState state = make_sts({3.0, 0.4});
    prev = std::numeric_limits<double>::infinity();
    for (int i = 10; i >= 0; --i) {
        const double q2 = q2_numeric(apply_pure_loss(state, 0.1 * i, LossMode::B)).value;
        if (q2 > prev + 1e-9) {
            loss_monotone = false;
            worst_gap = std::max(worst_gap, q2 - prev);
        }
        prev = q2;
    }
    const bool pass = increasing && decreasing && loss_monotone;
    return {10, "monotonicity", pass,
            strf("q2 increasing in m: %s; decreasing in mu: %s; non-increasing under loss: %s (gap %.2e)",
                 increasing ? "yes" : "no", decreasing ? "yes" : "no",
                 loss_monotone ? "yes" : "no", worst_gap)};
}

inline CheckResult check_passive_invariance() {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const GaussianState base = make_sts({3.0, 0.4});
    const double q2_base = q2_numeric(base).value;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const GaussianState rotated =
            apply_local_symplectic(base, rotation_2x2(angle(rng)), rotation_2x2(angle(rng)));
        worst = std::max(worst, std::abs(q2_numeric(rotated).value - q2_base));
    }
    return {11, "passive-invariance", worst <= 1e-6,
            strf("max |q2(rotated)-q2| = %.3e over 100 trials (<=1e-6)", worst)};
}

inline CheckResult check_csv_determinism() {
    const std::string a1 = fig1a_csv(1.0 / 9.0, 1.0, 101, 1);
    const std::string a2 = fig1a_csv(1.0 / 9.0, 1.0, 101, 1);
    const std::string a3 = fig1a_csv(1.0 / 9.0, 1.0, 101, 3);
    const std::string b1 = fig1b_csv({0.3, 0.4, 0.5}, 40, 1);
    const std::string b2 = fig1b_csv({0.3, 0.4, 0.5}, 40, 2);
    const std::string c1 = fig3_csv(3.0, 0.4, 0.0, 91, 1);
    const std::string c2 = fig3_csv(3.0, 0.4, 0.0, 91, 4);
    const bool pass = a1 == a2 && a1 == a3 && b1 == b2 && c1 == c2;
    return {12, "csv-determinism", pass,
            strf("fig1a repeat/jobs: %s; fig1b jobs: %s; fig3 jobs: %s",
                 (a1 == a2 && a1 == a3) ? "identical" : "DIFFER",
                 b1 == b2 ? "identical" : "DIFFER", c1 == c2 ? "identical" : "DIFFER")};
}

}  // namespace detail

/// Runs every acceptance check and reports one result per criterion.
inline SelftestReport run_selftest(const SelftestOptions& opts = {}) {
    SelftestReport report;
    report.checks.push_back(detail::check_fig3a_values());
    report.checks.push_back(detail::check_fig3b_values());
    report.checks.push_back(detail::check_ratio4());
    report.checks.push_back(detail::check_eq4_consistency());
    report.checks.push_back(detail::check_kappa_and_optimizer(opts));
    report.checks.push_back(detail::check_sts_identity());
    report.checks.push_back(detail::check_separability_boundary());
    report.checks.push_back(detail::check_interference_closed_form());
    report.checks.push_back(detail::check_schwarz_bound());
    report.checks.push_back(detail::check_monotonicity());
    report.checks.push_back(detail::check_passive_invariance());
    report.checks.push_back(detail::check_csv_determinism());
    for (const CheckResult& check : report.checks) {
        report.all_pass = report.all_pass && check.pass;
    }
    return report;
}

inline std::string selftest_text(const SelftestReport& report) {
    std::string out;
    int passed = 0;
    for (const CheckResult& check : report.checks) {
        out += detail::strf("[%2d] %s  %-33s %s\n", check.id, check.pass ? "PASS" : "FAIL",
                            check.name.c_str(), check.detail.c_str());
        passed += check.pass ? 1 : 0;
    }
    out += detail::strf("%d/%zu checks passed\n", passed, report.checks.size());
    return out;
}

inline std::string selftest_json(const SelftestReport& report) {
    nlohmann::json j;
    j["all_pass"] = report.all_pass;
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& check : report.checks) {
        j["checks"].push_back({{"id", check.id},
                               {"name", check.name},
                               {"pass", check.pass},
                               {"detail", check.detail}});
    }
    return j.dump(2) + "\n";
}

}  // namespace gqfi
