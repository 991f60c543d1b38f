#pragma once

#include "gqfi/correlation.hpp"
#include "gqfi/metrology.hpp"
#include "gqfi/states.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gqfi {

/// Fixed 9-significant-digit rendering: plain decimal in the comfortable
/// range, lowercase scientific when |x| < 1e-4 or |x| >= 1e7.  Output is
/// byte-identical across runs and platforms for the same value.
inline std::string format_number(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("format_number: value must be finite");
    }
    if (x == 0.0) {
        x = 0.0;  // normalize -0
    }
    char buf[48];
    const double ax = std::abs(x);
    if (ax != 0.0 && (ax < 1e-4 || ax >= 1e7)) {
        std::snprintf(buf, sizeof buf, "%.8e", x);
        return buf;
    }
    int decimals = 8;
    if (ax > 0.0) {
        decimals = 8 - static_cast<int>(std::floor(std::log10(ax)));
    }
    decimals = std::clamp(decimals, 0, 12);
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

/// As format_number but maps infinities to "inf"/"-inf" (used by the state
/// report, where an infinite Cramer-Rao upper bound is meaningful).
inline std::string format_number_or_inf(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return format_number(x);
}

/// Runs fn(0..count-1) on up to `jobs` threads.  Results must be written to
/// per-index slots; assembly order is then independent of scheduling.  The
/// first exception thrown by any worker is rethrown.
template <typename Fn>
inline void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    fn(i);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// N such that (1 + 2N)^-2 = mu.
inline double n_thermal_from_purity(double mu) {
    if (!(mu > 0.0 && mu <= 1.0)) {
        throw std::invalid_argument("n_thermal_from_purity: purity must lie in (0, 1]");
    }
    return 0.5 * (1.0 / std::sqrt(mu) - 1.0);
}

namespace detail {

inline std::string join_rows(const std::string& header, const std::vector<std::string>& rows) {
    std::string out = header;
    for (const std::string& row : rows) {
        out += row;
    }
    return out;
}

}  // namespace detail

/// Correlation and log-negativity vs squeezing at fixed purity.
/// Columns: m,q2,logneg with m on a uniform grid over [0, m_max].
inline std::string fig1a_csv(double mu, double m_max, int steps, int jobs = 1) {
    if (steps < 2) {
        throw std::invalid_argument("fig1a_csv: steps must be >= 2");
    }
    if (!(m_max >= 0.0)) {
        throw std::invalid_argument("fig1a_csv: m_max must be non-negative");
    }
    const double n = n_thermal_from_purity(mu);
    std::vector<std::string> rows(static_cast<std::size_t>(steps));
    parallel_for(steps, jobs, [&](int i) {
        const double m = m_max * i / (steps - 1);
        const STSParams p{n, m};
        rows[static_cast<std::size_t>(i)] = format_number(m) + "," + format_number(q2_sts(p)) + ","
                                            + format_number(log_negativity(make_sts(p))) + "\n";
    });
    return detail::join_rows("m,q2,logneg\n", rows);
}

/// Correlation vs purity for a list of fixed squeezing values, long form.
/// Columns: m,mu,q2 with mu = k/mu_steps for k = 1..mu_steps.
inline std::string fig1b_csv(const std::vector<double>& m_values, int mu_steps, int jobs = 1) {
    if (mu_steps < 1) {
        throw std::invalid_argument("fig1b_csv: mu_steps must be >= 1");
    }
    for (double m : m_values) {
        if (!(m >= 0.0)) {
            throw std::invalid_argument("fig1b_csv: m values must be non-negative");
        }
    }
    const int count = static_cast<int>(m_values.size()) * mu_steps;
    std::vector<std::string> rows(static_cast<std::size_t>(count));
    parallel_for(count, jobs, [&](int idx) {
        const double m = m_values[static_cast<std::size_t>(idx / mu_steps)];
        const double mu = static_cast<double>(idx % mu_steps + 1) / mu_steps;
        const STSParams p{n_thermal_from_purity(mu), m};
        rows[static_cast<std::size_t>(idx)] = format_number(m) + "," + format_number(mu) + ","
                                              + format_number(q2_sts(p)) + "\n";
    });
    return detail::join_rows("m,mu,q2\n", rows);
}

/// Local and total QFI vs theta for a squeezed thermal state.
/// Columns: theta,lqfi,tqfi,ratio with theta uniform over [0, pi].
inline std::string fig3_csv(double n_thermal, double m, double phi, int steps, int jobs = 1) {
    if (steps < 2) {
        throw std::invalid_argument("fig3_csv: steps must be >= 2");
    }
    const GaussianState state = make_sts({n_thermal, m});
    std::vector<std::string> rows(static_cast<std::size_t>(steps));
    parallel_for(steps, jobs, [&](int i) {
        const double theta = std::numbers::pi * i / (steps - 1);
        const MetrologyPoint pt = metrology_point(state, theta, phi);
        rows[static_cast<std::size_t>(i)] = format_number(pt.theta) + "," + format_number(pt.lqfi_a)
                                            + "," + format_number(pt.tqfi) + ","
                                            + format_number(pt.ratio) + "\n";
    });
    return detail::join_rows("theta,lqfi,tqfi,ratio\n", rows);
}

/// Human-readable state report.
inline std::string report_text(double n_thermal, double m, double threshold = vacuum_nu) {
    const GaussianState state = make_sts({n_thermal, m});
    const SymmetricCMParams p = sts_cm_params({n_thermal, m});
    const CorrelationReport rep = correlation_report(state);
    const bool entangled = is_entangled(state, threshold);
    std::ostringstream out;
    const auto line = [&out](const char* key, const std::string& value) {
        out << key;
        for (std::size_t i = std::string(key).size(); i < 18; ++i) {
            out << ' ';
        }
        out << value << '\n';
    };
    line("state", "STS(N=" + format_number(n_thermal) + ", m=" + format_number(m) + ")");
    line("a", format_number(p.a));
    line("d", format_number(p.d));
    line("q2", format_number(rep.q2));
    line("p2", format_number(rep.p2));
    line("argmin", "(" + format_number(rep.argmin_direction.x()) + ", "
                       + format_number(rep.argmin_direction.y()) + ", "
                       + format_number(rep.argmin_direction.z()) + ")");
    line("nu_tilde", format_number(rep.nu_tilde));
    line("log_negativity", format_number(rep.log_neg));
    line("purity", format_number(rep.purity));
    line("entangled", std::string(entangled ? "yes" : "no") + " (threshold "
                          + format_number(threshold) + ")");
    line("qcr_interval", "[" + format_number(rep.qcr_low) + ", "
                             + format_number_or_inf(rep.qcr_high) + "]");
    return out.str();
}

/// Single-row CSV form of the state report.
inline std::string report_csv(double n_thermal, double m, double threshold = vacuum_nu) {
    const GaussianState state = make_sts({n_thermal, m});
    const CorrelationReport rep = correlation_report(state);
    const bool entangled = is_entangled(state, threshold);
    std::string out = "N,m,q2,p2,nu_tilde,log_negativity,purity,qcr_low,qcr_high,entangled\n";
    out += format_number(n_thermal) + "," + format_number(m) + "," + format_number(rep.q2) + ","
           + format_number(rep.p2) + "," + format_number(rep.nu_tilde) + ","
           + format_number(rep.log_neg) + "," + format_number(rep.purity) + ","
           + format_number(rep.qcr_low) + "," + format_number_or_inf(rep.qcr_high) + ","
           + (entangled ? "1" : "0") + "\n";
    return out;
}

}  // namespace gqfi
