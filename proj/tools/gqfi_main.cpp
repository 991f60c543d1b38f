#include "gqfi/gqfi.hpp"
#include "gqfi/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

namespace {

int write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: cannot open '%s' for writing\n", path.c_str());
        return 2;
    }
    out << text;
    return out.good() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Fisher information and quantum-correlation toolkit "
                 "for two-mode Gaussian states"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.set_config("--config", "", "Read options from a key=value file (flags win)");

    std::string out_path;
    int jobs = 1;
    app.add_option("--out", out_path, "Write CSV/text output to FILE instead of stdout")
        ->capture_default_str();
    app.add_option("--jobs", jobs, "Number of worker threads for sweeps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    double mu = 1.0 / 9.0;
    double m_max = 1.0;
    double n_thermal = 0.0;
    double m_squeeze = 0.0;
    double phi = 0.0;
    double threshold = 0.5;
    int steps = 0;
    std::vector<double> m_list = {0.3, 0.4, 0.5};
    bool json = false;
    double kappa = gqfi::q2_normalization;

    CLI::App* fig1a = app.add_subcommand(
        "fig1a", "CSV sweep of q2 and log-negativity vs squeezing m at fixed purity");
    fig1a->add_option("--mu", mu, "Purity in (0, 1]")->required();
    fig1a->add_option("--m-max", m_max, "Upper end of the m grid")->capture_default_str();
    fig1a->add_option("--steps", steps, "Grid points")->default_val(201);

    CLI::App* fig1b = app.add_subcommand(
        "fig1b", "CSV sweep of q2 vs purity mu for fixed squeezing values (long form)");
    fig1b->add_option("--m", m_list, "Squeezing values (repeatable)")->capture_default_str();
    fig1b->add_option("--steps", steps, "Number of mu grid points, mu = k/steps")->default_val(100);

    CLI::App* fig3 = app.add_subcommand(
        "fig3", "CSV sweep of local/total QFI and their ratio vs theta");
    fig3->add_option("--N", n_thermal, "Thermal photons per mode")->required();
    fig3->add_option("--m", m_squeeze, "Two-mode squeezing parameter")->required();
    fig3->add_option("--phi", phi, "Generator azimuth phi")->capture_default_str();
    fig3->add_option("--steps", steps, "Theta grid points over [0, pi]")->default_val(181);

    CLI::App* report = app.add_subcommand("report", "Print the correlation report of one state");
    report->add_option("--N", n_thermal, "Thermal photons per mode")->required();
    report->add_option("--m", m_squeeze, "Two-mode squeezing parameter")->required();
    report->add_option("--threshold", threshold, "Entanglement threshold")
        ->check(CLI::IsMember({0.5, 1.0}))
        ->capture_default_str();

    CLI::App* selftest = app.add_subcommand("selftest", "Run the acceptance checks");
    selftest->add_flag("--json", json, "Machine-readable results");
    selftest->add_option("--kappa", kappa,
                         "Normalization constant under test; non-default values are "
                         "expected to fail (verifies the harness detects faults)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fig1a) {
            return write_output(gqfi::fig1a_csv(mu, m_max, steps, jobs), out_path);
        }
        if (*fig1b) {
            return write_output(gqfi::fig1b_csv(m_list, steps, jobs), out_path);
        }
        if (*fig3) {
            return write_output(gqfi::fig3_csv(n_thermal, m_squeeze, phi, steps, jobs), out_path);
        }
        if (*report) {
            const int rc = write_output(gqfi::report_text(n_thermal, m_squeeze, threshold), "");
            if (rc == 0 && !out_path.empty()) {
                return write_output(gqfi::report_csv(n_thermal, m_squeeze, threshold), out_path);
            }
            return rc;
        }
        if (*selftest) {
            const gqfi::SelftestReport result = gqfi::run_selftest({kappa});
            const int rc = write_output(json ? gqfi::selftest_json(result)
                                             : gqfi::selftest_text(result),
                                        out_path);
            if (rc != 0) {
                return rc;
            }
            return result.all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
