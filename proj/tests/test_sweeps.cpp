#include "gqfi/sweeps.hpp"

#include "gqfi/selftest.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

using Catch::Matchers::WithinAbs;
using namespace gqfi;

namespace {

std::vector<std::string> lines_of(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

std::vector<double> fields_of(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) {
        out.push_back(std::stod(field));
    }
    return out;
}

}  // namespace

TEST_CASE("format_number") {
    REQUIRE(format_number(0.0) == "0.00000000");
    REQUIRE(format_number(-0.0) == "0.00000000");
    REQUIRE(format_number(1.0) == "1.00000000");
    REQUIRE(format_number(-2.5) == "-2.50000000");
    REQUIRE(format_number(1234567.89) == "1234567.89");
    REQUIRE(format_number(0.000123456789) == "0.000123456789");
    // scientific for tiny and huge magnitudes, lowercase e
    REQUIRE(format_number(1e-5) == "1.00000000e-05");
    REQUIRE(format_number(12345678.0) == "1.23456780e+07");
    REQUIRE(format_number(-3.25e9) == "-3.25000000e+09");
    REQUIRE_THROWS_AS(format_number(std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
    REQUIRE(format_number_or_inf(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("fig1a sweep") {
    const std::string csv = fig1a_csv(1.0 / 9.0, 1.0, 11, 1);
    const std::vector<std::string> lines = lines_of(csv);
    REQUIRE(lines.size() == 12);
    REQUIRE(lines[0] == "m,q2,logneg");

    SECTION("m = 0 row is all zero") {
        const std::vector<double> row = fields_of(lines[1]);
        REQUIRE(row[0] == 0.0);
        REQUIRE(row[1] == 0.0);
        REQUIRE(row[2] == 0.0);
    }

    SECTION("m = 0.4 row") {
        const std::vector<double> row = fields_of(lines[5]);
        REQUIRE_THAT(row[0], WithinAbs(0.4, 1e-12));
        REQUIRE_THAT(row[1], WithinAbs(1.0920907877503052, 1e-8));
    }

    SECTION("log-negativity onset near m = ln(3/2)/2") {
        const std::string fine = fig1a_csv(1.0 / 9.0, 1.0, 1001, 2);
        const std::vector<std::string> rows = lines_of(fine);
        // 0.2027...: zero at m = 0.202, positive at m = 0.203
        const std::vector<double> below = fields_of(rows[1 + 202]);
        const std::vector<double> above = fields_of(rows[1 + 203]);
        REQUIRE(below[2] == 0.0);
        REQUIRE(above[2] > 0.0);
    }

    REQUIRE_THROWS_AS(fig1a_csv(0.0, 1.0, 11), std::invalid_argument);
    REQUIRE_THROWS_AS(fig1a_csv(1.5, 1.0, 11), std::invalid_argument);
    REQUIRE_THROWS_AS(fig1a_csv(0.5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("fig1b sweep") {
    const std::string csv = fig1b_csv({0.0, 0.4}, 10, 1);
    const std::vector<std::string> lines = lines_of(csv);
    REQUIRE(lines[0] == "m,mu,q2");
    REQUIRE(lines.size() == 21);

    SECTION("m = 0 block is identically zero") {
        for (int i = 1; i <= 10; ++i) {
            REQUIRE(fields_of(lines[i])[2] == 0.0);
        }
    }

    SECTION("q2 strictly decreasing in mu for m > 0") {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 11; i <= 20; ++i) {
            const double q2 = fields_of(lines[i])[2];
            REQUIRE(q2 < prev);
            prev = q2;
        }
    }

    SECTION("mu = 1 endpoint") {
        const std::vector<double> last = fields_of(lines[20]);
        REQUIRE(last[1] == 1.0);
        REQUIRE_THAT(last[2], WithinAbs(0.3154928942389771, 1e-9));
    }
}

TEST_CASE("fig3 sweep") {
    const std::string csv = fig3_csv(3.0, 0.4, 0.0, 91, 1);
    const std::vector<std::string> lines = lines_of(csv);
    REQUIRE(lines[0] == "theta,lqfi,tqfi,ratio");
    REQUIRE(lines.size() == 92);

    SECTION("theta = pi/2 row has ratio 4") {
        const std::vector<double> mid = fields_of(lines[1 + 45]);
        REQUIRE_THAT(mid[3], WithinAbs(4.0, 1e-9));
        // lqfi and tqfi are each rounded to 9 significant digits in the CSV
        REQUIRE_THAT(mid[2], WithinAbs(4.0 * mid[1], 1e-7));
    }

    SECTION("m = 0 sweep has ratio 2 everywhere") {
        for (const std::string& line : lines_of(fig3_csv(3.0, 0.0, 0.0, 21, 1))) {
            if (line == "theta,lqfi,tqfi,ratio") {
                continue;
            }
            REQUIRE_THAT(fields_of(line)[3], WithinAbs(2.0, 1e-12));
        }
    }
}

TEST_CASE("sweeps are deterministic and job-count independent") {
    REQUIRE(fig1a_csv(1.0 / 9.0, 1.0, 101, 1) == fig1a_csv(1.0 / 9.0, 1.0, 101, 1));
    REQUIRE(fig1a_csv(1.0 / 9.0, 1.0, 101, 1) == fig1a_csv(1.0 / 9.0, 1.0, 101, 4));
    REQUIRE(fig1b_csv({0.3, 0.4, 0.5}, 37, 1) == fig1b_csv({0.3, 0.4, 0.5}, 37, 3));
    REQUIRE(fig3_csv(3.0, 0.4, 0.0, 61, 1) == fig3_csv(3.0, 0.4, 0.0, 61, 4));
    REQUIRE(fig3_csv(1.0, 0.6, 0.7, 31, 2) == fig3_csv(1.0, 0.6, 0.7, 31, 5));
}

TEST_CASE("report output") {
    const std::string text = report_text(3.0, 0.4);
    REQUIRE(text.find("q2") != std::string::npos);
    REQUIRE(text.find("1.45841055") != std::string::npos);
    REQUIRE(text.find("nu_tilde") != std::string::npos);
    REQUIRE(text.find("no (threshold 0.500000000)") != std::string::npos);

    const std::string csv = report_csv(1.0, 0.6);
    const std::vector<std::string> lines = lines_of(csv);
    REQUIRE(lines.size() == 2);
    REQUIRE(lines[0] == "N,m,q2,p2,nu_tilde,log_negativity,purity,qcr_low,qcr_high,entangled");
    REQUIRE(lines[1].back() == '1');  // entangled

    // uncorrelated state carries the documented infinite sentinel
    const std::string product = report_csv(1.0, 0.0);
    REQUIRE(product.find(",inf,") != std::string::npos);
}

TEST_CASE("selftest harness") {
    SECTION("fault injection: kappa = 3.9 must fail the normalization check") {
        const CheckResult good = gqfi::detail::check_kappa_and_optimizer({q2_normalization});
        const CheckResult bad = gqfi::detail::check_kappa_and_optimizer({3.9});
        REQUIRE(good.pass);
        REQUIRE_FALSE(bad.pass);
    }

    SECTION("json rendering carries one entry per check") {
        SelftestReport report;
        report.checks.push_back({1, "alpha", true, "ok"});
        report.checks.push_back({2, "beta", false, "bad"});
        report.all_pass = false;
        const std::string json = selftest_json(report);
        REQUIRE(json.find("\"all_pass\": false") != std::string::npos);
        REQUIRE(json.find("\"name\": \"alpha\"") != std::string::npos);
        REQUIRE(json.find("\"pass\": false") != std::string::npos);
    }
}
