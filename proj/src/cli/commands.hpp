#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace pfrmt::cli {

// Runs the configured methods and assembles the result document.
nlohmann::json run_compute(const RunConfig& c);

// Identity/oracle verification suite; prints one table row per check.
// Returns the number of failed checks. `inject_sign_flip` is a test hook that
// deliberately corrupts the even-sum prefactor so the formula-vs-oracle rows
// must go red.
int run_verify(const std::string& level, bool inject_sign_flip, std::ostream& out);

struct GridSpec {
    std::string kernel = "K12";
    int d = 4;
    std::complex<double> x0{0.0, 1.0}, dx{0.1, 0.0};
    std::complex<double> y0{0.0, 0.0}, dy{0.1, 0.0};
    int nx = 10, ny = 10;
};

std::string kernel_grid_csv(const RunConfig& c, const GridSpec& g);

nlohmann::json run_bench(const RunConfig& c, const std::vector<int>& n_list);

std::string skew_poly_csv(const RunConfig& c, int d);

std::string format_float(double v);  // 17 significant digits

} // namespace pfrmt::cli
