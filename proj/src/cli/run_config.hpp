#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfrmt/ensemble.hpp"
#include "pfrmt/errors.hpp"

namespace pfrmt::cli {

// One computation: ensemble, shifts, method, precision, oracle settings.
// For beta = 1 ensembles N is the matrix dimension; for beta = 4 it counts
// quaternion units (the matrix dimension is 2N).
struct RunConfig {
    std::string ensemble = "gauss-beta1";
    int n = 1;
    int nu = 0;
    std::vector<std::complex<double>> kappa1;
    std::vector<std::complex<double>> kappa2;
    std::string method = "pfaffian";
    std::string precision = "double";
    std::uint64_t seed = 1;
    std::int64_t mc_samples = 1'000'000;
    int quadrature_nodes = 200;
    bool normalize = true;
    std::string output;

    EnsembleId ensemble_id() const { return parse_ensemble_id(ensemble); }
    bool extended() const { return precision == "extended"; }

    // Throws ConfigError carrying the failing field path.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path);
    nlohmann::json echo() const;
};

} // namespace pfrmt::cli
