#include "run_config.hpp"

#include <fstream>
#include <set>

namespace pfrmt::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg, const std::string& field) {
    throw ConfigError(msg, field);
}

std::vector<std::complex<double>> parse_kappa(const json& j, const std::string& field) {
    if (!j.is_array()) fail("expected an array of [re, im] pairs", field);
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        std::string path = field + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail("expected [re, im]", path);
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

} // namespace

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) fail("config must be a JSON object", "");
    static const std::set<std::string> known = {
        "ensemble", "N", "nu", "kappa1", "kappa2", "method", "precision",
        "seed", "mc_samples", "quadrature_nodes", "normalize", "output"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) fail("unknown field", it.key());

    RunConfig c;
    if (!j.contains("ensemble") || !j["ensemble"].is_string())
        fail("required string", "ensemble");
    c.ensemble = j["ensemble"].get<std::string>();
    parse_ensemble_id(c.ensemble);  // throws ConfigError("ensemble") if unknown

    if (!j.contains("N") || !j["N"].is_number_integer()) fail("required integer", "N");
    c.n = j["N"].get<int>();
    if (c.n < 1) fail("must be >= 1", "N");

    bool laguerre = c.ensemble.rfind("laguerre", 0) == 0;
    if (j.contains("nu")) {
        if (!j["nu"].is_number_integer()) fail("expected integer", "nu");
        c.nu = j["nu"].get<int>();
        if (c.nu < 0) fail("must be >= 0", "nu");
        if (!laguerre && c.nu != 0) fail("only meaningful for laguerre ensembles", "nu");
    }

    if (j.contains("kappa1")) c.kappa1 = parse_kappa(j["kappa1"], "kappa1");
    if (j.contains("kappa2")) c.kappa2 = parse_kappa(j["kappa2"], "kappa2");
    for (std::size_t i = 0; i < c.kappa1.size(); ++i)
        if (c.kappa1[i].imag() == 0.0)
            fail("denominator shift must lie off the real axis", "kappa1[" + std::to_string(i) + "]");
    auto check_distinct = [&](const std::vector<std::complex<double>>& v, const char* name) {
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = a + 1; b < v.size(); ++b)
                if (v[a] == v[b])
                    fail("entries must be pairwise distinct",
                         std::string(name) + "[" + std::to_string(b) + "]");
    };
    check_distinct(c.kappa1, "kappa1");
    check_distinct(c.kappa2, "kappa2");

    if (j.contains("method")) {
        if (!j["method"].is_string()) fail("expected string", "method");
        c.method = j["method"].get<std::string>();
        if (c.method != "pfaffian" && c.method != "oracle-quadrature" &&
            c.method != "oracle-mc" && c.method != "all")
            fail("one of pfaffian | oracle-quadrature | oracle-mc | all", "method");
    }
    if (j.contains("precision")) {
        if (!j["precision"].is_string()) fail("expected string", "precision");
        c.precision = j["precision"].get<std::string>();
        if (c.precision != "double" && c.precision != "extended")
            fail("one of double | extended", "precision");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail("expected integer", "seed");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("mc_samples")) {
        if (!j["mc_samples"].is_number_integer()) fail("expected integer", "mc_samples");
        c.mc_samples = j["mc_samples"].get<std::int64_t>();
        if (c.mc_samples < 1) fail("must be >= 1", "mc_samples");
    }
    if (j.contains("quadrature_nodes")) {
        if (!j["quadrature_nodes"].is_number_integer()) fail("expected integer", "quadrature_nodes");
        c.quadrature_nodes = j["quadrature_nodes"].get<int>();
        if (c.quadrature_nodes < 8) fail("must be >= 8", "quadrature_nodes");
    }
    if (j.contains("normalize")) {
        if (!j["normalize"].is_boolean()) fail("expected boolean", "normalize");
        c.normalize = j["normalize"].get<bool>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) fail("expected string", "output");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", "");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "");
    }
    return from_json(j);
}

nlohmann::json RunConfig::echo() const {
    json j;
    j["ensemble"] = ensemble;
    j["N"] = n;
    j["nu"] = nu;
    auto pack = [](const std::vector<std::complex<double>>& v) {
        json arr = json::array();
        for (const auto& z : v) arr.push_back({z.real(), z.imag()});
        return arr;
    };
    j["kappa1"] = pack(kappa1);
    j["kappa2"] = pack(kappa2);
    j["method"] = method;
    j["precision"] = precision;
    j["seed"] = seed;
    j["mc_samples"] = mc_samples;
    j["quadrature_nodes"] = quadrature_nodes;
    j["normalize"] = normalize;
    if (!output.empty()) j["output"] = output;
    return j;
}

} // namespace pfrmt::cli
