#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "../src/cli/commands.hpp"
#include "../src/cli/run_config.hpp"
#include "pfrmt/reduction.hpp"
#include "pfrmt/version.hpp"

namespace {

using nlohmann::json;

// exit codes: 0 success, 1 computation error, 2 config validation error,
// 3 verification failure
constexpr int kOk = 0, kComputeError = 1, kConfigError = 2, kVerifyFailed = 3;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pfrmt::Error("cannot open output file '" + path + "'");
    out << text;
}

json error_object(const char* type, const std::string& message, const std::string& field = "") {
    json e;
    e["error"]["type"] = type;
    e["error"]["message"] = message;
    if (!field.empty()) e["error"]["field"] = field;
    return e;
}

std::complex<double> parse_complex_flag(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw pfrmt::ConfigError("expected RE,IM", "grid");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

void print_summary(const json& result, bool normalize) {
    const auto& results = result["results"];
    for (auto it = results.begin(); it != results.end(); ++it) {
        const json& r = it.value();
        std::string key = normalize || !r.contains("value") ? "normalized" : "value";
        if (r.contains(key)) {
            std::printf("%-18s %s = % .12g %+.12gi", it.key().c_str(), key.c_str(),
                        r[key][0].get<double>(), r[key][1].get<double>());
            if (r.contains("regime"))
                std::printf("   [%s, d=%d]", r["regime"].get<std::string>().c_str(),
                            r["d"].get<int>());
            if (r.contains("stderr"))
                std::printf("   (stderr %.2e, %.2e)", r["stderr"][0].get<double>(),
                            r["stderr"][1].get<double>());
            std::printf("\n");
        } else if (r.contains("unsupported")) {
            std::printf("%-18s skipped: %s\n", it.key().c_str(),
                        r["unsupported"].get<std::string>().c_str());
        }
    }
    if (result.contains("deviations"))
        for (auto it = result["deviations"].begin(); it != result["deviations"].end(); ++it)
            std::printf("%-38s %.3e\n", it.key().c_str(), it.value().get<double>());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"characteristic polynomial ratio averages via Pfaffian reductions"};
    app.set_version_flag("--version", pfrmt::library_version);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: PFRMT_THREADS or all cores)");

    std::string config_path, output_override, method_override;

    auto* compute = app.add_subcommand("compute", "evaluate a configured average");
    compute->add_option("--config", config_path, "RunConfig JSON file")->required();
    compute->add_option("--method", method_override,
                        "override: pfaffian | oracle-quadrature | oracle-mc | all");
    compute->add_option("--output", output_override, "override the result path");

    std::string level = "quick";
    bool inject = false;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--level", level, "quick | full")
        ->check(CLI::IsMember({"quick", "full"}));
    verify->add_flag("--inject-sign-flip", inject)->group("");  // hidden test hook

    pfrmt::cli::GridSpec grid;
    std::string gx0 = "0,1", gdx = "0.2,0", gy0 = "0,0", gdy = "0.2,0";
    auto* kgrid = app.add_subcommand("kernel-grid", "tabulate a kernel on a complex grid (CSV)");
    kgrid->add_option("--config", config_path, "RunConfig JSON file")->required();
    kgrid->add_option("--kernel", grid.kernel, "K11 | K12 | K22");
    kgrid->add_option("--d", grid.d, "kernel order")->required();
    kgrid->add_option("--x0", gx0, "first-argument origin RE,IM");
    kgrid->add_option("--dx", gdx, "first-argument step RE,IM");
    kgrid->add_option("--nx", grid.nx, "first-argument count");
    kgrid->add_option("--y0", gy0, "second-argument origin RE,IM");
    kgrid->add_option("--dy", gdy, "second-argument step RE,IM");
    kgrid->add_option("--ny", grid.ny, "second-argument count");
    kgrid->add_option("--output", output_override, "CSV path (default stdout)");

    std::string n_list_str = "1,2,3";
    auto* bench = app.add_subcommand("bench", "time the Pfaffian path against the oracle");
    bench->add_option("--config", config_path, "RunConfig JSON file")->required();
    bench->add_option("--N-list", n_list_str, "comma-separated N sweep");
    bench->add_option("--output", output_override, "JSON report path (default stdout)");

    int poly_d = 6;
    auto* spoly = app.add_subcommand("skew-poly", "dump the skew-orthogonal basis (CSV)");
    spoly->add_option("--config", config_path, "RunConfig JSON file")->required();
    spoly->add_option("--d", poly_d, "basis size (even)")->required();
    spoly->add_option("--output", output_override, "CSV path (default stdout)");

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) pfrmt::set_threads(threads);

    try {
        if (*compute) {
            auto cfg = pfrmt::cli::RunConfig::from_file(config_path);
            if (!method_override.empty()) cfg.method = method_override;
            if (!output_override.empty()) cfg.output = output_override;
            json result = pfrmt::cli::run_compute(cfg);
            print_summary(result, cfg.normalize);
            if (!cfg.output.empty()) {
                write_text(cfg.output, result.dump(2) + "\n");
                std::printf("result written to %s\n", cfg.output.c_str());
            } else {
                std::cout << result.dump(2) << "\n";
            }
            return kOk;
        }
        if (*verify) {
            int failures = pfrmt::cli::run_verify(level, inject, std::cout);
            return failures == 0 ? kOk : kVerifyFailed;
        }
        if (*kgrid) {
            auto cfg = pfrmt::cli::RunConfig::from_file(config_path);
            grid.x0 = parse_complex_flag(gx0);
            grid.dx = parse_complex_flag(gdx);
            grid.y0 = parse_complex_flag(gy0);
            grid.dy = parse_complex_flag(gdy);
            write_text(output_override, pfrmt::cli::kernel_grid_csv(cfg, grid));
            return kOk;
        }
        if (*bench) {
            auto cfg = pfrmt::cli::RunConfig::from_file(config_path);
            std::vector<int> ns;
            std::stringstream ss(n_list_str);
            for (std::string tok; std::getline(ss, tok, ',');) ns.push_back(std::stoi(tok));
            json report = pfrmt::cli::run_bench(cfg, ns);
            write_text(output_override, report.dump(2) + "\n");
            return kOk;
        }
        if (*spoly) {
            auto cfg = pfrmt::cli::RunConfig::from_file(config_path);
            write_text(output_override, pfrmt::cli::skew_poly_csv(cfg, poly_d));
            return kOk;
        }
    } catch (const pfrmt::ConfigError& e) {
        std::cout << error_object("ConfigError", e.what(), e.field).dump() << "\n";
        return kConfigError;
    } catch (const pfrmt::Error& e) {
        std::cout << error_object("ComputationError", e.what()).dump() << "\n";
        return kComputeError;
    } catch (const std::exception& e) {
        std::cout << error_object("InternalError", e.what()).dump() << "\n";
        return kComputeError;
    }
    return kOk;
}
