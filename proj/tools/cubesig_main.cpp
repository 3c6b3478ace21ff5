#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cubesig/engine.hpp"
#include "cubesig/errors.hpp"
#include "cubesig/io.hpp"
#include "cubesig/oracles.hpp"
#include "cubesig/tensor.hpp"
#include "cubesig/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitBudget = 2;
constexpr int kExitVerifyFailed = 3;

struct CommonOpts {
    int level = 2;
    std::string quadrature = "grid";
    int mc_samples = 100000;
    std::uint64_t seed = 0;
    double normalize_cap = 0.0;  // 0 means no normalization
    std::uint64_t budget = cubesig::kDefaultBudget;
    std::string format = "json";
    std::string out;
};

cubesig::QuadratureSpec quad_of(const CommonOpts& o) {
    cubesig::QuadratureSpec q;
    q.mode = o.quadrature == "mc" ? cubesig::QuadratureMode::MonteCarlo
                                  : cubesig::QuadratureMode::Grid;
    q.mc_samples = o.mc_samples;
    q.seed = o.seed;
    return q;
}

void write_output(const std::string& out, const std::string& content) {
    if (out.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw cubesig::InvalidInput("cannot write " + out);
    f << content;
}

int run_compute(const std::string& input, const CommonOpts& o) {
    const cubesig::GridMap x = cubesig::load_grid_map(input);
    const cubesig::JacobianField field = cubesig::jacobian_field(x);
    cubesig::GradedTensor sig = cubesig::signature(field, o.level, quad_of(o), o.budget);
    double lambda = 1.0;
    if (o.normalize_cap > 0.0) {
        cubesig::NormalizationConfig cfg;
        cfg.cap = o.normalize_cap;
        auto [normed, l] = cubesig::normalize(sig, cfg);
        sig = std::move(normed);
        lambda = l;
    }
    if (o.format == "csv") {
        write_output(o.out, cubesig::tensor_to_csv(sig));
    } else {
        json doc = cubesig::tensor_to_json(sig);
        doc["metadata"] = {{"d", x.d()},       {"n", x.n()},
                           {"M", o.level},     {"quadrature", o.quadrature},
                           {"seed", o.seed},   {"lambda", lambda},
                           {"normalized", o.normalize_cap > 0.0}};
        write_output(o.out, doc.dump(2) + "\n");
    }
    return kExitOk;
}

int run_compare(const std::string& input_a, const std::string& input_b, const CommonOpts& o) {
    const cubesig::GridMap x = cubesig::load_grid_map(input_a);
    const cubesig::GridMap y = cubesig::load_grid_map(input_b);
    const double mu1 = cubesig::metric_mu(x, y, cubesig::Metric::One);
    const double mu_inf = cubesig::metric_mu(x, y, cubesig::Metric::Inf);
    const cubesig::GradedTensor sx =
        cubesig::parametrized_signature(x, o.level, quad_of(o), o.budget);
    const cubesig::GradedTensor sy =
        cubesig::parametrized_signature(y, o.level, quad_of(o), o.budget);
    cubesig::GradedTensor diff(sx.d, sx.n, sx.level0 - sy.level0);
    for (const auto& [idx, v] : sx.coeffs) diff.add(idx, v);
    for (const auto& [idx, v] : sy.coeffs) diff.add(idx, -v);
    const json doc = {{"mu1", mu1},
                      {"mu_inf", mu_inf},
                      {"signature_distance", cubesig::norm(diff)},
                      {"level", o.level}};
    write_output(o.out, doc.dump(2) + "\n");
    return kExitOk;
}

int run_kernel(const std::string& dir, const CommonOpts& o) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw cubesig::InvalidInput("no .json grid maps in " + dir);

    std::vector<std::string> bad;
    std::vector<cubesig::GridMap> maps;
    for (const auto& f : files) {
        try {
            maps.push_back(cubesig::load_grid_map(f));
        } catch (const std::exception& e) {
            bad.push_back(f + ": " + e.what());
        }
    }
    if (!bad.empty()) {
        for (const auto& b : bad) std::cerr << "invalid input: " << b << "\n";
        return kExitInvalidInput;
    }

    cubesig::NormalizationConfig cfg;
    if (o.normalize_cap > 0.0) cfg.cap = o.normalize_cap;
    std::vector<cubesig::GradedTensor> sigs;
    for (const auto& m : maps) {
        auto sig = cubesig::parametrized_signature(m, o.level, quad_of(o), o.budget);
        sigs.push_back(cubesig::normalize(sig, cfg).first);
    }
    const std::size_t k = sigs.size();
    std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j)
            gram[i][j] = gram[j][i] = cubesig::inner_product(sigs[i], sigs[j]);

    if (o.format == "csv") {
        std::string csv;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (j) csv += ',';
                csv += cubesig::format_double(gram[i][j]);
            }
            csv += '\n';
        }
        write_output(o.out, csv);
    } else {
        write_output(o.out, json{{"files", files}, {"gram", gram}}.dump(2) + "\n");
    }
    return kExitOk;
}

int run_verify(const CommonOpts& o, const std::string& config_path) {
    cubesig::VerifyOptions opts;
    opts.seed = o.seed;
    opts.budget = o.budget;
    opts.tolerances = cubesig::load_tolerances(config_path);
    const cubesig::VerifyReport report = cubesig::run_verification(opts);
    write_output(o.out, cubesig::report_to_json(report).dump(2) + "\n");
    for (const auto& e : report.entries)
        std::cerr << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << " observed=" << e.observed
                  << " tolerance=" << e.tolerance << "\n";
    return report.all_pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mapping space signatures of gridded maps"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string input, input_b, dir;
    std::string config_path = "config/verify.json";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--level", o.level, "truncation level M")->check(CLI::NonNegativeNumber);
        cmd->add_option("--quadrature", o.quadrature, "grid or mc")
            ->check(CLI::IsMember({"grid", "mc"}));
        cmd->add_option("--mc-samples", o.mc_samples, "monte-carlo sample count");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_option("--normalize", o.normalize_cap, "normalization cap C");
        cmd->add_option("--budget", o.budget, "max accumulated terms");
        cmd->add_option("--format", o.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    };

    auto* compute = app.add_subcommand("compute", "signature of a grid map");
    compute->add_option("input", input, "grid map JSON")->required();
    add_common(compute);

    auto* compare = app.add_subcommand("compare", "metrics and signature distance");
    compare->add_option("input_a", input, "first grid map")->required();
    compare->add_option("input_b", input_b, "second grid map")->required();
    add_common(compare);

    auto* kernel = app.add_subcommand("kernel", "Gram matrix of a map directory");
    kernel->add_option("dir", dir, "directory of grid map JSON files")->required();
    add_common(kernel);

    auto* verify = app.add_subcommand("verify", "run the identity verification suite");
    verify->add_option("--config", config_path, "tolerance table JSON");
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (compute->parsed()) return run_compute(input, o);
        if (compare->parsed()) return run_compare(input, input_b, o);
        if (kernel->parsed()) return run_kernel(dir, o);
        if (verify->parsed()) return run_verify(o, config_path);
    } catch (const cubesig::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return kExitOk;
}
