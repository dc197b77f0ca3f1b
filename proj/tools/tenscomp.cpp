// tenscomp: command-line front end for tensor completion.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tenscomp/error.hpp"
#include "tenscomp/experiment.hpp"
#include "tenscomp/io.hpp"
#include "tenscomp/solver.hpp"
#include "tenscomp/tsvd.hpp"

namespace tc = tenscomp;

namespace {

struct CompleteArgs {
    std::string config;
    std::string input, truth, mask, out, report, trace;
    double rate = 0.5;
    std::uint64_t seed = 0;
    std::string method = "bemcp";
    double gamma = 0, lambda = 0, rho0 = 0, mu = 0, eps = 0;
    std::size_t max_iter = 0;
};

int run_complete(const CompleteArgs& a, const CLI::App& sub) {
    tc::ExperimentConfig cfg;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw std::runtime_error("cannot open config " + a.config);
        cfg = tc::experiment_config_from_json(nlohmann::json::parse(in));
    }
    auto given = [&](const char* name) { return sub.count(name) > 0; };
    if (given("--input")) cfg.input = a.input;
    if (given("--truth")) cfg.truth = a.truth;
    if (given("--mask")) {
        cfg.mask_file = a.mask;
        cfg.generated.reset();
    }
    if (given("--rate") || given("--seed")) {
        tc::GeneratedMask g = cfg.generated.value_or(tc::GeneratedMask{});
        if (given("--rate")) g.rate = a.rate;
        if (given("--seed")) g.seed = a.seed;
        cfg.generated = g;
        if (!given("--mask")) cfg.mask_file.reset();
    }
    if (given("--method")) cfg.solver.method = tc::parse_method(a.method);
    if (given("--gamma")) cfg.solver.gamma_init = a.gamma;
    if (given("--lambda")) cfg.solver.lambda_init = a.lambda;
    if (given("--rho0")) cfg.solver.rho0 = a.rho0;
    if (given("--mu")) cfg.solver.mu = a.mu;
    if (given("--eps")) cfg.solver.eps = a.eps;
    if (given("--max-iter")) cfg.solver.max_iter = a.max_iter;
    if (given("--out")) cfg.output = a.out;
    if (given("--report")) cfg.report = a.report;
    if (given("--trace")) cfg.trace = a.trace;

    const tc::ExperimentOutcome res = tc::run_experiment(cfg);
    for (const auto& w : res.report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << tc::to_string(res.report.method) << ": " << res.report.iterations << " iterations"
              << (res.report.converged ? " (converged)" : " (not converged)");
    if (res.report.rel_error) {
        std::cout << ", psnr " << *res.report.psnr << " dB, rel_error " << *res.report.rel_error;
    }
    std::cout << ", " << res.report.wall_time_s << " s\n";
    return 0;
}

int run_rank(const std::string& input) {
    const tc::DenseTensor t = tc::load_tensor(input);
    const auto ranks = tc::n_tubal_rank(t);
    const auto pairs = tc::mode_pairs(t.order());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        std::cout << (i ? " " : "") << ranks[i];
    }
    std::cout << '\n';
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        std::cerr << "  " << tc::to_string(pairs[i]) << ": " << ranks[i] << '\n';
    }
    return 0;
}

tc::Shape parse_shape(const std::string& text) {
    tc::Shape shape;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(part, &used);
        if (used != part.size()) throw std::invalid_argument("bad extent '" + part + "' in shape " + text);
        shape.push_back(static_cast<std::size_t>(v));
    }
    tc::validate_shape(shape);
    return shape;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank tensor completion with minimax-concave penalties"};
    app.require_subcommand(1);

    CompleteArgs ca;
    auto* complete = app.add_subcommand("complete", "Complete a partially observed tensor");
    complete->add_option("--config", ca.config, "JSON experiment config; flags override its fields");
    complete->add_option("--input", ca.input, "Observed tensor (DTF1)");
    complete->add_option("--truth", ca.truth, "Ground truth (DTF1); observations are taken from it");
    complete->add_option("--mask", ca.mask, "Observation mask (DTF1 of 0/1)");
    complete->add_option("--rate", ca.rate, "Sampling rate for a generated mask")->check(CLI::Range(0.0, 1.0));
    complete->add_option("--seed", ca.seed, "Seed for the generated mask");
    complete->add_option("--method", ca.method, "nmcp | emcp | bemcp")
        ->check(CLI::IsMember({"nmcp", "emcp", "bemcp"}, CLI::ignore_case));
    complete->add_option("--gamma", ca.gamma, "Initial gamma (> 1)");
    complete->add_option("--lambda", ca.lambda, "Initial lambda (>= 0)");
    complete->add_option("--rho0", ca.rho0, "Initial penalty parameter");
    complete->add_option("--mu", ca.mu, "Penalty growth factor");
    complete->add_option("--eps", ca.eps, "Stop when the X change and the max |X - Y| both fall to eps");
    complete->add_option("--max-iter", ca.max_iter, "Iteration limit");
    complete->add_option("--out", ca.out, "Completed tensor (DTF1)");
    complete->add_option("--report", ca.report, "Report (JSON)");
    complete->add_option("--trace", ca.trace, "Per-iteration trace (CSV)");
    complete->get_option("--mask")->excludes("--rate");

    std::string rank_input;
    auto* rank = app.add_subcommand("rank", "Print the tubal rank of every mode-(k1,k2) unfolding");
    rank->add_option("--input", rank_input, "Tensor (DTF1)")->required();

    std::string mask_shape, mask_out;
    double mask_rate = 0.5;
    std::uint64_t mask_seed = 0;
    auto* mask = app.add_subcommand("mask", "Write a uniformly sampled observation mask");
    mask->add_option("--shape", mask_shape, "Extents, e.g. 30,30,10")->required();
    mask->add_option("--rate", mask_rate, "Fraction of observed entries")->required()->check(CLI::Range(0.0, 1.0));
    mask->add_option("--seed", mask_seed, "RNG seed")->required();
    mask->add_option("--out", mask_out, "Output mask (DTF1)")->required();

    std::string synth_shape = "20,20,5", synth_out;
    std::size_t synth_rank = 2;
    std::uint64_t synth_seed = 7;
    auto* synth = app.add_subcommand("synth", "Write a random I1 x I2 x I3 tensor of given tubal rank");
    synth->add_option("--shape", synth_shape, "Extents I1,I2,I3")->capture_default_str();
    synth->add_option("--rank", synth_rank, "Tubal rank")->capture_default_str();
    synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output tensor (DTF1)")->required();

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (complete->parsed()) return run_complete(ca, *complete);
        if (rank->parsed()) return run_rank(rank_input);
        if (mask->parsed()) {
            tc::save_mask(tc::generate_mask(parse_shape(mask_shape), mask_rate, mask_seed), mask_out);
            return 0;
        }
        if (synth->parsed()) {
            const tc::Shape s = parse_shape(synth_shape);
            if (s.size() != 3) throw std::invalid_argument("synth needs a three-way shape");
            tc::save_tensor(tc::synthetic_low_tubal_rank(s[0], s[1], s[2], synth_rank, synth_seed), synth_out);
            return 0;
        }
    } catch (const tc::FormatError& e) {
        std::cerr << "error: malformed tensor file: " << e.what() << '\n';
        return 3;
    } catch (const tc::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
