#include "tenscomp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tenscomp/error.hpp"
#include "tenscomp/io.hpp"
#include "tenscomp/tsvd.hpp"

namespace tenscomp {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

double cap_psnr(double v) { return std::isinf(v) && v > 0 ? kPsnrFileCap : v; }

json path_or_null(const std::optional<std::filesystem::path>& p) { return p ? json(p->string()) : json(nullptr); }

std::optional<std::filesystem::path> read_path(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return std::filesystem::path(j.at(key).get<std::string>());
}

}  // namespace

void ExperimentConfig::validate() const {
    if (input.empty()) throw std::invalid_argument("experiment: input path is required");
    if (output.empty()) throw std::invalid_argument("experiment: output path is required");
    if (report.empty()) throw std::invalid_argument("experiment: report path is required");
    if (!mask_file && !generated) throw std::invalid_argument("experiment: give a mask file or a sampling rate");
    if (!mask_file && !(generated->rate > 0.0 && generated->rate <= 1.0)) {
        throw std::invalid_argument("experiment: sampling rate must be in (0, 1]");
    }
}

// ---------------------------------------------------------------------------

json solver_config_to_json(const SolverConfig& cfg) {
    return json{{"method", to_string(cfg.method)},
                {"alpha", cfg.alpha},
                {"rho0", cfg.rho0},
                {"mu", cfg.mu},
                {"eps", cfg.eps},
                {"max_iter", cfg.max_iter},
                {"gamma_init", cfg.gamma_init},
                {"lambda_init", optional_number(cfg.lambda_init)},
                {"epsilon_bar", cfg.epsilon_bar},
                {"seed", cfg.seed}};
}

SolverConfig solver_config_from_json(const json& j) {
    SolverConfig cfg;
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<std::vector<double>>();
    if (j.contains("rho0")) cfg.rho0 = j.at("rho0").get<double>();
    if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<std::size_t>();
    if (j.contains("gamma_init")) cfg.gamma_init = j.at("gamma_init").get<double>();
    cfg.lambda_init = read_optional_number(j, "lambda_init");
    if (j.contains("epsilon_bar")) cfg.epsilon_bar = j.at("epsilon_bar").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json mask;
    if (cfg.mask_file) {
        mask = {{"file", cfg.mask_file->string()}};
    } else if (cfg.generated) {
        mask = {{"rate", cfg.generated->rate}, {"seed", cfg.generated->seed}};
    }
    return json{{"input", cfg.input.string()},
                {"truth", path_or_null(cfg.truth)},
                {"mask", mask},
                {"solver", solver_config_to_json(cfg.solver)},
                {"output", {{"tensor", cfg.output.string()},
                            {"report", cfg.report.string()},
                            {"trace", path_or_null(cfg.trace)}}}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (auto p = read_path(j, "input")) cfg.input = *p;
    cfg.truth = read_path(j, "truth");
    if (j.contains("mask") && j.at("mask").is_object()) {
        const json& m = j.at("mask");
        cfg.mask_file = read_path(m, "file");
        if (m.contains("rate")) {
            cfg.generated = GeneratedMask{m.at("rate").get<double>(), m.value("seed", std::uint64_t{0})};
        }
    }
    if (j.contains("solver")) cfg.solver = solver_config_from_json(j.at("solver"));
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (auto p = read_path(o, "tensor")) cfg.output = *p;
        if (auto p = read_path(o, "report")) cfg.report = *p;
        cfg.trace = read_path(o, "trace");
    }
    return cfg;
}

json report_to_json(const CompletionReport& r) {
    std::vector<double> band_psnr;
    for (double v : r.band_psnr) band_psnr.push_back(cap_psnr(v));
    return json{{"schema", kReportSchema},
                {"method", to_string(r.method)},
                {"psnr", r.psnr ? json(cap_psnr(*r.psnr)) : json(nullptr)},
                {"ssim", optional_number(r.ssim)},
                {"ergas", optional_number(r.ergas)},
                {"rel_error", optional_number(r.rel_error)},
                {"band_psnr", band_psnr},
                {"band_ssim", r.band_ssim},
                {"ergas_excluded_bands", r.ergas_excluded_bands},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"wall_time_s", r.wall_time_s},
                {"observed_entries", r.observed_entries},
                {"total_entries", r.total_entries},
                {"trace", r.trace_path ? json(*r.trace_path) : json(nullptr)},
                {"warnings", r.warnings},
                {"config", r.config}};
}

CompletionReport report_from_json(const json& j) {
    if (const std::string problem = check_report_schema(j); !problem.empty()) {
        throw std::invalid_argument("malformed report: " + problem);
    }
    CompletionReport r;
    r.method = parse_method(j.at("method").get<std::string>());
    r.psnr = read_optional_number(j, "psnr");
    r.ssim = read_optional_number(j, "ssim");
    r.ergas = read_optional_number(j, "ergas");
    r.rel_error = read_optional_number(j, "rel_error");
    r.band_psnr = j.at("band_psnr").get<std::vector<double>>();
    r.band_ssim = j.at("band_ssim").get<std::vector<double>>();
    r.ergas_excluded_bands = j.at("ergas_excluded_bands").get<std::vector<std::size_t>>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.observed_entries = j.at("observed_entries").get<std::size_t>();
    r.total_entries = j.at("total_entries").get<std::size_t>();
    if (!j.at("trace").is_null()) r.trace_path = j.at("trace").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.config = j.at("config");
    return r;
}

std::string check_report_schema(const json& j) {
    if (!j.is_object()) return "report is not an object";
    auto need = [&](const char* key, auto pred, const char* type) -> std::string {
        if (!j.contains(key)) return std::string("missing field '") + key + "'";
        if (!pred(j.at(key))) return std::string("field '") + key + "' is not " + type;
        return {};
    };
    auto number_or_null = [](const json& v) { return v.is_null() || v.is_number(); };
    auto number_array = [](const json& v) {
        if (!v.is_array()) return false;
        for (const auto& e : v) {
            if (!e.is_number()) return false;
        }
        return true;
    };
    auto count_array = [](const json& v) {
        if (!v.is_array()) return false;
        for (const auto& e : v) {
            if (!e.is_number_unsigned()) return false;
        }
        return true;
    };
    const std::string checks[] = {
        need("schema", [](const json& v) { return v.is_string() && v.get<std::string>() == kReportSchema; },
             kReportSchema),
        need("method", [](const json& v) { return v.is_string(); }, "a string"),
        need("psnr", number_or_null, "a number or null"),
        need("ssim", number_or_null, "a number or null"),
        need("ergas", number_or_null, "a number or null"),
        need("rel_error", number_or_null, "a number or null"),
        need("band_psnr", number_array, "a number array"),
        need("band_ssim", number_array, "a number array"),
        need("ergas_excluded_bands", count_array, "an index array"),
        need("iterations", [](const json& v) { return v.is_number_unsigned(); }, "a count"),
        need("converged", [](const json& v) { return v.is_boolean(); }, "a boolean"),
        need("wall_time_s", [](const json& v) { return v.is_number() && v.get<double>() >= 0.0; },
             "a nonnegative number"),
        need("observed_entries", [](const json& v) { return v.is_number_unsigned(); }, "a count"),
        need("total_entries", [](const json& v) { return v.is_number_unsigned(); }, "a count"),
        need("trace", [](const json& v) { return v.is_null() || v.is_string(); }, "a string or null"),
        need("warnings", [](const json& v) { return v.is_array(); }, "an array"),
        need("config", [](const json& v) { return v.is_object(); }, "an object"),
    };
    for (const auto& c : checks) {
        if (!c.empty()) return c;
    }
    return {};
}

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out) {
    out << "iter,inf_norm_diff,elapsed_s,psnr,primal_residual\n";
    out << std::setprecision(17);
    for (const auto& r : trace) {
        out << r.iter << ',' << r.inf_norm_diff << ',' << r.elapsed_s << ',';
        if (r.psnr) out << cap_psnr(*r.psnr);
        out << ',' << r.primal_residual << '\n';
    }
}

// ---------------------------------------------------------------------------

DenseTensor synthetic_low_tubal_rank(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t rank,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseTensor a({n1, rank, n3});
    DenseTensor b({rank, n2, n3});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = normal(rng);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = normal(rng);
    return t_product(a, b);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const DenseTensor input = load_tensor(cfg.input);
    std::optional<DenseTensor> truth;
    if (cfg.truth) {
        truth = load_tensor(*cfg.truth);
        if (truth->shape() != input.shape()) {
            throw ShapeError("truth shape " + shape_to_string(truth->shape()) + " differs from input shape " +
                             shape_to_string(input.shape()));
        }
    }

    SolverConfig solver_cfg = cfg.solver;
    IndexSet mask = cfg.mask_file ? load_mask(*cfg.mask_file) : IndexSet(input.shape());
    if (!cfg.mask_file) {
        solver_cfg.seed = cfg.generated->seed;
        mask = generate_mask(input.shape(), cfg.generated->rate, cfg.generated->seed);
    } else if (mask.shape() != input.shape()) {
        throw ShapeError("mask shape " + shape_to_string(mask.shape()) + " differs from input shape " +
                         shape_to_string(input.shape()));
    }

    // With a ground truth, the observations are its entries on the mask.
    const DenseTensor z = project_mask(truth ? *truth : input, mask);

    IterationObserver observer;
    if (truth) {
        observer = [&](const DenseTensor& x) -> std::optional<double> { return psnr(x, *truth); };
    }

    const auto start = std::chrono::steady_clock::now();
    SolveResult result = solve(z, mask, solver_cfg, observer);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ExperimentOutcome out;
    CompletionReport& rep = out.report;
    rep.method = solver_cfg.method;
    rep.iterations = result.iterations;
    rep.converged = result.converged;
    rep.wall_time_s = wall;
    rep.observed_entries = mask.count();
    rep.total_entries = mask.size();
    if (cfg.trace) rep.trace_path = cfg.trace->string();
    ExperimentConfig echo = cfg;
    echo.solver = solver_cfg;
    rep.config = experiment_config_to_json(echo);

    if (truth) {
        rep.psnr = psnr(result.x, *truth, &rep.band_psnr);
        rep.ssim = ssim(result.x, *truth, &rep.band_ssim);
        try {
            rep.ergas = ergas(result.x, *truth, &rep.ergas_excluded_bands);
        } catch (const std::domain_error& e) {
            rep.warnings.emplace_back(e.what());
            for (std::size_t b = 0; b < band_count(truth->shape()); ++b) rep.ergas_excluded_bands.push_back(b);
        }
        if (rep.ergas && !rep.ergas_excluded_bands.empty()) {
            rep.warnings.push_back("ERGAS skipped " + std::to_string(rep.ergas_excluded_bands.size()) +
                                   " zero-mean reference band(s)");
        }
        rep.rel_error = rel_error(result.x, *truth);
    }
    if (!result.converged) {
        rep.warnings.push_back("stopped at max_iter=" + std::to_string(solver_cfg.max_iter) + " before reaching eps");
    }

    save_tensor(result.x, cfg.output);
    if (cfg.trace) {
        std::ofstream t(*cfg.trace);
        if (!t) throw std::runtime_error("cannot open " + cfg.trace->string() + " for writing");
        write_trace_csv(result.trace, t);
    }
    {
        std::ofstream r(cfg.report);
        if (!r) throw std::runtime_error("cannot open " + cfg.report.string() + " for writing");
        r << report_to_json(rep).dump(2) << '\n';
        if (!r) throw std::runtime_error("write error on " + cfg.report.string());
    }

    out.completed = std::move(result.x);
    out.trace = std::move(result.trace);
    return out;
}

}  // namespace tenscomp
