#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tenscomp/metrics.hpp"
#include "tenscomp/solver.hpp"

namespace tenscomp {

struct GeneratedMask {
    double rate = 0.5;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    std::filesystem::path input;
    std::optional<std::filesystem::path> truth;
    /// Exactly one of mask_file / generated is used; the file wins if both are set.
    std::optional<std::filesystem::path> mask_file;
    std::optional<GeneratedMask> generated;
    SolverConfig solver;
    std::filesystem::path output;
    std::filesystem::path report;
    std::optional<std::filesystem::path> trace;

    /// Throws std::invalid_argument for missing paths or a bad mask source.
    void validate() const;
};

struct CompletionReport {
    Method method = Method::bemcp;
    /// Metrics are present only when a ground truth was supplied.
    std::optional<double> psnr;
    std::optional<double> ssim;
    std::optional<double> ergas;
    std::optional<double> rel_error;
    std::vector<double> band_psnr;
    std::vector<double> band_ssim;
    std::vector<std::size_t> ergas_excluded_bands;
    std::size_t iterations = 0;
    bool converged = false;
    double wall_time_s = 0.0;
    std::size_t observed_entries = 0;
    std::size_t total_entries = 0;
    std::optional<std::string> trace_path;
    nlohmann::json config;
    std::vector<std::string> warnings;
};

inline constexpr const char* kReportSchema = "tenscomp.report/1";

nlohmann::json solver_config_to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// Infinite PSNR values are written as kPsnrFileCap.
nlohmann::json report_to_json(const CompletionReport& r);
CompletionReport report_from_json(const nlohmann::json& j);

/// Returns an empty string when `j` has every report field with the right
/// type, otherwise a description of the first problem.
std::string check_report_schema(const nlohmann::json& j);

/// iter,inf_norm_diff,elapsed_s,psnr,primal_residual (psnr left empty when
/// unknown).
void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out);

struct ExperimentOutcome {
    CompletionReport report;
    DenseTensor completed;
    ConvergenceTrace trace;
};

/// A * B with A: n1 x rank x n3 and B: rank x n2 x n3 filled with standard
/// normal draws from mt19937_64(seed); tubal rank `rank` almost surely.
DenseTensor synthetic_low_tubal_rank(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t rank,
                                     std::uint64_t seed);

/// Loads inputs, builds or loads the mask, solves, scores against the truth
/// when given and writes the completed tensor, report and trace.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace tenscomp
