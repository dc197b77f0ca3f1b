#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tenscomp/penalty.hpp"
#include "tenscomp/tensor.hpp"
#include "tenscomp/tsvd.hpp"

namespace tenscomp {

enum class Method { nmcp, emcp, bemcp };

std::string to_string(Method m);
Method parse_method(std::string_view name);

/// Lower clamp for every Gamma handed to the shrink rule.
inline constexpr double kGammaFloor = 1.0 + 1e-6;
/// Upper clamp for the adaptive BEMCP Gamma grid. Without it Gamma grows
/// by sqrt(1 + 2 sigma / epsilon_bar) per iteration on strong singular
/// values and overflows within a few dozen iterations.
inline constexpr double kGammaCeiling = 1e12;

struct SolverConfig {
    Method method = Method::bemcp;
    /// Per-unfolding weights in mode_pairs() order; empty means uniform.
    std::vector<double> alpha;
    double rho0 = 1e-3;
    double mu = 1.1;
    double eps = 1e-4;
    std::size_t max_iter = 500;
    double gamma_init = 10.0;
    /// Unset means 0.1 * max |observed entry|.
    std::optional<double> lambda_init;
    double epsilon_bar = 1e-10;
    std::uint64_t seed = 0;
    /// False freezes the penalty grids (Lambda/Gamma for BEMCP, Lambda-bar
    /// for EMCP), which turns both methods into NMCP iterations.
    bool adapt_parameters = true;

    /// Throws std::invalid_argument on any out-of-range field.
    void validate(std::size_t order) const;
    std::vector<double> resolved_alpha(std::size_t order) const;
};

/// Everything attached to one mode-(k1,k2) unfolding.
struct PairState {
    ModePair pair;
    double alpha = 0.0;
    double rho = 0.0;
    DenseTensor y;
    DenseTensor q;
    /// NMCP: constant lambda/gamma. EMCP: lambda holds Lambda-bar, gamma is
    /// constant. BEMCP: all three grids adapt.
    PenaltyParamGrid grid;
    /// EMCP weight matrix W (empty for the other methods).
    Eigen::MatrixXd weights;
    /// Singular values of the latest y unfolding.
    SingularSpectrum spectrum;
};

struct SolverState {
    DenseTensor x;
    std::vector<PairState> pairs;
    std::size_t iter = 0;
    double lambda0 = 0.0;
    /// max over pairs of ||X - Y||_inf after the latest iteration.
    double primal_residual = 0.0;
};

struct TraceRecord {
    std::size_t iter = 0;
    double inf_norm_diff = 0.0;
    double primal_residual = 0.0;
    double elapsed_s = 0.0;
    std::optional<double> psnr;
};

using ConvergenceTrace = std::vector<TraceRecord>;

struct SolveResult {
    DenseTensor x;
    ConvergenceTrace trace;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Called after every iteration with the new estimate; a returned value is
/// stored as the trace record's PSNR.
using IterationObserver = std::function<std::optional<double>(const DenseTensor&)>;

/// round(rate * total) distinct entries, uniform without replacement,
/// deterministic for a given seed.
IndexSet generate_mask(const Shape& shape, double sampling_rate, std::uint64_t seed);

SolverState init_state(const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg);

/// Lambda and Gamma actually passed to the shrink rule for one unfolding:
/// c*h_{gamma,lambda} = h_{gamma/c, c*lambda} with c = alpha/rho gives
/// (Lambda*alpha/rho, Gamma*rho/alpha); Gamma is clamped to kGammaFloor.
struct EffectiveParams {
    Eigen::MatrixXd lambda;
    Eigen::MatrixXd gamma;
};
EffectiveParams effective_prox_params(const PairState& p);

struct YUpdate {
    DenseTensor y;
    /// Singular values of the new y unfolding.
    SingularSpectrum spectrum;
};

/// Y+ = fold(S(unfold(X + Q/rho))) for pairs[pair_index].
YUpdate update_y(const SolverState& state, std::size_t pair_index);

/// W+ = max(Lambda-bar - sigma / gamma, 0); Lambda-bar+ = W+.
Eigen::MatrixXd update_w_emcp(const Eigen::MatrixXd& lambda_bar, const Eigen::MatrixXd& sigma, double gamma);

/// upsilon+ = max(Lambda * Gamma - sigma, epsilon_bar).
Eigen::MatrixXd update_upsilon_bemcp(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma,
                                     const Eigen::MatrixXd& sigma, double epsilon_bar);

/// Lambda+ = upsilon+ / Gamma.
Eigen::MatrixXd update_lambda_bemcp(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& gamma);

/// Gamma+ = sqrt((2 upsilon+ sigma + upsilon+^2) / Lambda+^2), before clamping.
Eigen::MatrixXd update_gamma_bemcp_unclamped(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& lambda,
                                             const Eigen::MatrixXd& sigma);
/// As above, clamped into [kGammaFloor, kGammaCeiling].
Eigen::MatrixXd update_gamma_bemcp(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& lambda,
                                   const Eigen::MatrixXd& sigma);

/// X+ = P_{Omega^c}(sum rho (Y - Q/rho) / sum rho) + P_Omega(Z).
DenseTensor update_x(const SolverState& state, const DenseTensor& z, const IndexSet& mask);

/// Q+ = Q + rho (X - Y).
DenseTensor update_q(const PairState& p, const DenseTensor& x);

/// One full iteration in place (Y, method-specific grids, X, Q, then
/// rho *= mu). Returns ||X_new - X_old||_inf. Throws DivergenceError on a
/// non-finite state.
double iterate(SolverState& state, const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg);

/// Runs until both ||dX||_inf and max ||X - Y||_inf are <= eps, or for
/// max_iter iterations. The second test keeps the first iterations, where
/// every Y is shrunk to zero and X does not move, from passing as converged. A fully observed
/// mask returns z with no iterations; an empty mask is rejected.
SolveResult solve(const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg,
                  const IterationObserver& observer = {});

}  // namespace tenscomp
