#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "tenscomp/tensor.hpp"
#include "tenscomp/tsvd.hpp"

namespace tenscomp {

/// gamma must exceed 1 by more than this margin.
inline constexpr double kMinGammaMargin = 1e-9;

/// Scalar MCP parameters: lambda >= 0, gamma > 1.
class McpParams {
public:
    McpParams(double lambda, double gamma);

    double lambda() const noexcept { return lambda_; }
    double gamma() const noexcept { return gamma_; }

private:
    double lambda_;
    double gamma_;
};

/**
 * Minimax-concave penalty
 *
 *   h(y) = lambda |y| - y^2 / (2 gamma)   for |y| <= gamma lambda
 *   h(y) = gamma lambda^2 / 2             otherwise.
 *
 * The plateau is gamma*lambda^2/2, the value that makes h continuous at
 * |y| = gamma*lambda.
 */
double mcp_value(double y, const McpParams& p);

/// (2 upsilon |y| + (upsilon - lambda gamma)^2) / (2 gamma); its minimum
/// over upsilon >= 0 is mcp_value(y).
double bemcp_objective(double y, double upsilon, const McpParams& p);

/// argmin over upsilon >= 0 of bemcp_objective: max(lambda gamma - |y|, 0).
double bemcp_minimizer(double y, const McpParams& p);

/// Firm thresholding: argmin_g (g - y)^2 / 2 + h(g)
///   = sign(y) min(|y|, max(gamma (|y| - lambda) / (gamma - 1), 0)).
double scalar_prox(double y, const McpParams& p);

/// scalar_prox restricted to sigma >= 0. gamma may be +inf (soft threshold).
double singular_shrink(double sigma, double lambda, double gamma);

/**
 * Lambda, Gamma and upsilon grids paired with a SingularSpectrum (same
 * I3 x R shape). Entry (i, j) applies to the j-th largest singular value of
 * Fourier slice i.
 */
struct PenaltyParamGrid {
    Eigen::MatrixXd lambda;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd upsilon;

    /// Constant grids with upsilon = lambda * gamma.
    static PenaltyParamGrid uniform(std::size_t slices, std::size_t rank_bound, double lambda, double gamma);

    /// Throws std::invalid_argument unless lambda >= 0, gamma > 1,
    /// upsilon >= 0 elementwise and the three shapes agree.
    void validate() const;
};

/// Weighted tensor Gamma-norm: sum_ij h_{Gamma(i,j), Lambda(i,j)}(sigma_j(slice i)).
double wtgn_value(const DenseTensor& y, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma);
double wtgn_value(const SingularSpectrum& spectrum, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma);

/// sum_ij weights(i,j) sigma(i,j).
double weighted_tnn(const SingularSpectrum& spectrum, const Eigen::MatrixXd& weights);

/**
 * Proximal operator of the weighted tensor Gamma-norm: t-SVD of y with each
 * Fourier singular value shrunk by singular_shrink using the parameters at
 * its (slice, position). Grids are I3 x min(I1, I2) and must be
 * conjugate-symmetric in the slice index (row i equal to row I3-i) so the
 * result is real. If `shrunk` is non-null it receives the shrunk values.
 */
DenseTensor bewtgn_prox(const DenseTensor& y, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma,
                        SingularSpectrum* shrunk = nullptr);

}  // namespace tenscomp
