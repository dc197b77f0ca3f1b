#include "tenscomp/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tenscomp {

McpParams::McpParams(double lambda, double gamma) : lambda_(lambda), gamma_(gamma) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("MCP lambda must be finite and >= 0, got " + std::to_string(lambda));
    }
    if (!(gamma > 1.0 + kMinGammaMargin)) {
        throw std::invalid_argument("MCP gamma must exceed 1, got " + std::to_string(gamma));
    }
}

double mcp_value(double y, const McpParams& p) {
    const double a = std::abs(y);
    const double knee = p.gamma() * p.lambda();
    if (a <= knee) return p.lambda() * a - a * a / (2.0 * p.gamma());
    return p.gamma() * p.lambda() * p.lambda() / 2.0;
}

double bemcp_objective(double y, double upsilon, const McpParams& p) {
    const double d = upsilon - p.lambda() * p.gamma();
    return (2.0 * upsilon * std::abs(y) + d * d) / (2.0 * p.gamma());
}

double bemcp_minimizer(double y, const McpParams& p) {
    return std::max(p.lambda() * p.gamma() - std::abs(y), 0.0);
}

double singular_shrink(double sigma, double lambda, double gamma) {
    // gamma (s - lambda) / (gamma - 1), written so gamma = +inf is exact
    const double expanded = (sigma - lambda) / (1.0 - 1.0 / gamma);
    return std::min(sigma, std::max(expanded, 0.0));
}

double scalar_prox(double y, const McpParams& p) {
    const double mag = singular_shrink(std::abs(y), p.lambda(), p.gamma());
    return y < 0.0 ? -mag : mag;
}

// ---------------------------------------------------------------------------

PenaltyParamGrid PenaltyParamGrid::uniform(std::size_t slices, std::size_t rank_bound, double lambda,
                                           double gamma) {
    const auto r = static_cast<Eigen::Index>(slices);
    const auto c = static_cast<Eigen::Index>(rank_bound);
    return {Eigen::MatrixXd::Constant(r, c, lambda), Eigen::MatrixXd::Constant(r, c, gamma),
            Eigen::MatrixXd::Constant(r, c, lambda * gamma)};
}

void PenaltyParamGrid::validate() const {
    if (lambda.rows() != gamma.rows() || lambda.cols() != gamma.cols() || lambda.rows() != upsilon.rows() ||
        lambda.cols() != upsilon.cols()) {
        throw std::invalid_argument("penalty grids have inconsistent shapes");
    }
    if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
        throw std::invalid_argument("penalty grid Lambda must be finite and >= 0");
    }
    if (!(gamma.array() > 1.0).all()) throw std::invalid_argument("penalty grid Gamma must be > 1");
    if ((upsilon.array() < 0.0).any()) throw std::invalid_argument("penalty grid upsilon must be >= 0");
}

namespace {

void require_grid_shape(const Eigen::MatrixXd& m, const SingularSpectrum& s, const char* what) {
    if (m.rows() != s.values.rows() || m.cols() != s.values.cols()) {
        throw ShapeError(std::string(what) + " grid is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " but the spectrum is " + std::to_string(s.values.rows()) + "x" +
                         std::to_string(s.values.cols()));
    }
}

void require_grid_shape(const Eigen::MatrixXd& m, const DenseTensor& y, const char* what) {
    if (y.order() != 3) throw ShapeError("expected an order-3 tensor, got " + shape_to_string(y.shape()));
    const auto rows = static_cast<Eigen::Index>(y.extent(2));
    const auto cols = static_cast<Eigen::Index>(std::min(y.extent(0), y.extent(1)));
    if (m.rows() != rows || m.cols() != cols) {
        throw ShapeError(std::string(what) + " grid is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void require_conjugate_symmetric(const Eigen::MatrixXd& m, const char* what) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 1; i < n; ++i) {
        if (m.row(i) != m.row(n - i)) {
            throw std::invalid_argument(std::string(what) + " grid row " + std::to_string(i) + " differs from row " +
                                        std::to_string(n - i) + "; conjugate Fourier slices need equal parameters");
        }
    }
}

}  // namespace

double wtgn_value(const SingularSpectrum& spectrum, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma) {
    require_grid_shape(lambda, spectrum, "Lambda");
    require_grid_shape(gamma, spectrum, "Gamma");
    double total = 0.0;
    for (Eigen::Index i = 0; i < spectrum.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < spectrum.values.cols(); ++j) {
            total += mcp_value(spectrum.values(i, j), McpParams(lambda(i, j), gamma(i, j)));
        }
    }
    return total;
}

double wtgn_value(const DenseTensor& y, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma) {
    require_grid_shape(lambda, y, "Lambda");
    require_grid_shape(gamma, y, "Gamma");
    return wtgn_value(singular_spectrum(y), lambda, gamma);
}

double weighted_tnn(const SingularSpectrum& spectrum, const Eigen::MatrixXd& weights) {
    require_grid_shape(weights, spectrum, "weight");
    if ((weights.array() < 0.0).any()) throw std::invalid_argument("weighted_tnn: weights must be >= 0");
    return (weights.array() * spectrum.values.array()).sum();
}

DenseTensor bewtgn_prox(const DenseTensor& y, const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma,
                        SingularSpectrum* shrunk) {
    require_grid_shape(lambda, y, "Lambda");
    require_grid_shape(gamma, y, "Gamma");
    if ((lambda.array() < 0.0).any()) throw std::invalid_argument("bewtgn_prox: Lambda must be >= 0");
    if (!(gamma.array() > 1.0).all()) throw std::invalid_argument("bewtgn_prox: Gamma must be > 1");
    require_conjugate_symmetric(lambda, "Lambda");
    require_conjugate_symmetric(gamma, "Gamma");

    return map_singular_values(
        y,
        [&](std::size_t slice, Eigen::Ref<Eigen::VectorXd> sigma) {
            const auto i = static_cast<Eigen::Index>(slice);
            for (Eigen::Index j = 0; j < sigma.size(); ++j) {
                sigma(j) = singular_shrink(sigma(j), lambda(i, j), gamma(i, j));
            }
        },
        shrunk);
}

}  // namespace tenscomp
