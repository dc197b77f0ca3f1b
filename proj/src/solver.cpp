#include "tenscomp/solver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "tenscomp/error.hpp"

namespace tenscomp {

std::string to_string(Method m) {
    switch (m) {
        case Method::nmcp: return "nmcp";
        case Method::emcp: return "emcp";
        case Method::bemcp: return "bemcp";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "nmcp") return Method::nmcp;
    if (s == "emcp") return Method::emcp;
    if (s == "bemcp") return Method::bemcp;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected nmcp, emcp or bemcp)");
}

std::vector<double> SolverConfig::resolved_alpha(std::size_t order) const {
    const std::size_t pairs = order * (order - 1) / 2;
    if (alpha.empty()) return std::vector<double>(pairs, 1.0 / static_cast<double>(pairs));
    return alpha;
}

void SolverConfig::validate(std::size_t order) const {
    if (order < 2) throw std::invalid_argument("completion needs a tensor of order >= 2");
    const std::size_t pairs = order * (order - 1) / 2;
    if (!alpha.empty()) {
        if (alpha.size() != pairs) {
            throw std::invalid_argument("alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                                        std::to_string(pairs));
        }
        double sum = 0.0;
        for (double a : alpha) {
            if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("alpha entries must be finite and >= 0");
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("alpha must sum to 1, got " + std::to_string(sum));
        }
    }
    if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw std::invalid_argument("rho0 must be > 0");
    if (!(mu > 1.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be > 1");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
    if (!(gamma_init > 1.0) || !std::isfinite(gamma_init)) throw std::invalid_argument("gamma_init must be > 1");
    if (lambda_init && (!(*lambda_init >= 0.0) || !std::isfinite(*lambda_init))) {
        throw std::invalid_argument("lambda_init must be finite and >= 0");
    }
    if (!(epsilon_bar > 0.0)) throw std::invalid_argument("epsilon_bar must be > 0");
}

// ---------------------------------------------------------------------------

IndexSet generate_mask(const Shape& shape, double sampling_rate, std::uint64_t seed) {
    if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
        throw std::invalid_argument("sampling rate must be in (0, 1], got " + std::to_string(sampling_rate));
    }
    validate_shape(shape);
    const std::size_t total = element_count(shape);
    const auto observed = static_cast<std::size_t>(std::llround(sampling_rate * static_cast<double>(total)));

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    IndexSet mask(shape, false);
    for (std::size_t k = 0; k < observed; ++k) {
        // Explicit draw rather than uniform_int_distribution, whose output is
        // implementation-defined; masks must match across standard libraries.
        const std::size_t span = total - k;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t draw = rng();
        while (draw >= limit) draw = rng();
        const std::size_t pick = k + static_cast<std::size_t>(draw % span);
        std::swap(order[k], order[pick]);
        mask.set(order[k]);
    }
    return mask;
}

SolverState init_state(const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg) {
    if (z.shape() != mask.shape()) {
        throw ShapeError("observation shape " + shape_to_string(z.shape()) + " does not match mask shape " +
                         shape_to_string(mask.shape()));
    }
    cfg.validate(z.order());

    SolverState state;
    state.x = project_mask(z, mask);
    state.lambda0 = cfg.lambda_init ? *cfg.lambda_init : 0.1 * max_abs(state.x);

    const auto alpha = cfg.resolved_alpha(z.order());
    const auto pairs = mode_pairs(z.order());
    state.pairs.reserve(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        PairState ps;
        ps.pair = pairs[p];
        ps.alpha = alpha[p];
        ps.rho = cfg.rho0;
        ps.y = state.x;
        ps.q = DenseTensor(z.shape());
        const Shape u = unfolded_shape(z.shape(), ps.pair.k1, ps.pair.k2);
        const std::size_t slices = u[2];
        const std::size_t rank = std::min(u[0], u[1]);
        ps.grid = PenaltyParamGrid::uniform(slices, rank, state.lambda0, cfg.gamma_init);
        if (cfg.method == Method::emcp) ps.weights = ps.grid.lambda;
        ps.spectrum.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slices), static_cast<Eigen::Index>(rank));
        state.pairs.push_back(std::move(ps));
    }
    return state;
}

EffectiveParams effective_prox_params(const PairState& p) {
    const double c = p.alpha / p.rho;
    EffectiveParams e;
    e.lambda = p.grid.lambda * c;
    e.gamma = (p.grid.gamma / c).cwiseMax(kGammaFloor);
    return e;
}

YUpdate update_y(const SolverState& state, std::size_t pair_index) {
    const PairState& p = state.pairs.at(pair_index);
    DenseTensor target = state.x;
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += p.q[i] / p.rho;

    const DenseTensor unfolded = mode_unfold(target, p.pair.k1, p.pair.k2);
    YUpdate out;
    if (p.alpha == 0.0) {
        // No penalty on this unfolding: the subproblem minimizer is the target.
        out.spectrum = singular_spectrum(unfolded);
        out.y = std::move(target);
        return out;
    }
    const EffectiveParams e = effective_prox_params(p);
    const DenseTensor shrunk = bewtgn_prox(unfolded, e.lambda, e.gamma, &out.spectrum);
    // Per-position parameters can reorder the shrunk values; sorting gives
    // the singular values of the new unfolding, largest first.
    for (Eigen::Index i = 0; i < out.spectrum.values.rows(); ++i) {
        auto row = out.spectrum.values.row(i);
        std::sort(row.begin(), row.end(), std::greater<>());
    }
    out.y = mode_fold(shrunk, p.pair.k1, p.pair.k2, state.x.shape());
    return out;
}

namespace {

void require_same_dims(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": grid shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
    }
}

}  // namespace

Eigen::MatrixXd update_w_emcp(const Eigen::MatrixXd& lambda_bar, const Eigen::MatrixXd& sigma, double gamma) {
    require_same_dims(lambda_bar, sigma, "update_w_emcp");
    return (lambda_bar - sigma / gamma).cwiseMax(0.0);
}

Eigen::MatrixXd update_upsilon_bemcp(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& gamma,
                                     const Eigen::MatrixXd& sigma, double epsilon_bar) {
    require_same_dims(lambda, gamma, "update_upsilon_bemcp");
    require_same_dims(lambda, sigma, "update_upsilon_bemcp");
    return (lambda.cwiseProduct(gamma) - sigma).cwiseMax(epsilon_bar);
}

Eigen::MatrixXd update_lambda_bemcp(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& gamma) {
    require_same_dims(upsilon, gamma, "update_lambda_bemcp");
    return upsilon.cwiseQuotient(gamma);
}

Eigen::MatrixXd update_gamma_bemcp_unclamped(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& lambda,
                                             const Eigen::MatrixXd& sigma) {
    require_same_dims(upsilon, lambda, "update_gamma_bemcp");
    require_same_dims(upsilon, sigma, "update_gamma_bemcp");
    const Eigen::ArrayXXd u = upsilon.array();
    return ((2.0 * u * sigma.array() + u * u) / lambda.array().square()).sqrt().matrix();
}

Eigen::MatrixXd update_gamma_bemcp(const Eigen::MatrixXd& upsilon, const Eigen::MatrixXd& lambda,
                                   const Eigen::MatrixXd& sigma) {
    return update_gamma_bemcp_unclamped(upsilon, lambda, sigma).cwiseMax(kGammaFloor).cwiseMin(kGammaCeiling);
}

DenseTensor update_x(const SolverState& state, const DenseTensor& z, const IndexSet& mask) {
    DenseTensor num(z.shape());
    double den = 0.0;
    for (const auto& p : state.pairs) {
        for (std::size_t i = 0; i < num.size(); ++i) num[i] += p.rho * (p.y[i] - p.q[i] / p.rho);
        den += p.rho;
    }
    DenseTensor x(z.shape());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = mask.contains(i) ? z[i] : num[i] / den;
    return x;
}

DenseTensor update_q(const PairState& p, const DenseTensor& x) {
    DenseTensor q = p.q;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += p.rho * (x[i] - p.y[i]);
    return q;
}

namespace {

void check_finite(const SolverState& state) {
    const std::size_t k = state.iter;
    auto fail = [k](const std::string& what) {
        throw DivergenceError(k, "solver diverged at iteration " + std::to_string(k) + ": non-finite " + what);
    };
    if (!all_finite(state.x)) fail("estimate X");
    for (const auto& p : state.pairs) {
        const std::string tag = " for unfolding " + to_string(p.pair);
        if (!all_finite(p.y)) fail("Y" + tag);
        if (!all_finite(p.q)) fail("multiplier Q" + tag);
        if (!p.grid.lambda.allFinite() || !p.grid.gamma.allFinite() || !p.grid.upsilon.allFinite()) {
            fail("penalty grid" + tag);
        }
    }
}

}  // namespace

double iterate(SolverState& state, const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg) {
    for (std::size_t k = 0; k < state.pairs.size(); ++k) {
        YUpdate yu;
        try {
            yu = update_y(state, k);
        } catch (const SvdError& e) {
            throw DivergenceError(state.iter, "solver diverged at iteration " + std::to_string(state.iter) +
                                                  " (unfolding " + to_string(state.pairs[k].pair) + "): " + e.what());
        }
        PairState& p = state.pairs[k];
        p.y = std::move(yu.y);
        p.spectrum = std::move(yu.spectrum);
        if (!cfg.adapt_parameters) continue;
        const Eigen::MatrixXd& sigma = p.spectrum.values;
        switch (cfg.method) {
            case Method::nmcp: break;
            case Method::emcp:
                p.weights = update_w_emcp(p.grid.lambda, sigma, cfg.gamma_init);
                p.grid.lambda = p.weights;
                break;
            case Method::bemcp: {
                p.grid.upsilon = update_upsilon_bemcp(p.grid.lambda, p.grid.gamma, sigma, cfg.epsilon_bar);
                p.grid.lambda = update_lambda_bemcp(p.grid.upsilon, p.grid.gamma);
                p.grid.gamma = update_gamma_bemcp(p.grid.upsilon, p.grid.lambda, sigma);
                break;
            }
        }
    }

    DenseTensor x_new = update_x(state, z, mask);
    const double diff = inf_norm_diff(x_new, state.x);
    state.x = std::move(x_new);
    state.primal_residual = 0.0;
    for (auto& p : state.pairs) {
        p.q = update_q(p, state.x);
        state.primal_residual = std::max(state.primal_residual, inf_norm_diff(state.x, p.y));
    }

    ++state.iter;
    const double rho = cfg.rho0 * std::pow(cfg.mu, static_cast<double>(state.iter));
    for (auto& p : state.pairs) p.rho = rho;
    check_finite(state);
    return diff;
}

SolveResult solve(const DenseTensor& z, const IndexSet& mask, const SolverConfig& cfg,
                  const IterationObserver& observer) {
    if (z.shape() != mask.shape()) {
        throw ShapeError("observation shape " + shape_to_string(z.shape()) + " does not match mask shape " +
                         shape_to_string(mask.shape()));
    }
    cfg.validate(z.order());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (mask.contains(i) && !std::isfinite(z[i])) {
            throw std::invalid_argument("observed entry " + std::to_string(i) + " is not finite");
        }
    }
    const std::size_t observed = mask.count();
    if (observed == 0) throw std::invalid_argument("no observed entries: completion is ill-posed");

    SolveResult result;
    if (observed == mask.size()) {
        result.x = z;
        result.converged = true;
        return result;
    }

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    SolverState state = init_state(z, mask, cfg);
    for (std::size_t k = 0; k < cfg.max_iter; ++k) {
        TraceRecord rec;
        rec.inf_norm_diff = iterate(state, z, mask, cfg);
        rec.iter = state.iter;
        rec.primal_residual = state.primal_residual;
        rec.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
        if (observer) rec.psnr = observer(state.x);
        result.trace.push_back(rec);
        if (rec.inf_norm_diff <= cfg.eps && rec.primal_residual <= cfg.eps) {
            result.converged = true;
            break;
        }
    }
    result.iterations = state.iter;
    result.x = std::move(state.x);
    return result;
}

}  // namespace tenscomp
