// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tenscomp/experiment.hpp"
#include "tenscomp/io.hpp"
#include "tenscomp/metrics.hpp"
#include "tenscomp/penalty.hpp"
#include "tenscomp/solver.hpp"
#include "tenscomp/tsvd.hpp"

using namespace tenscomp;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Grids whose slice rows mirror i <-> n3 - i, as real tensors require.
Eigen::MatrixXd symmetric_grid(Eigen::Index slices, Eigen::Index cols, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::MatrixXd g(slices, cols);
    for (Eigen::Index i = 0; i <= slices / 2; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = d(rng);
        g.row((slices - i) % slices) = g.row(i);
    }
    return g;
}

Outcome equivalence_suite() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ug(0.0, 19.0), ul(0.0, 5.0), uy(-20.0, 20.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double gamma = 1.0 + std::max(ug(rng), 1e-3);
        const double lambda = ul(rng);
        const double y = uy(rng);
        const McpParams p(lambda, gamma);
        const double grid = oracle::grid_min_bemcp(y, lambda, gamma, lambda * gamma + 1.0, 1e-3);
        worst = std::max(worst, std::abs(grid - mcp_value(y, p)));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-6 && t < 5.0, fmt("max |grid - closed form| = %.3g, %.2f s", worst, t)};
}

Outcome prox_oracle() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(20240602);
    std::uniform_real_distribution<double> ug(0.0, 19.0), ul(0.0, 5.0), uy(-20.0, 20.0), coin(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double gamma = 1.0 + std::max(ug(rng), 1e-2);
        const double lambda = ul(rng);
        double y = uy(rng);
        const double sign = coin(rng) < 0.5 ? -1.0 : 1.0;
        if (k % 5 == 1) y = sign * lambda;
        if (k % 5 == 2) y = sign * gamma * lambda;
        const McpParams p(lambda, gamma);
        const double lo = std::min(0.0, y), hi = std::max(0.0, y);
        const double brute = oracle::grid_argmin_prox(y, lambda, gamma, lo, hi, 1e-4);
        worst = std::max(worst, std::abs(brute - scalar_prox(y, p)));
    }
    const double t = seconds_since(t0);
    return {worst <= 2e-4 && t < 10.0, fmt("max |brute - prox| = %.3g, %.2f s", worst, t)};
}

Outcome tsvd_suite() {
    std::mt19937_64 rng(20240603);
    std::uniform_int_distribution<std::size_t> d1(1, 16), d2(1, 12), d3(1, 7);
    double recon = 0.0, ortho = 0.0, offdiag = 0.0, product = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n1 = d1(rng), n2 = d2(rng), n3 = d3(rng);
        const DenseTensor y = oracle::random_tensor({n1, n2, n3}, rng);
        const TSvdFactors f = t_svd(y);
        const DenseTensor u = f.u(), s = f.s(), v = f.v();
        recon = std::max(recon, oracle::frob(t_product(t_product(u, s), conj_transpose(v)) - y) / oracle::frob(y));
        ortho = std::max(ortho, oracle::max_abs_diff(t_product(conj_transpose(u), u), identity_tensor(n1, n3)));
        ortho = std::max(ortho, oracle::max_abs_diff(t_product(conj_transpose(v), v), identity_tensor(n2, n3)));
        for (std::size_t i = 0; i < s.extent(0); ++i)
            for (std::size_t j = 0; j < s.extent(1); ++j)
                for (std::size_t l = 0; l < n3; ++l)
                    if (i != j) offdiag = std::max(offdiag, std::abs(s(i, j, l)));

        const std::size_t m = d2(rng);
        const DenseTensor b = oracle::random_tensor({n2, m, n3}, rng);
        const Eigen::MatrixXd expect = oracle::bcirc(y) * oracle::unfold_vertical(b);
        const Eigen::MatrixXd got = oracle::unfold_vertical(t_product(y, b));
        product = std::max(product, (expect - got).cwiseAbs().maxCoeff());
    }
    const bool ok = recon <= 1e-10 && ortho <= 1e-9 && offdiag == 0.0 && product <= 1e-10;
    std::ostringstream os;
    os << "recon " << recon << ", ortho " << ortho << ", off-diagonal " << offdiag << ", bcirc " << product;
    return {ok, os.str()};
}

Outcome property_suite() {
    std::mt19937_64 rng(20240604);
    std::uniform_int_distribution<std::size_t> dn(2, 6), d3(1, 4);
    std::uniform_real_distribution<double> ua(0.0, 10.0);
    double min_value = 0.0, bound_excess = -1.0, gap = 0.0, invariance = 0.0, concavity = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n1 = dn(rng), n2 = dn(rng), n3 = d3(rng);
        const DenseTensor y = oracle::random_tensor({n1, n2, n3}, rng);
        const auto rows = static_cast<Eigen::Index>(n3), cols = static_cast<Eigen::Index>(std::min(n1, n2));
        const Eigen::MatrixXd lam = symmetric_grid(rows, cols, rng, 0.5, 2.0);
        const Eigen::MatrixXd gam = symmetric_grid(rows, cols, rng, 1.1, 8.0);
        const SingularSpectrum s = singular_spectrum(y);
        const double w = wtgn_value(s, lam, gam);
        const double wnn = weighted_tnn(s, lam);
        min_value = std::min(min_value, w);
        bound_excess = std::max(bound_excess, w - wnn);

        const Eigen::MatrixXd big = Eigen::MatrixXd::Constant(rows, cols, 1e6);
        gap = std::max(gap, std::abs(wtgn_value(s, lam, big) - wnn) / wnn);

        const DenseTensor u = t_svd(oracle::random_tensor({n1, n1, n3}, rng)).u();
        const DenseTensor v = t_svd(oracle::random_tensor({n2, n2, n3}, rng)).u();
        const DenseTensor rotated = t_product(t_product(u, y), conj_transpose(v));
        invariance = std::max(invariance, std::abs(wtgn_value(rotated, lam, gam) - w));

        const McpParams p(lam(0, 0), gam(0, 0));
        const double a = ua(rng), b = ua(rng);
        concavity = std::max(concavity, 0.5 * (mcp_value(a, p) + mcp_value(b, p)) - mcp_value(0.5 * (a + b), p));
    }
    const bool ok = min_value >= 0.0 && bound_excess <= 1e-12 && gap <= 1e-5 && invariance <= 1e-8 && concavity <= 1e-12;
    std::ostringstream os;
    os << "min " << min_value << ", bound excess " << bound_excess << ", gap " << gap << ", invariance " << invariance
       << ", concavity defect " << concavity;
    return {ok, os.str()};
}

Outcome matrix_degeneration() {
    std::mt19937_64 rng(20240605);
    std::uniform_real_distribution<double> ul(0.0, 1.5), ug(1.05, 6.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const DenseTensor y = oracle::random_tensor({6, 6, 1}, rng, -2.0, 2.0);
        Eigen::MatrixXd lam(1, 6), gam(1, 6);
        for (int j = 0; j < 6; ++j) lam(0, j) = ul(rng), gam(0, j) = ug(rng);
        Eigen::MatrixXd m(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) m(i, j) = y(i, j, 0);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd sv = svd.singularValues();
        for (int j = 0; j < 6; ++j) sv(j) = singular_shrink(sv(j), lam(0, j), gam(0, j));
        const Eigen::MatrixXd expect = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
        const DenseTensor got = bewtgn_prox(y, lam, gam);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(got(i, j, 0) - expect(i, j)));
    }
    return {worst <= 1e-9, fmt("max deviation %.3g", worst)};
}

Outcome solver_recovery() {
    const DenseTensor truth = synthetic_low_tubal_rank(30, 30, 10, 2, 1);
    const IndexSet mask = generate_mask(truth.shape(), 0.5, 1);
    const DenseTensor z = project_mask(truth, mask);
    std::ostringstream os;
    bool ok = true;
    for (Method m : {Method::bemcp, Method::nmcp, Method::emcp}) {
        SolverConfig cfg;
        cfg.method = m;
        const auto t0 = clock_type::now();
        const SolveResult r = solve(z, mask, cfg);
        const double t = seconds_since(t0);
        const double err = rel_error(r.x, truth);
        if (m == Method::bemcp) ok = ok && err <= 1e-2 && r.iterations <= 300 && t <= 60.0;
        ok = ok && r.converged;
        os << to_string(m) << ": rel_error " << err << ", " << r.iterations << " iter, " << (r.converged ? "" : "not ")
           << "converged, " << t << " s; ";
    }
    return {ok, os.str()};
}

Outcome transcription_check() {
    std::mt19937_64 rng(20240607);
    const DenseTensor truth = oracle::random_tensor({3, 3, 2}, rng);
    const IndexSet mask = generate_mask(truth.shape(), 0.5, 7);
    const DenseTensor z = project_mask(truth, mask);
    SolverConfig cfg;
    cfg.method = Method::bemcp;
    cfg.rho0 = 0.3;
    cfg.lambda_init = 0.15;
    SolverState state = init_state(z, mask, cfg);
    for (auto& p : state.pairs) p.q = oracle::random_tensor(z.shape(), rng, -0.2, 0.2);
    const SolverState before = state;
    iterate(state, z, mask, cfg);

    // Straight-line composition from unfold / prox / fold and the closed-form
    // parameter updates.
    std::vector<DenseTensor> ys;
    std::vector<PenaltyParamGrid> grids;
    for (const PairState& p : before.pairs) {
        DenseTensor target = before.x;
        for (std::size_t i = 0; i < target.size(); ++i) target[i] = before.x[i] + p.q[i] / p.rho;
        const double c = p.alpha / p.rho;
        const Eigen::MatrixXd lam = p.grid.lambda * c;
        Eigen::MatrixXd gam = p.grid.gamma / c;
        gam = gam.cwiseMax(kGammaFloor);
        const DenseTensor unfolded = mode_unfold(target, p.pair.k1, p.pair.k2);
        SingularSpectrum shrunk;
        const DenseTensor y = mode_fold(bewtgn_prox(unfolded, lam, gam, &shrunk), p.pair.k1, p.pair.k2, z.shape());
        Eigen::MatrixXd sigma = shrunk.values;
        for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
            std::vector<double> row(sigma.row(i).begin(), sigma.row(i).end());
            std::sort(row.begin(), row.end(), std::greater<>());
            for (Eigen::Index j = 0; j < sigma.cols(); ++j) sigma(i, j) = row[static_cast<std::size_t>(j)];
        }
        PenaltyParamGrid g;
        g.upsilon = (p.grid.lambda.cwiseProduct(p.grid.gamma) - sigma).cwiseMax(cfg.epsilon_bar);
        g.lambda = g.upsilon.cwiseQuotient(p.grid.gamma);
        g.gamma.resize(g.lambda.rows(), g.lambda.cols());
        for (Eigen::Index i = 0; i < g.gamma.rows(); ++i)
            for (Eigen::Index j = 0; j < g.gamma.cols(); ++j) {
                const double u = g.upsilon(i, j), l = g.lambda(i, j), s = sigma(i, j);
                g.gamma(i, j) = std::clamp(std::sqrt((2.0 * u * s + u * u) / (l * l)), kGammaFloor, kGammaCeiling);
            }
        ys.push_back(y);
        grids.push_back(g);
    }
    DenseTensor x(z.shape());
    double rho_sum = 0.0;
    for (const PairState& p : before.pairs) rho_sum += p.rho;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (mask.contains(i)) {
            x[i] = z[i];
            continue;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < ys.size(); ++k) acc += before.pairs[k].rho * ys[k][i] - before.pairs[k].q[i];
        x[i] = acc / rho_sum;
    }

    double worst = oracle::max_abs_diff(state.x, x);
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const PairState& p = before.pairs[k];
        DenseTensor q = p.q;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += p.rho * (x[i] - ys[k][i]);
        worst = std::max(worst, oracle::max_abs_diff(state.pairs[k].y, ys[k]));
        worst = std::max(worst, oracle::max_abs_diff(state.pairs[k].q, q));
        worst = std::max(worst, (state.pairs[k].grid.lambda - grids[k].lambda).cwiseAbs().maxCoeff());
        worst = std::max(worst, (state.pairs[k].grid.upsilon - grids[k].upsilon).cwiseAbs().maxCoeff());
        worst = std::max(worst, (state.pairs[k].grid.gamma - grids[k].gamma).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(state.pairs[k].rho - cfg.rho0 * cfg.mu));
    }
    return {worst <= 1e-10, fmt("max deviation %.3g", worst)};
}

Outcome reduction_property() {
    std::mt19937_64 rng(20240608);
    const DenseTensor truth = synthetic_low_tubal_rank(6, 5, 4, 2, 8);
    const IndexSet mask = generate_mask(truth.shape(), 0.5, 8);
    const DenseTensor z = project_mask(truth, mask);
    SolverConfig base;
    base.method = Method::nmcp;
    base.lambda_init = 0.1;
    base.rho0 = 0.05;
    double worst = 0.0;
    for (Method m : {Method::bemcp, Method::emcp}) {
        SolverConfig cfg = base;
        cfg.method = m;
        cfg.adapt_parameters = false;
        SolverState ref = init_state(z, mask, base);
        SolverState s = init_state(z, mask, cfg);
        for (int k = 0; k < 5; ++k) {
            iterate(ref, z, mask, base);
            iterate(s, z, mask, cfg);
            worst = std::max(worst, oracle::max_abs_diff(ref.x, s.x));
            for (std::size_t p = 0; p < ref.pairs.size(); ++p)
                worst = std::max(worst, oracle::max_abs_diff(ref.pairs[p].y, s.pairs[p].y));
        }
    }
    return {worst <= 1e-10, fmt("max iterate deviation %.3g", worst)};
}

Outcome round_trips() {
    std::mt19937_64 rng(20240609);
    const fs::path path = fs::temp_directory_path() / "tenscomp_acceptance_rt.dtf";
    const DenseTensor t = oracle::random_tensor({4, 3, 2, 5}, rng);
    save_tensor(t, path);
    const bool io_ok = load_tensor(path) == t;
    fs::remove(path);

    bool fold_ok = true;
    for (const Shape& shape : {Shape{3, 4, 2}, Shape{2, 3, 2, 3}, Shape{2, 2, 3, 2, 2}}) {
        const DenseTensor a = oracle::random_tensor(shape, rng);
        for (const ModePair& p : mode_pairs(shape.size()))
            fold_ok = fold_ok && mode_fold(mode_unfold(a, p.k1, p.k2), p.k1, p.k2, shape) == a;
    }

    double dft = 0.0;
    for (std::size_t n3 : {1, 2, 5, 8, 13}) {
        const DenseTensor a = oracle::random_tensor({3, 4, n3}, rng);
        dft = std::max(dft, oracle::max_abs_diff(idft_mode3(dft_mode3(a)), a));
    }
    std::ostringstream os;
    os << "dtf1 " << (io_ok ? "identical" : "differs") << ", fold " << (fold_ok ? "identical" : "differs") << ", dft "
       << dft;
    return {io_ok && fold_ok && dft <= 1e-12, os.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_end_to_end() {
    const fs::path dir = fs::temp_directory_path() / "tenscomp_acceptance_cli";
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const std::string tag = std::to_string(run);
        const std::string cmd = std::string(TENSCOMP_CLI_PATH) + " complete --input " + TENSCOMP_FIXTURE +
                                " --truth " + TENSCOMP_FIXTURE + " --rate 0.5 --seed 7 --out " +
                                (dir / ("x" + tag + ".dtf")).string() + " --report " +
                                (dir / ("r" + tag + ".json")).string() + " --trace " +
                                (dir / ("t" + tag + ".csv")).string() + " > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "cli exited with an error"};
        outputs.push_back(slurp(dir / ("x" + tag + ".dtf")));
    }
    const auto report = nlohmann::json::parse(slurp(dir / "r0.json"));
    const std::string schema = check_report_schema(report);
    const double eps = report.at("config").at("solver").at("eps").get<double>();

    std::ifstream trace(dir / "t0.csv");
    std::string line;
    std::getline(trace, line);
    bool finite = true;
    double last = std::nan("");
    std::size_t rows = 0;
    while (std::getline(trace, line)) {
        std::stringstream ls(line);
        std::string iter, diff;
        std::getline(ls, iter, ',');
        std::getline(ls, diff, ',');
        last = std::stod(diff);
        finite = finite && std::isfinite(last);
        ++rows;
    }
    const bool identical = outputs[0] == outputs[1] && !outputs[0].empty();
    std::ostringstream os;
    os << "schema " << (schema.empty() ? "ok" : schema) << ", " << rows << " trace rows, final inf-norm " << last
       << ", outputs " << (identical ? "byte-identical" : "differ");
    return {schema.empty() && rows > 0 && finite && last <= eps && identical, os.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 penalty equivalence", equivalence_suite},
        {"2 scalar prox oracle", prox_oracle},
        {"3 t-SVD suite", tsvd_suite},
        {"4 penalty properties", property_suite},
        {"5 single-slice prox", matrix_degeneration},
        {"6 solver recovery", solver_recovery},
        {"7 iteration transcription", transcription_check},
        {"8 frozen-grid reduction", reduction_property},
        {"9 round trips", round_trips},
        {"10 cli end-to-end", cli_end_to_end},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
