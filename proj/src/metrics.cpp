#include "tenscomp/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tenscomp/error.hpp"

namespace tenscomp {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void require_metric_inputs(const DenseTensor& x, const DenseTensor& ref) {
    x.require_same_shape(ref, "metrics");
    if (ref.order() < 2) throw ShapeError("metrics need a tensor of order >= 2, got " + shape_to_string(ref.shape()));
}

std::array<double, kWindow * kWindow> gaussian_window() {
    std::array<double, kWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        g[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        sum += g[i];
    }
    std::array<double, kWindow * kWindow> w{};
    for (int i = 0; i < kWindow; ++i) {
        for (int j = 0; j < kWindow; ++j) w[i * kWindow + j] = g[i] * g[j] / (sum * sum);
    }
    return w;
}

double ssim_formula(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
    return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

double band_ssim(const std::vector<double>& a, const std::vector<double>& b, std::size_t rows, std::size_t cols,
                 double c1, double c2) {
    if (rows < kWindow || cols < kWindow) {
        const double n = static_cast<double>(a.size());
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= n;
        mb /= n;
        double va = 0.0, vb = 0.0, cab = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            va += (a[i] - ma) * (a[i] - ma);
            vb += (b[i] - mb) * (b[i] - mb);
            cab += (a[i] - ma) * (b[i] - mb);
        }
        return ssim_formula(ma, mb, va / n, vb / n, cab / n, c1, c2);
    }

    static const auto w = gaussian_window();
    double total = 0.0;
    const std::size_t out_r = rows - kWindow + 1, out_c = cols - kWindow + 1;
    for (std::size_t r = 0; r < out_r; ++r) {
        for (std::size_t c = 0; c < out_c; ++c) {
            double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int i = 0; i < kWindow; ++i) {
                for (int j = 0; j < kWindow; ++j) {
                    const std::size_t idx = (r + i) * cols + (c + j);
                    const double wt = w[i * kWindow + j];
                    ma += wt * a[idx];
                    mb += wt * b[idx];
                    saa += wt * a[idx] * a[idx];
                    sbb += wt * b[idx] * b[idx];
                    sab += wt * a[idx] * b[idx];
                }
            }
            total += ssim_formula(ma, mb, saa - ma * ma, sbb - mb * mb, sab - ma * mb, c1, c2);
        }
    }
    return total / static_cast<double>(out_r * out_c);
}

}  // namespace

std::size_t band_count(const Shape& shape) {
    if (shape.size() < 2) throw ShapeError("bands need order >= 2, got " + shape_to_string(shape));
    return element_count(shape) / (shape[0] * shape[1]);
}

std::vector<double> extract_band(const DenseTensor& t, std::size_t b) {
    const std::size_t bands = band_count(t.shape());
    if (b >= bands) throw std::out_of_range("band " + std::to_string(b) + " out of range");
    const std::size_t plane = t.extent(0) * t.extent(1);
    std::vector<double> out(plane);
    for (std::size_t p = 0; p < plane; ++p) out[p] = t[p * bands + b];
    return out;
}

double psnr(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band) {
    require_metric_inputs(x, ref);
    const std::size_t bands = band_count(ref.shape());
    std::vector<double> values(bands);
    double sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
        const auto xb = extract_band(x, b);
        const auto rb = extract_band(ref, b);
        double peak = -std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (std::size_t i = 0; i < rb.size(); ++i) {
            peak = std::max(peak, rb[i]);
            err += (xb[i] - rb[i]) * (xb[i] - rb[i]);
        }
        values[b] = err == 0.0 ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(peak * peak * static_cast<double>(rb.size()) / err);
        sum += values[b];
    }
    if (per_band) *per_band = values;
    return sum / static_cast<double>(bands);
}

double ssim(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band) {
    require_metric_inputs(x, ref);
    const auto [lo, hi] = std::minmax_element(ref.data().begin(), ref.data().end());
    const double range = *hi > *lo ? *hi - *lo : 1.0;
    const double c1 = (kK1 * range) * (kK1 * range);
    const double c2 = (kK2 * range) * (kK2 * range);

    const std::size_t bands = band_count(ref.shape());
    std::vector<double> values(bands);
    double sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
        values[b] = band_ssim(extract_band(x, b), extract_band(ref, b), ref.extent(0), ref.extent(1), c1, c2);
        sum += values[b];
    }
    if (per_band) *per_band = values;
    return sum / static_cast<double>(bands);
}

double ergas(const DenseTensor& x, const DenseTensor& ref, std::vector<std::size_t>* excluded) {
    require_metric_inputs(x, ref);
    const std::size_t bands = band_count(ref.shape());
    std::vector<std::size_t> skipped;
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < bands; ++b) {
        const auto xb = extract_band(x, b);
        const auto rb = extract_band(ref, b);
        double mean = 0.0, mse = 0.0;
        for (std::size_t i = 0; i < rb.size(); ++i) {
            mean += rb[i];
            mse += (xb[i] - rb[i]) * (xb[i] - rb[i]);
        }
        const double n = static_cast<double>(rb.size());
        mean /= n;
        mse /= n;
        if (mean == 0.0) {
            skipped.push_back(b);
            continue;
        }
        acc += mse / (mean * mean);
        ++used;
    }
    if (excluded) *excluded = skipped;
    if (used == 0) throw std::domain_error("ERGAS undefined: every reference band has zero mean");
    return 100.0 * std::sqrt(acc / static_cast<double>(used));
}

double rel_error(const DenseTensor& x, const DenseTensor& ref) {
    x.require_same_shape(ref, "rel_error");
    const double denom = frobenius_norm(ref);
    if (denom == 0.0) throw std::domain_error("relative error undefined for a zero reference");
    return frobenius_norm(x - ref) / denom;
}

MetricReport evaluate(const DenseTensor& x, const DenseTensor& ref) {
    MetricReport r;
    r.psnr = psnr(x, ref, &r.band_psnr);
    r.ssim = ssim(x, ref, &r.band_ssim);
    r.ergas = ergas(x, ref, &r.ergas_excluded_bands);
    r.rel_error = rel_error(x, ref);
    return r;
}

}  // namespace tenscomp
