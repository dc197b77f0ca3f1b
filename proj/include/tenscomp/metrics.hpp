#pragma once

#include <cstddef>
#include <vector>

#include "tenscomp/tensor.hpp"

namespace tenscomp {

/// Written in place of +inf PSNR in report files.
inline constexpr double kPsnrFileCap = 999.0;

/**
 * Metrics work per band: a band is the 2-D slice over the first two modes
 * at one combination of the remaining indices (the spectral band of an
 * H x W x B cube, each channel-frame of an H x W x 3 x T video).
 */
std::size_t band_count(const Shape& shape);

/// Copy of band b as a row-major I1 x I2 array.
std::vector<double> extract_band(const DenseTensor& t, std::size_t b);

/// Mean over bands of 10 log10(max(ref_b)^2 n_b / ||x_b - ref_b||^2).
/// A band reproduced exactly scores +inf.
double psnr(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band = nullptr);

/// Mean single-scale SSIM over bands: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, valid region only, dynamic range max(ref) - min(ref)
/// (1 if ref is constant). Bands smaller than the window use one global
/// window over the whole band.
double ssim(const DenseTensor& x, const DenseTensor& ref, std::vector<double>* per_band = nullptr);

/// 100 sqrt(mean_b MSE_b / mu_b^2) with mu_b the mean of ref band b. Bands
/// with zero mean are skipped and listed in `excluded`; throws
/// std::domain_error if every band is skipped.
double ergas(const DenseTensor& x, const DenseTensor& ref, std::vector<std::size_t>* excluded = nullptr);

/// ||x - ref||_F / ||ref||_F; throws std::domain_error for a zero ref.
double rel_error(const DenseTensor& x, const DenseTensor& ref);

struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double ergas = 0.0;
    double rel_error = 0.0;
    std::vector<double> band_psnr;
    std::vector<double> band_ssim;
    std::vector<std::size_t> ergas_excluded_bands;
};

MetricReport evaluate(const DenseTensor& x, const DenseTensor& ref);

}  // namespace tenscomp
