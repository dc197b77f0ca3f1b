#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "tenscomp/tensor.hpp"

namespace tenscomp {

/// Singular values of every Fourier-domain frontal slice: row i holds
/// sigma_j of slice i, nonincreasing in j. Shape I3 x min(I1, I2).
struct SingularSpectrum {
    Eigen::MatrixXd values;

    std::size_t slices() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t rank_bound() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Singular values counted as nonzero when above this fraction of the
/// largest singular value over all slices.
inline constexpr double kRankTolerance = 1e-10;

/**
 * t-SVD factors Y = U * S * V^H of a real I1 x I2 x I3 tensor.
 *
 * The Fourier-domain factors are stored; the spatial-domain tensors are
 * produced on request and are real because slices I3-i are the complex
 * conjugates of slices i.
 */
class TSvdFactors {
public:
    TSvdFactors(ComplexTensor u_hat, SingularSpectrum spectrum, ComplexTensor v_hat, Shape shape);

    const ComplexTensor& u_hat() const noexcept { return u_hat_; }
    const ComplexTensor& v_hat() const noexcept { return v_hat_; }
    const SingularSpectrum& spectrum() const noexcept { return spectrum_; }
    const Shape& shape() const noexcept { return shape_; }

    DenseTensor u() const;
    DenseTensor s() const;
    DenseTensor v() const;
    DenseTensor reconstruct() const;

private:
    ComplexTensor u_hat_;
    SingularSpectrum spectrum_;
    ComplexTensor v_hat_;
    Shape shape_;
};

/// Frontal slice i of an order-3 complex tensor as a matrix.
Eigen::MatrixXcd frontal_slice(const ComplexTensor& t, std::size_t i);
void set_frontal_slice(ComplexTensor& t, std::size_t i, const Eigen::MatrixXcd& m);

/// a (I1 x I2 x I3) * b (I2 x J x I3), computed slice-wise in the Fourier domain.
DenseTensor t_product(const DenseTensor& a, const DenseTensor& b);

/// Transposes each frontal slice and reverses the order of slices 2..I3.
DenseTensor conj_transpose(const DenseTensor& a);

/// n x n x n3 tensor whose first frontal slice is the identity matrix.
DenseTensor identity_tensor(std::size_t n, std::size_t n3);

TSvdFactors t_svd(const DenseTensor& y);

/// Singular values only; cheaper than t_svd.
SingularSpectrum singular_spectrum(const DenseTensor& y);

/**
 * Rebuilds y with the singular values of each Fourier slice rewritten by
 * `map(slice, sigma)`, keeping the singular vectors. `map` is invoked only
 * for slices 0..floor(I3/2); the conjugate slices mirror them, so `map`
 * must treat slice i and slice I3-i alike. If `mapped` is non-null it
 * receives the rewritten values (row i, position j as passed to `map`).
 */
DenseTensor map_singular_values(const DenseTensor& y,
                                const std::function<void(std::size_t, Eigen::Ref<Eigen::VectorXd>)>& map,
                                SingularSpectrum* mapped = nullptr);

std::size_t tubal_rank(const DenseTensor& y);
std::vector<std::size_t> multi_rank(const DenseTensor& y);

/// Sum of all Fourier-slice singular values (no 1/I3 factor).
double tnn(const DenseTensor& y);

/// Tubal ranks of all mode-(k1,k2) unfoldings, pairs in lexicographic order.
std::vector<std::size_t> n_tubal_rank(const DenseTensor& y);

}  // namespace tenscomp
