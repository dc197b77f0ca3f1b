#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tenscomp/error.hpp"

namespace tenscomp {

using Shape = std::vector<std::size_t>;
using Complex = std::complex<double>;

/// Orders above this are rejected; the algebra here never needs them.
inline constexpr std::size_t kMaxOrder = 8;

std::size_t element_count(const Shape& shape);
std::string shape_to_string(const Shape& shape);
void validate_shape(const Shape& shape);

/**
 * Dense N-way array.
 *
 * Storage is row-major with the LAST index varying fastest, so for an
 * order-3 tensor the tube t(i1, i2, :) is contiguous in memory. All
 * indices in the C++ API are 0-based; mode k here is mode k+1 in the
 * usual 1-based mathematical notation.
 */
template <typename T>
class BasicTensor {
public:
    using value_type = T;

    /// A single zero entry of shape {1}.
    BasicTensor() : shape_{1}, strides_{1}, data_(1, T{}) {}

    explicit BasicTensor(Shape shape) : BasicTensor(std::move(shape), T{}) {}

    BasicTensor(Shape shape, T fill) : shape_(std::move(shape)) {
        validate_shape(shape_);
        data_.assign(element_count(shape_), fill);
        compute_strides();
    }

    BasicTensor(Shape shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        validate_shape(shape_);
        if (data_.size() != element_count(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_to_string(shape_));
        }
        compute_strides();
    }

    static BasicTensor zeros(Shape shape) { return BasicTensor(std::move(shape), T{}); }
    static BasicTensor ones(Shape shape) { return BasicTensor(std::move(shape), T{1}); }

    const Shape& shape() const noexcept { return shape_; }
    const std::vector<std::size_t>& strides() const noexcept { return strides_; }
    std::size_t order() const noexcept { return shape_.size(); }
    std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    T& operator[](std::size_t linear) noexcept { return data_[linear]; }
    const T& operator[](std::size_t linear) const noexcept { return data_[linear]; }

    template <typename... I>
    T& operator()(I... idx) noexcept {
        return data_[offset_of(idx...)];
    }
    template <typename... I>
    const T& operator()(I... idx) const noexcept {
        return data_[offset_of(idx...)];
    }

    /// Bounds-checked access by multi-index.
    T& at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
    const T& at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }

    std::size_t linear_index(std::span<const std::size_t> index) const {
        if (index.size() != shape_.size()) {
            throw ShapeError("index of order " + std::to_string(index.size()) +
                             " used on tensor of order " + std::to_string(shape_.size()));
        }
        std::size_t off = 0;
        for (std::size_t k = 0; k < index.size(); ++k) {
            if (index[k] >= shape_[k]) {
                throw std::out_of_range("index " + std::to_string(index[k]) + " out of range for mode " +
                                        std::to_string(k) + " of extent " + std::to_string(shape_[k]));
            }
            off += index[k] * strides_[k];
        }
        return off;
    }

    std::vector<std::size_t> multi_index(std::size_t linear) const {
        std::vector<std::size_t> idx(shape_.size());
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            idx[k] = linear / strides_[k];
            linear %= strides_[k];
        }
        return idx;
    }

    BasicTensor& operator+=(const BasicTensor& other) {
        require_same_shape(other, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }
    BasicTensor& operator-=(const BasicTensor& other) {
        require_same_shape(other, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }
    BasicTensor& operator*=(T scalar) noexcept {
        for (auto& v : data_) v *= scalar;
        return *this;
    }

    friend BasicTensor operator+(BasicTensor a, const BasicTensor& b) { return a += b; }
    friend BasicTensor operator-(BasicTensor a, const BasicTensor& b) { return a -= b; }
    friend BasicTensor operator*(BasicTensor a, T s) { return a *= s; }
    friend BasicTensor operator*(T s, BasicTensor a) { return a *= s; }

    friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

    void require_same_shape(const BasicTensor& other, const char* op) const {
        if (shape_ != other.shape_) {
            throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(shape_) + " vs " +
                             shape_to_string(other.shape_));
        }
    }

private:
    template <typename... I>
    std::size_t offset_of(I... idx) const noexcept {
        std::size_t off = 0;
        std::size_t k = 0;
        ((off += static_cast<std::size_t>(idx) * strides_[k++]), ...);
        return off;
    }

    void compute_strides() {
        strides_.assign(shape_.size(), 1);
        for (std::size_t k = shape_.size(); k-- > 1;) strides_[k - 1] = strides_[k] * shape_[k];
    }

    Shape shape_;
    std::vector<std::size_t> strides_;
    std::vector<T> data_;
};

using DenseTensor = BasicTensor<double>;
using ComplexTensor = BasicTensor<Complex>;

/// Observed-entry set over a fixed shape (true = observed).
class IndexSet {
public:
    explicit IndexSet(Shape shape, bool observed = false);
    IndexSet(Shape shape, std::vector<std::uint8_t> bitmap);

    static IndexSet full(Shape shape) { return IndexSet(std::move(shape), true); }
    static IndexSet empty(Shape shape) { return IndexSet(std::move(shape), false); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool contains(std::size_t linear) const noexcept { return bits_[linear] != 0; }
    void set(std::size_t linear, bool observed = true) { bits_.at(linear) = observed ? 1 : 0; }

    std::size_t count() const noexcept;
    IndexSet complement() const;

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    Shape shape_;
    std::vector<std::uint8_t> bits_;
};

double frobenius_norm(const DenseTensor& t);
double frobenius_norm(const ComplexTensor& t);
double max_abs(const DenseTensor& t);
bool all_finite(const DenseTensor& t);

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);
/// Throws ZeroDivisorError naming the first zero entry of `b`.
DenseTensor hadamard_div(const DenseTensor& a, const DenseTensor& b);

/// Max absolute entrywise difference.
double inf_norm_diff(const DenseTensor& a, const DenseTensor& b);

/// Keeps entries in `mask`, zeroes the rest.
DenseTensor project_mask(const DenseTensor& t, const IndexSet& mask);

/**
 * Mode-(k1,k2) unfolding into a third-order tensor of shape
 * I_k1 x I_k2 x prod_{s != k1,k2} I_s. The remaining modes are ordered
 * lexicographically with the lowest-numbered free mode varying fastest,
 * i.e. j = sum_s i_s * J_s with J_s = prod_{m < s, m != k1,k2} I_m
 * (0-based). Requires k1 < k2 < order.
 */
DenseTensor mode_unfold(const DenseTensor& t, std::size_t k1, std::size_t k2);

/// Inverse of mode_unfold for a tensor of `original_shape`.
DenseTensor mode_fold(const DenseTensor& u, std::size_t k1, std::size_t k2, const Shape& original_shape);

/// A pair of modes (k1 < k2, 0-based) selecting one unfolding.
struct ModePair {
    std::size_t k1 = 0;
    std::size_t k2 = 1;
    friend bool operator==(const ModePair&, const ModePair&) = default;
};

/// All N(N-1)/2 pairs in lexicographic order: (0,1), (0,2), ..., (N-2,N-1).
std::vector<ModePair> mode_pairs(std::size_t order);

/// "(k1+1,k2+1)", the conventional 1-based label.
std::string to_string(const ModePair& p);

/// Shape of the (k1,k2) unfolding of a tensor of `shape`.
Shape unfolded_shape(const Shape& shape, std::size_t k1, std::size_t k2);

/// Unnormalized forward DFT along every tube t(i1, i2, :).
ComplexTensor dft_mode3(const DenseTensor& t);
ComplexTensor dft_mode3(const ComplexTensor& t);

/// Inverse DFT along mode 3 with 1/I3 scaling. Throws SymmetryError if the
/// imaginary part of the result exceeds 1e-8 times its Frobenius norm.
DenseTensor idft_mode3(const ComplexTensor& t);
ComplexTensor idft_mode3_complex(const ComplexTensor& t);

}  // namespace tenscomp
