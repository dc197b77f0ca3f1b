#include "tenscomp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "tenscomp/parallel.hpp"

namespace tenscomp {

const char* to_string(FormatErrorKind kind) noexcept {
    switch (kind) {
        case FormatErrorKind::bad_magic: return "bad magic";
        case FormatErrorKind::bad_header: return "bad header";
        case FormatErrorKind::truncated: return "truncated";
        case FormatErrorKind::extent_overflow: return "extent overflow";
        case FormatErrorKind::size_mismatch: return "size mismatch";
        case FormatErrorKind::bad_value: return "bad value";
    }
    return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

std::size_t element_count(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

std::string shape_to_string(const Shape& shape) {
    std::string s;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k) s += 'x';
        s += std::to_string(shape[k]);
    }
    return s.empty() ? "()" : s;
}

void validate_shape(const Shape& shape) {
    if (shape.empty()) throw ShapeError("tensor order must be at least 1");
    if (shape.size() > kMaxOrder) {
        throw ShapeError("tensor order " + std::to_string(shape.size()) + " exceeds maximum " +
                         std::to_string(kMaxOrder));
    }
    std::size_t total = 1;
    for (auto e : shape) {
        if (e == 0) throw ShapeError("zero extent in shape " + shape_to_string(shape));
        if (total > std::numeric_limits<std::size_t>::max() / e) {
            throw ShapeError("element count overflows for shape " + shape_to_string(shape));
        }
        total *= e;
    }
}

// ---------------------------------------------------------------------------
// IndexSet

IndexSet::IndexSet(Shape shape, bool observed) : shape_(std::move(shape)) {
    validate_shape(shape_);
    bits_.assign(element_count(shape_), observed ? 1 : 0);
}

IndexSet::IndexSet(Shape shape, std::vector<std::uint8_t> bitmap)
    : shape_(std::move(shape)), bits_(std::move(bitmap)) {
    validate_shape(shape_);
    if (bits_.size() != element_count(shape_)) {
        throw ShapeError("mask bitmap length does not match shape " + shape_to_string(shape_));
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t IndexSet::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

IndexSet IndexSet::complement() const {
    IndexSet out = *this;
    for (auto& b : out.bits_) b = b ? 0 : 1;
    return out;
}

// ---------------------------------------------------------------------------
// Elementwise

double frobenius_norm(const DenseTensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return std::sqrt(s);
}

double frobenius_norm(const ComplexTensor& t) {
    double s = 0.0;
    for (const Complex& v : t.data()) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const DenseTensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const DenseTensor& t) {
    return std::all_of(t.data().begin(), t.data().end(), [](double v) { return std::isfinite(v); });
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    a.require_same_shape(b, "hadamard");
    DenseTensor out(a.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

DenseTensor hadamard_div(const DenseTensor& a, const DenseTensor& b) {
    a.require_same_shape(b, "hadamard_div");
    DenseTensor out(a.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (b[i] == 0.0) {
            auto idx = b.multi_index(i);
            std::string where;
            for (std::size_t k = 0; k < idx.size(); ++k) where += (k ? "," : "") + std::to_string(idx[k]);
            throw ZeroDivisorError(std::move(idx), "hadamard_div: zero divisor at (" + where + ")");
        }
        out[i] = a[i] / b[i];
    }
    return out;
}

double inf_norm_diff(const DenseTensor& a, const DenseTensor& b) {
    a.require_same_shape(b, "inf_norm_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

DenseTensor project_mask(const DenseTensor& t, const IndexSet& mask) {
    if (t.shape() != mask.shape()) {
        throw ShapeError("project_mask: tensor shape " + shape_to_string(t.shape()) + " vs mask shape " +
                         shape_to_string(mask.shape()));
    }
    DenseTensor out(t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = mask.contains(i) ? t[i] : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Unfold / fold

namespace {

void check_modes(std::size_t order, std::size_t k1, std::size_t k2) {
    if (k2 >= order) {
        throw std::out_of_range("unfolding mode " + std::to_string(k2) + " out of range for order " +
                                std::to_string(order));
    }
    if (k1 >= k2) {
        throw std::invalid_argument("unfolding requires k1 < k2, got (" + std::to_string(k1) + "," +
                                    std::to_string(k2) + ")");
    }
}

// For each linear index of the original tensor, the linear offset of the
// same element inside the (k1,k2) unfolding.
std::vector<std::size_t> unfold_offsets(const Shape& shape, std::size_t k1, std::size_t k2) {
    const std::size_t order = shape.size();
    std::vector<std::size_t> free_stride(order, 0);
    std::size_t j_extent = 1;
    for (std::size_t s = 0; s < order; ++s) {
        if (s == k1 || s == k2) continue;
        free_stride[s] = j_extent;
        j_extent *= shape[s];
    }
    const std::size_t ik2 = shape[k2];

    std::vector<std::size_t> offsets(element_count(shape));
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t lin = 0; lin < offsets.size(); ++lin) {
        std::size_t j = 0;
        for (std::size_t s = 0; s < order; ++s) j += idx[s] * free_stride[s];
        offsets[lin] = (idx[k1] * ik2 + idx[k2]) * j_extent + j;
        // odometer, last index fastest
        for (std::size_t s = order; s-- > 0;) {
            if (++idx[s] < shape[s]) break;
            idx[s] = 0;
        }
    }
    return offsets;
}

}  // namespace

std::vector<ModePair> mode_pairs(std::size_t order) {
    std::vector<ModePair> pairs;
    for (std::size_t a = 0; a < order; ++a) {
        for (std::size_t b = a + 1; b < order; ++b) pairs.push_back({a, b});
    }
    return pairs;
}

std::string to_string(const ModePair& p) {
    return "(" + std::to_string(p.k1 + 1) + "," + std::to_string(p.k2 + 1) + ")";
}

Shape unfolded_shape(const Shape& shape, std::size_t k1, std::size_t k2) {
    check_modes(shape.size(), k1, k2);
    std::size_t rest = 1;
    for (std::size_t s = 0; s < shape.size(); ++s) {
        if (s != k1 && s != k2) rest *= shape[s];
    }
    return {shape[k1], shape[k2], rest};
}

DenseTensor mode_unfold(const DenseTensor& t, std::size_t k1, std::size_t k2) {
    const Shape out_shape = unfolded_shape(t.shape(), k1, k2);
    const auto offsets = unfold_offsets(t.shape(), k1, k2);
    DenseTensor out(out_shape);
    for (std::size_t lin = 0; lin < t.size(); ++lin) out[offsets[lin]] = t[lin];
    return out;
}

DenseTensor mode_fold(const DenseTensor& u, std::size_t k1, std::size_t k2, const Shape& original_shape) {
    validate_shape(original_shape);
    const Shape expected = unfolded_shape(original_shape, k1, k2);
    if (u.shape() != expected) {
        throw ShapeError("mode_fold: unfolding of shape " + shape_to_string(u.shape()) +
                         " is inconsistent with original shape " + shape_to_string(original_shape) +
                         " (expected " + shape_to_string(expected) + ")");
    }
    const auto offsets = unfold_offsets(original_shape, k1, k2);
    DenseTensor out(original_shape);
    for (std::size_t lin = 0; lin < out.size(); ++lin) out[lin] = u[offsets[lin]];
    return out;
}

// ---------------------------------------------------------------------------
// DFT along mode 3

namespace {

void require_order3(const Shape& shape, const char* op) {
    if (shape.size() != 3) {
        throw ShapeError(std::string(op) + " requires an order-3 tensor, got shape " + shape_to_string(shape));
    }
}

// Tubes are contiguous, so the transform is a batch of independent 1-D FFTs.
template <typename In>
ComplexTensor transform_tubes(const BasicTensor<In>& t, bool inverse) {
    const std::size_t n = t.extent(2);
    const std::size_t tubes = t.size() / n;
    ComplexTensor out(t.shape());
    if (n == 1) {
        for (std::size_t i = 0; i < t.size(); ++i) out[i] = Complex(t[i]);
        return out;
    }
    const std::size_t workers = std::min(thread_count(), tubes);
    const std::size_t chunk = (tubes + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w) {
        Eigen::FFT<double> fft;
        std::vector<Complex> in(n), res(n);
        const std::size_t end = std::min(tubes, (w + 1) * chunk);
        for (std::size_t tube = w * chunk; tube < end; ++tube) {
            for (std::size_t k = 0; k < n; ++k) in[k] = Complex(t[tube * n + k]);
            if (inverse) {
                fft.inv(res, in);
            } else {
                fft.fwd(res, in);
            }
            std::copy(res.begin(), res.end(), out.data().begin() + static_cast<std::ptrdiff_t>(tube * n));
        }
    });
    return out;
}

}  // namespace

ComplexTensor dft_mode3(const DenseTensor& t) {
    require_order3(t.shape(), "dft_mode3");
    return transform_tubes(t, false);
}

ComplexTensor dft_mode3(const ComplexTensor& t) {
    require_order3(t.shape(), "dft_mode3");
    return transform_tubes(t, false);
}

ComplexTensor idft_mode3_complex(const ComplexTensor& t) {
    require_order3(t.shape(), "idft_mode3");
    return transform_tubes(t, true);
}

DenseTensor idft_mode3(const ComplexTensor& t) {
    const ComplexTensor c = idft_mode3_complex(t);
    DenseTensor out(c.shape());
    double imag_sq = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        out[i] = c[i].real();
        imag_sq += c[i].imag() * c[i].imag();
    }
    const double residue = std::sqrt(imag_sq);
    if (residue > 1e-8 * frobenius_norm(c)) {
        throw SymmetryError("idft_mode3: imaginary residue " + std::to_string(residue) +
                            " indicates tubes that are not conjugate-symmetric");
    }
    return out;
}

}  // namespace tenscomp
