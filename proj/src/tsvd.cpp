#include "tenscomp/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "tenscomp/parallel.hpp"

namespace tenscomp {

namespace {

void require_order3(const DenseTensor& t, const char* op) {
    if (t.order() != 3) {
        throw ShapeError(std::string(op) + " requires an order-3 tensor, got shape " + shape_to_string(t.shape()));
    }
}

// Slices 0..floor(n/2) determine the rest by conjugate symmetry.
std::size_t unique_slices(std::size_t n) { return n / 2 + 1; }

std::size_t mirror(std::size_t i, std::size_t n) { return i == 0 ? 0 : n - i; }

template <int Options>
Eigen::JacobiSVD<Eigen::MatrixXcd> slice_svd(const Eigen::MatrixXcd& m, std::size_t slice) {
    if (!m.allFinite()) {
        throw SvdError(slice, "t-SVD: Fourier slice " + std::to_string(slice) + " has non-finite entries");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Options);
    if (svd.info() != Eigen::Success) {
        throw SvdError(slice, "t-SVD: SVD failed on Fourier slice " + std::to_string(slice));
    }
    return svd;
}

ComplexTensor diagonal_tensor(const SingularSpectrum& spectrum, std::size_t n1, std::size_t n2) {
    const std::size_t n3 = spectrum.slices();
    ComplexTensor out({n1, n2, n3});
    for (std::size_t i = 0; i < n3; ++i) {
        for (std::size_t j = 0; j < spectrum.rank_bound(); ++j) {
            out(j, j, i) = spectrum.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXcd frontal_slice(const ComplexTensor& t, std::size_t i) {
    const std::size_t n1 = t.extent(0), n2 = t.extent(1);
    Eigen::MatrixXcd m(n1, n2);
    for (std::size_t a = 0; a < n1; ++a) {
        for (std::size_t b = 0; b < n2; ++b) m(a, b) = t(a, b, i);
    }
    return m;
}

void set_frontal_slice(ComplexTensor& t, std::size_t i, const Eigen::MatrixXcd& m) {
    for (std::size_t a = 0; a < t.extent(0); ++a) {
        for (std::size_t b = 0; b < t.extent(1); ++b) t(a, b, i) = m(a, b);
    }
}

// ---------------------------------------------------------------------------

TSvdFactors::TSvdFactors(ComplexTensor u_hat, SingularSpectrum spectrum, ComplexTensor v_hat, Shape shape)
    : u_hat_(std::move(u_hat)), spectrum_(std::move(spectrum)), v_hat_(std::move(v_hat)), shape_(std::move(shape)) {}

DenseTensor TSvdFactors::u() const { return idft_mode3(u_hat_); }
DenseTensor TSvdFactors::v() const { return idft_mode3(v_hat_); }
DenseTensor TSvdFactors::s() const { return idft_mode3(diagonal_tensor(spectrum_, shape_[0], shape_[1])); }

DenseTensor TSvdFactors::reconstruct() const {
    const std::size_t n3 = shape_[2];
    ComplexTensor out(shape_);
    const auto r = static_cast<Eigen::Index>(spectrum_.rank_bound());
    for (std::size_t i = 0; i < n3; ++i) {
        const Eigen::MatrixXcd u = frontal_slice(u_hat_, i);
        const Eigen::MatrixXcd v = frontal_slice(v_hat_, i);
        const Eigen::VectorXd s = spectrum_.values.row(static_cast<Eigen::Index>(i)).transpose();
        set_frontal_slice(out, i, u.leftCols(r) * s.asDiagonal() * v.leftCols(r).adjoint());
    }
    return idft_mode3(out);
}

// ---------------------------------------------------------------------------

DenseTensor t_product(const DenseTensor& a, const DenseTensor& b) {
    require_order3(a, "t_product");
    require_order3(b, "t_product");
    if (a.extent(1) != b.extent(0) || a.extent(2) != b.extent(2)) {
        throw ShapeError("t_product: incompatible shapes " + shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
    }
    const std::size_t n3 = a.extent(2);
    const ComplexTensor ah = dft_mode3(a);
    const ComplexTensor bh = dft_mode3(b);
    ComplexTensor ch({a.extent(0), b.extent(1), n3});
    for (std::size_t i = 0; i < unique_slices(n3); ++i) {
        const Eigen::MatrixXcd c = frontal_slice(ah, i) * frontal_slice(bh, i);
        set_frontal_slice(ch, i, c);
        if (mirror(i, n3) != i) set_frontal_slice(ch, mirror(i, n3), c.conjugate());
    }
    return idft_mode3(ch);
}

DenseTensor conj_transpose(const DenseTensor& a) {
    require_order3(a, "conj_transpose");
    const std::size_t n1 = a.extent(0), n2 = a.extent(1), n3 = a.extent(2);
    DenseTensor out({n2, n1, n3});
    for (std::size_t i = 0; i < n3; ++i) {
        const std::size_t src = mirror(i, n3);
        for (std::size_t r = 0; r < n1; ++r) {
            for (std::size_t c = 0; c < n2; ++c) out(c, r, i) = a(r, c, src);
        }
    }
    return out;
}

DenseTensor identity_tensor(std::size_t n, std::size_t n3) {
    DenseTensor out({n, n, n3});
    for (std::size_t k = 0; k < n; ++k) out(k, k, 0) = 1.0;
    return out;
}

TSvdFactors t_svd(const DenseTensor& y) {
    require_order3(y, "t_svd");
    const std::size_t n1 = y.extent(0), n2 = y.extent(1), n3 = y.extent(2);
    const std::size_t r = std::min(n1, n2);
    const ComplexTensor yh = dft_mode3(y);

    ComplexTensor u_hat({n1, n1, n3});
    ComplexTensor v_hat({n2, n2, n3});
    SingularSpectrum spectrum{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(r))};

    parallel_for(unique_slices(n3), [&](std::size_t i) {
        const auto svd = slice_svd<Eigen::ComputeFullU | Eigen::ComputeFullV>(frontal_slice(yh, i), i);
        const std::size_t m = mirror(i, n3);
        set_frontal_slice(u_hat, i, svd.matrixU());
        set_frontal_slice(v_hat, i, svd.matrixV());
        spectrum.values.row(static_cast<Eigen::Index>(i)) = svd.singularValues().transpose();
        if (m != i) {
            set_frontal_slice(u_hat, m, svd.matrixU().conjugate());
            set_frontal_slice(v_hat, m, svd.matrixV().conjugate());
            spectrum.values.row(static_cast<Eigen::Index>(m)) = svd.singularValues().transpose();
        }
    });
    return TSvdFactors(std::move(u_hat), std::move(spectrum), std::move(v_hat), y.shape());
}

SingularSpectrum singular_spectrum(const DenseTensor& y) {
    require_order3(y, "singular_spectrum");
    const std::size_t n3 = y.extent(2);
    const std::size_t r = std::min(y.extent(0), y.extent(1));
    const ComplexTensor yh = dft_mode3(y);
    SingularSpectrum spectrum{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(r))};
    parallel_for(unique_slices(n3), [&](std::size_t i) {
        const auto svd = slice_svd<0>(frontal_slice(yh, i), i);
        spectrum.values.row(static_cast<Eigen::Index>(i)) = svd.singularValues().transpose();
        spectrum.values.row(static_cast<Eigen::Index>(mirror(i, n3))) = svd.singularValues().transpose();
    });
    return spectrum;
}

DenseTensor map_singular_values(const DenseTensor& y,
                                const std::function<void(std::size_t, Eigen::Ref<Eigen::VectorXd>)>& map,
                                SingularSpectrum* mapped) {
    require_order3(y, "map_singular_values");
    const std::size_t n3 = y.extent(2);
    const std::size_t r = std::min(y.extent(0), y.extent(1));
    const ComplexTensor yh = dft_mode3(y);
    ComplexTensor lh(y.shape());
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(r));

    parallel_for(unique_slices(n3), [&](std::size_t i) {
        const auto svd = slice_svd<Eigen::ComputeThinU | Eigen::ComputeThinV>(frontal_slice(yh, i), i);
        Eigen::VectorXd s = svd.singularValues();
        map(i, s);
        const Eigen::MatrixXcd l = svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
        const std::size_t m = mirror(i, n3);
        set_frontal_slice(lh, i, l);
        values.row(static_cast<Eigen::Index>(i)) = s.transpose();
        if (m != i) {
            set_frontal_slice(lh, m, l.conjugate());
            values.row(static_cast<Eigen::Index>(m)) = s.transpose();
        }
    });
    if (mapped) mapped->values = std::move(values);
    return idft_mode3(lh);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> ranks_per_slice(const SingularSpectrum& spectrum) {
    const double top = spectrum.values.size() ? spectrum.values.maxCoeff() : 0.0;
    const double tol = kRankTolerance * top;
    std::vector<std::size_t> ranks(spectrum.slices(), 0);
    for (std::size_t i = 0; i < spectrum.slices(); ++i) {
        for (std::size_t j = 0; j < spectrum.rank_bound(); ++j) {
            if (spectrum.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > tol) ++ranks[i];
        }
    }
    return ranks;
}

}  // namespace

std::vector<std::size_t> multi_rank(const DenseTensor& y) { return ranks_per_slice(singular_spectrum(y)); }

std::size_t tubal_rank(const DenseTensor& y) {
    // Tube j of S is nonzero iff some slice has sigma_j above tolerance; the
    // per-slice values are sorted, so this is the largest multi-rank entry.
    const auto ranks = multi_rank(y);
    return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
}

double tnn(const DenseTensor& y) { return singular_spectrum(y).values.sum(); }

std::vector<std::size_t> n_tubal_rank(const DenseTensor& y) {
    if (y.order() < 3) {
        throw ShapeError("n_tubal_rank requires order >= 3, got shape " + shape_to_string(y.shape()));
    }
    std::vector<std::size_t> out;
    for (const auto& p : mode_pairs(y.order())) out.push_back(tubal_rank(mode_unfold(y, p.k1, p.k2)));
    return out;
}

}  // namespace tenscomp
