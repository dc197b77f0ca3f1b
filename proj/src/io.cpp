#include "tenscomp/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>

#include "tenscomp/error.hpp"

namespace tenscomp {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'F', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + 8 * t.order() + 8 * t.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.order()));
    for (std::size_t e : t.shape()) put_le<std::uint64_t>(out, e);
    for (double v : t.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

DenseTensor decode_tensor(std::span<const std::uint8_t> bytes) {
    const std::size_t n = bytes.size();
    if (n < 4) throw FormatError(FormatErrorKind::truncated, n, "file too short for magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(FormatErrorKind::bad_magic, 0, "expected DTF1");
    if (n < 8) throw FormatError(FormatErrorKind::truncated, n, "file ends inside the order field");

    const auto order = get_le<std::uint32_t>(bytes.data() + 4);
    if (order == 0 || order > kMaxOrder) {
        throw FormatError(FormatErrorKind::bad_header, 4,
                          "order " + std::to_string(order) + " outside 1.." + std::to_string(kMaxOrder));
    }
    const std::size_t header = 8 + 8 * std::size_t{order};
    if (n < header) throw FormatError(FormatErrorKind::truncated, n, "file ends inside the extents");

    Shape shape(order);
    std::uint64_t count = 1;
    constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max() / 8;
    for (std::size_t k = 0; k < order; ++k) {
        const std::size_t at = 8 + 8 * k;
        const auto e = get_le<std::uint64_t>(bytes.data() + at);
        if (e == 0) throw FormatError(FormatErrorKind::bad_header, at, "zero extent for mode " + std::to_string(k));
        if (count > kMaxCount / e) {
            throw FormatError(FormatErrorKind::extent_overflow, at, "element count overflows at mode " + std::to_string(k));
        }
        count *= e;
        shape[k] = static_cast<std::size_t>(e);
    }

    const std::uint64_t payload = n - header;
    const std::uint64_t expected = count * 8;
    if (payload < expected) {
        throw FormatError(FormatErrorKind::truncated, n,
                          "payload has " + std::to_string(payload) + " bytes, header declares " +
                              std::to_string(expected));
    }
    if (payload > expected) {
        throw FormatError(FormatErrorKind::size_mismatch, header + expected,
                          std::to_string(payload - expected) + " trailing bytes after the payload");
    }

    std::vector<double> data(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t at = header + 8 * i;
        data[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + at));
        if (!std::isfinite(data[i])) throw FormatError(FormatErrorKind::bad_value, at, "non-finite value");
    }
    return DenseTensor(std::move(shape), std::move(data));
}

DenseTensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read error on " + path.string());
    return decode_tensor(bytes);
}

void save_tensor(const DenseTensor& t, const std::filesystem::path& path) {
    const auto bytes = encode_tensor(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write error on " + path.string());
}

IndexSet mask_from_tensor(const DenseTensor& t) {
    std::vector<std::uint8_t> bits(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != 0.0 && t[i] != 1.0) {
            throw FormatError(FormatErrorKind::bad_value, 8 + 8 * t.order() + 8 * i,
                              "mask entries must be 0 or 1, got " + std::to_string(t[i]));
        }
        bits[i] = t[i] == 1.0 ? 1 : 0;
    }
    return IndexSet(t.shape(), std::move(bits));
}

DenseTensor mask_to_tensor(const IndexSet& mask) {
    DenseTensor t(mask.shape());
    for (std::size_t i = 0; i < mask.size(); ++i) t[i] = mask.contains(i) ? 1.0 : 0.0;
    return t;
}

IndexSet load_mask(const std::filesystem::path& path) { return mask_from_tensor(load_tensor(path)); }

void save_mask(const IndexSet& mask, const std::filesystem::path& path) { save_tensor(mask_to_tensor(mask), path); }

}  // namespace tenscomp
