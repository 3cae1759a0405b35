#include "ditcache/tensor.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ditcache/errors.hpp"
#include "ditcache/kernels.hpp"
#include "ditcache/prng.hpp"

namespace ditcache {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw BadRange("tensor dimension must be positive");
        n *= d;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_numel(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_numel(shape_)) {
        throw ShapeMismatch("tensor data length does not match shape");
    }
}

Tensor Tensor::vec(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = value;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void throw_if_shape_mismatch(const Tensor& a, const Tensor& b,
                             const char* where) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch(std::string(where) + ": tensor shapes differ");
    }
}

double l1_norm(const Tensor& t) {
    if (t.numel() == 0) return 0.0;
    return kernels::sum_abs(t.data(), t.numel());
}

double rel_l1_distance(const Tensor& a, const Tensor& b) {
    throw_if_shape_mismatch(a, b, "rel_l1_distance");
    const double denom = l1_norm(b);
    if (denom == 0.0) {
        throw ZeroDenominator("rel_l1_distance: reference has zero L1 norm");
    }
    return kernels::sum_abs_diff(a.data(), b.data(), a.numel()) / denom;
}

Tensor add(const Tensor& a, const Tensor& b) {
    throw_if_shape_mismatch(a, b, "add");
    Tensor out(a.shape());
    kernels::add(a.data(), b.data(), a.numel(), out.data());
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    throw_if_shape_mismatch(a, b, "sub");
    Tensor out(a.shape());
    kernels::sub(a.data(), b.data(), a.numel(), out.data());
    return out;
}

Tensor scale(const Tensor& a, double factor) {
    Tensor out(a.shape());
    kernels::scale(a.data(), factor, a.numel(), out.data());
    return out;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

double checksum(const Tensor& t) {
    constexpr std::uint64_t kProbeSeed = 0x5EEDFACEULL;
    double acc = 0.0;
    for (std::size_t i = 0; i < t.numel(); ++i) {
        acc += t[i] * unit_from_bits(splitmix64_at(kProbeSeed, i));
    }
    return acc;
}

}  // namespace ditcache
