#ifndef DITCACHE_TENSOR_HPP_
#define DITCACHE_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ditcache {

// Dense row-major tensor of 64-bit floats. Values are immutable from the
// consumer's point of view once an operation returns; all free functions
// below are pure.
class Tensor {
public:
    Tensor() = default;

    // Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    // 1-D convenience constructor: Tensor({1.0, -2.0, 3.0}).
    static Tensor vec(std::initializer_list<double> values);

    static Tensor full(std::vector<std::size_t> shape, double value);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_[axis]; }
    std::size_t numel() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // Row-major 2-D access; valid only for rank-2 tensors.
    double& at(std::size_t row, std::size_t col) {
        return data_[row * shape_[1] + col];
    }
    double at(std::size_t row, std::size_t col) const {
        return data_[row * shape_[1] + col];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Sum of absolute values over all elements.
double l1_norm(const Tensor& t);

// ||a - b||_1 / ||b||_1 with b as the reference. Throws ShapeMismatch on
// differing shapes and ZeroDenominator when ||b||_1 == 0.
double rel_l1_distance(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

bool bitwise_equal(const Tensor& a, const Tensor& b);

// Probe-weighted digest used as a compact regression anchor: sum of
// data[i] * u_i with u_i drawn from a fixed counter stream. Not a
// cryptographic hash; any elementwise change moves the value.
double checksum(const Tensor& t);

void throw_if_shape_mismatch(const Tensor& a, const Tensor& b,
                             const char* where);

}  // namespace ditcache

#endif  // DITCACHE_TENSOR_HPP_
