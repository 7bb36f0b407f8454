#ifndef AFFECT_TENSOR_H_
#define AFFECT_TENSOR_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace affect::ad {

// Raised when operand shapes do not conform to an operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a NaN or infinity reaches a place where it is not allowed.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dense row-major matrix of doubles. Column vectors have cols() == 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols);
  // Takes ownership of `data`; rejects wrong length or non-finite entries.
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor Vector(std::vector<double> values);
  static Tensor Filled(std::size_t rows, std::size_t cols, double value);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_vector() const { return cols_ == 1; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool AllFinite() const;
  // Throws NonFiniteError mentioning `what` if any entry is NaN or infinite.
  void CheckFinite(std::string_view what) const;

  std::string ShapeString() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Numerically stable softmax over a vector.
std::vector<double> Softmax(std::span<const double> logits);

}  // namespace affect::ad

#endif  // AFFECT_TENSOR_H_
