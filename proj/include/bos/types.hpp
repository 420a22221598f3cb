#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bos {

using cplx = std::complex<double>;

/// Thrown when a numerical procedure fails to converge or breaks down.
/// `index` identifies the offending eigenvalue/row/entry where applicable
/// (-1 when there is no meaningful index).
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, long index = -1)
      : std::runtime_error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace bos
