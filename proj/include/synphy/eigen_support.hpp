#pragma once

#include <Eigen/Core>

#include "synphy/rational.hpp"

namespace Eigen {

// Rational as an Eigen scalar: exact, no epsilon, expensive ops.
template <>
struct NumTraits<synphy::Rational> : GenericNumTraits<synphy::Rational> {
  using Real = synphy::Rational;
  using NonInteger = synphy::Rational;
  using Nested = synphy::Rational;
  using Literal = long long;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<double>::ReadCost,
    AddCost = 100,
    MulCost = 100,
  };

  static inline Real epsilon() { return synphy::Rational(0); }
  static inline Real dummy_precision() { return synphy::Rational(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace synphy {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// Determinant of the 3x3 submatrix of `m` picked by rows r and columns c,
/// by direct cofactor expansion. Works for any scalar with ring operations.
template <class Derived>
typename Derived::Scalar det3(const Eigen::MatrixBase<Derived>& m,
                              Eigen::Index r0, Eigen::Index r1, Eigen::Index r2,
                              Eigen::Index c0, Eigen::Index c1, Eigen::Index c2) {
  return m(r0, c0) * (m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1)) -
         m(r0, c1) * (m(r1, c0) * m(r2, c2) - m(r1, c2) * m(r2, c0)) +
         m(r0, c2) * (m(r1, c0) * m(r2, c1) - m(r1, c1) * m(r2, c0));
}

}  // namespace synphy
