#pragma once

#include <cstdint>

#include "sparsemine/types.hpp"

namespace sparsemine {

/// M x K matrix of unit l2-norm atoms.
///
/// Every column has norm 1 within 1e-10 and no entry is NaN or Inf. The
/// invariant is established on construction and maintained by set_atom.
class Dictionary {
 public:
  static constexpr double kNormTolerance = 1e-10;

  Dictionary() = default;

  /// Adopts atoms that must already be unit norm; throws InvalidArgument otherwise.
  explicit Dictionary(Matrix atoms);

  /// Normalizes each column. Zero or non-finite columns are rejected.
  static Dictionary from_columns(Matrix columns);

  const Matrix& atoms() const noexcept { return atoms_; }
  Index signal_dim() const noexcept { return atoms_.rows(); }
  Index atom_count() const noexcept { return atoms_.cols(); }
  bool empty() const noexcept { return atoms_.size() == 0; }

  auto atom(Index k) const { return atoms_.col(k); }

  /// Replaces atom k with v / ||v||.
  void set_atom(Index k, const Vector& v);

  /// D^T D.
  Matrix gram() const { return atoms_.transpose() * atoms_; }

  /// 64-bit FNV-1a over the dimensions and the raw atom bytes.
  std::uint64_t fingerprint() const;

 private:
  Matrix atoms_;
};

/// True when every column of m has unit norm within tol and m is finite.
bool has_unit_columns(const Matrix& m, double tol = Dictionary::kNormTolerance);

}  // namespace sparsemine
