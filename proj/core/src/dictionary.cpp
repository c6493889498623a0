#include "sparsemine/dictionary.hpp"

#include <array>
#include <cstring>
#include <span>
#include <string>

#include "sparsemine/errors.hpp"
#include "sparsemine/hash.hpp"

namespace sparsemine {

bool has_unit_columns(const Matrix& m, double tol) {
  if (!m.allFinite()) return false;
  for (Index k = 0; k < m.cols(); ++k) {
    if (std::abs(m.col(k).norm() - 1.0) > tol) return false;
  }
  return true;
}

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (!has_unit_columns(atoms_)) {
    throw InvalidArgument("dictionary atoms must be finite with unit l2 norm");
  }
}

Dictionary Dictionary::from_columns(Matrix columns) {
  for (Index k = 0; k < columns.cols(); ++k) {
    const double n = columns.col(k).norm();
    if (!std::isfinite(n) || n == 0.0) {
      throw InvalidArgument("cannot normalize column " + std::to_string(k));
    }
    columns.col(k) /= n;
  }
  return Dictionary(std::move(columns));
}

void Dictionary::set_atom(Index k, const Vector& v) {
  if (k < 0 || k >= atom_count() || v.size() != signal_dim()) {
    throw InvalidArgument("set_atom: index or length out of range");
  }
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) throw InvalidArgument("set_atom: zero or non-finite atom");
  atoms_.col(k) = v / n;
}

std::uint64_t Dictionary::fingerprint() const {
  const std::array<std::uint64_t, 2> dims{static_cast<std::uint64_t>(atoms_.rows()),
                                          static_cast<std::uint64_t>(atoms_.cols())};
  std::uint64_t h = fnv1a64(std::as_bytes(std::span(dims)));
  return fnv1a64(std::as_bytes(std::span(atoms_.data(), static_cast<std::size_t>(atoms_.size()))), h);
}

}  // namespace sparsemine
