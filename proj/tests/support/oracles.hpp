#pragma once

// Independent reference implementations used only by tests. None of them
// call into the library's solvers.

#include <cstdint>
#include <random>
#include <vector>

#include "sparsemine/types.hpp"

namespace sparsemine::testing {

Matrix random_unit_dictionary(Index rows, Index atoms, std::mt19937_64& rng);

/// Signals Y = D X with `sparsity` Gaussian coefficients per column on
/// uniformly drawn distinct supports.
struct SparseInstance {
  Matrix dictionary;
  Matrix codes;
  Matrix signals;
};
SparseInstance sparse_instance(Index rows, Index atoms, Index signals, Index sparsity, std::uint64_t seed);

/// Plain OMP: explicit residual, full least squares refit by SVD each step.
Vector naive_omp(const Vector& y, const Matrix& atoms, Index sparsity);

double lasso_objective(const Vector& y, const Matrix& atoms, const Vector& x, double lambda);

/// Projected gradient on the split x = u - v, u, v >= 0.
Vector lasso_projected_gradient(const Vector& y, const Matrix& atoms, double lambda, Index max_iterations);

/// argmin_D ||(Y - D X) W^{1/2}||_F via a complete orthogonal decomposition.
Matrix wls_pseudoinverse(const Matrix& target, const Matrix& codes, const Vector& weights);

double weighted_error(const Matrix& target, const Matrix& atoms, const Matrix& codes, const Vector& weights);

/// Greedy one-to-one matching by |<d, d_true>|; fraction of true atoms
/// matched above `threshold`.
double recovery_rate(const Matrix& learned, const Matrix& truth, double threshold);

/// Sup |F - G| evaluated by counting at every sample point.
double ks_by_counting(const std::vector<double>& a, const std::vector<double>& b);

/// Max over every lag of the normalized absolute cross-correlation.
double similarity_by_lags(const Vector& y, const Vector& y_hat);

}  // namespace sparsemine::testing
