#pragma once

#include <complex>
#include <span>
#include <vector>

#include "seqmc/errors.hpp"

namespace seqmc {

using Complex = std::complex<double>;
using Cvec = std::vector<Complex>;

// Tolerance policy, stated once and reused everywhere:
// structural identities are checked at 1e-9, decision thresholds (rank,
// PSD feasibility) at 1e-8, support projection at 1e-10.  A hermiticity
// defect above 1e-6 is treated as a caller error rather than noise.
namespace tol {
inline constexpr double structural = 1e-9;
inline constexpr double decision = 1e-8;
inline constexpr double support = 1e-10;
inline constexpr double hermiticity_error = 1e-6;
}  // namespace tol

// Dimension cap for the dense routines.  The target regime is qubits and
// small multi-outcome systems; the cap keeps the O(d^3) methods safe.
int& max_dimension();  // mutable, defaults to 16

// Dense square complex matrix, row-major storage.
class ComplexMatrix {
  public:
    explicit ComplexMatrix(int dim);
    static ComplexMatrix identity(int dim);
    static ComplexMatrix from_entries(int dim, Cvec row_major);

    int dim() const { return dim_; }
    Complex& at(int r, int c) { return entries_[static_cast<size_t>(r) * dim_ + c]; }
    const Complex& at(int r, int c) const { return entries_[static_cast<size_t>(r) * dim_ + c]; }
    const Cvec& entries() const { return entries_; }

    ComplexMatrix adjoint() const;
    Complex trace() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    double max_abs() const;
    double frobenius_norm() const;
    // max-abs entry of A - A^dagger
    double hermiticity_defect() const;

    bool is_hermitian(double tolerance = tol::structural) const;
    bool is_psd(double tolerance = tol::structural) const;
    bool is_unitary(double tolerance = tol::structural) const;

    bool all_finite() const;

  private:
    int dim_;
    Cvec entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

Cvec matvec(const ComplexMatrix& a, const Cvec& v);
Complex inner(const Cvec& a, const Cvec& b);  // <a|b>, conjugate-linear in a
double norm(const Cvec& v);
ComplexMatrix outer(const Cvec& a, const Cvec& b);  // |a><b|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Eigendecomposition of a Hermitian matrix.  Eigenvalues descending,
// eigenvectors as matching orthonormal columns.
struct HermitianSpectrum {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    Cvec eigenvector(int i) const;
    ComplexMatrix reconstruct() const;  // sum_i lambda_i v_i v_i^dagger
};

// Cyclic Jacobi on (H + H^dagger)/2.  Throws NotHermitian if the input's
// asymmetry exceeds tol::hermiticity_error.  Degenerate eigenvalues are
// ordered deterministically (lexicographic on the phase-fixed vectors),
// so identical inputs give identical outputs.
HermitianSpectrum eig_hermitian(const ComplexMatrix& h);

// Sum of absolute eigenvalues.  Hermitian arguments only.
double trace_norm(const ComplexMatrix& a);

// Entry (i,j) = sqrt(w_i w_j) <v_i|v_j>.
ComplexMatrix gram_matrix(std::span<const Cvec> vectors, std::span<const double> weights);

struct WeightedVectors {
    std::vector<Cvec> vectors;  // unit norm, dimension rank(G)
    std::vector<double> weights;
};

// Factor a PSD Gram matrix G = V D^2 V^dagger into weighted unit vectors
// whose gram_matrix reproduces G.  Vectors live in dimension rank(G).
WeightedVectors ensemble_from_gram(const ComplexMatrix& g);

// Count of singular values of the stacked-vector matrix above
// tolerance * (largest singular value).
int numerical_rank(std::span<const Cvec> vectors, double tolerance = tol::decision);

// Principal square root of a PSD matrix (small negative eigenvalues are
// clamped to zero).
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a);

}  // namespace seqmc
