#include "seqmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqmc {

int& max_dimension() {
    static int cap = 16;
    return cap;
}

namespace {

void check_dim(int dim) {
    if (dim < 1) throw DimensionMismatch("matrix dimension must be positive");
    if (dim > max_dimension())
        throw DimensionMismatch("dimension " + std::to_string(dim) + " exceeds cap " +
                                std::to_string(max_dimension()));
}

// Fix the global phase so the first amplitude with |a| > threshold is real
// positive.  Used to make eigenvector output deterministic.
void phase_fix(Cvec& v) {
    for (const Complex& a : v) {
        double m = std::abs(a);
        if (m > 1e-12) {
            Complex rot = std::conj(a) / m;
            for (Complex& b : v) b *= rot;
            return;
        }
    }
}

bool lex_less(const Cvec& a, const Cvec& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
    check_dim(dim);
    entries_.assign(static_cast<size_t>(dim) * dim, Complex(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_entries(int dim, Cvec row_major) {
    check_dim(dim);
    if (row_major.size() != static_cast<size_t>(dim) * dim)
        throw DimensionMismatch("entry count does not match dimension");
    ComplexMatrix m(dim);
    m.entries_ = std::move(row_major);
    if (!m.all_finite()) throw ParamOutOfRange("matrix entries must be finite");
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(dim_);
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) m.at(c, r) = std::conj(at(r, c));
    return m;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (o.dim_ != dim_) throw DimensionMismatch("matrix addition dimension mismatch");
    for (size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (o.dim_ != dim_) throw DimensionMismatch("matrix subtraction dimension mismatch");
    for (size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (Complex& e : entries_) e *= s;
    return *this;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& e : entries_) m = std::max(m, std::abs(e));
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& e : entries_) s += std::norm(e);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
    double m = 0.0;
    for (int r = 0; r < dim_; ++r)
        for (int c = r; c < dim_; ++c)
            m = std::max(m, std::abs(at(r, c) - std::conj(at(c, r))));
    return m;
}

bool ComplexMatrix::is_hermitian(double tolerance) const {
    return hermiticity_defect() <= tolerance;
}

bool ComplexMatrix::is_psd(double tolerance) const {
    if (!is_hermitian(std::max(tolerance, tol::hermiticity_error))) return false;
    HermitianSpectrum s = eig_hermitian(*this);
    return s.eigenvalues.back() >= -tolerance;
}

bool ComplexMatrix::is_unitary(double tolerance) const {
    return max_abs_diff(adjoint() * (*this), identity(dim_)) <= tolerance;
}

bool ComplexMatrix::all_finite() const {
    for (const Complex& e : entries_)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix product dimension mismatch");
    const int d = a.dim();
    ComplexMatrix out(d);
    for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) {
            Complex ark = a.at(r, k);
            if (ark == Complex(0.0, 0.0)) continue;
            for (int c = 0; c < d; ++c) out.at(r, c) += ark * b.at(k, c);
        }
    return out;
}

ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

Cvec matvec(const ComplexMatrix& a, const Cvec& v) {
    if (v.size() != static_cast<size_t>(a.dim()))
        throw DimensionMismatch("matvec dimension mismatch");
    Cvec out(v.size(), Complex(0.0, 0.0));
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) out[r] += a.at(r, c) * v[c];
    return out;
}

Complex inner(const Cvec& a, const Cvec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("inner product dimension mismatch");
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const Cvec& v) {
    double s = 0.0;
    for (const Complex& a : v) s += std::norm(a);
    return std::sqrt(s);
}

ComplexMatrix outer(const Cvec& a, const Cvec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("outer product dimension mismatch");
    ComplexMatrix m(static_cast<int>(a.size()));
    for (size_t r = 0; r < a.size(); ++r)
        for (size_t c = 0; c < b.size(); ++c) m.at(static_cast<int>(r), static_cast<int>(c)) = a[r] * std::conj(b[c]);
    return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("comparison dimension mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.entries().size(); ++i)
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

Cvec HermitianSpectrum::eigenvector(int i) const {
    Cvec v(eigenvalues.size());
    for (int r = 0; r < eigenvectors.dim(); ++r) v[r] = eigenvectors.at(r, i);
    return v;
}

ComplexMatrix HermitianSpectrum::reconstruct() const {
    const int d = eigenvectors.dim();
    ComplexMatrix out(d);
    for (int i = 0; i < d; ++i) {
        Cvec v = eigenvector(i);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out.at(r, c) += eigenvalues[i] * v[r] * std::conj(v[c]);
    }
    return out;
}

HermitianSpectrum eig_hermitian(const ComplexMatrix& h) {
    if (h.hermiticity_defect() > tol::hermiticity_error)
        throw NotHermitian("asymmetry " + std::to_string(h.hermiticity_defect()) +
                           " exceeds 1e-6");
    const int d = h.dim();

    // Work on the symmetrized copy.
    ComplexMatrix a(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a.at(r, c) = 0.5 * (h.at(r, c) + std::conj(h.at(c, r)));

    ComplexMatrix vecs = ComplexMatrix::identity(d);
    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double stop = 1e-14 * scale;

    // Cyclic sweeps of complex Jacobi rotations.  Each pivot (p,q) is
    // reduced to a real 2x2 rotation after absorbing the phase of a_pq.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off = std::max(off, std::abs(a.at(p, q)));
        if (off <= stop) break;

        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const Complex apq = a.at(p, q);
                const double beta = std::abs(apq);
                if (beta <= stop) continue;

                const Complex omega = apq / beta;  // apq = beta * omega
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                const double tau = (aqq - app) / (2.0 * beta);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Plane rotation V: V_pp=c, V_pq=s, V_qp=-conj(omega) s,
                // V_qq=conj(omega) c.  Apply A <- V^dagger A V.
                const Complex womega = std::conj(omega);
                for (int r = 0; r < d; ++r) {
                    const Complex arp = a.at(r, p);
                    const Complex arq = a.at(r, q);
                    a.at(r, p) = arp * c - arq * womega * s;
                    a.at(r, q) = arp * s + arq * womega * c;
                }
                for (int r = 0; r < d; ++r) {
                    const Complex apr = a.at(p, r);
                    const Complex aqr = a.at(q, r);
                    a.at(p, r) = c * apr - omega * s * aqr;
                    a.at(q, r) = s * apr + omega * c * aqr;
                }
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                a.at(p, p) = Complex(a.at(p, p).real(), 0.0);
                a.at(q, q) = Complex(a.at(q, q).real(), 0.0);

                for (int r = 0; r < d; ++r) {
                    const Complex erp = vecs.at(r, p);
                    const Complex erq = vecs.at(r, q);
                    vecs.at(r, p) = erp * c - erq * womega * s;
                    vecs.at(r, q) = erp * s + erq * womega * c;
                }
            }
        }
    }

    std::vector<double> vals(d);
    std::vector<Cvec> cols(d);
    for (int i = 0; i < d; ++i) {
        vals[i] = a.at(i, i).real();
        Cvec v(d);
        for (int r = 0; r < d; ++r) v[r] = vecs.at(r, i);
        phase_fix(v);
        cols[i] = std::move(v);
    }

    // Descending eigenvalues; ties broken lexicographically on the
    // phase-fixed eigenvectors so output is reproducible.
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * std::max(1.0, std::abs(*std::max_element(
                                                 vals.begin(), vals.end(),
                                                 [](double x, double y) {
                                                     return std::abs(x) < std::abs(y);
                                                 })));
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (std::abs(vals[i] - vals[j]) > tie) return vals[i] > vals[j];
        return lex_less(cols[i], cols[j]);
    });

    HermitianSpectrum spec{std::vector<double>(d), ComplexMatrix(d)};
    for (int i = 0; i < d; ++i) {
        spec.eigenvalues[i] = vals[order[i]];
        for (int r = 0; r < d; ++r) spec.eigenvectors.at(r, i) = cols[order[i]][r];
    }
    return spec;
}

double trace_norm(const ComplexMatrix& a) {
    HermitianSpectrum s = eig_hermitian(a);
    double t = 0.0;
    for (double v : s.eigenvalues) t += std::abs(v);
    return t;
}

ComplexMatrix gram_matrix(std::span<const Cvec> vectors, std::span<const double> weights) {
    if (vectors.empty()) throw ParamOutOfRange("gram_matrix needs at least one vector");
    if (vectors.size() != weights.size())
        throw DimensionMismatch("vector/weight count mismatch");
    const size_t dim = vectors[0].size();
    for (const Cvec& v : vectors)
        if (v.size() != dim) throw DimensionMismatch("gram_matrix vectors of unequal dimension");
    for (double w : weights)
        if (!std::isfinite(w) || w < 0.0)
            throw ParamOutOfRange("gram_matrix weights must be finite and nonnegative");

    const int n = static_cast<int>(vectors.size());
    ComplexMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.at(i, j) = std::sqrt(weights[i] * weights[j]) * inner(vectors[i], vectors[j]);
    return g;
}

WeightedVectors ensemble_from_gram(const ComplexMatrix& g) {
    if (g.hermiticity_defect() > tol::structural)
        throw NotHermitian("Gram matrix is not Hermitian");
    HermitianSpectrum s = eig_hermitian(g);
    if (s.eigenvalues.back() < -tol::decision)
        throw NotPsd("Gram matrix has min eigenvalue " + std::to_string(s.eigenvalues.back()));

    const int n = g.dim();
    const double lmax = std::max(s.eigenvalues.front(), 0.0);
    const double cut = tol::decision * std::max(lmax, 1e-300);
    int rank = 0;
    while (rank < n && s.eigenvalues[rank] > cut) ++rank;
    rank = std::max(rank, 1);

    // Columns of D V^dagger reproduce G as their Gram matrix.
    WeightedVectors out;
    out.vectors.resize(n);
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        Cvec b(rank, Complex(0.0, 0.0));
        for (int r = 0; r < rank; ++r)
            b[r] = std::sqrt(std::max(s.eigenvalues[r], 0.0)) * std::conj(s.eigenvectors.at(i, r));
        double len = norm(b);
        out.weights[i] = len * len;
        if (len > 1e-150) {
            for (Complex& e : b) e /= len;
        } else {
            b.assign(rank, Complex(0.0, 0.0));
            b[0] = 1.0;
            out.weights[i] = 0.0;
        }
        out.vectors[i] = std::move(b);
    }
    return out;
}

int numerical_rank(std::span<const Cvec> vectors, double tolerance) {
    if (vectors.empty()) throw ParamOutOfRange("numerical_rank needs a nonempty list");
    std::vector<double> unit(vectors.size(), 1.0);
    ComplexMatrix g = gram_matrix(vectors, unit);
    HermitianSpectrum s = eig_hermitian(g);
    const double lmax = std::max(s.eigenvalues.front(), 0.0);
    if (lmax <= 0.0) return 0;
    // sigma_i > tol * sigma_max  <=>  lambda_i > tol^2 * lambda_max
    const double cut = tolerance * tolerance * lmax;
    int rank = 0;
    for (double v : s.eigenvalues)
        if (v > cut) ++rank;
    return rank;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a) {
    HermitianSpectrum s = eig_hermitian(a);
    if (s.eigenvalues.back() < -tol::decision)
        throw NotPsd("matrix_sqrt_psd on a matrix with min eigenvalue " +
                     std::to_string(s.eigenvalues.back()));
    const int d = a.dim();
    ComplexMatrix out(d);
    for (int i = 0; i < d; ++i) {
        double s2 = std::sqrt(std::max(s.eigenvalues[i], 0.0));
        if (s2 == 0.0) continue;
        Cvec v = s.eigenvector(i);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out.at(r, c) += s2 * v[r] * std::conj(v[c]);
    }
    return out;
}

}  // namespace seqmc
