#pragma once

#include "qadd/channel.hpp"
#include "qadd/cmatrix.hpp"
#include "qadd/rng.hpp"

namespace qadd {

inline CMatrix random_complex_matrix(CounterRng& rng, std::size_t r, std::size_t c) {
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = cplx(rng.next_gaussian(), rng.next_gaussian());
    return m;
}

/// Columns of a Gaussian matrix, Gram-Schmidt orthonormalized. Requires
/// rows >= cols; retries are deterministic in the stream.
inline CMatrix random_isometry_matrix(CounterRng& rng, std::size_t rows, std::size_t cols) {
    while (true) {
        CMatrix g = random_complex_matrix(rng, rows, cols);
        bool ok = true;
        for (std::size_t c = 0; c < cols && ok; ++c) {
            for (std::size_t p = 0; p < c; ++p) {
                cplx ip = 0.0;
                for (std::size_t r = 0; r < rows; ++r) ip += std::conj(g(r, p)) * g(r, c);
                for (std::size_t r = 0; r < rows; ++r) g(r, c) -= ip * g(r, p);
            }
            double n2 = 0.0;
            for (std::size_t r = 0; r < rows; ++r) n2 += std::norm(g(r, c));
            if (n2 < 1e-12) {
                ok = false;
                break;
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t r = 0; r < rows; ++r) g(r, c) *= inv;
        }
        if (ok) return g;
    }
}

inline CMatrix random_unitary(CounterRng& rng, std::size_t d) {
    return random_isometry_matrix(rng, d, d);
}

/// Hilbert-Schmidt-flavored random state: GG^dag normalized, with G of shape
/// d x rank.
inline CMatrix random_density(CounterRng& rng, std::size_t d, std::size_t rank = 0) {
    if (rank == 0) rank = d;
    const CMatrix g = random_complex_matrix(rng, d, rank);
    CMatrix rho = g * g.dagger();
    rho = rho.symmetrized();
    rho *= cplx(1.0 / rho.trace().real(), 0.0);
    return rho;
}

/// Normalized Gaussian pure state as a column vector.
inline CMatrix random_pure_vector(CounterRng& rng, std::size_t d) {
    return random_isometry_matrix(rng, d, 1);
}

inline Channel random_channel(CounterRng& rng, std::size_t dA, std::size_t dB, std::size_t dE) {
    return Channel::from_isometry(
        Isometry(random_isometry_matrix(rng, dB * dE, dA), dA, dB, dE));
}

}  // namespace qadd
