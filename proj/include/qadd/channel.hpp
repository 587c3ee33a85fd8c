#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qadd/cmatrix.hpp"

namespace qadd {

/// Tags for channel families with known analytic structure; optimizers use
/// them to pick closed-form input restrictions.
enum class Family {
    Generic,
    AmplitudeDamping,
    Platypus,
    Erasure,
    FlaggedAD,
    Dephasing,
    Gao,
    Mad,
};

struct Isometry {
    CMatrix v;  // shape (dB*dE) x dA, output basis |b>|e> at row b*dE + e
    std::size_t dA, dB, dE;

    Isometry() = default;
    Isometry(CMatrix m, std::size_t da, std::size_t db, std::size_t de);
    double isometry_defect() const;  // max entry of V^dag V - I
};

/// CPTP map held as a Stinespring isometry. Kraus operators, the Choi
/// operator and the transfer matrix are derived eagerly at construction, so
/// a built Channel is immutable and concurrency-safe.
class Channel {
public:
    static Channel from_isometry(const Isometry& v);
    static Channel from_kraus(const std::vector<CMatrix>& ks);
    /// Skips the trace-preservation check; for subnormalized pieces such as
    /// switch-channel blocks and recovery maps defined only on a support.
    static Channel from_kraus_unchecked(const std::vector<CMatrix>& ks);

    std::size_t in_dim() const { return dA_; }
    std::size_t out_dim() const { return dB_; }
    std::size_t env_dim() const { return dE_; }

    const std::vector<CMatrix>& kraus() const { return kraus_; }
    const Isometry& isometry() const { return *iso_; }

    /// The channel to the environment of the same isometry.
    Channel complement() const;

    CMatrix apply(const CMatrix& rho) const;
    const CMatrix& choi() const { return choi_; }
    const CMatrix& transfer() const { return transfer_; }

    double tp_defect() const;  // max entry of sum A_k^dag A_k - I

    Family family = Family::Generic;
    std::vector<double> family_params;

private:
    Channel() = default;
    std::size_t dA_ = 0, dB_ = 0, dE_ = 0;
    std::shared_ptr<const Isometry> iso_;
    std::vector<CMatrix> kraus_;
    CMatrix choi_, transfer_;
};

/// Linear map on operators that need not be CP or TP (inverses and other
/// formal compositions). Held as the transfer matrix acting on column-major
/// vectorizations.
struct SuperOperator {
    CMatrix transfer;  // (dout^2) x (din^2)
    std::size_t din, dout;

    static SuperOperator from_channel(const Channel& n);
    static SuperOperator from_kraus(const std::vector<CMatrix>& ks, std::size_t din,
                                    std::size_t dout);
    CMatrix apply(const CMatrix& rho) const;
    CMatrix choi() const;
};

SuperOperator so_compose(const SuperOperator& n2, const SuperOperator& n1);

std::pair<Channel, Channel> channel_from_isometry(const Isometry& v);

CMatrix choi_of(const Channel& n);
CMatrix transfer_of(const Channel& n);

/// Index shuffle relating a Choi operator on A(x)B to the transfer matrix
/// (and back). Pure entry permutation, exact.
CMatrix choi_to_transfer(const CMatrix& j, std::size_t dA, std::size_t dB);
CMatrix transfer_to_choi(const CMatrix& t, std::size_t dA, std::size_t dB);

Channel compose(const Channel& n2, const Channel& n1);
Channel tensor(const Channel& n1, const Channel& n2);

/// Choi-level composition: Tr_B[(I_A (x) J2)(J1^{T_B} (x) I_C)] for
/// J1 on A(x)B and J2 on B(x)C.
CMatrix link_product_compose(const CMatrix& j2, const CMatrix& j1, std::size_t dA,
                             std::size_t dB, std::size_t dC);

Channel direct_sum(const std::vector<Channel>& blocks);

/// Flagged mixture: rho -> sum_i p_i |i><i|_F (x) N_i(rho). The environment
/// carries its own copy of the flag, so the complement is the flagged mixture
/// of the complements.
Channel flagged(const std::vector<double>& ps, const std::vector<Channel>& channels);

/// S_ij(rho) = <j|rho|j> |i><i| on the flag register; subnormalized block.
Channel switch_channel(std::size_t i, std::size_t j, std::size_t d_f);

/// Petz transpose of `a` with respect to sigma; trace-preserving on the
/// support of a(sigma).
Channel petz_recovery(const Channel& a, const CMatrix& sigma);

CMatrix vec_col(const CMatrix& rho);
CMatrix unvec_col(const CMatrix& v, std::size_t rows, std::size_t cols);

Channel read_channel_file(const std::string& path);
void write_channel_file(const std::string& path, const Channel& n);

}  // namespace qadd
