#include "qadd/channel.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qadd/eig.hpp"

namespace qadd {

Isometry::Isometry(CMatrix m, std::size_t da, std::size_t db, std::size_t de)
    : v(std::move(m)), dA(da), dB(db), dE(de) {
    if (v.rows() != dB * dE || v.cols() != dA)
        throw std::invalid_argument("Isometry: shape does not match dims");
    if (isometry_defect() > 1e-8)
        throw std::invalid_argument("Isometry: V^dag V deviates from identity");
}

double Isometry::isometry_defect() const {
    return (v.dagger() * v - CMatrix::identity(dA)).max_abs();
}

namespace {

std::vector<CMatrix> kraus_from_isometry(const Isometry& iso) {
    std::vector<CMatrix> ks(iso.dE, CMatrix(iso.dB, iso.dA));
    for (std::size_t e = 0; e < iso.dE; ++e)
        for (std::size_t b = 0; b < iso.dB; ++b)
            for (std::size_t a = 0; a < iso.dA; ++a)
                ks[e](b, a) = iso.v(b * iso.dE + e, a);
    return ks;
}

CMatrix choi_from_kraus(const std::vector<CMatrix>& ks) {
    const std::size_t dB = ks.front().rows(), dA = ks.front().cols();
    CMatrix j(dA * dB, dA * dB);
    for (const auto& k : ks)
        for (std::size_t i = 0; i < dA; ++i)
            for (std::size_t v = 0; v < dB; ++v) {
                const cplx kvi = k(v, i);
                if (kvi == cplx(0.0, 0.0)) continue;
                for (std::size_t jj = 0; jj < dA; ++jj)
                    for (std::size_t u = 0; u < dB; ++u)
                        j(i * dB + v, jj * dB + u) += kvi * std::conj(k(u, jj));
            }
    return j;
}

CMatrix transfer_from_kraus(const std::vector<CMatrix>& ks) {
    const std::size_t dB = ks.front().rows(), dA = ks.front().cols();
    CMatrix t(dB * dB, dA * dA);
    for (const auto& k : ks) t += kron(k.conj(), k);
    return t;
}

}  // namespace

Channel Channel::from_isometry(const Isometry& v) {
    Channel n;
    n.dA_ = v.dA;
    n.dB_ = v.dB;
    n.dE_ = v.dE;
    n.iso_ = std::make_shared<Isometry>(v);
    n.kraus_ = kraus_from_isometry(v);
    n.choi_ = choi_from_kraus(n.kraus_);
    n.transfer_ = transfer_from_kraus(n.kraus_);
    return n;
}

Channel Channel::from_kraus(const std::vector<CMatrix>& ks) {
    Channel n = from_kraus_unchecked(ks);
    if (n.tp_defect() > 1e-9)
        throw std::invalid_argument("Channel: Kraus set is not trace-preserving");
    return n;
}

Channel Channel::from_kraus_unchecked(const std::vector<CMatrix>& ks) {
    if (ks.empty()) throw std::invalid_argument("Channel: empty Kraus set");
    const std::size_t dB = ks.front().rows(), dA = ks.front().cols();
    // stack the Kraus operators into a Stinespring map with dE = #Kraus
    CMatrix v(dB * ks.size(), dA);
    for (std::size_t e = 0; e < ks.size(); ++e) {
        if (ks[e].rows() != dB || ks[e].cols() != dA)
            throw std::invalid_argument("Channel: inconsistent Kraus shapes");
        for (std::size_t b = 0; b < dB; ++b)
            for (std::size_t a = 0; a < dA; ++a) v(b * ks.size() + e, a) = ks[e](b, a);
    }
    Channel n;
    n.dA_ = dA;
    n.dB_ = dB;
    n.dE_ = ks.size();
    auto iso = std::shared_ptr<Isometry>(new Isometry{});
    // bypass the isometry validity check for subnormalized pieces
    iso->v = std::move(v);
    iso->dA = dA;
    iso->dB = dB;
    iso->dE = ks.size();
    n.iso_ = iso;
    n.kraus_ = ks;
    n.choi_ = choi_from_kraus(ks);
    n.transfer_ = transfer_from_kraus(ks);
    return n;
}

Channel Channel::complement() const {
    const Isometry& v = *iso_;
    CMatrix vc(dE_ * dB_, dA_);
    for (std::size_t b = 0; b < dB_; ++b)
        for (std::size_t e = 0; e < dE_; ++e)
            for (std::size_t a = 0; a < dA_; ++a)
                vc(e * dB_ + b, a) = v.v(b * dE_ + e, a);
    Channel n;
    n.dA_ = dA_;
    n.dB_ = dE_;
    n.dE_ = dB_;
    auto iso = std::shared_ptr<Isometry>(new Isometry{});
    iso->v = std::move(vc);
    iso->dA = dA_;
    iso->dB = dE_;
    iso->dE = dB_;
    n.iso_ = iso;
    n.kraus_ = kraus_from_isometry(*iso);
    n.choi_ = choi_from_kraus(n.kraus_);
    n.transfer_ = transfer_from_kraus(n.kraus_);
    return n;
}

CMatrix Channel::apply(const CMatrix& rho) const {
    if (rho.rows() != dA_ || rho.cols() != dA_)
        throw std::invalid_argument("Channel::apply: dimension mismatch");
    CMatrix out(dB_, dB_);
    for (const auto& k : kraus_) out += k * rho * k.dagger();
    return out;
}

double Channel::tp_defect() const {
    CMatrix s(dA_, dA_);
    for (const auto& k : kraus_) s += k.dagger() * k;
    return (s - CMatrix::identity(dA_)).max_abs();
}

SuperOperator SuperOperator::from_channel(const Channel& n) {
    return {n.transfer(), n.in_dim(), n.out_dim()};
}

SuperOperator SuperOperator::from_kraus(const std::vector<CMatrix>& ks, std::size_t din,
                                        std::size_t dout) {
    CMatrix t(dout * dout, din * din);
    for (const auto& k : ks) t += kron(k.conj(), k);
    return {t, din, dout};
}

CMatrix SuperOperator::apply(const CMatrix& rho) const {
    return unvec_col(transfer * vec_col(rho), dout, dout);
}

CMatrix SuperOperator::choi() const { return transfer_to_choi(transfer, din, dout); }

SuperOperator so_compose(const SuperOperator& n2, const SuperOperator& n1) {
    if (n2.din != n1.dout) throw std::invalid_argument("so_compose: dims do not chain");
    return {n2.transfer * n1.transfer, n1.din, n2.dout};
}

std::pair<Channel, Channel> channel_from_isometry(const Isometry& v) {
    Channel n = Channel::from_isometry(v);
    return {n, n.complement()};
}

CMatrix choi_of(const Channel& n) { return n.choi(); }
CMatrix transfer_of(const Channel& n) { return n.transfer(); }

CMatrix choi_to_transfer(const CMatrix& j, std::size_t dA, std::size_t dB) {
    if (j.rows() != dA * dB || j.cols() != dA * dB)
        throw std::invalid_argument("choi_to_transfer: shape mismatch");
    CMatrix t(dB * dB, dA * dA);
    for (std::size_t r = 0; r < dB; ++r)
        for (std::size_t v = 0; v < dB; ++v)
            for (std::size_t i = 0; i < dA; ++i)
                for (std::size_t jj = 0; jj < dA; ++jj)
                    t(r * dB + v, i * dA + jj) = j(jj * dB + v, i * dB + r);
    return t;
}

CMatrix transfer_to_choi(const CMatrix& t, std::size_t dA, std::size_t dB) {
    if (t.rows() != dB * dB || t.cols() != dA * dA)
        throw std::invalid_argument("transfer_to_choi: shape mismatch");
    CMatrix j(dA * dB, dA * dB);
    for (std::size_t p = 0; p < dA; ++p)
        for (std::size_t q = 0; q < dB; ++q)
            for (std::size_t m = 0; m < dA; ++m)
                for (std::size_t n = 0; n < dB; ++n)
                    j(p * dB + q, m * dB + n) = t(n * dB + q, m * dA + p);
    return j;
}

namespace {

// drop Kraus operators that are numerically zero (keeps environments small
// after compositions)
std::vector<CMatrix> prune_kraus(std::vector<CMatrix> ks) {
    std::vector<CMatrix> out;
    for (auto& k : ks)
        if (k.max_abs() > 1e-14) out.push_back(std::move(k));
    if (out.empty()) out.push_back(ks.front());
    return out;
}

}  // namespace

Channel compose(const Channel& n2, const Channel& n1) {
    if (n2.in_dim() != n1.out_dim()) throw std::invalid_argument("compose: dims do not chain");
    std::vector<CMatrix> ks;
    ks.reserve(n2.kraus().size() * n1.kraus().size());
    for (const auto& a : n2.kraus())
        for (const auto& b : n1.kraus()) ks.push_back(a * b);
    return Channel::from_kraus_unchecked(prune_kraus(std::move(ks)));
}

Channel tensor(const Channel& n1, const Channel& n2) {
    const Isometry &v1 = n1.isometry(), &v2 = n2.isometry();
    const std::size_t dA = v1.dA * v2.dA, dB = v1.dB * v2.dB, dE = v1.dE * v2.dE;
    // interleave so outputs group as (B1 B2) and environments as (E1 E2)
    CMatrix v(dB * dE, dA);
    for (std::size_t b1 = 0; b1 < v1.dB; ++b1)
        for (std::size_t e1 = 0; e1 < v1.dE; ++e1)
            for (std::size_t a1 = 0; a1 < v1.dA; ++a1) {
                const cplx x1 = v1.v(b1 * v1.dE + e1, a1);
                if (x1 == cplx(0.0, 0.0)) continue;
                for (std::size_t b2 = 0; b2 < v2.dB; ++b2)
                    for (std::size_t e2 = 0; e2 < v2.dE; ++e2)
                        for (std::size_t a2 = 0; a2 < v2.dA; ++a2) {
                            const cplx x2 = v2.v(b2 * v2.dE + e2, a2);
                            if (x2 == cplx(0.0, 0.0)) continue;
                            const std::size_t b = b1 * v2.dB + b2;
                            const std::size_t e = e1 * v2.dE + e2;
                            v(b * dE + e, a1 * v2.dA + a2) = x1 * x2;
                        }
            }
    return Channel::from_isometry(Isometry(std::move(v), dA, dB, dE));
}

CMatrix link_product_compose(const CMatrix& j2, const CMatrix& j1, std::size_t dA,
                             std::size_t dB, std::size_t dC) {
    if (j1.rows() != dA * dB || j2.rows() != dB * dC)
        throw std::invalid_argument("link_product_compose: shape mismatch");
    const CMatrix lhs = kron(CMatrix::identity(dA), j2);
    const CMatrix rhs = kron(partial_transpose(j1, 2, dA, dB), CMatrix::identity(dC));
    return partial_trace_keep(lhs * rhs, {dA, dB, dC}, {0, 2});
}

Channel direct_sum(const std::vector<Channel>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("direct_sum: empty block list");
    std::size_t dA = 0, dB = 0;
    for (const auto& b : blocks) {
        dA += b.in_dim();
        dB += b.out_dim();
    }
    std::vector<CMatrix> ks;
    std::size_t offA = 0, offB = 0;
    for (const auto& blk : blocks) {
        for (const auto& k : blk.kraus()) {
            CMatrix e(dB, dA);
            for (std::size_t i = 0; i < blk.out_dim(); ++i)
                for (std::size_t j = 0; j < blk.in_dim(); ++j)
                    e(offB + i, offA + j) = k(i, j);
            ks.push_back(std::move(e));
        }
        offA += blk.in_dim();
        offB += blk.out_dim();
    }
    return Channel::from_kraus(ks);
}

Channel flagged(const std::vector<double>& ps, const std::vector<Channel>& channels) {
    if (ps.size() != channels.size() || ps.empty())
        throw std::invalid_argument("flagged: length mismatch");
    double sum = 0.0;
    for (double p : ps) {
        if (p < 0.0) throw std::invalid_argument("flagged: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument("flagged: probabilities do not sum to 1");
    const std::size_t dA = channels.front().in_dim(), dB = channels.front().out_dim();
    std::size_t dEmax = 1;
    for (const auto& n : channels) {
        if (n.in_dim() != dA || n.out_dim() != dB)
            throw std::invalid_argument("flagged: component dims differ");
        dEmax = std::max(dEmax, n.env_dim());
    }
    const std::size_t dF = ps.size();
    // output register F (x) B, environment register F' (x) E
    const std::size_t dBtot = dF * dB, dEtot = dF * dEmax;
    CMatrix v(dBtot * dEtot, dA);
    for (std::size_t f = 0; f < dF; ++f) {
        const Isometry& vi = channels[f].isometry();
        const double w = std::sqrt(ps[f]);
        for (std::size_t b = 0; b < dB; ++b)
            for (std::size_t e = 0; e < vi.dE; ++e)
                for (std::size_t a = 0; a < dA; ++a) {
                    const std::size_t row = (f * dB + b) * dEtot + (f * dEmax + e);
                    v(row, a) = w * vi.v(b * vi.dE + e, a);
                }
    }
    return Channel::from_isometry(Isometry(std::move(v), dA, dBtot, dEtot));
}

Channel switch_channel(std::size_t i, std::size_t j, std::size_t d_f) {
    return Channel::from_kraus_unchecked({CMatrix::unit(d_f, i, j)});
}

Channel petz_recovery(const Channel& a, const CMatrix& sigma) {
    if (sigma.rows() != a.in_dim())
        throw std::invalid_argument("petz_recovery: sigma dimension mismatch");
    if (sigma.hermiticity_defect() > 1e-10 || std::abs(sigma.trace().real() - 1.0) > 1e-10)
        throw std::invalid_argument("petz_recovery: sigma is not a state");
    if (!psd_check(sigma.symmetrized(), 1e-10).psd)
        throw std::invalid_argument("petz_recovery: sigma is not a state");
    const CMatrix sig_half = matrix_fn(sigma.symmetrized(), MatFn::Sqrt);
    const CMatrix asig = a.apply(sigma).symmetrized();
    const CMatrix asig_invhalf = matrix_fn(asig, MatFn::InvSqrt);
    std::vector<CMatrix> ks;
    for (const auto& k : a.kraus()) ks.push_back(sig_half * k.dagger() * asig_invhalf);
    return Channel::from_kraus_unchecked(prune_kraus(std::move(ks)));
}

CMatrix vec_col(const CMatrix& rho) {
    CMatrix v(rho.rows() * rho.cols(), 1);
    for (std::size_t j = 0; j < rho.cols(); ++j)
        for (std::size_t i = 0; i < rho.rows(); ++i) v(j * rho.rows() + i, 0) = rho(i, j);
    return v;
}

CMatrix unvec_col(const CMatrix& v, std::size_t rows, std::size_t cols) {
    if (v.rows() != rows * cols || v.cols() != 1)
        throw std::invalid_argument("unvec_col: shape mismatch");
    CMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = v(j * rows + i, 0);
    return m;
}

Channel read_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel file: " + path);
    nlohmann::json j;
    in >> j;
    const std::string kind = j.at("kind").get<std::string>();
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto raw = j.at("entries").get<std::vector<std::vector<double>>>();
    std::vector<cplx> entries;
    entries.reserve(raw.size());
    for (const auto& e : raw) {
        if (e.size() != 2) throw std::runtime_error("channel file: entry is not [re,im]");
        entries.emplace_back(e[0], e[1]);
    }
    if (dims.size() != 3) throw std::runtime_error("channel file: dims must have 3 entries");
    if (kind == "isometry") {
        const auto [dA, dB, dE] = std::tuple{dims[0], dims[1], dims[2]};
        if (entries.size() != dB * dE * dA)
            throw std::runtime_error("channel file: entry count mismatch");
        return Channel::from_isometry(Isometry(CMatrix(dB * dE, dA, entries), dA, dB, dE));
    }
    if (kind == "kraus") {
        const auto [dA, dB, m] = std::tuple{dims[0], dims[1], dims[2]};
        if (entries.size() != m * dB * dA)
            throw std::runtime_error("channel file: entry count mismatch");
        std::vector<CMatrix> ks;
        for (std::size_t k = 0; k < m; ++k)
            ks.emplace_back(dB, dA,
                            std::vector<cplx>(entries.begin() + k * dB * dA,
                                              entries.begin() + (k + 1) * dB * dA));
        return Channel::from_kraus(ks);
    }
    throw std::runtime_error("channel file: unknown kind " + kind);
}

void write_channel_file(const std::string& path, const Channel& n) {
    nlohmann::json j;
    j["kind"] = "isometry";
    j["dims"] = {n.in_dim(), n.out_dim(), n.env_dim()};
    std::vector<std::vector<double>> entries;
    for (const auto& e : n.isometry().v.data()) entries.push_back({e.real(), e.imag()});
    j["entries"] = entries;
    std::ofstream out(path);
    out << j.dump(1) << "\n";
}

}  // namespace qadd
