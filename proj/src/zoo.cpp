#include "qadd/zoo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qadd/eig.hpp"

namespace qadd {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Degradable: return "Degradable";
        case Verdict::AntiDegradable: return "AntiDegradable";
        case Verdict::Both: return "Both";
        case Verdict::Neither: return "Neither";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

namespace {

void check_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << name << " = " << x << " outside [0,1]";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

Channel amplitude_damping(double gamma) {
    check_unit(gamma, "gamma");
    CMatrix v(4, 2);
    v(0, 0) = 1.0;                      // |0> -> |00>
    v(2, 1) = std::sqrt(1.0 - gamma);   // |1> -> sqrt(1-g)|10>
    v(1, 1) = std::sqrt(gamma);         //       + sqrt(g)|01>
    Channel n = Channel::from_isometry(Isometry(v, 2, 2, 2));
    n.family = Family::AmplitudeDamping;
    n.family_params = {gamma};
    return n;
}

SuperOperator ad_inverse(double gamma) {
    check_unit(gamma, "gamma");
    if (gamma >= 1.0) throw std::invalid_argument("ad_inverse: gamma must be < 1");
    // basis order of vec_col on qubits: (00, 10, 01, 11)
    CMatrix t(4, 4);
    t(0, 0) = 1.0;
    t(0, 3) = -gamma / (1.0 - gamma);
    t(1, 1) = 1.0 / std::sqrt(1.0 - gamma);
    t(2, 2) = 1.0 / std::sqrt(1.0 - gamma);
    t(3, 3) = 1.0 / (1.0 - gamma);
    return SuperOperator{t, 2, 2};
}

SuperOperator ad_compose_inverse(double g2, double g1) {
    check_unit(g1, "g1");
    check_unit(g2, "g2");
    if (g1 >= 1.0) throw std::invalid_argument("ad_compose_inverse: g1 must be < 1");
    CMatrix t(4, 4);
    t(0, 0) = 1.0;
    t(0, 3) = (g2 - g1) / (1.0 - g1);
    t(1, 1) = std::sqrt((1.0 - g2) / (1.0 - g1));
    t(2, 2) = std::sqrt((1.0 - g2) / (1.0 - g1));
    t(3, 3) = (1.0 - g2) / (1.0 - g1);
    return SuperOperator{t, 2, 2};
}

Channel ad_crossing_channel(double g2, double g1) {
    check_unit(g1, "g1");
    check_unit(g2, "g2");
    if (g1 > g2 + 1e-12) throw std::invalid_argument("ad_crossing_channel: needs g1 <= g2");
    // A_{g2} o A_{g1}^{-1} = A_c with c = (g2-g1)/(1-g1); at g1 = 1 both
    // channels are the full decay map and the identity serves.
    const double den = 1.0 - g1;
    const double c = den < 1e-14 ? 0.0 : (g2 - g1) / den;
    return amplitude_damping(std::min(1.0, std::max(0.0, c)));
}

Channel dephasing(double alpha) {
    if (std::abs(alpha) > 1.0) throw std::invalid_argument("dephasing: |alpha| > 1");
    const double cp = std::sqrt((1.0 + alpha) / 2.0);
    const double cm = std::sqrt((1.0 - alpha) / 2.0);
    CMatrix k0 = cplx(cp) * CMatrix::identity(2);
    CMatrix k1(2, 2);
    k1(0, 0) = cm;
    k1(1, 1) = -cm;
    Channel n = Channel::from_kraus({k0, k1});
    n.family = Family::Dephasing;
    n.family_params = {alpha};
    return n;
}

double dephasing_q1(double alpha) {
    if (std::abs(alpha) > 1.0) throw std::invalid_argument("dephasing_q1: |alpha| > 1");
    const double x = (1.0 + std::abs(alpha)) / 2.0;
    double h = 0.0;
    if (x > 0.0 && x < 1.0) h = -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
    return 1.0 - h;
}

Channel gao_channel(double alpha) {
    if (std::abs(alpha) > 1.0) throw std::invalid_argument("gao_channel: |alpha| > 1");
    const double cp = std::sqrt((1.0 + alpha) / 2.0);
    const double cm = std::sqrt((1.0 - alpha) / 2.0);
    // dephasing between the level pairs (0,2) and (1,3), with both members of
    // each pair landing on distinct output levels except 0 and 1 which merge
    auto op = [](double w0, std::size_t r0, std::size_t c0, double w1, std::size_t r1,
                 std::size_t c1) {
        CMatrix k(3, 4);
        k(r0, c0) = w0;
        k(r1, c1) = w1;
        return k;
    };
    std::vector<CMatrix> ks = {
        op(cp, 0, 0, cp, 1, 2),
        op(cm, 0, 0, -cm, 1, 2),
        op(cp, 0, 1, cp, 2, 3),
        op(cm, 0, 1, -cm, 2, 3),
    };
    Channel n = Channel::from_kraus(ks);
    n.family = Family::Gao;
    n.family_params = {alpha};
    return n;
}

std::pair<Channel, Channel> gao_factorization() {
    // E permutes levels 1 and 2; D merges the two diagonal blocks back down
    CMatrix p(4, 4);
    p(0, 0) = p(1, 2) = p(2, 1) = p(3, 3) = 1.0;
    Channel e = Channel::from_kraus({p});

    CMatrix d0(3, 4), d1(3, 4);
    d0(0, 0) = d0(1, 1) = 1.0;
    d1(0, 2) = d1(2, 3) = 1.0;
    Channel d = Channel::from_kraus({d0, d1});
    return {e, d};
}

Channel mad_channel(double gamma0, double gamma1) {
    if (gamma0 < 0.0 || gamma1 < 0.0 || gamma0 + gamma1 > 1.0 + 1e-12)
        throw std::invalid_argument("mad_channel: parameters outside the simplex");
    const double gamma2 = std::max(0.0, 1.0 - gamma0 - gamma1);
    CMatrix v(9, 3);
    v(0, 0) = 1.0;                      // |0> -> |00>
    v(3, 1) = 1.0;                      // |1> -> |10>
    v(6, 2) = std::sqrt(gamma2);        // |2> -> sqrt(g2)|20>
    v(4, 2) = std::sqrt(gamma1);        //       + sqrt(g1)|11>
    v(2, 2) = std::sqrt(gamma0);        //       + sqrt(g0)|02>
    Channel n = Channel::from_isometry(Isometry(v, 3, 3, 3));
    n.family = Family::Mad;
    n.family_params = {gamma0, gamma1};
    return n;
}

std::optional<std::pair<double, double>> mad_degradable_simulator(double gamma0, double gamma1) {
    if (gamma0 < 0.0 || gamma1 < 0.0 || gamma0 + gamma1 > 1.0 + 1e-12)
        throw std::invalid_argument("mad_degradable_simulator: parameters outside the simplex");
    const double sum = gamma0 + gamma1;
    if (1.0 - sum >= 0.5) return std::nullopt;  // already degradable
    return std::make_pair(gamma0 / (2.0 * sum), gamma1 / (2.0 * sum));
}

Channel flagged_ad(double p, double gamma, double eta) {
    check_unit(p, "p");
    Channel n = flagged({1.0 - p, p}, {amplitude_damping(gamma), amplitude_damping(eta)});
    n.family = Family::FlaggedAD;
    n.family_params = {p, gamma, eta};
    return n;
}

RegionClass flagged_ad_region(double p, double gamma, double eta) {
    check_unit(p, "p");
    check_unit(gamma, "gamma");
    check_unit(eta, "eta");
    const double tol = 1e-6;
    RegionClass r;
    const double s = gamma + eta;

    auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    r.boundary = near(p, 0.5) || near(s, 1.0) || near(eta, 0.5) || near(gamma, 0.5);

    if (p > 0.5 + tol) {
        r.degradable = s <= 1.0 + tol && eta <= 0.5 + tol;
        r.anti_degradable = s >= 1.0 - tol && eta >= 0.5 - tol;
    } else if (p < 0.5 - tol) {
        r.degradable = s <= 1.0 + tol && gamma <= 0.5 + tol;
        r.anti_degradable = s >= 1.0 - tol && gamma >= 0.5 - tol;
    } else {
        r.degradable = s <= 1.0 + tol;
        r.anti_degradable = s >= 1.0 - tol;
    }
    return r;
}

Channel flagged_ad_degrading_map(double p, double gamma, double eta) {
    const RegionClass r = flagged_ad_region(p, gamma, eta);
    if (!r.degradable)
        throw std::invalid_argument("flagged_ad_degrading_map: parameters not degradable");

    // crossing maps between the two damping arms and their complements
    auto arm = [](double target, double source) { return ad_crossing_channel(target, source); };

    struct Term {
        double w;
        std::size_t i, j;  // flag switch |i><j|
        Channel d;
    };
    std::vector<Term> terms;
    if (std::abs(p - 0.5) <= 1e-12) {
        terms = {{1.0, 1, 0, arm(1.0 - eta, gamma)}, {1.0, 0, 1, arm(1.0 - gamma, eta)}};
    } else if (p > 0.5) {
        terms = {{1.0, 1, 0, arm(1.0 - eta, gamma)},
                 {(2.0 * p - 1.0) / p, 1, 1, arm(1.0 - eta, eta)},
                 {(1.0 - p) / p, 0, 1, arm(1.0 - gamma, eta)}};
    } else {
        terms = {{p / (1.0 - p), 1, 0, arm(1.0 - eta, gamma)},
                 {(1.0 - 2.0 * p) / (1.0 - p), 0, 0, arm(1.0 - gamma, gamma)},
                 {1.0, 0, 1, arm(1.0 - gamma, eta)}};
    }

    std::vector<CMatrix> ks;
    for (const Term& t : terms) {
        CMatrix s(2, 2);
        s(t.i, t.j) = std::sqrt(t.w);
        for (const CMatrix& k : t.d.kraus()) ks.push_back(kron(s, k));
    }
    return Channel::from_kraus(ks);
}

Channel platypus(double s, double t) {
    if (s < 0.0 || t < 0.0 || s + t > 1.0 + 1e-12)
        throw std::invalid_argument("platypus: parameters outside the simplex");
    const double u = std::max(0.0, 1.0 - s - t);
    CMatrix v(9, 3);
    v(0, 0) = std::sqrt(s);  // |0> -> sqrt(s)|00>
    v(4, 0) = std::sqrt(u);  //       + sqrt(1-s-t)|11>
    v(8, 0) = std::sqrt(t);  //       + sqrt(t)|22>
    v(6, 1) = 1.0;           // |1> -> |20>
    v(7, 2) = 1.0;           // |2> -> |21>
    Channel n = Channel::from_isometry(Isometry(v, 3, 3, 3));
    n.family = Family::Platypus;
    n.family_params = {s, t};
    return n;
}

Channel platypus_subchannel(double s, double t) {
    if (s < 0.0 || t < 0.0 || s + t > 1.0 + 1e-12)
        throw std::invalid_argument("platypus_subchannel: parameters outside the simplex");
    const double u = std::max(0.0, 1.0 - s - t);
    CMatrix k0(3, 2), k1(3, 2), k2(3, 2);
    if (s >= (1.0 - t) / 2.0) {
        // restriction to span{|0>,|1>}
        k0(0, 0) = std::sqrt(s);
        k0(2, 1) = 1.0;
        k1(1, 0) = std::sqrt(u);
        k2(2, 0) = std::sqrt(t);
    } else {
        // restriction to span{|0>,|2>}
        k0(1, 0) = std::sqrt(u);
        k0(2, 1) = 1.0;
        k1(0, 0) = std::sqrt(s);
        k2(2, 0) = std::sqrt(t);
    }
    return Channel::from_kraus({k0, k1, k2});
}

Certificate platypus_antideg_certificate(double s, double t) {
    Certificate cert;
    if (t < 1e-12) {
        cert.verdict = Verdict::Indeterminate;
        cert.witness = "transfer matrix of the complement is singular at t = 0";
        return cert;
    }
    const Channel n = platypus(s, t);
    const Channel nc = n.complement();
    const CMatrix td = n.transfer() * pinv(nc.transfer());
    const CMatrix jd = transfer_to_choi(td, 3, 3).symmetrized();
    const auto ps = psd_check(jd, 1e-9);

    if (ps.psd) {
        // Kraus operators of the candidate from its Choi eigendecomposition
        const HermEig eg = hermitian_eig(jd);
        std::vector<CMatrix> ks;
        for (std::size_t k = 0; k < 9; ++k) {
            if (eg.eigenvalues[k] < 1e-12) continue;
            CMatrix op(3, 3);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t v = 0; v < 3; ++v)
                    op(v, i) = std::sqrt(eg.eigenvalues[k]) * eg.eigenvectors(i * 3 + v, k);
            ks.push_back(op);
        }
        Channel d = Channel::from_kraus_unchecked(ks);
        double resid = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                resid = std::max(resid,
                                 (d.apply(nc.apply(CMatrix::unit(3, i, j))) -
                                  n.apply(CMatrix::unit(3, i, j)))
                                     .max_abs());
        cert.verdict = Verdict::AntiDegradable;
        cert.antidegrading_map = d;
        cert.residual = resid;
        return cert;
    }

    cert.verdict = Verdict::Neither;
    cert.residual = ps.min_eigenvalue;
    std::ostringstream os;
    os << "candidate Choi operator has eigenvalue " << ps.min_eigenvalue
       << " < 0; degradability is excluded because columns 6 and 8 of the "
          "transfer matrix vanish while the complement's do not";
    cert.witness = os.str();
    return cert;
}

Channel erasure(std::size_t d, double lambda) {
    if (d < 2) throw std::invalid_argument("erasure: input dim must be >= 2");
    check_unit(lambda, "lambda");
    const std::size_t dd = d + 1;
    CMatrix v(dd * dd, d);
    for (std::size_t a = 0; a < d; ++a) {
        v(a * dd + d, a) = std::sqrt(1.0 - lambda);  // |a>_B |e>_E
        v(d * dd + a, a) = std::sqrt(lambda);        // |e>_B |a>_E
    }
    Channel n = Channel::from_isometry(Isometry(v, d, dd, dd));
    n.family = Family::Erasure;
    n.family_params = {double(d), lambda};
    return n;
}

Channel parse_family_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("family spec must look like name:p1,p2,...");
    const std::string name = spec.substr(0, colon);
    std::vector<double> ps;
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        ps.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("bad number in family spec: " + tok);
    }
    auto want = [&](std::size_t k) {
        if (ps.size() != k)
            throw std::invalid_argument("family " + name + " takes " + std::to_string(k) +
                                        " parameter(s)");
    };
    if (name == "ad") {
        want(1);
        return amplitude_damping(ps[0]);
    }
    if (name == "platypus") {
        want(2);
        return platypus(ps[0], ps[1]);
    }
    if (name == "erasure") {
        want(2);
        if (ps[0] < 2.0 || ps[0] != std::floor(ps[0]))
            throw std::invalid_argument("erasure dim must be an integer >= 2");
        return erasure(std::size_t(ps[0]), ps[1]);
    }
    if (name == "flagged_ad") {
        want(3);
        return flagged_ad(ps[0], ps[1], ps[2]);
    }
    if (name == "dephasing") {
        want(1);
        return dephasing(ps[0]);
    }
    if (name == "gao") {
        want(1);
        return gao_channel(ps[0]);
    }
    if (name == "mad") {
        want(2);
        return mad_channel(ps[0], ps[1]);
    }
    throw std::invalid_argument("unknown channel family: " + name);
}

}  // namespace qadd
