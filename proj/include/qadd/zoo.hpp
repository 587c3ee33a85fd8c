#pragma once

#include <optional>
#include <string>
#include <utility>

#include "qadd/certificate.hpp"
#include "qadd/channel.hpp"

namespace qadd {

/// Qubit amplitude damping A_gamma: |1> decays to |0> with probability gamma.
Channel amplitude_damping(double gamma);

/// The (non-positive for gamma > 0) linear inverse of A_gamma; gamma < 1.
SuperOperator ad_inverse(double gamma);

/// A_{g2} o A_{g1}^{-1} in closed form; CPTP iff g1 <= g2, in which case it
/// equals A_{(g2-g1)/(1-g1)}.
SuperOperator ad_compose_inverse(double g2, double g1);

/// The CPTP realization of ad_compose_inverse (throws when g1 > g2).
Channel ad_crossing_channel(double g2, double g1);

/// Qubit dephasing D_alpha: off-diagonals scaled by alpha, |alpha| <= 1.
Channel dephasing(double alpha);

/// One-shot capacity of D_alpha: 1 - h((1+alpha)/2).
double dephasing_q1(double alpha);

/// Two-qubit to qutrit channel that dephases between the subspace pairs
/// {|0>,|2>} and {|1>,|3>} while merging |0>,|1> into one output level.
Channel gao_channel(double alpha);

/// (E, D) with D o (D_alpha (+) D_alpha) o E = gao_channel(alpha).
std::pair<Channel, Channel> gao_factorization();

/// Qutrit amplitude damping: |2> decays to |0> or |1> with probabilities
/// gamma0, gamma1; the {|0>,|1>} block is transmitted perfectly.
Channel mad_channel(double gamma0, double gamma1);

/// Parameters (g0', g1') with g0'+g1' = 1/2 of a degradable channel that
/// simulates mad_channel(gamma0, gamma1); available iff 1-gamma0-gamma1 < 1/2.
std::optional<std::pair<double, double>> mad_degradable_simulator(double gamma0, double gamma1);

/// Flag-recorded mixture (1-p) A_gamma + p A_eta on flag (x) qubit.
Channel flagged_ad(double p, double gamma, double eta);

struct RegionClass {
    bool degradable = false;
    bool anti_degradable = false;
    bool boundary = false;  // within 1e-6 of a classification boundary
};

/// Closed-form inequality classifier for flagged_ad, matching the
/// constructive crossing maps below. The inequalities are sufficient for the
/// verdict they assert but not necessary: numeric search finds explicit
/// (anti-)degrading maps at some points outside the region (see
/// flagged_ad_degrading_map and cptp_factor_feasibility).
RegionClass flagged_ad_region(double p, double gamma, double eta);

/// The constructive map D with D o Phi = Phi^c, defined on the degradable
/// region; throws outside it.
Channel flagged_ad_degrading_map(double p, double gamma, double eta);

/// Qutrit channel from the isometry F_{s,t}; s,t >= 0, s+t <= 1.
Channel platypus(double s, double t);

/// Qubit-input restriction of platypus to span{|0>,|1>} when s >= (1-t)/2,
/// else to span{|0>,|2>}.
Channel platypus_subchannel(double s, double t);

/// Decides anti-degradability of platypus(s,t) through the closed-form
/// candidate Choi operator of T_N * T_{N^c}^{-1}; t = 0 is Indeterminate.
Certificate platypus_antideg_certificate(double s, double t);

/// Erasure channel on d-dimensional inputs; output dim d+1 with the last
/// basis vector as the erasure flag.
Channel erasure(std::size_t d, double lambda);

/// Parses CLI family specs: "ad:g", "platypus:s,t", "erasure:d,l",
/// "flagged_ad:p,g,e", "dephasing:a", "gao:a", "mad:g0,g1".
Channel parse_family_spec(const std::string& spec);

}  // namespace qadd
