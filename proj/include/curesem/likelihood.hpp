#pragma once

#include <cstdint>
#include <vector>

#include "curesem/model.hpp"

namespace curesem {

// Observed-data log-likelihood
//   sum_i delta_i{log eta_i + log f(t_i) - log(1+phi eta_i F(t_i))}
//         - (1/phi) log(1+phi eta_i F(t_i)),
// accumulated with compensated summation. Returns -inf for zero-density
// configurations; throws std::runtime_error naming the first offending index
// if a term is NaN.
double observed_loglik(const Dataset& data, const Params& p);

// latent risk counts alongside the observations; m_i >= delta_i
struct CompleteData {
  Dataset obs;
  std::vector<int64_t> m;
};

struct LoglikSplit {
  double lc1 = 0;  // (phi, beta) block
  double lc2 = 0;  // (alpha, gamma1) block
  double k = 0;    // parameter-free remainder
  double total() const { return lc1 + lc2 + k; }
};
LoglikSplit complete_loglik_split(const CompleteData& cd, const Params& p);

// Conditional law of M given (t, delta, theta): censored -> NB(1/phi, p*),
// uncensored -> 1 + NB(1/phi + 1, p*), with p* = (1+phi eta F)/(1+phi eta).
struct ConditionalLaw {
  int shift = 0;  // = delta
  NegBinParams nb;
  double mean() const;
  double pmf(uint64_t m) const;         // P(M = m); zero below the shift
  uint64_t sample(RngStream& rng) const;
};

ConditionalLaw conditional_law(const Observation& o, const Params& p);

// closed form (delta + delta*phi*eta + eta*S(t)) / (1 + phi*eta*F(t))
double conditional_mean(const Observation& o, const Params& p);

}  // namespace curesem
