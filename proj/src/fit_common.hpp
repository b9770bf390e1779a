#pragma once

#include "curesem/estimators.hpp"
#include "prepared.hpp"

namespace curesem::detail {

// fills loglik, covariance/SE/CI, default cure-rate profiles and the boundary
// flag from fr.params; never throws (SE absence is recorded, not fatal)
void finalize_fit(FitResult& fr, const Prepared& pre);

// flat natural-scale observed log-likelihood objective for Hessians
Objective loglik_objective(const Prepared& pre, size_t n_beta, size_t n_alpha);

double relative_change(const std::vector<double>& now, const std::vector<double>& prev);

}  // namespace curesem::detail
