#pragma once

#include "riskalloc/exposures.hpp"
#include "riskalloc/measures.hpp"
#include "riskalloc/result.hpp"

namespace riskalloc {

/// K_i = cov(X_i, X) / sqrt(var(X)), divisor m-1 throughout. Fully allocates
/// the sample standard deviation by bilinearity.
AllocationResult euler_std(const ExposurePanel& panel, RunStats* stats = nullptr);

/// Tail-conditional mean: K_i = -mean of unit i over the k worst scenarios
/// of the total row (k = ceil(alpha*m), ties broken by scenario index).
/// Shares the tail set with expected_shortfall, so the allocations sum to it
/// exactly.
AllocationResult euler_es(const ExposurePanel& panel, double alpha,
                          RunStats* stats = nullptr);

/// First-order VaR approximation:
/// K_i = E[X_i] + cov(X_i, X)/var(X) * [VaR_alpha(X) - E[X]], with
/// VaR_alpha in the positive-risk convention. The full-allocation gap is
/// reported in the diagnostics, never hidden.
AllocationResult euler_var_first(const ExposurePanel& panel, double alpha,
                                 RunStats* stats = nullptr);

/// Second-order VaR approximation with regressors X and X^2:
/// K_i = E[X_i] + a_i [VaR_a(X) - E[X]] + b_i [VaR_a(X^2) - E[X^2]], where
/// (a_i, b_i) solve the 2x2 Gram system in (X, X^2) and VaR_a(X^2) is the
/// same order-statistic estimator applied to the squared totals. Falls back
/// to first order (flagged in the diagnostics) when the Gram matrix is
/// numerically singular.
AllocationResult euler_var_second(const ExposurePanel& panel, double alpha,
                                  RunStats* stats = nullptr);

/// Nadaraya-Watson regression of X_i on X at the empirical left-tail
/// quantile q of the total row, with a Gaussian kernel and Silverman
/// bandwidth b = 0.9 * min(sigma, IQR/1.34) * m^(-1/5):
/// K_i = -sum_k x_{i,k} kappa((q - x_k)/b) / sum_k kappa((q - x_k)/b).
/// Requires m >= 30.
AllocationResult euler_var_kernel(const ExposurePanel& panel, double alpha,
                                  RunStats* stats = nullptr);

/// Central finite differences of rho(sum_j u_j X_j) in each u_i at u = 1.
/// Test oracle for the homogeneous closed forms (Std, ES).
std::vector<double> euler_fd_oracle(const ExposurePanel& panel,
                                    const RiskMeasureSpec& measure, double step);

}  // namespace riskalloc
