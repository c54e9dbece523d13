#pragma once

namespace eemimo::lambert {

// -1/e, the branch point of the principal branch.
inline constexpr double kBranchPoint = -0.36787944117144233;

// Absolute slack below the branch point tolerated as round-off.
inline constexpr double kDomainSlack = 1e-12;

/// Principal branch W0 of the Lambert W function, the solution w >= -1 of
/// w * exp(w) = x. Throws DomainError for x < -1/e - kDomainSlack; inputs in
/// the slack band map to -1.
double w0(double x);

/// W0(-1/e + delta) for delta >= 0. Callers that know the offset from the
/// branch point exactly should use this to avoid cancellation near -1/e.
double w0_from_branch(double delta);

/// exp(W0(x) + 1), the kernel shared by the closed-form optimizers.
double exp_w_plus_one(double x);

/// exp(W0(-1/e + delta) + 1).
double exp_w_plus_one_from_branch(double delta);

}  // namespace eemimo::lambert
