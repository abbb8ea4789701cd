#pragma once

#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

// Mean negative log-likelihood of the binomial logistic model. w has p+1
// entries with the intercept at w[0]; an optional ridge penalty
// 0.5*ridge*|w_1..p|^2 excludes the intercept.
double logistic_nll(const std::vector<double>& w, MatrixView x, const std::vector<int>& y,
                    double ridge = 0.0);

std::vector<double> logistic_grad(const std::vector<double>& w, MatrixView x,
                                  const std::vector<int>& y, double ridge = 0.0);

struct LogisticFit {
    std::vector<double> weights;  // intercept first
    bool converged = false;
    std::size_t iterations = 0;
};

// Newton iterations with step halving until the max-norm of the gradient
// drops below tol or the iteration cap is reached.
LogisticFit fit_logistic(MatrixView x, const std::vector<int>& y, double tol,
                         std::size_t max_iter, double ridge = 0.0);

std::vector<double> logistic_predict(const std::vector<double>& w, MatrixView x);

// Solves the symmetric positive definite system a*x = b in place
// (dense Cholesky, dimension n). Throws NumericError when not SPD even
// after a small jitter.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n);

}  // namespace rankstab
