#pragma once

#include <cstdint>
#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

enum class KernelKind { Linear, Gaussian };

struct SvmTrainOptions {
    KernelKind kernel = KernelKind::Gaussian;
    double c = 1.0;
    double gamma = 0.0;  // <= 0 selects the median heuristic
    double tol = 1e-3;   // KKT violation tolerance
    std::size_t max_sweeps = 0;  // 0 = default cap
};

// Soft-margin SVM trained with sequential minimal optimization. Labels are
// 0/1 on input and mapped to -1/+1 internally. The decision value is
// sum_i coef_i K(sv_i, x) + bias with coef_i = alpha_i * y_i.
struct SvmModel {
    KernelKind kernel = KernelKind::Gaussian;
    double gamma = 0.0;
    double bias = 0.0;
    std::size_t n_features = 0;
    std::vector<double> sv_coef;
    std::vector<double> sv_data;  // row-major, sv_coef.size() rows
    std::vector<double> linear_weights;  // filled for the linear kernel
    bool converged = false;
    std::size_t sweeps = 0;

    double decision(const double* row) const;
    std::vector<double> decision_values(MatrixView x) const;
};

// 1 / (p * median pairwise squared distance) over a strided row subsample;
// falls back to 1/p when the median is zero or not finite.
double auto_gamma(MatrixView x);

SvmModel train_svm(MatrixView x, const std::vector<int>& y, const SvmTrainOptions& opt);

}  // namespace rankstab
