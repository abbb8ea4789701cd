#pragma once

#include <cstdint>
#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

// One hidden layer of logistic-sigmoid units and a sigmoid output. Flat
// parameter layout: W1 (hidden x p, row-major), b1 (hidden), w2 (hidden), b2.
std::size_t mlp_param_count(std::size_t hidden, std::size_t p);

// Pre-sigmoid output value for one row.
double mlp_decision(const std::vector<double>& params, std::size_t hidden, const double* row,
                    std::size_t p);

// Mean cross-entropy of sigmoid(output) against 0/1 labels, evaluated in a
// numerically stable form with no probability clipping, so the analytic
// gradient matches finite differences everywhere.
double mlp_loss(const std::vector<double>& params, std::size_t hidden, MatrixView x,
                const std::vector<int>& y);

std::vector<double> mlp_grad(const std::vector<double>& params, std::size_t hidden,
                             MatrixView x, const std::vector<int>& y);

struct MlpOptions {
    std::size_t hidden = 4;
    std::size_t epochs = 100;
    double learn_rate = 0.5;
    double momentum = 0.9;
    std::size_t patience = 6;
};

struct MlpFit {
    std::vector<double> params;
    std::size_t hidden = 0;
    std::size_t epochs_run = 0;
    bool early_stopped = false;
    std::vector<double> train_loss_history;
    std::vector<double> val_loss_history;
};

// Full-batch gradient descent with momentum; keeps the parameters with the
// best validation loss, stopping after `patience` epochs without improvement.
MlpFit train_mlp(MatrixView x_train, const std::vector<int>& y_train, MatrixView x_val,
                 const std::vector<int>& y_val, const MlpOptions& opts, std::uint64_t seed);

}  // namespace rankstab
