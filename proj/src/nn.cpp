#include "rankstab/nn.hpp"

#include <cmath>
#include <cstddef>

namespace rankstab {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z without overflow
double ce_from_logit(double z, int y) {
    if (z > 0.0) {
        return std::log1p(std::exp(-z)) + (1.0 - y) * z;
    }
    return std::log1p(std::exp(z)) - y * z;
}

void check_shapes(const std::vector<double>& params, std::size_t hidden, MatrixView x,
                  const std::vector<int>& y) {
    if (hidden == 0 || x.rows == 0 || y.size() != x.rows ||
        params.size() != mlp_param_count(hidden, x.cols)) {
        throw DataError("mlp: shape mismatch");
    }
}

}  // namespace

std::size_t mlp_param_count(std::size_t hidden, std::size_t p) {
    return hidden * p + hidden + hidden + 1;
}

double mlp_decision(const std::vector<double>& params, std::size_t hidden, const double* row,
                    std::size_t p) {
    const double* w1 = params.data();
    const double* b1 = w1 + hidden * p;
    const double* w2 = b1 + hidden;
    double b2 = w2[hidden];
    double z_out = b2;
    for (std::size_t k = 0; k < hidden; ++k) {
        double z = b1[k];
        const double* wrow = w1 + k * p;
        for (std::size_t j = 0; j < p; ++j) {
            z += wrow[j] * row[j];
        }
        z_out += w2[k] * sigmoid(z);
    }
    return z_out;
}

double mlp_loss(const std::vector<double>& params, std::size_t hidden, MatrixView x,
                const std::vector<int>& y) {
    check_shapes(params, hidden, x, y);
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        total += ce_from_logit(mlp_decision(params, hidden, x.row(i), x.cols), y[i]);
    }
    return total / static_cast<double>(x.rows);
}

std::vector<double> mlp_grad(const std::vector<double>& params, std::size_t hidden,
                             MatrixView x, const std::vector<int>& y) {
    check_shapes(params, hidden, x, y);
    std::size_t p = x.cols;
    const double* w1 = params.data();
    const double* b1 = w1 + hidden * p;
    const double* w2 = b1 + hidden;
    std::vector<double> grad(params.size(), 0.0);
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + hidden * p;
    double* g_w2 = g_b1 + hidden;
    std::vector<double> act(hidden);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        double z_out = w2[hidden];
        for (std::size_t k = 0; k < hidden; ++k) {
            double z = b1[k];
            const double* wrow = w1 + k * p;
            for (std::size_t j = 0; j < p; ++j) {
                z += wrow[j] * row[j];
            }
            act[k] = sigmoid(z);
            z_out += w2[k] * act[k];
        }
        double delta_out = sigmoid(z_out) - y[i];
        g_w2[hidden] += delta_out;
        for (std::size_t k = 0; k < hidden; ++k) {
            g_w2[k] += delta_out * act[k];
            double delta_k = delta_out * w2[k] * act[k] * (1.0 - act[k]);
            g_b1[k] += delta_k;
            double* grow = g_w1 + k * p;
            for (std::size_t j = 0; j < p; ++j) {
                grow[j] += delta_k * row[j];
            }
        }
    }
    double inv_n = 1.0 / static_cast<double>(x.rows);
    for (double& v : grad) {
        v *= inv_n;
    }
    return grad;
}

MlpFit train_mlp(MatrixView x_train, const std::vector<int>& y_train, MatrixView x_val,
                 const std::vector<int>& y_val, const MlpOptions& opts, std::uint64_t seed) {
    if (opts.hidden == 0 || opts.epochs == 0 || opts.learn_rate <= 0.0 ||
        opts.momentum < 0.0 || opts.momentum >= 1.0) {
        throw ConfigError("train_mlp: bad options");
    }
    if (x_val.rows == 0 || x_val.cols != x_train.cols || y_val.size() != x_val.rows) {
        throw DataError("train_mlp: bad validation set");
    }
    MlpFit fit;
    fit.hidden = opts.hidden;
    fit.params.resize(mlp_param_count(opts.hidden, x_train.cols));
    Rng rng(seed);
    for (double& w : fit.params) {
        w = rng.uniform01() - 0.5;
    }

    std::vector<double> best = fit.params;
    double best_val = mlp_loss(fit.params, opts.hidden, x_val, y_val);
    fit.val_loss_history.push_back(best_val);
    std::vector<double> velocity(fit.params.size(), 0.0);
    std::size_t stale = 0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        std::vector<double> grad = mlp_grad(fit.params, opts.hidden, x_train, y_train);
        for (std::size_t i = 0; i < fit.params.size(); ++i) {
            velocity[i] = opts.momentum * velocity[i] - opts.learn_rate * grad[i];
            fit.params[i] += velocity[i];
        }
        fit.epochs_run = epoch + 1;
        fit.train_loss_history.push_back(mlp_loss(fit.params, opts.hidden, x_train, y_train));
        double val = mlp_loss(fit.params, opts.hidden, x_val, y_val);
        fit.val_loss_history.push_back(val);
        if (val < best_val - 1e-12) {
            best_val = val;
            best = fit.params;
            stale = 0;
        } else {
            ++stale;
            if (stale >= opts.patience) {
                fit.early_stopped = true;
                break;
            }
        }
    }
    fit.params = std::move(best);
    return fit;
}

}  // namespace rankstab
