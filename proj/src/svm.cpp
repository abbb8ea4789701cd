#include "rankstab/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace rankstab {

namespace {

double sq_dist(const double* a, const double* b, std::size_t p) {
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

double dot(const double* a, const double* b, std::size_t p) {
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        d += a[j] * b[j];
    }
    return d;
}

// SMO working state over a precomputed kernel matrix.
struct Smo {
    MatrixView x;
    const std::vector<int>& y;  // -1/+1
    double c;
    double tol;
    std::vector<double> kernel;  // n*n
    std::vector<double> alpha;
    std::vector<double> err;  // f(x_i) - y_i
    double b = 0.0;
    std::size_t n;
    std::size_t rolling = 0;

    Smo(MatrixView xv, const std::vector<int>& yv, double cc, double tt,
        std::vector<double> k)
        : x(xv), y(yv), c(cc), tol(tt), kernel(std::move(k)), n(xv.rows) {
        alpha.assign(n, 0.0);
        err.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            err[i] = -static_cast<double>(y[i]);
        }
    }

    double k_at(std::size_t i, std::size_t j) const { return kernel[i * n + j]; }

    bool non_bound(std::size_t i) const { return alpha[i] > 0.0 && alpha[i] < c; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) {
            return false;
        }
        double a1 = alpha[i1], a2 = alpha[i2];
        double y1 = y[i1], y2 = y[i2];
        double e1 = err[i1], e2 = err[i2];
        double s = y1 * y2;
        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (lo >= hi) {
            return false;
        }
        double k11 = k_at(i1, i1), k12 = k_at(i1, i2), k22 = k_at(i2, i2);
        double eta = k11 + k22 - 2.0 * k12;
        double a2new;
        if (eta > 0.0) {
            a2new = a2 + y2 * (e1 - e2) / eta;
            a2new = std::clamp(a2new, lo, hi);
        } else {
            // objective at both clip ends (Platt's degenerate case)
            double f1 = y1 * (e1 + b) - a1 * k11 - s * a2 * k12;
            double f2 = y2 * (e2 + b) - s * a1 * k12 - a2 * k22;
            double l1 = a1 + s * (a2 - lo);
            double h1 = a1 + s * (a2 - hi);
            double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                          s * lo * l1 * k12;
            double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                          s * hi * h1 * k12;
            if (lobj < hobj - 1e-12) {
                a2new = lo;
            } else if (lobj > hobj + 1e-12) {
                a2new = hi;
            } else {
                return false;
            }
        }
        if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) {
            return false;
        }
        double a1new = a1 + s * (a2 - a2new);
        if (a1new < 0.0) {
            a2new += s * a1new;
            a1new = 0.0;
        } else if (a1new > c) {
            a2new += s * (a1new - c);
            a1new = c;
        }
        double d1 = y1 * (a1new - a1);
        double d2 = y2 * (a2new - a2);
        double b1 = b - e1 - d1 * k11 - d2 * k12;
        double b2 = b - e2 - d1 * k12 - d2 * k22;
        double bnew;
        if (a1new > 0.0 && a1new < c) {
            bnew = b1;
        } else if (a2new > 0.0 && a2new < c) {
            bnew = b2;
        } else {
            bnew = 0.5 * (b1 + b2);
        }
        double db = bnew - b;
        const double* krow1 = kernel.data() + i1 * n;
        const double* krow2 = kernel.data() + i2 * n;
        for (std::size_t k = 0; k < n; ++k) {
            err[k] += d1 * krow1[k] + d2 * krow2[k] + db;
        }
        alpha[i1] = a1new;
        alpha[i2] = a2new;
        b = bnew;
        err[i1] = decision_err(i1);
        err[i2] = decision_err(i2);
        return true;
    }

    // recompute one cached error from scratch to stop drift on the two
    // points that just moved
    double decision_err(std::size_t i) const {
        double f = b;
        const double* krow = kernel.data() + i * n;
        for (std::size_t k = 0; k < n; ++k) {
            if (alpha[k] > 0.0) {
                f += alpha[k] * y[k] * krow[k];
            }
        }
        return f - y[i];
    }

    bool examine(std::size_t i2) {
        double y2 = y[i2];
        double a2 = alpha[i2];
        double e2 = err[i2];
        double r2 = e2 * y2;
        if (!((r2 < -tol && a2 < c) || (r2 > tol && a2 > 0.0))) {
            return false;
        }
        // heuristic 1: largest |e1 - e2| among non-bound points
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (non_bound(i)) {
                double gap = std::abs(err[i] - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
        }
        if (best < n && take_step(best, i2)) {
            return true;
        }
        // heuristic 2: non-bound points from a rolling start
        std::size_t start = rolling++ % n;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = (start + k) % n;
            if (non_bound(i) && take_step(i, i2)) {
                return true;
            }
        }
        // heuristic 3: everything
        start = rolling++ % n;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = (start + k) % n;
            if (take_step(i, i2)) {
                return true;
            }
        }
        return false;
    }
};

}  // namespace

double auto_gamma(MatrixView x) {
    if (x.cols == 0 || x.rows < 2) {
        return 1.0;
    }
    std::size_t m = std::min<std::size_t>(x.rows, 512);
    std::vector<std::size_t> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
        rows[i] = i * x.rows / m;
    }
    std::vector<double> dists;
    dists.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            dists.push_back(sq_dist(x.row(rows[i]), x.row(rows[j]), x.cols));
        }
    }
    if (dists.empty()) {
        return 1.0 / static_cast<double>(x.cols);
    }
    std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    double med = dists[mid];
    if (!std::isfinite(med) || med <= 0.0) {
        return 1.0 / static_cast<double>(x.cols);
    }
    return 1.0 / (static_cast<double>(x.cols) * med);
}

double SvmModel::decision(const double* row) const {
    if (kernel == KernelKind::Linear) {
        return dot(linear_weights.data(), row, n_features) + bias;
    }
    double f = bias;
    std::size_t sv = sv_coef.size();
    for (std::size_t i = 0; i < sv; ++i) {
        f += sv_coef[i] * std::exp(-gamma * sq_dist(sv_data.data() + i * n_features, row,
                                                    n_features));
    }
    return f;
}

std::vector<double> SvmModel::decision_values(MatrixView x) const {
    if (x.cols != n_features) {
        throw DataError("svm decision: feature count mismatch");
    }
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        out[i] = decision(x.row(i));
    }
    return out;
}

SvmModel train_svm(MatrixView x, const std::vector<int>& y, const SvmTrainOptions& opt) {
    std::size_t n = x.rows;
    if (n == 0 || y.size() != n) {
        throw DataError("train_svm: shape mismatch");
    }
    if (opt.c <= 0.0 || opt.tol <= 0.0) {
        throw ConfigError("train_svm: C and tol must be positive");
    }
    std::vector<int> yy(n);
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        yy[i] = y[i] == 1 ? 1 : -1;
        (y[i] == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) {
        throw DataError("train_svm: needs both classes");
    }
    double gamma = opt.gamma;
    if (opt.kernel == KernelKind::Gaussian && gamma <= 0.0) {
        gamma = auto_gamma(x);
    }
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = (opt.kernel == KernelKind::Linear)
                                ? dot(x.row(i), x.row(i), x.cols)
                                : 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = (opt.kernel == KernelKind::Linear)
                           ? dot(x.row(i), x.row(j), x.cols)
                           : std::exp(-gamma * sq_dist(x.row(i), x.row(j), x.cols));
            kernel[i * n + j] = v;
            kernel[j * n + i] = v;
        }
    }

    Smo smo(x, yy, opt.c, opt.tol, std::move(kernel));
    std::size_t cap = opt.max_sweeps > 0 ? opt.max_sweeps : 500;
    std::size_t sweeps = 0;
    bool examine_all = true;
    std::size_t changed = 0;
    bool clean_exit = false;
    while (sweeps < cap) {
        changed = 0;
        for (std::size_t i = 0; i < smo.n; ++i) {
            if (examine_all || smo.non_bound(i)) {
                changed += smo.examine(i) ? 1 : 0;
            }
        }
        ++sweeps;
        if (examine_all) {
            if (changed == 0) {
                clean_exit = true;
                break;
            }
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
    }

    SvmModel model;
    model.kernel = opt.kernel;
    model.gamma = gamma;
    model.bias = smo.b;
    model.n_features = x.cols;
    model.converged = clean_exit;
    model.sweeps = sweeps;
    if (opt.kernel == KernelKind::Linear) {
        model.linear_weights.assign(x.cols, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (smo.alpha[i] > 0.0) {
                double coef = smo.alpha[i] * yy[i];
                const double* row = x.row(i);
                for (std::size_t j = 0; j < x.cols; ++j) {
                    model.linear_weights[j] += coef * row[j];
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (smo.alpha[i] > 0.0) {
            model.sv_coef.push_back(smo.alpha[i] * yy[i]);
            const double* row = x.row(i);
            model.sv_data.insert(model.sv_data.end(), row, row + x.cols);
        }
    }
    return model;
}

}  // namespace rankstab
