#include "rankstab/linear.hpp"

#include <algorithm>
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

double linear_score(const std::vector<double>& w, MatrixView x, std::size_t i) {
    const double* row = x.row(i);
    double z = w[0];
    for (std::size_t j = 0; j < x.cols; ++j) {
        z += w[j + 1] * row[j];
    }
    return z;
}

}  // namespace

double logistic_nll(const std::vector<double>& w, MatrixView x, const std::vector<int>& y,
                    double ridge) {
    if (w.size() != x.cols + 1 || y.size() != x.rows || x.rows == 0) {
        throw DataError("logistic_nll: shape mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double z = linear_score(w, x, i);
        // log(1+exp(z)) - y*z, split by sign for stability
        double term;
        if (z > 0.0) {
            term = std::log1p(std::exp(-z)) + (1.0 - y[i]) * z;
        } else {
            term = std::log1p(std::exp(z)) - y[i] * z;
        }
        total += term;
    }
    double nll = total / static_cast<double>(x.rows);
    if (ridge > 0.0) {
        double pen = 0.0;
        for (std::size_t j = 1; j < w.size(); ++j) {
            pen += w[j] * w[j];
        }
        nll += 0.5 * ridge * pen;
    }
    return nll;
}

std::vector<double> logistic_grad(const std::vector<double>& w, MatrixView x,
                                  const std::vector<int>& y, double ridge) {
    if (w.size() != x.cols + 1 || y.size() != x.rows || x.rows == 0) {
        throw DataError("logistic_grad: shape mismatch");
    }
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        double resid = sigmoid(linear_score(w, x, i)) - y[i];
        g[0] += resid;
        const double* row = x.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) {
            g[j + 1] += resid * row[j];
        }
    }
    double inv_n = 1.0 / static_cast<double>(x.rows);
    for (double& v : g) {
        v *= inv_n;
    }
    if (ridge > 0.0) {
        for (std::size_t j = 1; j < w.size(); ++j) {
            g[j] += ridge * w[j];
        }
    }
    return g;
}

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
    if (a.size() != n * n || b.size() != n || n == 0) {
        throw DataError("solve_spd: shape mismatch");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(a[i * n + i]));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> l = a;
        if (jitter > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                l[i * n + i] += jitter;
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = l[i * n + j];
                for (std::size_t k = 0; k < j; ++k) {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if (i == j) {
                    if (sum <= 0.0 || !std::isfinite(sum)) {
                        ok = false;
                        break;
                    }
                    l[i * n + i] = std::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        if (ok) {
            // forward then back substitution on the factor
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) {
                double sum = b[i];
                for (std::size_t k = 0; k < i; ++k) {
                    sum -= l[i * n + k] * z[k];
                }
                z[i] = sum / l[i * n + i];
            }
            std::vector<double> xsol(n);
            for (std::size_t ii = n; ii-- > 0;) {
                double sum = z[ii];
                for (std::size_t k = ii + 1; k < n; ++k) {
                    sum -= l[k * n + ii] * xsol[k];
                }
                xsol[ii] = sum / l[ii * n + ii];
            }
            return xsol;
        }
        jitter = (jitter == 0.0) ? scale * 1e-10 : jitter * 100.0;
    }
    throw NumericError("solve_spd: matrix not positive definite");
}

LogisticFit fit_logistic(MatrixView x, const std::vector<int>& y, double tol,
                         std::size_t max_iter, double ridge) {
    std::size_t dim = x.cols + 1;
    LogisticFit fit;
    fit.weights.assign(dim, 0.0);
    double nll = logistic_nll(fit.weights, x, y, ridge);
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> g = logistic_grad(fit.weights, x, y, ridge);
        double gmax = 0.0;
        for (double v : g) {
            gmax = std::max(gmax, std::abs(v));
        }
        if (gmax < tol) {
            fit.converged = true;
            fit.iterations = it;
            return fit;
        }
        // Hessian: X'WX / n with W = p(1-p), ridge on non-intercept diagonal
        std::vector<double> h(dim * dim, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i) {
            double p = sigmoid(linear_score(fit.weights, x, i));
            double wgt = p * (1.0 - p);
            if (wgt < 1e-12) {
                wgt = 1e-12;
            }
            const double* row = x.row(i);
            for (std::size_t a = 0; a < dim; ++a) {
                double xa = (a == 0) ? 1.0 : row[a - 1];
                for (std::size_t b2 = a; b2 < dim; ++b2) {
                    double xb = (b2 == 0) ? 1.0 : row[b2 - 1];
                    h[a * dim + b2] += wgt * xa * xb;
                }
            }
        }
        double inv_n = 1.0 / static_cast<double>(x.rows);
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b2 = a; b2 < dim; ++b2) {
                h[a * dim + b2] *= inv_n;
                h[b2 * dim + a] = h[a * dim + b2];
            }
        }
        if (ridge > 0.0) {
            for (std::size_t a = 1; a < dim; ++a) {
                h[a * dim + a] += ridge;
            }
        }
        std::vector<double> neg_g(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            neg_g[a] = -g[a];
        }
        std::vector<double> step = solve_spd(std::move(h), std::move(neg_g), dim);
        // step halving on the mean NLL
        double alpha = 1.0;
        bool improved = false;
        std::vector<double> trial(dim);
        for (int half = 0; half < 30; ++half) {
            for (std::size_t a = 0; a < dim; ++a) {
                trial[a] = fit.weights[a] + alpha * step[a];
            }
            double trial_nll = logistic_nll(trial, x, y, ridge);
            if (std::isfinite(trial_nll) && trial_nll <= nll) {
                fit.weights = trial;
                nll = trial_nll;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        fit.iterations = it + 1;
        if (!improved) {
            return fit;  // stalled; caller sees converged=false
        }
    }
    // cap reached: report convergence if the gradient happens to be small now
    std::vector<double> g = logistic_grad(fit.weights, x, y, ridge);
    double gmax = 0.0;
    for (double v : g) {
        gmax = std::max(gmax, std::abs(v));
    }
    fit.converged = gmax < tol;
    return fit;
}

std::vector<double> logistic_predict(const std::vector<double>& w, MatrixView x) {
    if (w.size() != x.cols + 1) {
        throw DataError("logistic_predict: shape mismatch");
    }
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        out[i] = sigmoid(linear_score(w, x, i));
    }
    return out;
}

}  // namespace rankstab
