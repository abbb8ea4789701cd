#include "rankstab/mds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/stability.hpp"

namespace rankstab {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix; returns
// eigenvalues descending with matching columns in vecs (row-major n x n).
void jacobi_eigen(std::vector<double> a, std::size_t n, std::vector<double>& vals,
                  std::vector<double>& vecs) {
    vecs.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        vecs[i * n + i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if (off < 1e-24) {
            break;
        }
        for (std::size_t pp = 0; pp < n; ++pp) {
            for (std::size_t q = pp + 1; q < n; ++q) {
                double apq = a[pp * n + q];
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                double app = a[pp * n + pp];
                double aqq = a[q * n + q];
                double theta = 0.5 * (aqq - app) / apq;
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    double arp = a[r * n + pp];
                    double arq = a[r * n + q];
                    a[r * n + pp] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double apr = a[pp * n + r];
                    double aqr = a[q * n + r];
                    a[pp * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double vrp = vecs[r * n + pp];
                    double vrq = vecs[r * n + q];
                    vecs[r * n + pp] = c * vrp - s * vrq;
                    vecs[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    vals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        vals[i] = a[i * n + i];
    }
    // order columns by descending eigenvalue
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return vals[x] > vals[y]; });
    std::vector<double> sorted_vals(n);
    std::vector<double> sorted_vecs(n * n);
    for (std::size_t c = 0; c < n; ++c) {
        sorted_vals[c] = vals[order[c]];
        for (std::size_t r = 0; r < n; ++r) {
            sorted_vecs[r * n + c] = vecs[r * n + order[c]];
        }
    }
    vals = std::move(sorted_vals);
    vecs = std::move(sorted_vecs);
}

double normalized_stress(const DissimilarityMatrix& d, const std::vector<double>& coords,
                         double sum_delta_sq) {
    double num = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = i + 1; j < d.n; ++j) {
            double dx = coords[2 * i] - coords[2 * j];
            double dy = coords[2 * i + 1] - coords[2 * j + 1];
            double dist = std::sqrt(dx * dx + dy * dy);
            double diff = dist - d.at(i, j);
            num += diff * diff;
        }
    }
    return std::sqrt(num / sum_delta_sq);
}

}  // namespace

void validate_dissimilarity(const DissimilarityMatrix& d) {
    if (d.n < 1 || d.values.size() != d.n * d.n || d.labels.size() != d.n) {
        throw DataError("dissimilarity matrix: shape mismatch");
    }
    for (std::size_t i = 0; i < d.n; ++i) {
        if (d.at(i, i) != 0.0) {
            throw DataError("dissimilarity matrix: nonzero diagonal");
        }
        for (std::size_t j = 0; j < d.n; ++j) {
            double v = d.at(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw DataError("dissimilarity matrix: negative or non-finite entry");
            }
            if (std::abs(v - d.at(j, i)) > 1e-12) {
                throw DataError("dissimilarity matrix: asymmetric");
            }
        }
    }
}

DissimilarityMatrix rank_dissimilarity(const std::vector<RankingEnsemble>& ensembles) {
    DissimilarityMatrix d;
    std::vector<const RankingVector*> points;
    std::size_t p = 0;
    for (const RankingEnsemble& e : ensembles) {
        if (p == 0) {
            p = e.features();
        } else if (e.features() != p) {
            throw DataError("rank_dissimilarity: ensembles disagree on feature count");
        }
        for (std::size_t run = 0; run < e.runs(); ++run) {
            points.push_back(&e.rankings[run]);
            d.labels.push_back({e.ranker_name, run + 1});
        }
    }
    d.n = points.size();
    if (d.n == 0) {
        throw DataError("rank_dissimilarity: no rankings");
    }
    d.values.assign(d.n * d.n, 0.0);
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = i + 1; j < d.n; ++j) {
            double delta = 1.0 - spearman(*points[i], *points[j]);
            d.values[i * d.n + j] = delta;
            d.values[j * d.n + i] = delta;
        }
    }
    validate_dissimilarity(d);
    return d;
}

Embedding embed(const DissimilarityMatrix& d, std::uint64_t seed) {
    validate_dissimilarity(d);
    std::size_t n = d.n;
    if (n < 3) {
        throw DataError("embed needs at least 3 points");
    }
    Embedding out;
    out.labels = d.labels;
    out.coordinates.assign(n * 2, 0.0);

    double sum_delta_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum_delta_sq += d.at(i, j) * d.at(i, j);
        }
    }
    if (sum_delta_sq == 0.0) {
        // all points coincide
        out.converged = true;
        out.stress = 0.0;
        out.stress_history.push_back(0.0);
        return out;
    }

    // classical MDS: double-centered squared dissimilarities
    std::vector<double> b(n * n);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sq = d.at(i, j) * d.at(i, j);
            row_mean[i] += sq;
            grand += sq;
        }
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sq = d.at(i, j) * d.at(i, j);
            b[i * n + j] = -0.5 * (sq - row_mean[i] - row_mean[j] + grand);
        }
    }
    std::vector<double> vals, vecs;
    jacobi_eigen(std::move(b), n, vals, vecs);
    bool degenerate = vals[0] <= 1e-12;
    if (degenerate) {
        Rng rng(derive_seed(seed, "mds-init", 0));
        for (double& c : out.coordinates) {
            c = 1e-3 * rng.normal();
        }
    } else {
        for (std::size_t axis = 0; axis < 2; ++axis) {
            double lambda = vals[axis];
            double scale = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                out.coordinates[2 * i + axis] = scale * vecs[i * n + axis];
            }
        }
    }

    double stress = normalized_stress(d, out.coordinates, sum_delta_sq);
    out.stress_history.push_back(stress);

    std::vector<double> next(n * 2);
    for (std::size_t iter = 0; iter < 500; ++iter) {
        // Guttman transform
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double bii = 0.0;
            double nx = 0.0, ny = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                double dx = out.coordinates[2 * i] - out.coordinates[2 * j];
                double dy = out.coordinates[2 * i + 1] - out.coordinates[2 * j + 1];
                double dist = std::sqrt(dx * dx + dy * dy);
                double bij = dist > 1e-300 ? -d.at(i, j) / dist : 0.0;
                bii -= bij;
                nx += bij * out.coordinates[2 * j];
                ny += bij * out.coordinates[2 * j + 1];
            }
            next[2 * i] = (bii * out.coordinates[2 * i] + nx) / static_cast<double>(n);
            next[2 * i + 1] = (bii * out.coordinates[2 * i + 1] + ny) / static_cast<double>(n);
        }
        out.coordinates = next;
        out.iterations = iter + 1;
        double new_stress = normalized_stress(d, out.coordinates, sum_delta_sq);
        out.stress_history.push_back(new_stress);
        double improvement = stress - new_stress;
        stress = new_stress;
        if (improvement < 1e-8) {
            out.converged = true;
            break;
        }
    }
    out.stress = stress;

    // center for a tidy plot
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cx += out.coordinates[2 * i];
        cy += out.coordinates[2 * i + 1];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.coordinates[2 * i] -= cx;
        out.coordinates[2 * i + 1] -= cy;
    }
    return out;
}

std::map<std::string, double> dispersion(const Embedding& e, WarningSink* warnings) {
    if (e.labels.size() * 2 != e.coordinates.size()) {
        throw DataError("dispersion: embedding has no labels");
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
        groups[e.labels[i].first].push_back(i);
    }
    std::map<std::string, double> out;
    for (const auto& [name, idx] : groups) {
        if (idx.size() < 2) {
            warn(warnings, "ranker " + name + " has fewer than 2 points; dispersion omitted");
            continue;
        }
        double cx = 0.0, cy = 0.0;
        for (std::size_t i : idx) {
            cx += e.x(i);
            cy += e.y(i);
        }
        cx /= static_cast<double>(idx.size());
        cy /= static_cast<double>(idx.size());
        double ss = 0.0;
        for (std::size_t i : idx) {
            double dx = e.x(i) - cx;
            double dy = e.y(i) - cy;
            ss += dx * dx + dy * dy;
        }
        out[name] = std::sqrt(ss / static_cast<double>(idx.size()));
    }
    return out;
}

}  // namespace rankstab
