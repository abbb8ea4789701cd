#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rankstab/types.hpp"

namespace rankstab {

// Pairwise dissimilarities between ranking runs, labeled (ranker, run index
// starting at 1).
struct DissimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // n x n row-major
    std::vector<std::pair<std::string, std::size_t>> labels;

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Throws DataError unless symmetric within 1e-12 with an exactly zero
// diagonal and non-negative entries.
void validate_dissimilarity(const DissimilarityMatrix& d);

// delta_ij = 1 - spearman(r_i, r_j) over all runs of all ensembles.
DissimilarityMatrix rank_dissimilarity(const std::vector<RankingEnsemble>& ensembles);

struct Embedding {
    std::vector<double> coordinates;  // n x 2 row-major
    double stress = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> stress_history;  // initial value plus one per iteration
    std::vector<std::pair<std::string, std::size_t>> labels;

    double x(std::size_t i) const { return coordinates[2 * i]; }
    double y(std::size_t i) const { return coordinates[2 * i + 1]; }
};

// Classical-MDS initialization refined by SMACOF majorization of the
// normalized stress sqrt(sum (d-delta)^2 / sum delta^2). The seed only
// matters when the classical solution is degenerate.
Embedding embed(const DissimilarityMatrix& d, std::uint64_t seed);

// Per-ranker RMS distance to the ranker's centroid; rankers with fewer than
// 2 points are omitted with a warning.
std::map<std::string, double> dispersion(const Embedding& e, WarningSink* warnings = nullptr);

}  // namespace rankstab
