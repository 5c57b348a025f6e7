#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace aqa {

// Tie-aware Spearman rank correlation: Pearson correlation of average
// ranks. Equals 1 - 6 sum(d^2) / (n (n^2 - 1)) when there are no ties.
// Throws on constant inputs, where the correlation is undefined.
double spearman_rho(const std::vector<double>& pred, const std::vector<double>& truth);

// Average ranks in 1..n, tied values sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

// Mean squared error in (denormalized) score units.
double mean_squared_error(const std::vector<double>& pred, const std::vector<double>& truth);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

// Set overlap metrics for faulty-clip detection. An empty predicted set
// has precision 1 when the truth is also empty, else 0; an empty truth
// set has recall 1.
PrecisionRecall precision_recall(const std::set<std::size_t>& predicted,
                                 const std::set<std::size_t>& truth);

struct EvalReport {
    double rho = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
    std::map<int, double> rho_per_type;  // types with at least 2 samples
    std::map<int, double> mse_per_type;

    std::string to_json() const;
    std::string to_csv() const;
};

EvalReport evaluate_scores(const std::vector<double>& pred, const std::vector<double>& truth,
                           const std::vector<int>& action_types);

}  // namespace aqa
