#include "aqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aqa/dataset.hpp"
#include "aqa/errors.hpp"
#include "json.hpp"

namespace aqa {

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size())
        throw ShapeError("spearman_rho: length mismatch");
    std::size_t n = pred.size();
    if (n < 2) throw ConfigError("spearman_rho: need at least 2 samples");

    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(pred) || constant(truth))
        throw NumericError("spearman_rho undefined: an input list is constant");

    auto ra = average_ranks(pred);
    auto rb = average_ranks(truth);

    double mean = (static_cast<double>(n) + 1.0) / 2.0;  // ranks always average to this
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double da = ra[k] - mean, db = rb[k] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    return cov / std::sqrt(var_a * var_b);
}

double mean_squared_error(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size())
        throw ShapeError("mean_squared_error: length mismatch");
    if (pred.empty()) throw ConfigError("mean_squared_error: empty input");
    double acc = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        double d = pred[k] - truth[k];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

PrecisionRecall precision_recall(const std::set<std::size_t>& predicted,
                                 const std::set<std::size_t>& truth) {
    std::size_t hits = 0;
    for (std::size_t idx : predicted) hits += truth.count(idx);

    PrecisionRecall pr;
    if (predicted.empty())
        pr.precision = truth.empty() ? 1.0 : 0.0;
    else
        pr.precision = static_cast<double>(hits) / static_cast<double>(predicted.size());
    if (truth.empty())
        pr.recall = 1.0;
    else
        pr.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    return pr;
}

EvalReport evaluate_scores(const std::vector<double>& pred, const std::vector<double>& truth,
                           const std::vector<int>& action_types) {
    if (pred.size() != truth.size() || pred.size() != action_types.size())
        throw ShapeError("evaluate_scores: length mismatch");
    EvalReport report;
    report.n = pred.size();
    report.rho = spearman_rho(pred, truth);
    report.mse = mean_squared_error(pred, truth);

    std::map<int, std::vector<std::size_t>> by_type;
    for (std::size_t k = 0; k < pred.size(); ++k) by_type[action_types[k]].push_back(k);
    for (const auto& [type, idx] : by_type) {
        if (idx.size() < 2) continue;
        std::vector<double> p, t;
        for (std::size_t k : idx) {
            p.push_back(pred[k]);
            t.push_back(truth[k]);
        }
        try {
            report.rho_per_type[type] = spearman_rho(p, t);
        } catch (const NumericError&) {
            // constant within a type: no per-type entry
        }
        report.mse_per_type[type] = mean_squared_error(p, t);
    }
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["rho"] = rho;
    j["mse"] = mse;
    nlohmann::ordered_json per_type = nlohmann::ordered_json::object();
    for (const auto& [type, value] : rho_per_type) {
        nlohmann::ordered_json entry;
        entry["rho"] = value;
        auto it = mse_per_type.find(type);
        if (it != mse_per_type.end()) entry["mse"] = it->second;
        per_type[std::to_string(type)] = entry;
    }
    j["per_type"] = per_type;
    return j.dump(2) + "\n";
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "metric,action_type,value\n";
    out << "rho,all," << format_double(rho) << "\n";
    out << "mse,all," << format_double(mse) << "\n";
    out << "n,all," << n << "\n";
    for (const auto& [type, value] : rho_per_type)
        out << "rho," << type << ',' << format_double(value) << "\n";
    for (const auto& [type, value] : mse_per_type)
        out << "mse," << type << ',' << format_double(value) << "\n";
    return out.str();
}

}  // namespace aqa
