#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "adast/data/record.hpp"

namespace adast::data {

/// Drops the first and last recorded day, any day without a sleep score, and
/// the named feature columns (names that are absent are ignored).
inline SubjectDataset clean(const SubjectDataset& dataset, const std::vector<std::string>& drop_features = {}) {
    if (dataset.records.size() < 3)
        throw TooShortError("subject " + std::to_string(dataset.subject_id) + " has " +
                            std::to_string(dataset.records.size()) + " records; at least 3 are required");
    std::vector<bool> keep(dataset.feature_names.size(), true);
    for (std::size_t f = 0; f < keep.size(); ++f)
        for (const auto& d : drop_features)
            if (dataset.feature_names[f] == d) keep[f] = false;

    SubjectDataset out;
    out.subject_id = dataset.subject_id;
    for (std::size_t f = 0; f < keep.size(); ++f)
        if (keep[f]) out.feature_names.push_back(dataset.feature_names[f]);
    for (std::size_t i = 1; i + 1 < dataset.records.size(); ++i) {
        const DailyRecord& r = dataset.records[i];
        if (is_missing(r.sleep_score)) continue;
        DailyRecord c{r.date, {}, r.sleep_score};
        c.features.reserve(out.feature_names.size());
        for (std::size_t f = 0; f < keep.size(); ++f)
            if (keep[f]) c.features.push_back(r.features[f]);
        out.records.push_back(std::move(c));
    }
    return out;
}

/// Replaces missing feature values with the subject's own column mean.
/// A column with no observed value becomes 0.0 and a warning is appended.
inline std::vector<SubjectDataset> impute_mean(std::vector<SubjectDataset> datasets, std::vector<std::string>& warnings) {
    for (auto& ds : datasets) {
        for (std::size_t f = 0; f < ds.feature_count(); ++f) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : ds.records)
                if (!is_missing(r.features[f])) {
                    sum += r.features[f];
                    ++n;
                }
            double fill = 0.0;
            if (n > 0)
                fill = sum / static_cast<double>(n);
            else if (!ds.records.empty())
                warnings.push_back("subject " + std::to_string(ds.subject_id) + ": feature '" + ds.feature_names[f] +
                                   "' is entirely missing; filled with 0.0");
            for (auto& r : ds.records)
                if (is_missing(r.features[f])) r.features[f] = fill;
        }
    }
    return datasets;
}

inline std::vector<SubjectDataset> impute_mean(std::vector<SubjectDataset> datasets) {
    std::vector<std::string> warnings;
    auto out = impute_mean(std::move(datasets), warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return out;
}

inline constexpr double kScoreScale = 100.0;
inline constexpr double kMinStd = 1e-8;

/// Feature z-scoring fitted on training subjects, plus fixed target scaling.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;
    double target_scale = kScoreScale;
    std::set<int> fitted_subjects;  // lineage: which subjects contributed statistics

    double normalize_feature(std::size_t f, double v) const { return (v - mean[f]) / stddev[f]; }
    double denormalize_feature(std::size_t f, double z) const { return z * stddev[f] + mean[f]; }
    double normalize_score(double s) const { return s / target_scale; }
    double denormalize_score(double s) const { return s * target_scale; }
};

inline Normalizer fit_normalizer(const std::vector<SubjectDataset>& train) {
    std::size_t rows = 0;
    for (const auto& ds : train) rows += ds.records.size();
    if (train.empty() || rows == 0) throw FitError("fit_normalizer: empty training set");
    const std::size_t nf = train.front().feature_count();
    Normalizer norm;
    norm.mean.assign(nf, 0.0);
    norm.stddev.assign(nf, 0.0);
    for (const auto& ds : train) {
        if (ds.feature_count() != nf) throw DimensionError("fit_normalizer: subjects disagree on feature count");
        norm.fitted_subjects.insert(ds.subject_id);
        for (const auto& r : ds.records)
            for (std::size_t f = 0; f < nf; ++f) norm.mean[f] += r.features[f];
    }
    for (double& m : norm.mean) m /= static_cast<double>(rows);
    for (const auto& ds : train)
        for (const auto& r : ds.records)
            for (std::size_t f = 0; f < nf; ++f) {
                const double d = r.features[f] - norm.mean[f];
                norm.stddev[f] += d * d;
            }
    for (double& s : norm.stddev) s = std::max(kMinStd, std::sqrt(s / static_cast<double>(rows)));
    return norm;
}

inline std::vector<SubjectDataset> apply_normalizer(const Normalizer& norm, std::vector<SubjectDataset> datasets) {
    for (auto& ds : datasets) {
        if (ds.feature_count() != norm.mean.size())
            throw DimensionError("apply_normalizer: feature count does not match the fitted normalizer");
        for (auto& r : ds.records) {
            for (std::size_t f = 0; f < r.features.size(); ++f) r.features[f] = norm.normalize_feature(f, r.features[f]);
            r.sleep_score = norm.normalize_score(r.sleep_score);
        }
    }
    return datasets;
}

inline std::vector<SubjectDataset> invert_normalizer(const Normalizer& norm, std::vector<SubjectDataset> datasets) {
    for (auto& ds : datasets)
        for (auto& r : ds.records) {
            for (std::size_t f = 0; f < r.features.size(); ++f)
                r.features[f] = norm.denormalize_feature(f, r.features[f]);
            r.sleep_score = norm.denormalize_score(r.sleep_score);
        }
    return datasets;
}

}  // namespace adast::data
