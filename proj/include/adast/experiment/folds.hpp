#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "adast/data/csv.hpp"
#include "adast/data/preprocess.hpp"
#include "adast/data/synthetic.hpp"
#include "adast/windowing.hpp"

namespace adast::experiment {

/// Test subject i, validation subject q, the remaining N-2 subjects for training.
struct FoldSpec {
    std::size_t index = 0;
    int test_subject = 0;
    int val_subject = 0;
    std::vector<int> train_subjects;
};

/// One fold per subject as test; validation is the next id after it in sorted order, cyclically.
inline std::vector<FoldSpec> loso_folds(std::vector<int> subject_ids) {
    std::sort(subject_ids.begin(), subject_ids.end());
    subject_ids.erase(std::unique(subject_ids.begin(), subject_ids.end()), subject_ids.end());
    if (subject_ids.size() < 3)
        throw ParameterError("LOSO needs at least 3 subjects, got " + std::to_string(subject_ids.size()));
    std::vector<FoldSpec> folds;
    const std::size_t n = subject_ids.size();
    for (std::size_t i = 0; i < n; ++i) {
        FoldSpec f{i, subject_ids[i], subject_ids[(i + 1) % n], {}};
        for (int id : subject_ids)
            if (id != f.test_subject && id != f.val_subject) f.train_subjects.push_back(id);
        folds.push_back(std::move(f));
    }
    return folds;
}

/// Subject id -> domain class index, over every subject in the dataset.
class DomainMap {
public:
    DomainMap() = default;
    explicit DomainMap(std::vector<int> ids) : ids_(std::move(ids)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }

    std::size_t size() const { return ids_.size(); }
    const std::vector<int>& ids() const { return ids_; }

    int label(int subject) const {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), subject);
        if (it == ids_.end() || *it != subject)
            throw LabelError("subject " + std::to_string(subject) + " is not a known domain");
        return static_cast<int>(it - ids_.begin());
    }

    std::vector<int> labels(const std::vector<int>& subjects) const {
        std::vector<int> out;
        out.reserve(subjects.size());
        for (int s : subjects) out.push_back(label(s));
        return out;
    }

private:
    std::vector<int> ids_;
};

/// Cleaned and imputed raw-unit datasets, sorted by subject id.
struct PreparedData {
    std::vector<data::SubjectDataset> subjects;
    std::vector<std::string> feature_names;
    std::vector<std::string> warnings;

    std::vector<int> subject_ids() const {
        std::vector<int> ids;
        for (const auto& s : subjects) ids.push_back(s.subject_id);
        return ids;
    }

    const data::SubjectDataset& subject(int id) const {
        for (const auto& s : subjects)
            if (s.subject_id == id) return s;
        throw ParameterError("unknown subject " + std::to_string(id));
    }
};

inline PreparedData prepare(std::vector<data::SubjectDataset> raw, const std::vector<std::string>& drop_features = {}) {
    if (raw.empty()) throw ParameterError("prepare: no subjects");
    PreparedData out;
    raw = data::mark_sentinels_missing(std::move(raw));
    std::vector<data::SubjectDataset> cleaned;
    for (const auto& ds : raw) cleaned.push_back(data::clean(ds, drop_features));
    out.subjects = data::impute_mean(std::move(cleaned), out.warnings);
    std::sort(out.subjects.begin(), out.subjects.end(),
              [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });
    out.feature_names = out.subjects.front().feature_names;
    for (const auto& s : out.subjects)
        if (s.feature_names != out.feature_names) throw DimensionError("prepare: subjects disagree on feature columns");
    return out;
}

/// Normalized windows for one fold. The normalizer sees training subjects only.
struct FoldData {
    FoldSpec spec;
    data::Normalizer normalizer;
    std::vector<windowing::WindowedInstance> train;
    std::vector<windowing::WindowedInstance> val;
    std::vector<windowing::WindowedInstance> test;
};

inline FoldData build_fold_data(const PreparedData& prepared, const FoldSpec& fold, const windowing::WindowConfig& cfg) {
    FoldData out{fold, {}, {}, {}, {}};
    std::vector<data::SubjectDataset> train_sets;
    for (int id : fold.train_subjects) train_sets.push_back(prepared.subject(id));
    out.normalizer = data::fit_normalizer(train_sets);
    auto windows_for = [&](std::vector<data::SubjectDataset> sets) {
        std::vector<windowing::WindowedInstance> all;
        for (const auto& ds : data::apply_normalizer(out.normalizer, std::move(sets))) {
            auto w = windowing::slide(ds, cfg);
            std::move(w.begin(), w.end(), std::back_inserter(all));
        }
        return all;
    };
    out.train = windows_for(std::move(train_sets));
    out.val = windows_for({prepared.subject(fold.val_subject)});
    out.test = windows_for({prepared.subject(fold.test_subject)});
    return out;
}

/// Throws unless every lineage tag respects the fold split.
inline void verify_lineage(const FoldData& fd) {
    const std::set<int> train(fd.spec.train_subjects.begin(), fd.spec.train_subjects.end());
    if (fd.normalizer.fitted_subjects != train)
        throw Error("lineage: normalizer was fitted on subjects outside the training split");
    if (train.count(fd.spec.test_subject) || train.count(fd.spec.val_subject) ||
        fd.spec.test_subject == fd.spec.val_subject)
        throw Error("lineage: fold groups overlap");
    for (const auto& inst : fd.train)
        if (!train.count(inst.subject_id))
            throw Error("lineage: training window from subject " + std::to_string(inst.subject_id));
    for (const auto& inst : fd.val)
        if (inst.subject_id != fd.spec.val_subject) throw Error("lineage: foreign window in validation split");
    for (const auto& inst : fd.test)
        if (inst.subject_id != fd.spec.test_subject) throw Error("lineage: foreign window in test split");
}

}  // namespace adast::experiment
