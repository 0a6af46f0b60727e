#pragma once

#include <numeric>
#include <vector>

#include "adast/data/record.hpp"
#include "adast/rng.hpp"
#include "adast/tensor.hpp"

namespace adast::windowing {

struct WindowConfig {
    std::size_t input_window = 7;  // W, days fed to the model
    std::size_t horizon = 1;       // H, days predicted
    std::size_t stride = 1;        // s, days between window starts

    void validate() const {
        if (input_window < 1 || horizon < 1 || stride < 1)
            throw ParameterError("window config requires W >= 1, H >= 1, stride >= 1");
    }
};

/// One supervised example: W days of features, the following H days of scores.
struct WindowedInstance {
    Tensor x;  // [W, F]
    Tensor y;  // [H]
    int subject_id = 0;  // domain label and lineage tag
    data::Date start;    // first input day
    data::Date first_target;
};

/// Runs of consecutive calendar days, as [begin, end) record index ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> contiguous_segments(const data::SubjectDataset& ds) {
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= ds.records.size(); ++i) {
        if (i == ds.records.size() || (ds.records[i].date - ds.records[i - 1].date).count() != 1) {
            if (i > begin) segments.emplace_back(begin, i);
            begin = i;
        }
    }
    return segments;
}

/// Number of windows a contiguous run of n days yields.
inline std::size_t window_count(std::size_t n, const WindowConfig& cfg) {
    if (n < cfg.input_window + cfg.horizon) return 0;
    return (n - cfg.input_window - cfg.horizon) / cfg.stride + 1;
}

/// Sliding windows over each contiguous segment, ordered by start day.
inline std::vector<WindowedInstance> slide(const data::SubjectDataset& ds, const WindowConfig& cfg) {
    cfg.validate();
    const std::size_t w = cfg.input_window, h = cfg.horizon, nf = ds.feature_count();
    std::vector<WindowedInstance> out;
    for (const auto& [begin, end] : contiguous_segments(ds)) {
        const std::size_t count = window_count(end - begin, cfg);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t s = begin + k * cfg.stride;
            WindowedInstance inst{Tensor({w, nf}), Tensor({h}), ds.subject_id, ds.records[s].date,
                                  ds.records[s + w].date};
            for (std::size_t t = 0; t < w; ++t)
                for (std::size_t f = 0; f < nf; ++f) inst.x.at(t, f) = ds.records[s + t].features[f];
            for (std::size_t j = 0; j < h; ++j) inst.y[j] = ds.records[s + w + j].sleep_score;
            out.push_back(std::move(inst));
        }
    }
    return out;
}

struct Batch {
    Tensor x;                   // [B, W, F]
    Tensor y;                   // [B, H]
    std::vector<int> subjects;  // [B] subject ids (domain labels)
    std::vector<std::size_t> indices;  // positions in the source instance list

    std::size_t size() const { return subjects.size(); }
};

inline Batch make_batch(const std::vector<WindowedInstance>& instances, const std::vector<std::size_t>& idx) {
    const auto& first = instances[idx.front()];
    const std::size_t w = first.x.dim(0), nf = first.x.dim(1), h = first.y.dim(0);
    Batch b{Tensor({idx.size(), w, nf}), Tensor({idx.size(), h}), {}, idx};
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& inst = instances[idx[i]];
        if (inst.x.shape() != first.x.shape() || inst.y.shape() != first.y.shape())
            throw DimensionError("batch: instances have inconsistent window shapes");
        std::copy(inst.x.ptr(), inst.x.ptr() + w * nf, b.x.ptr() + i * w * nf);
        std::copy(inst.y.ptr(), inst.y.ptr() + h, b.y.ptr() + i * h);
        b.subjects.push_back(inst.subject_id);
    }
    return b;
}

/// Every instance appears exactly once; the final partial batch is kept.
inline std::vector<Batch> batch(const std::vector<WindowedInstance>& instances, std::size_t batch_size, Rng& rng,
                                bool shuffle) {
    if (batch_size < 1) throw ParameterError("batch_size must be at least 1");
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) rng.shuffle(order);
    std::vector<Batch> out;
    for (std::size_t i = 0; i < order.size(); i += batch_size) {
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(i),
                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
        out.push_back(make_batch(instances, idx));
    }
    return out;
}

}  // namespace adast::windowing
