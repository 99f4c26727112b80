#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "vtopo/errors.hpp"
#include "vtopo/fragment.hpp"
#include "vtopo/mask.hpp"
#include "vtopo/metrics.hpp"
#include "vtopo/pnm.hpp"
#include "vtopo/repair.hpp"

namespace vtopo {

struct EvalOptions {
    int patch_size = 64;
    int connectivity = 8;
    StdMode std_mode = StdMode::Population;
    unsigned threads = 0; // 0 = hardware concurrency
};

namespace detail {

// Non-hidden regular files in a directory, sorted by filename. *.csv is
// excluded: the repair/fragment tools drop per-mask CSV sidecars next to
// their outputs, and those directories must stay usable as mask inputs.
inline std::vector<std::string> list_mask_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ParseError("not a directory: " + dir.string());
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (!name.empty() && name[0] == '.') continue;
        if (name.size() >= 4 && name.compare(name.size() - 4, 4, ".csv") == 0) continue;
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

// Filenames must match one-to-one; anything unmatched is an error that
// names the offenders.
inline std::vector<std::string> paired_names(const std::filesystem::path& pred_dir,
                                             const std::filesystem::path& gt_dir) {
    const std::vector<std::string> pred = list_mask_files(pred_dir);
    const std::vector<std::string> gt = list_mask_files(gt_dir);

    std::vector<std::string> pred_only, gt_only;
    std::set_difference(pred.begin(), pred.end(), gt.begin(), gt.end(),
                        std::back_inserter(pred_only));
    std::set_difference(gt.begin(), gt.end(), pred.begin(), pred.end(),
                        std::back_inserter(gt_only));
    if (!pred_only.empty() || !gt_only.empty()) {
        std::string msg = "dataset directories do not pair up;";
        if (!pred_only.empty()) {
            msg += " only in predictions:";
            for (const auto& n : pred_only) msg += " " + n;
            msg += ";";
        }
        if (!gt_only.empty()) {
            msg += " only in ground truth:";
            for (const auto& n : gt_only) msg += " " + n;
        }
        throw PairingError(msg);
    }
    return pred;
}

// Runs fn(i) for i in [0, n) on the requested number of threads. The first
// exception wins and is rethrown after all workers stop.
template <typename Fn>
inline void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    cursor.store(n); // stop handing out work
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline MetricRow score_pair(const std::string& image_id, const BinaryMask& pred,
                            const BinaryMask& gt, const EvalOptions& opt) {
    require_same_shape(pred, gt, image_id.c_str());
    MetricRow row;
    row.image_id = image_id;
    row.dice = dice(pred, gt);
    row.iou = iou(pred, gt);
    row.cldice = cldice(pred, gt);
    row.beta0 = betti0_normalized(pred, gt, opt.patch_size, opt.connectivity);
    return row;
}

} // namespace detail

// Scores every identically-named mask pair between two directories.
// Per-image rows come back sorted by filename and the work is split across
// threads; results are identical for every thread count.
inline MetricReport evaluate_dataset(const std::filesystem::path& pred_dir,
                                     const std::filesystem::path& gt_dir,
                                     const EvalOptions& opt = {}) {
    const std::vector<std::string> names = detail::paired_names(pred_dir, gt_dir);
    if (names.empty())
        throw EmptyInputError("evaluate_dataset: no mask files in " + pred_dir.string());

    MetricReport report;
    report.patch_size = opt.patch_size;
    report.connectivity = opt.connectivity;
    report.per_image.resize(names.size());
    detail::parallel_for(names.size(), opt.threads, [&](std::size_t i) {
        const BinaryMask pred = load_mask_file(pred_dir / names[i]);
        const BinaryMask gt = load_mask_file(gt_dir / names[i]);
        report.per_image[i] = detail::score_pair(names[i], pred, gt, opt);
    });
    report.summary = aggregate(report.per_image, opt.std_mode);
    return report;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Full-precision decimal form that round-trips to the same double.
inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string beta0_label(const MetricReport& r) {
    return "beta0[patch=" + std::to_string(r.patch_size) +
           ",conn=" + std::to_string(r.connectivity) + "]";
}

} // namespace detail

// Per-image CSV: image_id,dice,iou,cldice,beta0 at full precision.
inline void write_per_image_csv(std::ostream& os, const MetricReport& report) {
    os << "image_id,dice,iou,cldice,beta0\n";
    for (const MetricRow& row : report.per_image) {
        os << detail::csv_escape(row.image_id) << ',' << detail::fmt_full(row.dice) << ','
           << detail::fmt_full(row.iou) << ',' << detail::fmt_full(row.cldice) << ','
           << detail::fmt_full(row.beta0) << '\n';
    }
}

// Aggregate CSV: metric,mean,std,n. The beta0 row is labeled with the
// patch size and connectivity it was computed under.
inline void write_aggregate_csv(std::ostream& os, const MetricReport& report) {
    const MetricAggregate& a = report.summary;
    const auto line = [&](const std::string& name, const MetricStats& s) {
        os << name << ',' << detail::fmt_full(s.mean) << ',' << detail::fmt_full(s.stdev)
           << ',' << a.n << '\n';
    };
    os << "metric,mean,std,n\n";
    line("dice", a.dice);
    line("iou", a.iou);
    line("cldice", a.cldice);
    line(detail::beta0_label(report), a.beta0);
}

// Aggregate as a two-decimal "mean ± std" markdown table.
inline void write_aggregate_markdown(std::ostream& os, const MetricReport& report) {
    const MetricAggregate& a = report.summary;
    const auto cell = [](const MetricStats& s) {
        return detail::fmt_fixed2(s.mean) + " ± " + detail::fmt_fixed2(s.stdev);
    };
    os << "| metric | mean ± std |\n";
    os << "| --- | --- |\n";
    os << "| dice | " << cell(a.dice) << " |\n";
    os << "| iou | " << cell(a.iou) << " |\n";
    os << "| cldice | " << cell(a.cldice) << " |\n";
    os << "| " << detail::beta0_label(report) << " | " << cell(a.beta0) << " |\n";
}

struct PipelineResult {
    MetricReport fragmented; // fragmented vs ground truth
    MetricReport repaired;   // repaired vs ground truth
    // Percentage drop in mean beta0 achieved by repair; 0 when the
    // fragmented baseline is already 0.
    double beta0_improvement_pct = 0.0;
};

/// End-to-end degradation/repair study over a directory of intact masks:
// each mask is fragmented (per-file seed = params.seed + sorted file
// index, so runs are reproducible file-by-file), then repaired, and both
// stages are scored against the intact original.
inline PipelineResult run_pipeline(const std::filesystem::path& gt_dir,
                                   const FragmentParams& fragment_params,
                                   const RepairParams& repair_params,
                                   const EvalOptions& opt = {}) {
    const std::vector<std::string> names = detail::list_mask_files(gt_dir);
    if (names.empty())
        throw EmptyInputError("run_pipeline: no mask files in " + gt_dir.string());

    PipelineResult result;
    result.fragmented.patch_size = result.repaired.patch_size = opt.patch_size;
    result.fragmented.connectivity = result.repaired.connectivity = opt.connectivity;
    result.fragmented.per_image.resize(names.size());
    result.repaired.per_image.resize(names.size());

    detail::parallel_for(names.size(), opt.threads, [&](std::size_t i) {
        const BinaryMask gt = load_mask_file(gt_dir / names[i]);
        FragmentParams fp = fragment_params;
        fp.seed = fragment_params.seed + i;
        const FragmentResult broken = generate_breaks(gt, fp);
        const RepairResult fixed = repair_mask(broken.mask, repair_params);
        result.fragmented.per_image[i] = detail::score_pair(names[i], broken.mask, gt, opt);
        result.repaired.per_image[i] = detail::score_pair(names[i], fixed.mask, gt, opt);
    });

    result.fragmented.summary = aggregate(result.fragmented.per_image, opt.std_mode);
    result.repaired.summary = aggregate(result.repaired.per_image, opt.std_mode);
    const double before = result.fragmented.summary.beta0.mean;
    const double after = result.repaired.summary.beta0.mean;
    result.beta0_improvement_pct = before > 0.0 ? relative_improvement(before, after) : 0.0;
    return result;
}

} // namespace vtopo
