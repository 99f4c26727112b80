// Command-line surface of the vessel-topology toolkit.
//
// Subcommands:
//   eval        score a directory of predicted masks against ground truth
//   repair      bridge skeleton-endpoint gaps in every mask of a directory
//   fragment    synthesize broken variants of intact masks
//   skeletonize thin one mask to its centerline
//   pipeline    fragment -> repair -> before/after report, in one run
//   synth       write the built-in demo corpus (useful as pipeline input)
//
// Every subcommand accepts --config FILE (JSON whose keys mirror the long
// flag names); explicit flags override config values. Errors print a single
// "ErrorKind: message" line on stderr and exit non-zero.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vtopo/vtopo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- shared option plumbing -------------------------------------------------

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw vtopo::ParseError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw vtopo::ParseError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw vtopo::ParseError("config file must hold a JSON object");
    return j;
}

// Fills `value` from the config key of the same name unless the flag was
// given explicitly on the command line.
template <typename T>
void merge_option(const json& cfg, const CLI::App* sub, const std::string& name, T& value) {
    if (sub->count("--" + name) > 0) return;
    if (!cfg.contains(name)) return;
    try {
        value = cfg.at(name).get<T>();
    } catch (const json::exception&) {
        throw vtopo::ParseError("config key '" + name + "' has the wrong type");
    }
}

void require_set(const std::string& value, const char* flag) {
    if (value.empty())
        throw vtopo::DomainError(std::string("missing required option --") + flag);
}

vtopo::StdMode parse_std_mode(const std::string& s) {
    if (s == "population") return vtopo::StdMode::Population;
    if (s == "sample") return vtopo::StdMode::Sample;
    throw vtopo::DomainError("--std must be 'population' or 'sample', got '" + s + "'");
}

void check_table_format(const std::string& s) {
    if (s != "csv" && s != "md")
        throw vtopo::DomainError("--out must be 'csv' or 'md', got '" + s + "'");
}

// --width accepts "dt" or "fixed:R" (R a non-negative pixel radius).
void parse_width(const std::string& s, vtopo::RepairParams& params) {
    if (s == "dt") {
        params.width_mode = vtopo::WidthMode::DistanceTransform;
        return;
    }
    if (s.rfind("fixed:", 0) == 0) {
        const std::string digits = s.substr(6);
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
            params.width_mode = vtopo::WidthMode::Fixed;
            params.fixed_radius = std::stoi(digits);
            return;
        }
    }
    throw vtopo::DomainError("--width must be 'dt' or 'fixed:R', got '" + s + "'");
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Masks are listed exactly as the library does for eval: every non-hidden
// regular file except *.csv sidecars.
std::vector<std::string> mask_files(const fs::path& dir) {
    return vtopo::detail::list_mask_files(dir);
}

void print_aggregate(const vtopo::MetricReport& report, const std::string& format) {
    if (format == "md")
        vtopo::write_aggregate_markdown(std::cout, report);
    else
        vtopo::write_aggregate_csv(std::cout, report);
}

// --- subcommand handlers ------------------------------------------------------

int run_eval(const std::string& pred, const std::string& gt, const vtopo::EvalOptions& opt,
             const std::string& table_format) {
    const vtopo::MetricReport report = vtopo::evaluate_dataset(pred, gt, opt);
    vtopo::write_per_image_csv(std::cout, report);
    std::cout << "\n";
    print_aggregate(report, table_format);
    return 0;
}

int run_repair(const std::string& in_dir, const std::string& out_dir,
               const vtopo::RepairParams& params) {
    fs::create_directories(out_dir);
    const std::vector<std::string> names = mask_files(in_dir);
    if (names.empty())
        throw vtopo::EmptyInputError("repair: no mask files in " + in_dir);

    std::size_t total_bridges = 0;
    for (const std::string& name : names) {
        const fs::path src = fs::path(in_dir) / name;
        const vtopo::PnmFormat format = vtopo::peek_pnm_format(src);
        const vtopo::BinaryMask mask = vtopo::load_mask_file(src);
        const vtopo::RepairResult result = vtopo::repair_mask(mask, params);
        vtopo::save_mask_file(fs::path(out_dir) / name, result.mask, format);

        std::ofstream csv(fs::path(out_dir) / (name + ".bridges.csv"),
                          std::ios::binary | std::ios::trunc);
        csv << "ax,ay,bx,by,gap,score,radius\n";
        for (const vtopo::BridgeProposal& b : result.bridges)
            csv << b.a.pos.x << ',' << b.a.pos.y << ',' << b.b.pos.x << ',' << b.b.pos.y
                << ',' << fmt_full(b.gap) << ',' << fmt_full(b.score) << ',' << b.radius
                << '\n';
        total_bridges += result.bridges.size();
    }
    std::cout << "repaired " << names.size() << " mask(s), " << total_bridges
              << " bridge(s) drawn\n";
    return 0;
}

int run_fragment(const std::string& gt_dir, const std::string& out_dir,
                 const vtopo::FragmentParams& params) {
    fs::create_directories(out_dir);
    const std::vector<std::string> names = mask_files(gt_dir);
    if (names.empty())
        throw vtopo::EmptyInputError("fragment: no mask files in " + gt_dir);

    std::size_t total_breaks = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const fs::path src = fs::path(gt_dir) / names[i];
        const vtopo::PnmFormat format = vtopo::peek_pnm_format(src);
        const vtopo::BinaryMask gt = vtopo::load_mask_file(src);
        // per-file seed offset by the sorted index keeps every file's cuts
        // independent yet reproducible
        vtopo::FragmentParams p = params;
        p.seed = params.seed + i;
        const vtopo::FragmentResult result = vtopo::generate_breaks(gt, p);
        vtopo::save_mask_file(fs::path(out_dir) / names[i], result.mask, format);

        std::ofstream csv(fs::path(out_dir) / (names[i] + ".breaks.csv"),
                          std::ios::binary | std::ios::trunc);
        csv << "center_x,center_y,radius,cc_before,cc_after\n";
        for (const vtopo::BreakRecord& rec : result.records)
            csv << rec.center.x << ',' << rec.center.y << ',' << rec.radius << ','
                << rec.components_before << ',' << rec.components_after << '\n';
        total_breaks += result.records.size();
    }
    std::cout << "fragmented " << names.size() << " mask(s), " << total_breaks
              << " break(s) cut\n";
    return 0;
}

int run_skeletonize(const std::string& in_file, const std::string& out_file) {
    const vtopo::PnmFormat format = vtopo::peek_pnm_format(in_file);
    const vtopo::BinaryMask mask = vtopo::load_mask_file(in_file);
    vtopo::save_mask_file(out_file, vtopo::skeletonize(mask), format);
    return 0;
}

int run_pipeline_cmd(const std::string& gt_dir, const vtopo::FragmentParams& fp,
                     const vtopo::RepairParams& rp, const vtopo::EvalOptions& opt,
                     const std::string& table_format) {
    const vtopo::PipelineResult result = vtopo::run_pipeline(gt_dir, fp, rp, opt);
    std::cout << "== fragmented vs ground truth ==\n";
    print_aggregate(result.fragmented, table_format);
    std::cout << "\n== repaired vs ground truth ==\n";
    print_aggregate(result.repaired, table_format);
    char line[160];
    std::snprintf(line, sizeof line,
                  "\n%.1f%% improvement in connectivity (mean beta0 %.4f -> %.4f)\n",
                  result.beta0_improvement_pct, result.fragmented.summary.beta0.mean,
                  result.repaired.summary.beta0.mean);
    std::cout << line;
    return 0;
}

int run_synth(const std::string& out_dir, const std::string& format_name) {
    if (format_name != "p4" && format_name != "p5")
        throw vtopo::DomainError("--format must be 'p4' or 'p5', got '" + format_name + "'");
    const vtopo::PnmFormat format =
        format_name == "p4" ? vtopo::PnmFormat::P4 : vtopo::PnmFormat::P5;
    const char* ext = format_name == "p4" ? ".pbm" : ".pgm";
    fs::create_directories(out_dir);

    // the same deterministic strokes the test corpus uses
    struct Seg {
        vtopo::Pixel p, q;
        int r;
    };
    struct Shape {
        const char* name;
        std::vector<Seg> segs;
    };
    const std::vector<Shape> shapes = {
        {"horizontal", {{{10, 64}, {118, 64}, 3}}},
        {"diagonal", {{{14, 14}, {114, 114}, 3}}},
        {"elbow", {{{20, 100}, {20, 30}, 3}, {{20, 30}, {100, 30}, 3}}},
        {"bifurcation",
         {{{64, 118}, {64, 70}, 4}, {{64, 70}, {30, 20}, 3}, {{64, 70}, {98, 20}, 3}}},
        {"zigzag",
         {{{12, 68}, {32, 36}, 3},
          {{32, 36}, {52, 68}, 3},
          {{52, 68}, {72, 36}, 3},
          {{72, 36}, {92, 68}, 3},
          {{92, 68}, {112, 36}, 3}}},
        {"crossing", {{{20, 20}, {108, 108}, 3}, {{108, 20}, {20, 108}, 3}}},
        {"vertical", {{{64, 10}, {64, 118}, 3}}},
        {"tree",
         {{{64, 120}, {64, 82}, 4},
          {{64, 82}, {38, 50}, 3},
          {{64, 82}, {90, 50}, 3},
          {{38, 50}, {24, 22}, 3},
          {{38, 50}, {50, 16}, 3},
          {{90, 50}, {78, 16}, 3},
          {{90, 50}, {104, 22}, 3}}},
        {"arc",
         {{{19, 70}, {25, 48}, 3},
          {{25, 48}, {41, 31}, 3},
          {{41, 31}, {64, 25}, 3},
          {{64, 25}, {87, 31}, 3},
          {{87, 31}, {103, 48}, 3},
          {{103, 48}, {109, 70}, 3}}},
        {"comb",
         {{{16, 30}, {112, 30}, 3},
          {{28, 30}, {28, 90}, 3},
          {{52, 30}, {52, 90}, 3},
          {{76, 30}, {76, 90}, 3},
          {{100, 30}, {100, 90}, 3}}},
    };

    for (const Shape& shape : shapes) {
        vtopo::BinaryMask m(128, 128);
        for (const Seg& s : shape.segs) m = vtopo::draw_bridge(m, s.p, s.q, s.r);
        vtopo::save_mask_file(fs::path(out_dir) / (shape.name + std::string(ext)), m,
                              format);
    }

    // close-but-separate vessels; a correct repair must leave this untouched
    vtopo::BinaryMask parallel(64, 64);
    for (int x = 8; x <= 56; ++x) {
        parallel.at(x, 30) = 1;
        parallel.at(x, 34) = 1;
    }
    vtopo::save_mask_file(fs::path(out_dir) / (std::string("parallel") + ext), parallel,
                          format);

    std::cout << "wrote " << shapes.size() + 1 << " masks to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vessel-topology toolkit: evaluate, fragment, and repair binary vessel masks"};
    app.require_subcommand(1);

    // eval
    auto* eval = app.add_subcommand("eval", "score predicted masks against ground truth");
    std::string eval_pred, eval_gt, eval_std = "population", eval_out = "csv",
                             eval_config;
    vtopo::EvalOptions eval_opt;
    eval->add_option("--pred", eval_pred, "directory of predicted masks");
    eval->add_option("--gt", eval_gt, "directory of ground-truth masks");
    eval->add_option("--patch", eval_opt.patch_size, "beta0 patch size (default 64)");
    eval->add_option("--conn", eval_opt.connectivity, "connectivity, 4 or 8 (default 8)");
    eval->add_option("--std", eval_std, "std flavor: population|sample");
    eval->add_option("--out", eval_out, "aggregate table format: csv|md");
    eval->add_option("--threads", eval_opt.threads, "worker threads (0 = auto)");
    eval->add_option("--config", eval_config, "JSON config file (keys mirror flags)");

    // repair
    auto* repair = app.add_subcommand("repair", "bridge endpoint gaps in masks");
    std::string repair_in, repair_out, repair_width = "dt", repair_config;
    vtopo::RepairParams repair_params;
    repair->add_option("--in", repair_in, "directory of masks to repair");
    repair->add_option("--out", repair_out, "output directory");
    repair->add_option("--dmax", repair_params.d_max, "max bridgeable gap (default 20)");
    repair->add_option("--cos", repair_params.cos_min,
                       "mutual alignment threshold (default 0.5)");
    repair->add_option("--width", repair_width, "bridge width: dt|fixed:R");
    repair->add_option("--config", repair_config, "JSON config file");

    // fragment
    auto* fragment = app.add_subcommand("fragment", "cut breaks into intact masks");
    std::string fragment_gt, fragment_out, fragment_config;
    vtopo::FragmentParams fragment_params;
    fragment->add_option("--gt", fragment_gt, "directory of intact masks");
    fragment->add_option("--out", fragment_out, "output directory");
    fragment->add_option("--breaks", fragment_params.breaks, "breaks per mask (default 3)");
    fragment->add_option("--rmin", fragment_params.min_radius, "min cut radius (default 2)");
    fragment->add_option("--rmax", fragment_params.max_radius, "max cut radius (default 5)");
    fragment->add_option("--seed", fragment_params.seed, "base seed (default 0)");
    fragment->add_option("--config", fragment_config, "JSON config file");

    // skeletonize
    auto* skel = app.add_subcommand("skeletonize", "thin one mask to its centerline");
    std::string skel_in, skel_out, skel_config;
    skel->add_option("--in", skel_in, "input mask file");
    skel->add_option("--out", skel_out, "output mask file");
    skel->add_option("--config", skel_config, "JSON config file");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline",
                                    "fragment, repair, and report before/after metrics");
    std::string pipe_gt, pipe_width = "dt", pipe_std = "population", pipe_out = "csv",
                         pipe_config;
    vtopo::FragmentParams pipe_fp;
    vtopo::RepairParams pipe_rp;
    vtopo::EvalOptions pipe_opt;
    pipe->add_option("--gt", pipe_gt, "directory of intact masks");
    pipe->add_option("--breaks", pipe_fp.breaks, "breaks per mask (default 3)");
    pipe->add_option("--rmin", pipe_fp.min_radius, "min cut radius (default 2)");
    pipe->add_option("--rmax", pipe_fp.max_radius, "max cut radius (default 5)");
    pipe->add_option("--seed", pipe_fp.seed, "base seed (default 0)");
    pipe->add_option("--dmax", pipe_rp.d_max, "max bridgeable gap (default 20)");
    pipe->add_option("--cos", pipe_rp.cos_min, "mutual alignment threshold (default 0.5)");
    pipe->add_option("--width", pipe_width, "bridge width: dt|fixed:R");
    pipe->add_option("--patch", pipe_opt.patch_size, "beta0 patch size (default 64)");
    pipe->add_option("--conn", pipe_opt.connectivity, "connectivity, 4 or 8 (default 8)");
    pipe->add_option("--std", pipe_std, "std flavor: population|sample");
    pipe->add_option("--out", pipe_out, "table format: csv|md");
    pipe->add_option("--threads", pipe_opt.threads, "worker threads (0 = auto)");
    pipe->add_option("--config", pipe_config, "JSON config file");

    // synth
    auto* synth = app.add_subcommand("synth", "write the built-in demo mask corpus");
    std::string synth_out, synth_format = "p5", synth_config;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--format", synth_format, "mask format: p4|p5 (default p5)");
    synth->add_option("--config", synth_config, "JSON config file");

    try {
        app.parse(argc, argv);

        if (eval->parsed()) {
            const json cfg = load_config(eval_config);
            merge_option(cfg, eval, "pred", eval_pred);
            merge_option(cfg, eval, "gt", eval_gt);
            merge_option(cfg, eval, "patch", eval_opt.patch_size);
            merge_option(cfg, eval, "conn", eval_opt.connectivity);
            merge_option(cfg, eval, "std", eval_std);
            merge_option(cfg, eval, "out", eval_out);
            merge_option(cfg, eval, "threads", eval_opt.threads);
            require_set(eval_pred, "pred");
            require_set(eval_gt, "gt");
            eval_opt.std_mode = parse_std_mode(eval_std);
            check_table_format(eval_out);
            return run_eval(eval_pred, eval_gt, eval_opt, eval_out);
        }
        if (repair->parsed()) {
            const json cfg = load_config(repair_config);
            merge_option(cfg, repair, "in", repair_in);
            merge_option(cfg, repair, "out", repair_out);
            merge_option(cfg, repair, "dmax", repair_params.d_max);
            merge_option(cfg, repair, "cos", repair_params.cos_min);
            merge_option(cfg, repair, "width", repair_width);
            require_set(repair_in, "in");
            require_set(repair_out, "out");
            parse_width(repair_width, repair_params);
            return run_repair(repair_in, repair_out, repair_params);
        }
        if (fragment->parsed()) {
            const json cfg = load_config(fragment_config);
            merge_option(cfg, fragment, "gt", fragment_gt);
            merge_option(cfg, fragment, "out", fragment_out);
            merge_option(cfg, fragment, "breaks", fragment_params.breaks);
            merge_option(cfg, fragment, "rmin", fragment_params.min_radius);
            merge_option(cfg, fragment, "rmax", fragment_params.max_radius);
            merge_option(cfg, fragment, "seed", fragment_params.seed);
            require_set(fragment_gt, "gt");
            require_set(fragment_out, "out");
            return run_fragment(fragment_gt, fragment_out, fragment_params);
        }
        if (skel->parsed()) {
            const json cfg = load_config(skel_config);
            merge_option(cfg, skel, "in", skel_in);
            merge_option(cfg, skel, "out", skel_out);
            require_set(skel_in, "in");
            require_set(skel_out, "out");
            return run_skeletonize(skel_in, skel_out);
        }
        if (pipe->parsed()) {
            const json cfg = load_config(pipe_config);
            merge_option(cfg, pipe, "gt", pipe_gt);
            merge_option(cfg, pipe, "breaks", pipe_fp.breaks);
            merge_option(cfg, pipe, "rmin", pipe_fp.min_radius);
            merge_option(cfg, pipe, "rmax", pipe_fp.max_radius);
            merge_option(cfg, pipe, "seed", pipe_fp.seed);
            merge_option(cfg, pipe, "dmax", pipe_rp.d_max);
            merge_option(cfg, pipe, "cos", pipe_rp.cos_min);
            merge_option(cfg, pipe, "width", pipe_width);
            merge_option(cfg, pipe, "patch", pipe_opt.patch_size);
            merge_option(cfg, pipe, "conn", pipe_opt.connectivity);
            merge_option(cfg, pipe, "std", pipe_std);
            merge_option(cfg, pipe, "out", pipe_out);
            merge_option(cfg, pipe, "threads", pipe_opt.threads);
            require_set(pipe_gt, "gt");
            pipe_opt.std_mode = parse_std_mode(pipe_std);
            check_table_format(pipe_out);
            parse_width(pipe_width, pipe_rp);
            return run_pipeline_cmd(pipe_gt, pipe_fp, pipe_rp, pipe_opt, pipe_out);
        }
        if (synth->parsed()) {
            const json cfg = load_config(synth_config);
            merge_option(cfg, synth, "out", synth_out);
            merge_option(cfg, synth, "format", synth_format);
            require_set(synth_out, "out");
            return run_synth(synth_out, synth_format);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const vtopo::Error& e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
}
