#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "vtopo/eval.hpp"
#include "vtopo/fragment.hpp"
#include "vtopo/metrics.hpp"
#include "vtopo/pnm.hpp"
#include "support/shapes.hpp"

using namespace vtopo;
namespace fs = std::filesystem;

namespace {

// Self-cleaning scratch directory tree for dataset fixtures.
struct ScratchDirs {
    fs::path root;
    fs::path pred;
    fs::path gt;

    explicit ScratchDirs(const std::string& tag) {
        root = fs::temp_directory_path() / ("vtopo_test_" + tag);
        fs::remove_all(root);
        pred = root / "pred";
        gt = root / "gt";
        fs::create_directories(pred);
        fs::create_directories(gt);
    }
    ~ScratchDirs() { fs::remove_all(root); }
};

BinaryMask shifted(const BinaryMask& m, int dx) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y) && out.in_bounds(x + dx, y)) out.at(x + dx, y) = 1;
    return out;
}

} // namespace

TEST_CASE("evaluate_dataset on a perfect single pair") {
    ScratchDirs dirs("perfect");
    const auto corpus = testsupport::vessel_corpus();
    save_mask_file(dirs.pred / "a.pgm", corpus[0].mask, PnmFormat::P5);
    save_mask_file(dirs.gt / "a.pgm", corpus[0].mask, PnmFormat::P5);

    const MetricReport r = evaluate_dataset(dirs.pred, dirs.gt);
    REQUIRE(r.per_image.size() == 1);
    REQUIRE(r.per_image[0].image_id == "a.pgm");
    REQUIRE(r.per_image[0].dice == 1.0);
    REQUIRE(r.per_image[0].iou == 1.0);
    REQUIRE(r.per_image[0].cldice == 1.0);
    REQUIRE(r.per_image[0].beta0 == 0.0);
    REQUIRE(r.summary.dice.stdev == 0.0);
    REQUIRE(r.summary.n == 1);
}

TEST_CASE("evaluate_dataset pairing failures name the offenders") {
    ScratchDirs dirs("pairing");
    const auto corpus = testsupport::vessel_corpus();
    save_mask_file(dirs.pred / "a.pgm", corpus[0].mask, PnmFormat::P5);
    save_mask_file(dirs.gt / "a.pgm", corpus[0].mask, PnmFormat::P5);
    save_mask_file(dirs.pred / "extra.pgm", corpus[1].mask, PnmFormat::P5);

    try {
        evaluate_dataset(dirs.pred, dirs.gt);
        FAIL("expected PairingError");
    } catch (const PairingError& e) {
        REQUIRE(std::string(e.what()).find("extra.pgm") != std::string::npos);
        REQUIRE(e.kind() == "PairingError");
    }
}

TEST_CASE("evaluate_dataset rejects dimension mismatches by file name") {
    ScratchDirs dirs("shape");
    const auto corpus = testsupport::vessel_corpus();
    save_mask_file(dirs.pred / "weird.pgm", BinaryMask(10, 10), PnmFormat::P5);
    save_mask_file(dirs.gt / "weird.pgm", corpus[0].mask, PnmFormat::P5);
    try {
        evaluate_dataset(dirs.pred, dirs.gt);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        REQUIRE(std::string(e.what()).find("weird.pgm") != std::string::npos);
    }
}

TEST_CASE("evaluate_dataset aggregate equals recomputation from module metrics") {
    ScratchDirs dirs("agg");
    const auto corpus = testsupport::vessel_corpus();
    std::vector<MetricRow> expected;
    for (int i = 0; i < 5; ++i) {
        const std::string name = "img" + std::to_string(i) + ".pgm";
        const BinaryMask& gt = corpus[static_cast<std::size_t>(i)].mask;
        const BinaryMask pred = i % 2 == 0 ? shifted(gt, 1 + i) : gt;
        save_mask_file(dirs.pred / name, pred, PnmFormat::P5);
        save_mask_file(dirs.gt / name, gt, PnmFormat::P5);
        MetricRow row;
        row.image_id = name;
        row.dice = dice(pred, gt);
        row.iou = iou(pred, gt);
        row.cldice = cldice(pred, gt);
        row.beta0 = betti0_normalized(pred, gt);
        expected.push_back(row);
    }
    const MetricAggregate want = aggregate(expected);

    const MetricReport got = evaluate_dataset(dirs.pred, dirs.gt);
    REQUIRE(got.per_image.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(got.per_image[i].image_id == expected[i].image_id);
        REQUIRE(got.per_image[i].dice == expected[i].dice);
        REQUIRE(got.per_image[i].iou == expected[i].iou);
        REQUIRE(got.per_image[i].cldice == expected[i].cldice);
        REQUIRE(got.per_image[i].beta0 == expected[i].beta0);
    }
    REQUIRE(got.summary.dice.mean == want.dice.mean);
    REQUIRE(got.summary.beta0.stdev == want.beta0.stdev);
}

TEST_CASE("reports are identical across thread counts") {
    ScratchDirs dirs("threads");
    const auto corpus = testsupport::vessel_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::string name = corpus[i].name + ".pbm";
        const BinaryMask pred = i % 3 == 0 ? shifted(corpus[i].mask, 2) : corpus[i].mask;
        save_mask_file(dirs.pred / name, pred, PnmFormat::P4);
        save_mask_file(dirs.gt / name, corpus[i].mask, PnmFormat::P4);
    }

    std::vector<std::string> outputs;
    for (const unsigned threads : {1u, 2u, 8u}) {
        EvalOptions opt;
        opt.threads = threads;
        const MetricReport r = evaluate_dataset(dirs.pred, dirs.gt, opt);
        std::ostringstream os;
        write_per_image_csv(os, r);
        write_aggregate_csv(os, r);
        outputs.push_back(os.str());
    }
    REQUIRE(outputs[0] == outputs[1]);
    REQUIRE(outputs[0] == outputs[2]);
}

TEST_CASE("csv and markdown rendering") {
    MetricReport r;
    MetricRow row;
    row.image_id = "x.pgm";
    row.dice = 1.0;
    row.iou = 1.0;
    row.cldice = 1.0;
    row.beta0 = 0.0;
    r.per_image.push_back(row);
    r.summary = aggregate(r.per_image);
    r.patch_size = 64;
    r.connectivity = 8;

    std::ostringstream per_image;
    write_per_image_csv(per_image, r);
    REQUIRE(per_image.str() == "image_id,dice,iou,cldice,beta0\nx.pgm,1,1,1,0\n");

    std::ostringstream agg;
    write_aggregate_csv(agg, r);
    REQUIRE(agg.str() ==
            "metric,mean,std,n\n"
            "dice,1,0,1\n"
            "iou,1,0,1\n"
            "cldice,1,0,1\n"
            "beta0[patch=64,conn=8],0,0,1\n");

    std::ostringstream md;
    write_aggregate_markdown(md, r);
    REQUIRE(md.str() ==
            "| metric | mean ± std |\n"
            "| --- | --- |\n"
            "| dice | 1.00 ± 0.00 |\n"
            "| iou | 1.00 ± 0.00 |\n"
            "| cldice | 1.00 ± 0.00 |\n"
            "| beta0[patch=64,conn=8] | 0.00 ± 0.00 |\n");
}

TEST_CASE("run_pipeline with no breaks is a perfect round trip") {
    ScratchDirs dirs("pipe0");
    const auto corpus = testsupport::vessel_corpus();
    save_mask_file(dirs.gt / "a.pbm", corpus[0].mask, PnmFormat::P4);
    save_mask_file(dirs.gt / "b.pbm", corpus[1].mask, PnmFormat::P4);

    FragmentParams fp;
    fp.breaks = 0;
    const PipelineResult r = run_pipeline(dirs.gt, fp, {});
    REQUIRE(r.fragmented.summary.dice.mean == 1.0);
    REQUIRE(r.repaired.summary.dice.mean == 1.0);
    REQUIRE(r.fragmented.summary.beta0.mean == 0.0);
    REQUIRE(r.beta0_improvement_pct == 0.0);
}

TEST_CASE("run_pipeline repairs what fragmentation broke") {
    ScratchDirs dirs("pipe3");
    const auto corpus = testsupport::vessel_corpus();
    for (const auto& shape : corpus)
        save_mask_file(dirs.gt / (shape.name + ".pbm"), shape.mask, PnmFormat::P4);

    FragmentParams fp;
    fp.breaks = 3;
    fp.seed = 0;
    const PipelineResult r = run_pipeline(dirs.gt, fp, {});
    REQUIRE(r.fragmented.per_image.size() == corpus.size());
    REQUIRE(r.fragmented.summary.beta0.mean > 0.0);
    REQUIRE(r.repaired.summary.beta0.mean < r.fragmented.summary.beta0.mean);
    REQUIRE(r.repaired.summary.dice.mean > r.fragmented.summary.dice.mean);
    REQUIRE(r.beta0_improvement_pct > 0.0);

    // determinism: the whole pipeline reproduces itself
    const PipelineResult again = run_pipeline(dirs.gt, fp, {});
    std::ostringstream a, b;
    write_per_image_csv(a, r.repaired);
    write_per_image_csv(b, again.repaired);
    REQUIRE(a.str() == b.str());
}

TEST_CASE("run_pipeline on an empty directory is an error") {
    ScratchDirs dirs("pipe_empty");
    REQUIRE_THROWS_AS(run_pipeline(dirs.gt, {}, {}), EmptyInputError);
    REQUIRE_THROWS_AS(evaluate_dataset(dirs.pred, dirs.gt), EmptyInputError);
}
