#include "sphsp_tools/commands.hpp"

#include <sphsp/error.hpp>
#include <sphsp/parallel.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace sphsp::tools;

namespace {

void add_segment_settings(CLI::App* app, SegmentSettings& s, bool with_k, std::string& resize) {
    if (with_k) {
        app->add_option("-k,--superpixels", s.superpixels, "Number of superpixels");
    }
    app->add_option("--iterations", s.iterations, "Hard clustering iterations");
    app->add_option("-m,--spatial-weight", s.spatial_weight, "Weight of the position channels");
    app->add_option("--mode", s.mode, "hard or soft")->check(CLI::IsMember({"hard", "soft"}));
    app->add_option("--soft-iterations", s.soft_iterations, "Soft clustering rounds (soft mode)");
    app->add_option("--temperature", s.temperature, "Softmax temperature (soft mode)");
    app->add_flag("!--no-connectivity", s.connectivity, "Skip the connectivity pass");
    app->add_option("--min-size", s.min_size, "Minimum segment size (0 = N/(4K))");
    app->add_option("--padding", s.padding, "circular or zero")->check(CLI::IsMember({"circular", "zero"}));
    app->add_option("--net", s.net_path, "Feature network weights (JSON)");
    app->add_option("--resize", resize, "Work at HxW and map labels back");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superpixels for equirectangular panoramas"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    SegmentConfig seg;
    std::string seg_resize;
    auto* segment = app.add_subcommand("segment", "Segment one panorama");
    segment->add_option("-i,--input", seg.input, "Input image (PNG/PPM)")->required();
    segment->add_option("-o,--output", seg.output, "Output label PNG (16-bit)")->required();
    segment->add_option("--overlay", seg.overlay, "Boundary overlay image");
    segment->add_option("--csv", seg.csv, "Labels as CSV");
    add_segment_settings(segment, seg.settings, true, seg_resize);

    EvalConfig ev;
    auto* eval = app.add_subcommand("eval", "Score labels against ground truth");
    eval->add_option("--labels", ev.labels, "Label PNG");
    eval->add_option("--gt", ev.gt, "Ground-truth PNG");
    eval->add_option("--labels-dir", ev.labels_dir, "Directory of label PNGs");
    eval->add_option("--gt-dir", ev.gt_dir, "Directory of ground truth with matching names");
    eval->add_option("-o,--output", ev.output, "JSON output (default stdout)");
    eval->add_option("--epsilon", ev.epsilon, "Boundary recall tolerance in pixels");
    eval->add_option("--norm", ev.norm, "euclidean or chebyshev")->check(CLI::IsMember({"euclidean", "chebyshev"}));

    AugmentConfig aug;
    auto* augment = app.add_subcommand("augment", "Apply panorama augmentations");
    augment->add_option("-i,--input", aug.input, "Input image")->required();
    augment->add_option("--labels", aug.labels, "Input labels");
    augment->add_option("-o,--output", aug.output_image, "Output image")->required();
    augment->add_option("--output-labels", aug.output_labels, "Output labels");
    augment->add_option("--spec", aug.spec_in, "Replay this augmentation spec (JSON)");
    augment->add_option("--spec-out", aug.spec_out, "Where to write the spec (default <output>.spec.json)");
    augment->add_option("--seed", aug.seed, "Seed for drawing a random spec");

    GradcheckConfig gc;
    std::string gc_shape = "16x32";
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the loss gradient");
    gradcheck->add_option("--shape", gc_shape, "HxW of the toy image");
    gradcheck->add_option("-k,--superpixels", gc.superpixels, "Number of superpixels");
    gradcheck->add_option("--iterations", gc.iterations, "Soft clustering rounds");
    gradcheck->add_option("--temperature", gc.temperature, "Softmax temperature");
    gradcheck->add_option("--lambda", gc.lambda, "Compactness weight");
    gradcheck->add_option("-m,--spatial-weight", gc.spatial_weight, "Weight of the position channels");
    gradcheck->add_option("--samples", gc.samples, "Coordinates checked per group");
    gradcheck->add_option("--step", gc.step, "Central-difference step");
    gradcheck->add_option("--tolerance", gc.tolerance, "Maximum relative error");
    gradcheck->add_option("--seed", gc.seed, "Seed");
    gradcheck->add_option("-o,--output", gc.output, "JSON report (default stdout)");
    gradcheck->add_flag("--corrupt", gc.corrupt, "Perturb the analytic gradient (self-test)");

    TrainConfig tr;
    std::string tr_shape = "64x128";
    auto* train = app.add_subcommand("train-toy", "Train the feature net on synthetic band scenes");
    train->add_option("--output-dir", tr.output_dir, "Output directory")->required();
    train->add_option("--train-count", tr.train_count, "Training images");
    train->add_option("--heldout-count", tr.heldout_count, "Held-out images");
    train->add_option("--shape", tr_shape, "HxW of the synthetic images");
    train->add_option("--nlat", tr.data.nlat, "Latitude bands");
    train->add_option("--nlon", tr.data.nlon, "Azimuthal sectors");
    train->add_option("--noise", tr.data.noise, "Pixel noise sigma");
    train->add_option("--data-seed", tr.data.seed, "Dataset seed");
    train->add_option("--steps", tr.steps, "Gradient steps");
    train->add_option("--lr", tr.learning_rate, "Learning rate");
    train->add_option("-k,--superpixels", tr.superpixels, "Number of superpixels");
    train->add_option("--iterations", tr.iterations, "Soft clustering rounds");
    train->add_option("--temperature", tr.temperature, "Softmax temperature");
    train->add_option("--lambda", tr.lambda, "Compactness weight");
    train->add_option("-m,--spatial-weight", tr.spatial_weight, "Weight of the position channels");
    train->add_option("--eval-iterations", tr.eval_iterations, "Hard iterations for held-out ASA");
    train->add_option("--hidden", tr.hidden, "Hidden layer widths");
    train->add_option("--learned-channels", tr.learned_channels, "Learned feature channels");
    train->add_option("--padding", tr.padding, "circular or zero")->check(CLI::IsMember({"circular", "zero"}));
    train->add_option("--weight-seed", tr.weight_seed, "Weight initialisation seed");

    SynthConfig sy;
    std::string sy_shape = "64x128";
    auto* synth = app.add_subcommand("synth", "Write synthetic band scenes with ground truth");
    synth->add_option("--output-dir", sy.output_dir, "Output directory")->required();
    synth->add_option("--count", sy.count, "Number of images");
    synth->add_option("--shape", sy_shape, "HxW");
    synth->add_option("--nlat", sy.data.nlat, "Latitude bands");
    synth->add_option("--nlon", sy.data.nlon, "Azimuthal sectors");
    synth->add_option("--noise", sy.data.noise, "Pixel noise sigma");
    synth->add_option("--seed", sy.data.seed, "Seed");

    BenchConfig be;
    std::string be_resize;
    auto* bench = app.add_subcommand("bench", "Sweep K over a directory and write ASA/BR/CD");
    bench->add_option("--input-dir", be.input_dir, "Images with <name>_gt.png ground truth")->required();
    bench->add_option("-o,--output", be.output, "CSV output")->required();
    bench->add_option("--k-values", be.k_values, "Superpixel counts");
    bench->add_option("--epsilon", be.epsilon, "Boundary recall tolerance in pixels");
    bench->add_option("--norm", be.norm, "euclidean or chebyshev")->check(CLI::IsMember({"euclidean", "chebyshev"}));
    add_segment_settings(bench, be.settings, false, be_resize);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        sphsp::set_thread_count(threads);
        if (*segment) {
            if (!seg_resize.empty()) {
                seg.settings.resize = parse_shape(seg_resize);
            }
            return cmd_segment(seg);
        }
        if (*eval) {
            return cmd_eval(ev);
        }
        if (*augment) {
            return cmd_augment(aug);
        }
        if (*gradcheck) {
            const sphsp::GridShape s = parse_shape(gc_shape);
            gc.height = s.height();
            gc.width = s.width();
            return cmd_gradcheck(gc);
        }
        if (*train) {
            const sphsp::GridShape s = parse_shape(tr_shape);
            tr.data.height = s.height();
            tr.data.width = s.width();
            return cmd_train_toy(tr);
        }
        if (*synth) {
            const sphsp::GridShape s = parse_shape(sy_shape);
            sy.data.height = s.height();
            sy.data.width = s.width();
            return cmd_synth(sy);
        }
        if (*bench) {
            if (!be_resize.empty()) {
                be.settings.resize = parse_shape(be_resize);
            }
            return cmd_bench(be);
        }
    } catch (const sphsp::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
