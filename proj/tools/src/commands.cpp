#include "sphsp_tools/commands.hpp"

#include <sphsp/error.hpp>
#include <sphsp/image_io.hpp>
#include <sphsp/trainer.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sphsp::tools {

using json = nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << text;
    require(static_cast<bool>(out), "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path sidecar_for(const fs::path& output) {
    fs::path p = output;
    p.replace_extension(".json");
    return p;
}

PixelNorm norm_from_string(const std::string& name) {
    if (name == "euclidean") {
        return PixelNorm::Euclidean;
    }
    if (name == "chebyshev") {
        return PixelNorm::Chebyshev;
    }
    throw InvalidInput("unknown norm '" + name + "' (expected euclidean or chebyshev)");
}

json settings_json(const SegmentSettings& s) {
    json j{{"superpixels", s.superpixels},
           {"iterations", s.iterations},
           {"spatial_weight", s.spatial_weight},
           {"mode", s.mode},
           {"soft_iterations", s.soft_iterations},
           {"temperature", s.temperature},
           {"connectivity", s.connectivity},
           {"min_size", s.min_size},
           {"padding", s.padding},
           {"net", s.net_path.string()}};
    if (s.resize) {
        j["resize"] = {s.resize->height(), s.resize->width()};
    }
    return j;
}

json report_json(const MetricsReport& r) {
    return {{"asa", r.asa}, {"br", r.br}, {"cd", r.cd}, {"k_effective", r.k_effective}, {"epsilon", r.epsilon}};
}

std::optional<FeatureNet> load_net(const SegmentSettings& s) {
    if (s.net_path.empty()) {
        return std::nullopt;
    }
    FeatureNet net = load_feature_net(s.net_path);
    net.set_padding(padding_from_string(s.padding));
    return net;
}

Segmentation run_segment(const EquirectImage& rgb, const SegmentSettings& s, const FeatureNet* net) {
    const SegmentOptions options = s.to_options();
    if (s.resize && !(*s.resize == rgb.shape())) {
        const Segmentation small = segment_image(resize_image(rgb, *s.resize), options, net);
        return resize_labels(small, rgb.shape());
    }
    return segment_image(rgb, options, net);
}

bool is_image_file(const fs::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    require(fs::is_directory(dir), "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_gt_file(const fs::path& p) {
    const std::string stem = p.stem().string();
    return stem.size() > 3 && stem.compare(stem.size() - 3, 3, "_gt") == 0;
}

fs::path gt_for(const fs::path& image) {
    return image.parent_path() / (image.stem().string() + "_gt.png");
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SegmentOptions SegmentSettings::to_options() const {
    require(superpixels >= 1, "superpixels must be >= 1");
    require(iterations >= 1, "iterations must be >= 1");
    require(soft_iterations >= 1, "soft iterations must be >= 1");
    require(temperature > 0.0, "temperature must be > 0");
    require(spatial_weight >= 0.0, "spatial weight must be >= 0");
    require(mode == "hard" || mode == "soft", "mode must be hard or soft");
    SegmentOptions o;
    o.superpixels = superpixels;
    o.hard.iterations = iterations;
    o.hard.spatial_weight = spatial_weight;
    o.soft_mode = mode == "soft";
    o.soft.iterations = soft_iterations;
    o.soft.temperature = temperature;
    o.soft.spatial_weight = spatial_weight;
    o.connectivity = connectivity;
    o.min_size = min_size;
    return o;
}

GridShape parse_shape(const std::string& text) {
    const auto x = text.find('x');
    require(x != std::string::npos, "shape must look like HxW, got '" + text + "'");
    try {
        std::size_t used = 0;
        const int h = std::stoi(text.substr(0, x), &used);
        require(used == x, "bad height in '" + text + "'");
        const std::string rest = text.substr(x + 1);
        const int w = std::stoi(rest, &used);
        require(used == rest.size(), "bad width in '" + text + "'");
        return GridShape(h, w);
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const InvalidInput*>(&e) != nullptr) {
            throw;
        }
        throw InvalidInput("shape must look like HxW, got '" + text + "'");
    }
}

int cmd_segment(const SegmentConfig& config) {
    require(!config.input.empty() && !config.output.empty(), "segment needs --input and --output");
    const EquirectImage rgb = read_rgb_image(config.input);
    const std::optional<FeatureNet> net = load_net(config.settings);
    const Segmentation labels = run_segment(rgb, config.settings, net ? &*net : nullptr);

    write_label_image(config.output, labels);
    if (!config.overlay.empty()) {
        write_rgb_image(config.overlay, draw_boundaries(rgb, labels));
    }
    if (!config.csv.empty()) {
        write_label_csv(config.csv, labels);
    }
    write_json(sidecar_for(config.output),
               {{"command", "segment"},
                {"input", config.input.string()},
                {"output", config.output.string()},
                {"height", rgb.height()},
                {"width", rgb.width()},
                {"settings", settings_json(config.settings)},
                {"superpixels_found", labels.distinct_count()}});
    return kExitOk;
}

int cmd_eval(const EvalConfig& config) {
    const PixelNorm norm = norm_from_string(config.norm);
    require(config.epsilon >= 0.0, "epsilon must be >= 0");
    json out{{"command", "eval"}, {"epsilon", config.epsilon}, {"norm", config.norm}};

    if (!config.labels_dir.empty() || !config.gt_dir.empty()) {
        require(!config.labels_dir.empty() && !config.gt_dir.empty(), "batch eval needs --labels-dir and --gt-dir");
        json records = json::array();
        double sa = 0, sb = 0, sc = 0, sk = 0;
        for (const fs::path& lp : list_images(config.labels_dir)) {
            const fs::path gp = config.gt_dir / lp.filename();
            require(fs::exists(gp), "no ground truth for " + lp.filename().string());
            const MetricsReport r =
                evaluate_segmentation(read_label_image(lp), read_label_image(gp), config.epsilon, norm);
            json rec = report_json(r);
            rec["name"] = lp.filename().string();
            records.push_back(rec);
            sa += r.asa;
            sb += r.br;
            sc += r.cd;
            sk += r.k_effective;
        }
        require(!records.empty(), "no label images in " + config.labels_dir.string());
        const double n = static_cast<double>(records.size());
        out["records"] = records;
        out["aggregate"] = {{"count", records.size()},
                            {"asa", sa / n},
                            {"br", sb / n},
                            {"cd", sc / n},
                            {"k_effective", sk / n}};
    } else {
        require(!config.labels.empty() && !config.gt.empty(), "eval needs --labels and --gt");
        const MetricsReport r =
            evaluate_segmentation(read_label_image(config.labels), read_label_image(config.gt), config.epsilon, norm);
        out["labels"] = config.labels.string();
        out["gt"] = config.gt.string();
        out["metrics"] = report_json(r);
    }

    if (config.output.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        write_json(config.output, out);
    }
    return kExitOk;
}

int cmd_augment(const AugmentConfig& config) {
    require(!config.input.empty() && !config.output_image.empty(), "augment needs --input and --output");
    const EquirectImage rgb = read_rgb_image(config.input);
    const Segmentation labels =
        config.labels.empty() ? Segmentation(rgb.shape(), 0) : read_label_image(config.labels);
    require_same_shape(rgb.shape(), labels.shape(), "augment");

    const AugmentSpec spec = config.spec_in.empty() ? random_augment_spec(config.seed, rgb.width())
                                                    : augment_spec_from_json(read_text(config.spec_in));
    spec.validate(rgb.width());
    const AugmentedPair out = compose_augmentations(spec, rgb, labels);

    write_rgb_image(config.output_image, out.image);
    if (!config.output_labels.empty()) {
        require(!config.labels.empty(), "--output-labels needs --labels");
        write_label_image(config.output_labels, out.labels);
    }
    const fs::path spec_path =
        config.spec_out.empty() ? fs::path(config.output_image.string() + ".spec.json") : config.spec_out;
    write_text(spec_path, augment_spec_to_json(spec) + "\n");
    return kExitOk;
}

int cmd_gradcheck(const GradcheckConfig& config, GradcheckReport* report_out) {
    require(config.samples >= 1, "samples must be >= 1");
    require(config.step > 0.0, "step must be > 0");
    const GradcheckReport r = run_gradcheck(config);
    if (report_out != nullptr) {
        *report_out = r;
    }
    const json j{{"command", "gradcheck"},
                 {"height", config.height},
                 {"width", config.width},
                 {"superpixels", config.superpixels},
                 {"iterations", config.iterations},
                 {"temperature", config.temperature},
                 {"lambda", config.lambda},
                 {"spatial_weight", config.spatial_weight},
                 {"step", config.step},
                 {"tolerance", config.tolerance},
                 {"seed", config.seed},
                 {"feature_samples", r.feature_samples},
                 {"feature_max_rel", r.feature_max_rel},
                 {"feature_mean_rel", r.feature_mean_rel},
                 {"weight_samples", r.weight_samples},
                 {"weight_max_rel", r.weight_max_rel},
                 {"weight_mean_rel", r.weight_mean_rel},
                 {"position_grad_max_abs", r.position_grad_max_abs},
                 {"pass", r.pass}};
    if (config.output.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json(config.output, j);
    }
    return r.pass ? kExitOk : kExitGradcheckFailed;
}

FeatureNet make_toy_net(const TrainConfig& config, std::uint64_t seed) {
    std::vector<int> channels{kColorChannels};
    channels.insert(channels.end(), config.hidden.begin(), config.hidden.end());
    channels.push_back(config.learned_channels);
    return make_feature_net(channels, 3, padding_from_string(config.padding), seed);
}

int cmd_train_toy(const TrainConfig& config, TrainReport* report_out) {
    require(!config.output_dir.empty(), "train-toy needs --output-dir");
    require(config.train_count >= 1 && config.heldout_count >= 1, "dataset sizes must be >= 1");
    require(config.learned_channels >= 1, "learned channels must be >= 1");

    const std::vector<SynthSample> train = make_band_dataset(config.data, config.train_count, 0);
    const std::vector<SynthSample> heldout = make_band_dataset(config.data, config.heldout_count, 1'000'000);
    const FeatureNet initial = make_toy_net(config, config.weight_seed);

    TrainOptions options;
    options.steps = config.steps;
    options.learning_rate = config.learning_rate;
    options.superpixels = config.superpixels;
    options.objective.cluster.iterations = config.iterations;
    options.objective.cluster.temperature = config.temperature;
    options.objective.cluster.spatial_weight = config.spatial_weight;
    options.objective.lambda = config.lambda;

    const SphereGrid grid(train.front().rgb.shape());
    const ClusterInit init = make_cluster_init(hammersley_sphere(config.superpixels), grid);
    auto mean_loss = [&](const FeatureNet& net) {
        double s = 0.0;
        for (const SynthSample& sample : train) {
            s += net_loss(sample, net, init, options.objective).total;
        }
        return s / static_cast<double>(train.size());
    };

    const TrainResult result = train_toy(train, initial, options);

    SegmentOptions eval;
    eval.superpixels = config.superpixels;
    eval.hard.iterations = config.eval_iterations;
    eval.hard.spatial_weight = config.spatial_weight;
    auto mean_asa = [&](const FeatureNet* net) {
        double s = 0.0;
        for (const SynthSample& sample : heldout) {
            s += asa(segment_image(sample.rgb, eval, net), sample.gt);
        }
        return s / static_cast<double>(heldout.size());
    };

    TrainReport report;
    report.initial_loss = mean_loss(initial);
    report.final_loss = mean_loss(result.net);
    report.asa_untrained = mean_asa(nullptr);
    report.asa_trained = mean_asa(&result.net);
    if (report_out != nullptr) {
        *report_out = report;
    }

    fs::create_directories(config.output_dir);
    save_feature_net(result.net, config.output_dir / "weights.json");
    std::string csv = "step,l_seg,l_compact,total\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const LossReport& r = result.trace[i];
        csv += std::to_string(i) + "," + format_number(r.l_seg) + "," + format_number(r.l_compact) + "," +
               format_number(r.total) + "\n";
    }
    write_text(config.output_dir / "loss.csv", csv);
    write_json(config.output_dir / "report.json",
               {{"command", "train-toy"},
                {"train_count", config.train_count},
                {"heldout_count", config.heldout_count},
                {"height", config.data.height},
                {"width", config.data.width},
                {"nlat", config.data.nlat},
                {"nlon", config.data.nlon},
                {"noise", config.data.noise},
                {"data_seed", config.data.seed},
                {"steps", config.steps},
                {"learning_rate", config.learning_rate},
                {"superpixels", config.superpixels},
                {"iterations", config.iterations},
                {"temperature", config.temperature},
                {"lambda", config.lambda},
                {"spatial_weight", config.spatial_weight},
                {"eval_iterations", config.eval_iterations},
                {"hidden", config.hidden},
                {"learned_channels", config.learned_channels},
                {"padding", config.padding},
                {"weight_seed", config.weight_seed},
                {"initial_loss", report.initial_loss},
                {"final_loss", report.final_loss},
                {"heldout_asa_untrained", report.asa_untrained},
                {"heldout_asa_trained", report.asa_trained}});
    return kExitOk;
}

int cmd_synth(const SynthConfig& config) {
    require(!config.output_dir.empty(), "synth needs --output-dir");
    require(config.count >= 1, "count must be >= 1");
    fs::create_directories(config.output_dir);
    for (int i = 0; i < config.count; ++i) {
        const SynthSample s = make_band_image(config.data, static_cast<std::uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof name, "synth_%04d", i);
        write_rgb_image(config.output_dir / (std::string(name) + ".png"), s.rgb);
        write_label_image(config.output_dir / (std::string(name) + "_gt.png"), s.gt);
    }
    write_json(config.output_dir / "synth.json", {{"command", "synth"},
                                                  {"count", config.count},
                                                  {"height", config.data.height},
                                                  {"width", config.data.width},
                                                  {"nlat", config.data.nlat},
                                                  {"nlon", config.data.nlon},
                                                  {"noise", config.data.noise},
                                                  {"seed", config.data.seed}});
    return kExitOk;
}

int cmd_bench(const BenchConfig& config) {
    require(!config.input_dir.empty() && !config.output.empty(), "bench needs --input-dir and --output");
    require(!config.k_values.empty(), "bench needs at least one K");
    const PixelNorm norm = norm_from_string(config.norm);
    const std::optional<FeatureNet> net = load_net(config.settings);

    std::vector<fs::path> images;
    for (const fs::path& p : list_images(config.input_dir)) {
        if (!is_gt_file(p)) {
            images.push_back(p);
        }
    }
    require(!images.empty(), "no images in " + config.input_dir.string());

    std::string csv = "image,K,ASA,BR,CD\n";
    json means = json::array();
    std::vector<CurvePoint> curve;
    for (int k : config.k_values) {
        SegmentSettings s = config.settings;
        s.superpixels = k;
        double sa = 0, sb = 0, sc = 0;
        for (const fs::path& image : images) {
            const fs::path gp = gt_for(image);
            require(fs::exists(gp), "missing ground truth " + gp.string());
            const EquirectImage rgb = read_rgb_image(image);
            const Segmentation labels = run_segment(rgb, s, net ? &*net : nullptr);
            const MetricsReport r = evaluate_segmentation(labels, read_label_image(gp), config.epsilon, norm);
            csv += image.filename().string() + "," + std::to_string(k) + "," + format_number(r.asa) + "," +
                   format_number(r.br) + "," + format_number(r.cd) + "\n";
            sa += r.asa;
            sb += r.br;
            sc += r.cd;
        }
        const double n = static_cast<double>(images.size());
        means.push_back({{"K", k}, {"asa", sa / n}, {"br", sb / n}, {"cd", sc / n}});
        curve.push_back({k, sb / n, sc / n});
    }
    write_text(config.output, csv);

    json sidecar{{"command", "bench"},
                 {"input_dir", config.input_dir.string()},
                 {"images", images.size()},
                 {"k_values", config.k_values},
                 {"epsilon", config.epsilon},
                 {"norm", config.norm},
                 {"settings", settings_json(config.settings)},
                 {"mean", means}};
    const std::optional<double> cd70 = contour_density_at_recall(curve, 0.7);
    sidecar["cd_at_br_0.7"] = cd70 ? json(*cd70) : json(nullptr);
    write_json(sidecar_for(config.output), sidecar);
    return kExitOk;
}

}  // namespace sphsp::tools
