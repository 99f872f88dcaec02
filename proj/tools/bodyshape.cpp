// bodyshape: classify a photo, evaluate a labelled dataset, or generate
// synthetic replay fixtures.

#include <bodyshape.hpp>
#include <bodyshape/image_io.hpp>
#include <bodyshape/json_io.hpp>
#include <bodyshape/onnx_backend.hpp>
#include <bodyshape/overlay.hpp>
#include <bodyshape/replay_backend.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace bodyshape;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNoPerson = 3;
constexpr int kExitBackend = 4;

constexpr const char* kExitCodeHelp = R"(Exit codes:
  0  success
  1  usage error (bad or missing flags)
  2  input error (unreadable/unsupported image, height out of range,
     malformed manifest or config, infeasible synthetic parameters)
  3  no person or unusable pose (NoPersonDetected, LowConfidencePose,
     UpsideDown, LineOutsideMask, ...)
  4  inference backend failure (missing/corrupt model, checksum mismatch,
     missing replay fixture))";

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::BackendFailure: return kExitBackend;
    case ErrorKind::NoPersonDetected:
    case ErrorKind::LowConfidencePose:
    case ErrorKind::EmptyMask:
    case ErrorKind::EmptyRow:
    case ErrorKind::UpsideDown:
    case ErrorKind::LineOutsideMask:
    case ErrorKind::LinesOutOfOrder:
    case ErrorKind::NonPositiveMeasurement: return kExitNoPerson;
    default: return kExitInput;
    }
}

struct BackendOptions {
    std::string models;
    std::string replay;
};

struct LoadedBackend {
    std::unique_ptr<InferenceBackend> backend;
    BackendInfo info;
};

LoadedBackend make_backend(const BackendOptions& opt) {
    if (!opt.replay.empty()) return {std::make_unique<ReplayBackend>(opt.replay), {"replay", {}, {}}};
    auto manifest = read_model_manifest(opt.models);
    auto backend = std::make_unique<OnnxBackend>(manifest);
    return {std::move(backend), {"onnx", manifest.segmentation.sha256, manifest.keypoints.sha256}};
}

PipelineConfig make_config(const std::string& config_path, const std::string& convention) {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
    if (!convention.empty()) {
        auto c = parse_convention(convention);
        if (!c) throw Error(ErrorKind::InvalidConfig, "unknown convention " + convention);
        cfg.anthro.convention = *c;
    }
    cfg.validate();
    return cfg;
}

void emit_json(const ojson& doc, const std::string& path) {
    const auto text = doc.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::UnreadableFile, "cannot write " + path);
    out << text;
}

struct ClassifyArgs {
    std::string image;
    std::optional<double> height_cm;
    BackendOptions backend;
    std::string convention;
    std::string config;
    std::string overlay;
    std::string json;
};

int run_classify(const ClassifyArgs& a) {
    try {
        auto cfg = make_config(a.config, a.convention);
        auto height = validate_height(*a.height_cm);
        auto image = load_image(a.image);
        auto loaded = make_backend(a.backend);
        Pipeline pipeline(*loaded.backend, cfg);
        auto result = pipeline.run(image, height);
        emit_json(classify_output_json(result, loaded.info), a.json);
        if (!a.overlay.empty()) write_overlay(image, result, a.overlay);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        try {
            emit_json(error_json(to_string(e.kind()), e.what()), a.json);
        } catch (const Error&) {
        }
        return exit_code_for(e.kind());
    }
}

struct EvaluateArgs {
    std::string manifest;
    BackendOptions backend;
    std::string convention;
    std::string config;
    std::string out;
    bool table = false;
    unsigned threads = 1;
    bool sample_std = false;
    bool exclude_failures = false;
};

void print_tables(const EvalReport& r) {
    std::printf("accuracy: %.1f%% (%zu/%zu), failures: %zu\n", r.accuracy_pct, r.n_correct, r.n_total, r.n_failures);
    for (const auto& [sex, g] : r.per_sex) {
        std::printf("accuracy [%s]: %.1f%% (%zu/%zu)\n", sex.c_str(), g.accuracy_pct, g.n_correct, g.n_total);
    }
    std::printf("\n");
    if (r.n_with_measurements > 0) {
        std::printf("absolute measurement error (cm, mean ± std, %s std)\n%s\n",
                    std::string(to_string(r.std_kind)).c_str(), error_table(r).c_str());
    }
    std::printf("confusion matrix\n%s\n", confusion_table(r).c_str());
    std::printf("class distribution\n%s", class_distribution_csv(r).c_str());
}

int run_evaluate(const EvaluateArgs& a) {
    try {
        auto cfg = make_config(a.config, a.convention);
        std::vector<SubjectRecord> records;
        try {
            records = read_dataset_manifest(a.manifest);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::UnreadableFile) throw Error(ErrorKind::MalformedManifest, e.what());
            throw;
        }
        if (records.empty()) throw Error(ErrorKind::EmptyDataset, a.manifest + " lists no records");
        auto loaded = make_backend(a.backend);
        Pipeline pipeline(*loaded.backend, cfg);

        EvalOptions opt;
        opt.threads = a.threads;
        opt.std_kind = a.sample_std ? StdKind::Sample : StdKind::Population;
        opt.failures_count_as_incorrect = !a.exclude_failures;
        opt.anthro = cfg.anthro;
        auto report = evaluate(records, [&](const SubjectRecord& rec) {
            auto result = pipeline.run(load_image(rec.image_path), rec.height);
            return Prediction{result.shape, result.measurements, result.widths};
        }, opt);

        auto doc = report_json(report, fs::path(a.manifest).parent_path());
        if (!a.out.empty() || !a.table) emit_json(doc, a.out);
        if (a.table) print_tables(report);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

struct SynthArgs {
    std::string params;
    std::string preset;
    std::string out;
    int count = 1;
    std::uint64_t seed = 0;
    bool noise = false;
};

std::optional<BodyShape> preset_shape(std::string name) {
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::erase(name, '-');
    std::erase(name, '_');
    for (auto s : kAllShapes) {
        std::string label(to_string(s));
        for (auto& c : label) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (label == name) return s;
    }
    return std::nullopt;
}

SynthParams read_synth_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, "cannot open " + path);
    SynthParams p;
    try {
        auto j = nlohmann::json::parse(in);
        detail::read_if(j, "image_width", p.image_width);
        detail::read_if(j, "image_height", p.image_height);
        detail::read_if(j, "top_row", p.top_row);
        detail::read_if(j, "stature_px", p.stature_px);
        detail::read_if(j, "height_cm", p.height_cm);
        detail::read_if(j, "bust_row", p.bust_row);
        detail::read_if(j, "waist_row", p.waist_row);
        detail::read_if(j, "hip_row", p.hip_row);
        detail::read_if(j, "bust_width", p.bust_width);
        detail::read_if(j, "waist_width", p.waist_width);
        detail::read_if(j, "hip_width", p.hip_width);
        detail::read_if(j, "shoulder_width", p.shoulder_width);
        detail::read_if(j, "arm_width", p.arm_width);
        detail::read_if(j, "arm_gap", p.arm_gap);
        detail::read_if(j, "head_radius", p.head_radius);
        detail::read_if(j, "neck_width", p.neck_width);
        detail::read_if(j, "leg_width", p.leg_width);
        detail::read_if(j, "leg_gap", p.leg_gap);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InfeasibleParams, path + ": " + e.what());
    }
    if (p.image_width < kMinImageSide || p.image_height < kMinImageSide) {
        throw Error(ErrorKind::InfeasibleParams, "image must be at least 64x64");
    }
    return p;
}

int run_synth(const SynthArgs& a) {
    try {
        std::optional<BodyShape> target;
        std::optional<SynthParams> fixed;
        const bool mixed = a.preset == "mixed";
        if (!a.params.empty()) {
            fixed = read_synth_params(a.params);
        } else if (!mixed) {
            target = preset_shape(a.preset);
            if (!target) throw Error(ErrorKind::InvalidArgument, "unknown preset " + a.preset);
        }
        if (a.count < 1) throw Error(ErrorKind::InvalidArgument, "--count must be positive");

        std::mt19937_64 rng(a.seed);
        std::vector<SubjectRecord> records;
        std::vector<std::pair<SynthParams, SynthSample>> samples;
        for (int i = 0; i < a.count; ++i) {
            SynthParams p = fixed ? *fixed : random_params(mixed ? kAllShapes[i % kNumShapes] : *target, rng);
            validate_height(p.height_cm);
            samples.emplace_back(p, synth_silhouette(p));
        }

        fs::create_directories(a.out);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& [p, s] = samples[i];
            char name[32];
            std::snprintf(name, sizeof(name), "sample_%04zu", i);
            const auto dir = fs::path(a.out) / name;
            auto labels = mask_to_labelmap(s.mask);
            if (a.noise) labels = inject_background_noise(labels, rng);
            auto image = render_subject(s.mask, rng);
            write_fixture(dir, image, labels, s.keypoints);
            save_png(image, dir / "image.png");
            write_mask_png(s.mask, dir / "mask.png");
            records.push_back({dir / "image.png", validate_height(p.height_cm), s.shape,
                               MeasurementTruth{s.truth.bust, s.truth.waist, s.truth.hip}, std::nullopt});
        }
        write_manifest(fs::path(a.out) / "manifest.csv", records);
        std::cout << "wrote " << records.size() << " samples and " << (fs::path(a.out) / "manifest.csv").string()
                  << '\n';
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitInput;
    }
}

void add_backend_flags(CLI::App* cmd, BackendOptions& opt) {
    auto* models = cmd->add_option("--models", opt.models, "JSON model manifest (ONNX files with sha256)");
    auto* replay = cmd->add_option("--replay", opt.replay, "Replay fixture directory");
    models->excludes(replay);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Body-shape classification from a single photo and a height"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    ClassifyArgs classify_args;
    auto* classify_cmd = app.add_subcommand("classify", "Classify one image");
    classify_cmd->add_option("image", classify_args.image, "PNG or JPEG photo")->required();
    classify_cmd->add_option("--height-cm", classify_args.height_cm, "Subject height in centimetres")->required();
    add_backend_flags(classify_cmd, classify_args.backend);
    classify_cmd->add_option("--convention", classify_args.convention, "frontal_width | est_circumference");
    classify_cmd->add_option("--config", classify_args.config, "Pipeline config JSON");
    classify_cmd->add_option("--overlay", classify_args.overlay, "Write a PNG with the measurement lines drawn");
    classify_cmd->add_option("--json", classify_args.json, "Write the result JSON here instead of stdout");

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a labelled manifest");
    eval_cmd->add_option("manifest", eval_args.manifest, "CSV manifest")->required();
    add_backend_flags(eval_cmd, eval_args.backend);
    eval_cmd->add_option("--convention", eval_args.convention, "frontal_width | est_circumference");
    eval_cmd->add_option("--config", eval_args.config, "Pipeline config JSON");
    eval_cmd->add_option("--out", eval_args.out, "Write the report JSON here");
    eval_cmd->add_flag("--table", eval_args.table, "Print the error table and confusion matrix");
    eval_cmd->add_option("--threads", eval_args.threads, "Worker threads")->check(CLI::PositiveNumber);
    eval_cmd->add_flag("--sample-std", eval_args.sample_std, "Use sample (n-1) standard deviation");
    eval_cmd->add_flag("--exclude-failures", eval_args.exclude_failures,
                       "Drop pipeline failures from the accuracy denominator");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic silhouettes as replay fixtures");
    auto* params_opt = synth_cmd->add_option("--params", synth_args.params, "SynthParams JSON file");
    auto* preset_opt = synth_cmd->add_option(
        "--preset", synth_args.preset, "rectangle | triangle | inverted-triangle | spoon | hourglass | mixed");
    params_opt->excludes(preset_opt);
    synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();
    synth_cmd->add_option("--count", synth_args.count, "Number of samples");
    synth_cmd->add_option("--seed", synth_args.seed, "Random seed");
    synth_cmd->add_flag("--noise", synth_args.noise, "Inject segmentation clutter into the label maps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*classify_cmd) {
        if (classify_args.backend.models.empty() == classify_args.backend.replay.empty()) {
            std::cerr << "error: exactly one of --models or --replay is required\n";
            return kExitUsage;
        }
        return run_classify(classify_args);
    }
    if (*eval_cmd) {
        if (eval_args.backend.models.empty() == eval_args.backend.replay.empty()) {
            std::cerr << "error: exactly one of --models or --replay is required\n";
            return kExitUsage;
        }
        return run_evaluate(eval_args);
    }
    if (synth_args.params.empty() == synth_args.preset.empty()) {
        std::cerr << "error: exactly one of --params or --preset is required\n";
        return kExitUsage;
    }
    return run_synth(synth_args);
}
