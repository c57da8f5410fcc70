#include "skelgen/audio_features.hpp"
#include "skelgen/dataset_tools.hpp"
#include "skelgen/generation.hpp"
#include "skelgen/metrics.hpp"
#include "skelgen/skeleton_io.hpp"
#include "skelgen/synthetic.hpp"
#include "skelgen/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace skelgen;

namespace {

// key=value log lines on stderr.
int g_verbosity = 1;

void log_line(const std::string& level, const std::string& msg) {
    if (level == "debug" && g_verbosity < 2) {
        return;
    }
    if (level == "info" && g_verbosity < 1) {
        return;
    }
    std::cerr << "level=" << level << " " << msg << "\n";
}

void info(const std::string& msg) { log_line("info", msg); }

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error(dir.string() + ": not a directory");
    }
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SkeletonSequence slice(const SkeletonSequence& seq, FrameRange r) {
    SkeletonSequence out;
    out.id = seq.id;
    out.fps = seq.fps;
    out.coords = seq.coords.middleRows(r.begin, r.length());
    out.confidence = seq.confidence.middleRows(r.begin, r.length());
    return out;
}

// Per-frame box over keypoints at or above the confidence cut; frames with
// none contribute nothing.
std::vector<BoundingBox> bbox_track(const SkeletonSequence& seq, double min_conf) {
    std::vector<BoundingBox> track;
    for (int f = 0; f < seq.num_frames(); ++f) {
        BoundingBox b{1e300, 1e300, -1e300, -1e300};
        bool any = false;
        for (int k = 0; k < seq.num_keypoints(); ++k) {
            if (seq.confidence(f, k) < min_conf) {
                continue;
            }
            const double x = seq.coords(f, 2 * k), y = seq.coords(f, 2 * k + 1);
            b = {std::min(b.x0, x), std::min(b.y0, y), std::max(b.x1, x), std::max(b.y1, y)};
            any = true;
        }
        if (any && b.x1 > b.x0 && b.y1 > b.y0) {
            track.push_back(b);
        }
    }
    return track;
}

// Track id of a clip named "<track>_<NNN>".
std::string track_of(const std::string& clip_id) {
    const auto pos = clip_id.rfind('_');
    if (pos == std::string::npos) {
        throw std::runtime_error("clip id '" + clip_id + "' has no track suffix");
    }
    return clip_id.substr(0, pos);
}

AudioFeatureSequence slice_features(const AudioFeatureSequence& feat, FrameRange r, double fps) {
    const auto rows = feat.values.rows();
    auto row_at = [&](int frame) {
        return std::clamp<Eigen::Index>(std::lround(frame * feat.source_rate / fps), 0, rows);
    };
    const auto b = row_at(r.begin), e = std::max(row_at(r.end), b + 1);
    if (b >= rows) {
        throw std::runtime_error("audio features end before frame " + std::to_string(r.begin));
    }
    AudioFeatureSequence out;
    out.source_rate = feat.source_rate;
    out.values = feat.values.middleRows(b, std::min(e, rows) - b);
    return out;
}

// Training data manifest: "clip_id<TAB>skeleton<TAB>features", paths
// relative to the manifest's directory.
struct DataEntry {
    std::string clip_id;
    fs::path skeleton;
    fs::path features;
};

std::vector<DataEntry> read_data_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open data manifest");
    }
    std::vector<DataEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ss(line);
        DataEntry e;
        std::string skel, feat;
        if (!std::getline(ss, e.clip_id, '\t') || !std::getline(ss, skel, '\t') || !std::getline(ss, feat)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 3 tab-separated fields");
        }
        e.skeleton = path.parent_path() / skel;
        e.features = path.parent_path() / feat;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<RawClip> load_clips(const fs::path& manifest) {
    std::vector<RawClip> clips;
    for (const auto& e : read_data_manifest(manifest)) {
        const auto seqs = read_skeleton_file(e.skeleton);
        if (seqs.empty()) {
            throw std::runtime_error(e.skeleton.string() + ": no clips");
        }
        RawClip c{seqs.front(), load_features(e.features)};
        c.skeleton.id = e.clip_id;
        clips.push_back(std::move(c));
    }
    if (clips.empty()) {
        throw std::runtime_error(manifest.string() + ": no clips listed");
    }
    return clips;
}

// ---------------------------------------------------------------- commands

struct SyntheticArgs {
    fs::path out;
    int videos = 2;
    int frames = 800;
    int cuts = 2;
    std::uint64_t seed = 1;
    int source_size = 512;
};

// Raw-looking source material: per video one whole-body track in source
// pixels, colour histograms with a few hard cuts, and 50 Hz audio features.
int cmd_make_synthetic(const SyntheticArgs& a) {
    fs::create_directories(a.out / "skeletons");
    fs::create_directories(a.out / "histograms");
    fs::create_directories(a.out / "features");
    for (int v = 0; v < a.videos; ++v) {
        char name[32];
        std::snprintf(name, sizeof name, "vid%02d", v);
        const SpeakerShape shape{0.22 + 0.06 * (v % 2), 0.5, 0.42};
        const auto audio = synthetic_features(2 * a.frames, a.seed * 1000003 + static_cast<std::uint64_t>(v));
        auto track = animate(shape, align_to_frames(audio, a.frames).values, MotionRig{}, std::string(name) + "_p0");
        track.coords *= a.source_size;
        write_skeleton_file(a.out / "skeletons" / (std::string(name) + ".skel"), {track});
        save_features(a.out / "features" / (std::string(name) + ".feat"), audio);

        std::vector<int> cuts;
        for (int c = 1; c <= a.cuts; ++c) {
            cuts.push_back(c * a.frames / (a.cuts + 1));
        }
        write_histograms(a.out / "histograms" / (std::string(name) + ".hist"),
                         synthetic_shot_video(a.frames, cuts, a.seed + static_cast<std::uint64_t>(v)));
        info("cmd=make-synthetic video=" + std::string(name) + " frames=" + std::to_string(a.frames));
    }
    return 0;
}

struct FilterArgs {
    fs::path skeletons;
    fs::path histograms;
    std::optional<fs::path> rules;
    fs::path out;
    int width = 512;
    int height = 512;
    double margin = 0.1;
    double threshold = kDefaultShotThreshold;
};

int cmd_filter_clips(const FilterArgs& a) {
    FilterRules rules;
    if (a.rules) {
        rules = filter_rules_from(KeyValues::load(*a.rules));
    }
    std::vector<ClipManifestEntry> entries;
    int accepted = 0;
    for (const auto& skel_path : files_with_extension(a.skeletons, ".skel")) {
        const std::string video = skel_path.stem().string();
        const auto hist_path = a.histograms / (video + ".hist");
        if (!fs::exists(hist_path)) {
            throw std::runtime_error(hist_path.string() + ": missing histogram sidecar for " + video);
        }
        const auto hist = read_histograms(hist_path);
        const auto ranges = segment_clips(detect_shots(hist, a.threshold), static_cast<int>(hist.size()));
        for (const auto& track : read_skeleton_file(skel_path)) {
            for (std::size_t i = 0; i < ranges.size(); ++i) {
                const auto r = ranges[i];
                if (r.end > track.num_frames()) {
                    log_line("warn", "video=" + video + " track=" + track.id + " shorter than its histograms");
                    continue;
                }
                const auto piece = slice(track, r);
                ClipManifestEntry e;
                char suffix[16];
                std::snprintf(suffix, sizeof suffix, "_%03zu", i);
                e.clip_id = track.id + suffix;
                e.source_id = video;
                e.range = r;
                e.fps = track.fps;
                const auto boxes = bbox_track(piece, rules.bbox_conf);
                if (boxes.empty()) {
                    e.verdict = filter_clip(piece, rules);
                } else {
                    e.crop = crop_and_resize(boxes, a.margin, a.width, a.height);
                    e.verdict = filter_clip(transform_keypoints(piece, e.crop), rules);
                }
                accepted += e.verdict.accepted() ? 1 : 0;
                entries.push_back(std::move(e));
            }
        }
    }
    if (a.out.has_parent_path()) {
        fs::create_directories(a.out.parent_path());
    }
    write_manifest(a.out, entries);
    info("cmd=filter-clips clips=" + std::to_string(entries.size()) + " accepted=" + std::to_string(accepted));
    return 0;
}

struct PreprocessArgs {
    fs::path skeletons;
    fs::path features;
    fs::path manifest;
    fs::path out;
    int smooth_window = 5;
};

// Accepted manifest clips -> cropped, smoothed clip files plus the training
// data manifest (out/data.txt).
int cmd_preprocess(const PreprocessArgs& a) {
    fs::create_directories(a.out / "clips");
    std::map<std::string, std::vector<SkeletonSequence>> sources;
    std::map<std::string, AudioFeatureSequence> audio;
    std::ofstream data(a.out / "data.txt");
    if (!data) {
        throw std::runtime_error((a.out / "data.txt").string() + ": cannot write");
    }
    int written = 0;
    for (const auto& e : read_manifest(a.manifest)) {
        if (!e.verdict.accepted()) {
            continue;
        }
        if (!sources.count(e.source_id)) {
            sources[e.source_id] = read_skeleton_file(a.skeletons / (e.source_id + ".skel"));
            audio[e.source_id] = load_features(a.features / (e.source_id + ".feat"));
        }
        const auto& tracks = sources[e.source_id];
        const std::string track_id = track_of(e.clip_id);
        const auto it = std::find_if(tracks.begin(), tracks.end(), [&](const auto& t) { return t.id == track_id; });
        if (it == tracks.end()) {
            throw std::runtime_error("clip " + e.clip_id + ": track " + track_id + " not found in " + e.source_id);
        }
        if (e.range.end > it->num_frames()) {
            throw std::runtime_error("clip " + e.clip_id + ": range ends after the track");
        }
        auto clip = transform_keypoints(slice(*it, e.range), e.crop);
        if (a.smooth_window > 1) {
            clip = smooth(clip, a.smooth_window);
        }
        clip.id = e.clip_id;
        const auto feat = align_to_frames(slice_features(audio[e.source_id], e.range, e.fps), clip.num_frames());
        write_skeleton_file(a.out / "clips" / (e.clip_id + ".skel"), {clip});
        save_features(a.out / "clips" / (e.clip_id + ".feat"), feat);
        data << e.clip_id << "\tclips/" << e.clip_id << ".skel\tclips/" << e.clip_id << ".feat\n";
        ++written;
    }
    info("cmd=preprocess clips=" + std::to_string(written));
    if (written == 0) {
        throw std::runtime_error(a.manifest.string() + ": no accepted clips");
    }
    return 0;
}

struct TrainArgs {
    std::optional<fs::path> config;
    fs::path data;
    fs::path out;
    std::optional<fs::path> resume;
    std::optional<std::uint64_t> seed;
    std::optional<long long> steps;
};

int cmd_train(const TrainArgs& a) {
    fs::create_directories(a.out);
    const auto clips = load_clips(a.data);
    std::optional<Trainer> trainer;
    if (a.resume) {
        auto ckpt = load_checkpoint(*a.resume);
        if (a.steps) {
            ckpt.config.total_steps = *a.steps;
        }
        auto set = build_training_set(clips, ckpt.config, &ckpt.stats);
        trainer.emplace(ckpt, std::move(set));
        info("cmd=train resume=" + a.resume->string() + " step=" + std::to_string(ckpt.step));
    } else {
        TrainConfig config = a.config ? train_config_from(KeyValues::load(*a.config)) : TrainConfig{};
        if (a.seed) {
            config.seed = *a.seed;
        }
        if (a.steps) {
            config.total_steps = *a.steps;
        }
        validate(config);
        auto set = build_training_set(clips, config);
        for (const auto& s : set.skipped) {
            log_line("warn", "cmd=train clip=" + s + " shorter than window, skipped");
        }
        trainer.emplace(config, std::move(set));
    }
    const auto& cfg = trainer->config();
    info("cmd=train examples=" + std::to_string(trainer->data().examples.size()) +
         " steps=" + std::to_string(cfg.total_steps));
    std::ofstream log(a.out / "train_log.txt", a.resume ? std::ios::app : std::ios::trunc);
    const auto t0 = std::chrono::steady_clock::now();
    const auto files = trainer->run(a.out, [&](long long step, double loss) {
        log << step << "\t" << loss << "\n";
        if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.total_steps)) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::ostringstream ss;
            ss << "cmd=train step=" << step << " loss=" << loss << " elapsed_s=" << secs;
            info(ss.str());
        }
    });
    for (const auto& f : files) {
        log_line("debug", "cmd=train checkpoint=" + f.string());
    }
    if (!files.empty()) {
        fs::copy_file(files.back(), a.out / "final.bin", fs::copy_options::overwrite_existing);
    }
    return 0;
}

struct GenerateArgs {
    fs::path ckpt;
    fs::path ref;
    fs::path audio;
    double alpha = 2.5;
    std::uint64_t seed = 0;
    fs::path out;
    std::optional<int> frames;
    int ref_frame = 0;
    std::string variant = "full_body";
    std::string id;
};

int cmd_generate(const GenerateArgs& a) {
    const auto variant = parse_pose_variant(a.variant);
    const auto ref = read_any_pose(a.ref);
    if (a.ref_frame < 0 || a.ref_frame >= ref.num_frames()) {
        throw std::invalid_argument("--ref-frame " + std::to_string(a.ref_frame) + " out of range for " +
                                    a.ref.string());
    }
    GenerationRequest req;
    req.checkpoint = a.ckpt;
    req.reference = ref.frame(a.ref_frame);
    req.audio = load_features(a.audio);
    req.guidance.alpha = a.alpha;
    req.seed = a.seed;
    req.frames = a.frames;
    req.id = a.id.empty() ? a.audio.stem().string() : a.id;
    const auto seq = generate(req);
    fs::create_directories(a.out);
    const auto path = a.out / (req.id + ".pose.txt");
    export_pose(seq, path, variant);
    info("cmd=generate out=" + path.string() + " frames=" + std::to_string(seq.num_frames()));
    return 0;
}

struct RenderArgs {
    fs::path pose;
    fs::path out;
    int size = 512;
    int line_width = 4;
    int point_radius = 3;
    double threshold = 0.3;
    bool no_face = false;
};

int cmd_render(const RenderArgs& a) {
    RenderStyle style;
    style.canvas = a.size;
    style.line_width = a.line_width;
    style.point_radius = a.point_radius;
    style.confidence_threshold = a.threshold;
    style.draw_face = !a.no_face;
    const auto files = render_to_directory(read_any_pose(a.pose), a.out, style);
    info("cmd=render frames=" + std::to_string(files.size()) + " out=" + a.out.string());
    return 0;
}

struct EvalArgs {
    fs::path pred;
    fs::path gt;
    fs::path out;
    int size = 128;
};

// Clip name of a pose file ("<clip>.pose.txt" or "<clip>.skel"), empty otherwise.
std::string pose_clip_name(const fs::path& p) {
    const auto name = p.filename().string();
    for (const std::string ext : {".pose.txt", ".skel"}) {
        if (name.size() > ext.size() && name.compare(name.size() - ext.size(), ext.size(), ext) == 0) {
            return name.substr(0, name.size() - ext.size());
        }
    }
    return {};
}

std::map<std::string, fs::path> pose_files(const fs::path& dir) {
    std::map<std::string, fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto clip = pose_clip_name(e.path());
        if (e.is_regular_file() && !clip.empty()) {
            out[clip] = e.path();
        }
    }
    return out;
}

// Pose files present under both directories (matched by clip name, either
// format) are compared in skeleton space and as rendered pose maps.
int cmd_eval(const EvalArgs& a) {
    if (!fs::is_directory(a.pred) || !fs::is_directory(a.gt)) {
        throw std::runtime_error("--pred and --gt must be directories");
    }
    const auto pred_files = pose_files(a.pred), gt_files = pose_files(a.gt);
    std::vector<std::string> names;
    for (const auto& [clip, path] : pred_files) {
        if (gt_files.count(clip)) {
            names.push_back(clip);
        }
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) {
        throw std::runtime_error("no pose files common to " + a.pred.string() + " and " + a.gt.string());
    }
    RenderStyle style;
    style.canvas = a.size;
    style.line_width = std::max(1, a.size / 128);
    style.point_radius = std::max(1, a.size / 170);

    std::ofstream report(a.out);
    if (!report) {
        throw std::runtime_error(a.out.string() + ": cannot write report");
    }
    report << "clip\tframes\tssim\tpsnr\tpjpe\n";
    double sum_ssim = 0, sum_psnr = 0, sum_pjpe = 0;
    for (const auto& name : names) {
        auto pred = read_any_pose(pred_files.at(name));
        auto gt = read_any_pose(gt_files.at(name));
        if (pred.num_keypoints() != gt.num_keypoints()) {
            throw std::runtime_error(name + ": keypoint counts differ");
        }
        const int frames = std::min(pred.num_frames(), gt.num_frames());
        if (frames < 1) {
            throw std::runtime_error(name + ": empty sequence");
        }
        if (pred.num_frames() != gt.num_frames()) {
            log_line("warn", "cmd=eval clip=" + name + " frame counts differ, comparing the first " +
                                 std::to_string(frames));
        }
        pred = slice(pred, {0, frames});
        gt = slice(gt, {0, frames});
        const auto pi = render(pred, style), gi = render(gt, style);
        double s = 0, p = 0;
        for (int f = 0; f < frames; ++f) {
            s += ssim(pi[f], gi[f]);
            p += psnr(pi[f], gi[f]);
        }
        s /= frames;
        p /= frames;
        const double j = pjpe(pred, gt).mean;
        report << name << "\t" << frames << "\t" << s << "\t" << p << "\t" << j << "\n";
        sum_ssim += s;
        sum_psnr += p;
        sum_pjpe += j;
    }
    const double n = static_cast<double>(names.size());
    report << "mean\t" << names.size() << "\t" << sum_ssim / n << "\t" << sum_psnr / n << "\t" << sum_pjpe / n
           << "\n";
    info("cmd=eval clips=" + std::to_string(names.size()) + " ssim=" + std::to_string(sum_ssim / n) +
         " psnr=" + std::to_string(sum_psnr / n) + " pjpe=" + std::to_string(sum_pjpe / n));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio-driven whole-body skeleton generation"};
    app.require_subcommand(1);
    int verbose = 0;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "More log output");
    app.add_flag("-q,--quiet", quiet, "Only warnings and errors");

    SyntheticArgs syn;
    auto* c_syn = app.add_subcommand("make-synthetic", "Write a small synthetic source corpus");
    c_syn->add_option("--out", syn.out, "Output directory")->required();
    c_syn->add_option("--videos", syn.videos, "Number of source videos")->check(CLI::PositiveNumber);
    c_syn->add_option("--frames", syn.frames, "Frames per video")->check(CLI::Range(2, 1000000));
    c_syn->add_option("--cuts", syn.cuts, "Hard cuts per video")->check(CLI::NonNegativeNumber);
    c_syn->add_option("--seed", syn.seed, "Seed");

    FilterArgs flt;
    auto* c_flt = app.add_subcommand("filter-clips", "Segment videos into clips and apply quality rules");
    c_flt->add_option("--skeletons", flt.skeletons, "Directory of <video>.skel files")->required();
    c_flt->add_option("--histograms", flt.histograms, "Directory of <video>.hist files")->required();
    c_flt->add_option("--rules", flt.rules, "Filter rules key/value file");
    c_flt->add_option("--out", flt.out, "Clip manifest to write")->required();
    c_flt->add_option("--width", flt.width, "Source frame width")->check(CLI::PositiveNumber);
    c_flt->add_option("--height", flt.height, "Source frame height")->check(CLI::PositiveNumber);
    c_flt->add_option("--margin", flt.margin, "Crop margin fraction")->check(CLI::Range(0.0, 10.0));
    c_flt->add_option("--threshold", flt.threshold, "Shot-cut chi-square threshold")->check(CLI::Range(0.0, 1.0));

    PreprocessArgs pre;
    auto* c_pre = app.add_subcommand("preprocess", "Crop, smooth and align accepted clips for training");
    c_pre->add_option("--skeletons", pre.skeletons, "Directory of <video>.skel files")->required();
    c_pre->add_option("--features", pre.features, "Directory of <video>.feat files")->required();
    c_pre->add_option("--manifest", pre.manifest, "Clip manifest from filter-clips")->required();
    c_pre->add_option("--out", pre.out, "Output directory")->required();
    c_pre->add_option("--smooth-window", pre.smooth_window, "Moving-average window (1 disables)")
        ->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "Train the denoiser");
    c_tr->add_option("--config", tr.config, "Key/value training config");
    c_tr->add_option("--data", tr.data, "Data manifest written by preprocess")->required();
    c_tr->add_option("--out", tr.out, "Checkpoint directory")->required();
    c_tr->add_option("--resume", tr.resume, "Continue from this checkpoint");
    c_tr->add_option("--seed", tr.seed, "Override the config seed");
    c_tr->add_option("--steps", tr.steps, "Override total_steps")->check(CLI::PositiveNumber);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Generate a skeleton sequence from audio features");
    c_gen->add_option("--ckpt", gen.ckpt, "Checkpoint")->required();
    c_gen->add_option("--ref", gen.ref, "Reference skeleton (.skel or pose text)")->required();
    c_gen->add_option("--audio", gen.audio, "Audio feature file")->required();
    c_gen->add_option("--alpha", gen.alpha, "Guidance scale")->check(CLI::NonNegativeNumber);
    c_gen->add_option("--seed", gen.seed, "Sampling seed");
    c_gen->add_option("--out", gen.out, "Output directory")->required();
    c_gen->add_option("--frames", gen.frames, "Frame count (default: from audio duration)")
        ->check(CLI::PositiveNumber);
    c_gen->add_option("--ref-frame", gen.ref_frame, "Frame of --ref used as reference");
    c_gen->add_option("--variant", gen.variant, "full_body or hands_only");
    c_gen->add_option("--id", gen.id, "Sequence id (default: audio file stem)");

    RenderArgs ren;
    auto* c_ren = app.add_subcommand("render", "Draw pose maps as PNG frames");
    c_ren->add_option("--pose", ren.pose, "Pose file (.skel or pose text)")->required();
    c_ren->add_option("--out", ren.out, "Output directory")->required();
    c_ren->add_option("--size", ren.size, "Canvas size in pixels")->check(CLI::Range(2, 8192));
    c_ren->add_option("--line-width", ren.line_width, "Limb width")->check(CLI::PositiveNumber);
    c_ren->add_option("--point-radius", ren.point_radius, "Keypoint dot radius")->check(CLI::NonNegativeNumber);
    c_ren->add_option("--threshold", ren.threshold, "Confidence threshold")->check(CLI::Range(0.0, 1.0));
    c_ren->add_flag("--no-face", ren.no_face, "Skip face landmarks");

    EvalArgs ev;
    auto* c_ev = app.add_subcommand("eval", "SSIM/PSNR/PJPE between predicted and ground-truth poses");
    c_ev->add_option("--pred", ev.pred, "Directory of predicted pose files")->required();
    c_ev->add_option("--gt", ev.gt, "Directory of ground-truth pose files")->required();
    c_ev->add_option("--out", ev.out, "Report file")->required();
    c_ev->add_option("--size", ev.size, "Render size for image metrics")->check(CLI::Range(16, 4096));

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.empty() || arg[0] == '-') {
            continue;
        }
        if (!app.get_subcommand_no_throw(arg)) {
            std::cerr << "unknown command '" << arg << "'\nRun with --help for the list of commands.\n";
            return 1;
        }
        break;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    g_verbosity = quiet ? 0 : 1 + verbose;

    try {
        if (c_syn->parsed()) return cmd_make_synthetic(syn);
        if (c_flt->parsed()) return cmd_filter_clips(flt);
        if (c_pre->parsed()) return cmd_preprocess(pre);
        if (c_tr->parsed()) return cmd_train(tr);
        if (c_gen->parsed()) return cmd_generate(gen);
        if (c_ren->parsed()) return cmd_render(ren);
        if (c_ev->parsed()) return cmd_eval(ev);
    } catch (const std::exception& e) {
        log_line("error", std::string("msg=\"") + e.what() + "\"");
        return 2;
    }
    return 1;
}
