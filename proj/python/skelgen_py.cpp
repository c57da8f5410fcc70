#include "skelgen/dataset_tools.hpp"
#include "skelgen/diffusion.hpp"
#include "skelgen/generation.hpp"
#include "skelgen/metrics.hpp"
#include "skelgen/skeleton.hpp"
#include "skelgen/synthetic.hpp"
#include "skelgen/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace skelgen;

namespace {

SkeletonSequence make_sequence(const Matrix& coords, const std::optional<Matrix>& confidence) {
    if (coords.cols() % 2 != 0) {
        throw std::invalid_argument("coords must have 2K columns (interleaved x, y)");
    }
    SkeletonSequence seq;
    seq.coords = coords;
    seq.confidence = confidence ? *confidence : Matrix::Ones(coords.rows(), coords.cols() / 2);
    validate(seq, -1);
    return seq;
}

KeyValues key_values_from(const std::map<std::string, py::object>& config) {
    KeyValues kv;
    for (const auto& [key, value] : config) {
        if (py::isinstance<py::bool_>(value)) {
            kv.set(key, value.cast<bool>() ? "true" : "false");
        } else {
            kv.set(key, py::str(value).cast<std::string>());
        }
    }
    return kv;
}

py::array_t<std::uint8_t> image_to_array(const Image& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, img.channels});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

Image array_to_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3) {
        throw std::invalid_argument("image must be an H x W x C uint8 array");
    }
    Image img;
    img.height = static_cast<int>(a.shape(0));
    img.width = static_cast<int>(a.shape(1));
    img.channels = static_cast<int>(a.shape(2));
    img.pixels.assign(a.data(), a.data() + a.size());
    return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Audio-driven whole-body skeleton generation";
    m.attr("NUM_KEYPOINTS") = kNumKeypoints;
    m.attr("MOTION_DIM") = kMotionDim;
    m.attr("AUDIO_DIM") = kAudioDim;
    m.attr("FPS") = kFps;

    // Skeleton representation. Sequences are F x 2K coordinate arrays.
    m.def("to_local", [](const Matrix& coords) { return to_local(make_sequence(coords, std::nullopt)).values; },
          py::arg("coords"), "Global F x 266 coordinates to the root-relative representation.");
    m.def("from_local", [](const Matrix& values) {
        LocalMotionSequence lm;
        lm.values = values;
        return from_local(lm).coords;
    }, py::arg("values"));
    m.def("smooth", [](const Matrix& coords, int window) {
        return smooth(make_sequence(coords, std::nullopt), window).coords;
    }, py::arg("coords"), py::arg("window") = 5, "Moving average over every keypoint except the mouth.");
    m.def("mouth_indices", &mouth_indices);
    m.def("shoulder_width", [](const Matrix& coords) {
        return shoulder_width(make_sequence(coords, std::nullopt).frame(0));
    }, py::arg("frame_coords"));

    // Diffusion.
    m.def("make_schedule", [](const std::string& kind, int steps) {
        const auto s = make_schedule(parse_schedule_kind(kind), steps);
        py::dict d;
        d["beta"] = s.beta;
        d["alpha_bar"] = s.alpha_bar;
        d["posterior_var"] = s.posterior_var;
        return d;
    }, py::arg("kind") = "cosine", py::arg("steps") = 1000);
    m.def("q_sample", [](const Matrix& x0, int t, const Matrix& eps, const std::string& kind, int steps) {
        return q_sample(x0, t, eps, make_schedule(parse_schedule_kind(kind), steps));
    }, py::arg("x0"), py::arg("t"), py::arg("eps"), py::arg("kind") = "cosine", py::arg("steps") = 1000);
    m.def("cfg_combine", &cfg_combine, py::arg("uncond"), py::arg("cond"), py::arg("alpha"));

    // Training.
    m.def("synthetic_corpus", [](int clips, int frames, std::vector<double> shoulder_widths, std::uint64_t seed) {
        SyntheticCorpusOptions o;
        o.clips = clips;
        o.frames = frames;
        o.seed = seed;
        o.speakers.clear();
        for (double w : shoulder_widths) {
            o.speakers.push_back(SpeakerShape{w});
        }
        py::list out;
        for (const auto& c : synthetic_corpus(o)) {
            out.append(py::make_tuple(c.skeleton.id, c.skeleton.coords, c.audio.values));
        }
        return out;
    }, py::arg("clips") = 8, py::arg("frames") = 32, py::arg("shoulder_widths") = std::vector<double>{0.25},
       py::arg("seed") = 1, "List of (clip_id, coords F x 266, frame-aligned audio F x 768).");
    m.def("train", [](const std::vector<Matrix>& coords, const std::vector<Matrix>& audio,
                      const std::map<std::string, py::object>& config, const std::filesystem::path& out_dir) {
        if (coords.size() != audio.size()) {
            throw std::invalid_argument("coords and audio lists differ in length");
        }
        const auto cfg = train_config_from(key_values_from(config));
        std::vector<RawClip> clips;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            RawClip c{make_sequence(coords[i], std::nullopt), AudioFeatureSequence{audio[i], kFps}};
            c.skeleton.id = "clip" + std::to_string(i);
            clips.push_back(std::move(c));
        }
        std::vector<double> losses;
        std::vector<std::filesystem::path> files;
        {
            py::gil_scoped_release release;
            Trainer t(cfg, build_training_set(clips, cfg));
            files = t.run(out_dir, [&](long long, double loss) { losses.push_back(loss); });
        }
        return py::make_tuple(files, losses);
    }, py::arg("coords"), py::arg("audio"), py::arg("config"), py::arg("out_dir"),
       "Train on frame-aligned clips; config keys as in the key/value config file. Returns (checkpoints, losses).");

    // Generation.
    m.def("generate", [](const std::filesystem::path& checkpoint, const Matrix& reference, const Matrix& audio,
                         double source_rate, double alpha, std::uint64_t seed, std::optional<int> frames) {
        GenerationRequest req;
        req.checkpoint = checkpoint;
        req.reference = make_sequence(reference, std::nullopt).frame(0);
        req.audio = AudioFeatureSequence{audio, source_rate};
        req.guidance.alpha = alpha;
        req.seed = seed;
        req.frames = frames;
        py::gil_scoped_release release;
        return generate(req).coords;
    }, py::arg("checkpoint"), py::arg("reference"), py::arg("audio"), py::arg("source_rate") = 50.0,
       py::arg("alpha") = 2.5, py::arg("seed") = 0, py::arg("frames") = std::nullopt,
       "reference: 1 x 266 global coordinates. Returns F x 266 coordinates.");
    m.def("export_pose", [](const Matrix& coords, const std::optional<Matrix>& confidence,
                            const std::filesystem::path& path, const std::string& variant, const std::string& id) {
        auto seq = make_sequence(coords, confidence);
        seq.id = id;
        export_pose(seq, path, parse_pose_variant(variant));
    }, py::arg("coords"), py::arg("confidence") = std::nullopt, py::arg("path"), py::arg("variant") = "full_body",
       py::arg("id") = "generated");
    m.def("import_pose", [](const std::filesystem::path& path) {
        const auto seq = read_any_pose(path);
        return py::make_tuple(seq.coords, seq.confidence);
    }, py::arg("path"), "Returns (coords, confidence).");
    m.def("render_frame", [](const Matrix& coords, int size, int line_width, int point_radius) {
        RenderStyle style;
        style.canvas = size;
        style.line_width = line_width;
        style.point_radius = point_radius;
        return image_to_array(render_frame(make_sequence(coords, std::nullopt).frame(0), style));
    }, py::arg("frame_coords"), py::arg("size") = 512, py::arg("line_width") = 4, py::arg("point_radius") = 3);

    // Dataset tools.
    m.def("color_histogram", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& rgb) {
        return color_histogram(std::vector<std::uint8_t>(rgb.data(), rgb.data() + rgb.size()));
    }, py::arg("rgb"));
    m.def("detect_shots", &detect_shots, py::arg("histograms"), py::arg("threshold") = kDefaultShotThreshold);
    m.def("segment_clips", [](const std::vector<int>& cuts, int total) {
        std::vector<std::pair<int, int>> out;
        for (const auto& r : segment_clips(cuts, total)) {
            out.emplace_back(r.begin, r.end);
        }
        return out;
    }, py::arg("cuts"), py::arg("total_frames"));
    m.def("filter_clip", [](const Matrix& coords, const std::optional<Matrix>& confidence) {
        std::map<std::string, std::pair<bool, double>> out;
        for (const auto& [name, v] : filter_clip(make_sequence(coords, confidence)).rules) {
            out[name] = {v.pass, v.value};
        }
        return out;
    }, py::arg("coords"), py::arg("confidence") = std::nullopt);

    // Metrics. Images are 2-D float arrays in [0, 1] or H x W x C uint8 arrays.
    m.def("ssim", py::overload_cast<const Matrix&, const Matrix&>(&ssim), py::arg("a"), py::arg("b"));
    m.def("ssim_image", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a,
                           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& b) {
        return ssim(array_to_image(a), array_to_image(b));
    }, py::arg("a"), py::arg("b"));
    m.def("psnr", py::overload_cast<const Matrix&, const Matrix&>(&psnr), py::arg("a"), py::arg("b"));
    m.def("psnr_from_mse", &psnr_from_mse, py::arg("mse"));
    m.def("pjpe", [](const Matrix& a, const Matrix& b) {
        const auto r = pjpe(make_sequence(a, std::nullopt), make_sequence(b, std::nullopt));
        return py::make_tuple(Vector(r.per_joint), r.mean);
    }, py::arg("a"), py::arg("b"), "Returns (per_joint, mean).");
}
