#include "skelgen/generation.hpp"

#include "skelgen/skeleton_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace skelgen {

int default_frame_count(const AudioFeatureSequence& audio) {
    return frames_for_duration(audio, kFps);
}

SkeletonSequence generate(const GenerationRequest& request) {
    return generate(load_checkpoint(request.checkpoint), request);
}

SkeletonSequence generate(const Checkpoint& ckpt, const GenerationRequest& req) {
    const auto& model = ckpt.config.model;
    const int frames = req.frames ? *req.frames : default_frame_count(req.audio);
    if (frames < 1) {
        throw std::invalid_argument("generate: audio too short for a single frame");
    }
    if (frames > model.max_frames) {
        throw std::invalid_argument("generate: " + std::to_string(frames) + " frames exceed the model's max_frames (" +
                                    std::to_string(model.max_frames) + ")");
    }
    if (req.reference.num_keypoints() != kNumKeypoints) {
        throw std::invalid_argument("generate: reference skeleton must have " + std::to_string(kNumKeypoints) +
                                    " keypoints");
    }
    if (!std::isfinite(req.guidance.alpha) || req.guidance.alpha < 0.0) {
        throw std::invalid_argument("generate: guidance alpha must be finite and >= 0");
    }
    if (model.keypoint_dim != kMotionDim) {
        throw std::invalid_argument("generate: checkpoint keypoint_dim does not match the 133-keypoint layout");
    }

    const Matrix audio = req.audio.values.rows() == frames ? req.audio.values : align_to_frames(req.audio, frames).values;
    const auto report = validate(AudioFeatureSequence{audio, kFps}, frames);
    if (!report.ok()) {
        throw std::invalid_argument("generate: audio features rejected: " + report.issues.front().message);
    }

    const auto ref_seq = SkeletonSequence::from_frames({req.reference});
    const Matrix reference = normalize(encode_motion(ref_seq, ckpt.config.encoding), ckpt.stats);
    const auto sched = make_schedule(ckpt.config.schedule, ckpt.config.diffusion_steps);
    const auto& params = ckpt.params;

    X0Predictor predict = [&](const Matrix& x_t, int t, bool unconditional) {
        const auto input = make_input(params, x_t, &reference, unconditional ? nullptr : &audio, t);
        return denoise(params, input);
    };
    const Matrix normalized = sample(predict, frames, model.keypoint_dim, sched, req.guidance, req.seed);
    auto seq = decode_motion(denormalize(normalized, ckpt.stats), ckpt.config.encoding);
    seq.confidence.setOnes();
    seq.fps = kFps;
    seq.id = req.id;
    return seq;
}

PoseVariant parse_pose_variant(const std::string& name) {
    if (name == "full_body") {
        return PoseVariant::FullBody;
    }
    if (name == "hands_only") {
        return PoseVariant::HandsOnly;
    }
    throw std::invalid_argument("unknown pose variant '" + name + "' (expected full_body or hands_only)");
}

std::string to_string(PoseVariant variant) {
    return variant == PoseVariant::FullBody ? "full_body" : "hands_only";
}

void export_pose(const SkeletonSequence& seq, const std::filesystem::path& path, PoseVariant variant) {
    validate(seq, -1);
    SkeletonSequence hands;
    const SkeletonSequence* src = &seq;
    if (variant == PoseVariant::HandsOnly) {
        hands = extract_hand_skeletons(seq);
        src = &hands;
    }
    if (src->id.find('\n') != std::string::npos) {
        throw std::invalid_argument("export_pose: clip id contains a newline");
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    const int k = src->num_keypoints();
    os << "skelgen-pose 1\n";
    os << "id " << src->id << '\n';
    os << "fps " << src->fps << '\n';
    os << "keypoints " << k << '\n';
    os << "frames " << src->num_frames() << '\n';
    char buf[64];
    std::string line;
    for (int f = 0; f < src->num_frames(); ++f) {
        line.clear();
        for (int j = 0; j < k; ++j) {
            std::snprintf(buf, sizeof buf, "%s%.9g %.9g %.9g", j == 0 ? "" : " ", src->coords(f, 2 * j),
                          src->coords(f, 2 * j + 1), src->confidence(f, j));
            line += buf;
        }
        os << line << '\n';
    }
    if (!os) {
        throw std::runtime_error("I/O error writing " + path.string());
    }
}

SkeletonSequence import_pose(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    const std::string where = path.string() + ": ";
    std::string line;
    auto header = [&](const std::string& key) {
        if (!std::getline(is, line) || line.rfind(key + " ", 0) != 0) {
            throw std::runtime_error(where + "expected '" + key + "' header line");
        }
        return line.substr(key.size() + 1);
    };
    if (header("skelgen-pose") != "1") {
        throw std::runtime_error(where + "unsupported pose format version");
    }
    SkeletonSequence seq;
    seq.id = header("id");
    int k = 0, frames = 0;
    try {
        seq.fps = std::stod(header("fps"));
        k = std::stoi(header("keypoints"));
        frames = std::stoi(header("frames"));
    } catch (const std::logic_error&) {
        throw std::runtime_error(where + "malformed header value");
    }
    if (k < 1 || frames < 1) {
        throw std::runtime_error(where + "keypoint and frame counts must be positive");
    }
    seq.coords.resize(frames, 2 * k);
    seq.confidence.resize(frames, k);
    for (int f = 0; f < frames; ++f) {
        if (!std::getline(is, line)) {
            throw std::runtime_error(where + "expected " + std::to_string(frames) + " frame lines, found " +
                                     std::to_string(f));
        }
        std::istringstream ls(line);
        for (int j = 0; j < k; ++j) {
            if (!(ls >> seq.coords(f, 2 * j) >> seq.coords(f, 2 * j + 1) >> seq.confidence(f, j))) {
                throw std::runtime_error(where + "frame " + std::to_string(f) + ": expected " + std::to_string(k) +
                                         " keypoint triples");
            }
        }
    }
    validate(seq, -1);
    return seq;
}

SkeletonSequence read_any_pose(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string magic(12, '\0');
    is.read(magic.data(), 12);
    if (magic.rfind("skelgen-pose", 0) == 0) {
        return import_pose(path);
    }
    auto clips = read_skeleton_file(path);
    if (clips.empty()) {
        throw std::runtime_error(path.string() + ": no clips");
    }
    return clips.front();
}

// ---- rendering ----

const std::vector<Edge>& wholebody_edges() {
    static const std::vector<Edge> edges = [] {
        std::vector<Edge> e = {
            // body
            {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6}, {5, 7}, {6, 8},
            {7, 9}, {8, 10}, {1, 2}, {0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6},
            // feet
            {15, 17}, {15, 18}, {15, 19}, {16, 20}, {16, 21}, {16, 22},
        };
        const int hand[][2] = {{0, 1},  {1, 2},   {2, 3},   {3, 4},   {0, 5},   {5, 6},   {6, 7},
                               {7, 8},  {0, 9},   {9, 10},  {10, 11}, {11, 12}, {0, 13}, {13, 14},
                               {14, 15}, {15, 16}, {0, 17}, {17, 18}, {18, 19}, {19, 20}};
        for (int base : {wholebody::kLeftHandBegin, wholebody::kRightHandBegin}) {
            for (const auto& h : hand) {
                e.push_back({base + h[0], base + h[1]});
            }
        }
        return e;
    }();
    return edges;
}

namespace {

using Rgb = std::array<std::uint8_t, 3>;

const std::vector<Rgb>& default_palette() {
    static const std::vector<Rgb> p = {
        {255, 0, 0},   {255, 85, 0},  {255, 170, 0}, {255, 255, 0}, {170, 255, 0}, {85, 255, 0},
        {0, 255, 0},   {0, 255, 85},  {0, 255, 170}, {0, 255, 255}, {0, 170, 255}, {0, 85, 255},
        {0, 0, 255},   {85, 0, 255},  {170, 0, 255}, {255, 0, 255}, {255, 0, 170}, {255, 0, 85},
    };
    return p;
}

void plot(Image& img, int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) {
        return;
    }
    for (int ch = 0; ch < 3; ++ch) {
        img.at(x, y, ch) = c[ch];
    }
}

void disc(Image& img, int cx, int cy, int r, const Rgb& c) {
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= r * r) {
                plot(img, cx + dx, cy + dy, c);
            }
        }
    }
}

void segment(Image& img, int x0, int y0, int x1, int y1, int width, const Rgb& c) {
    const int r = std::max(0, (width - 1) / 2);
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (r == 0) {
            plot(img, x0, y0, c);
        } else {
            disc(img, x0, y0, r, c);
        }
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

Image render_frame(const SkeletonFrame& frame, const RenderStyle& style) {
    if (style.canvas < 2) {
        throw std::invalid_argument("render: canvas must be at least 2 pixels");
    }
    Image img = Image::filled(style.canvas, style.canvas, 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                img.at(x, y, ch) = style.background[ch];
            }
        }
    }
    const auto& palette = style.palette.empty() ? default_palette() : style.palette;
    const int k = frame.num_keypoints();
    const double scale = style.canvas - 1;
    auto px = [&](int j) {
        return std::pair<int, int>{static_cast<int>(std::lround(frame.coords(j, 0) * scale)),
                                   static_cast<int>(std::lround(frame.coords(j, 1) * scale))};
    };
    auto visible = [&](int j) {
        return j < k && frame.confidence(j) >= style.confidence_threshold && std::isfinite(frame.coords(j, 0)) &&
               std::isfinite(frame.coords(j, 1)) && std::abs(frame.coords(j, 0)) < 1e6 &&
               std::abs(frame.coords(j, 1)) < 1e6;
    };

    const auto& edges = wholebody_edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [a, b] = edges[i];
        if (!visible(a) || !visible(b)) {
            continue;
        }
        const auto [x0, y0] = px(a);
        const auto [x1, y1] = px(b);
        segment(img, x0, y0, x1, y1, style.line_width, palette[i % palette.size()]);
    }
    if (style.point_radius > 0) {
        for (int j = 0; j < k; ++j) {
            const bool face = j >= wholebody::kFaceBegin && j < wholebody::kLeftHandBegin;
            if (!visible(j) || (face && !style.draw_face)) {
                continue;
            }
            const auto [x, y] = px(j);
            const Rgb c = face ? Rgb{255, 255, 255} : palette[static_cast<std::size_t>(j) % palette.size()];
            disc(img, x, y, face ? std::max(1, style.point_radius / 2) : style.point_radius, c);
        }
    }
    return img;
}

std::vector<Image> render(const SkeletonSequence& seq, const RenderStyle& style) {
    validate(seq, -1);
    std::vector<Image> out;
    out.reserve(static_cast<std::size_t>(seq.num_frames()));
    for (int f = 0; f < seq.num_frames(); ++f) {
        out.push_back(render_frame(seq.frame(f), style));
    }
    return out;
}

std::vector<std::filesystem::path> render_to_directory(const SkeletonSequence& seq, const std::filesystem::path& dir,
                                                       const RenderStyle& style) {
    validate(seq, -1);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (int f = 0; f < seq.num_frames(); ++f) {
        std::ostringstream name;
        name << "frame_" << std::setw(5) << std::setfill('0') << f << ".png";
        const auto p = dir / name.str();
        write_png(p, render_frame(seq.frame(f), style));
        paths.push_back(p);
    }
    return paths;
}

}  // namespace skelgen
