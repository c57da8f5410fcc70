#include "skelgen/dataset_tools.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace skelgen {

ColorHistogram color_histogram(const std::vector<std::uint8_t>& rgb) {
    if (rgb.empty() || rgb.size() % 3 != 0) {
        throw std::invalid_argument("color_histogram: expected a non-empty RGB buffer");
    }
    ColorHistogram h{};
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const auto c = i % 3;
        h[c * kHistogramBins + rgb[i] * kHistogramBins / 256] += 1.0;
    }
    return h;
}

double chi_square_distance(const ColorHistogram& a, const ColorHistogram& b) {
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        double sa = 0.0, sb = 0.0;
        for (int i = 0; i < kHistogramBins; ++i) {
            sa += a[c * kHistogramBins + i];
            sb += b[c * kHistogramBins + i];
        }
        if (!(sa > 0.0) || !(sb > 0.0)) {
            throw std::invalid_argument("chi_square_distance: empty histogram channel");
        }
        double d = 0.0;
        for (int i = 0; i < kHistogramBins; ++i) {
            const double p = a[c * kHistogramBins + i] / sa;
            const double q = b[c * kHistogramBins + i] / sb;
            if (p + q > 0.0) {
                d += (p - q) * (p - q) / (p + q);
            }
        }
        total += 0.5 * d;
    }
    return total / 3.0;
}

std::vector<int> detect_shots(const std::vector<ColorHistogram>& frames, double threshold) {
    std::vector<int> cuts;
    for (std::size_t f = 1; f < frames.size(); ++f) {
        if (chi_square_distance(frames[f - 1], frames[f]) > threshold) {
            cuts.push_back(static_cast<int>(f));
        }
    }
    return cuts;
}

std::vector<FrameRange> segment_clips(const std::vector<int>& cuts, int total_frames, const SegmentRules& rules) {
    if (rules.min_frames < 1 || rules.max_frames < rules.min_frames) {
        throw std::invalid_argument("segment_clips: need 1 <= min_frames <= max_frames");
    }
    if (!std::is_sorted(cuts.begin(), cuts.end())) {
        throw std::invalid_argument("segment_clips: cuts must be sorted");
    }
    std::vector<int> bounds{0};
    for (int c : cuts) {
        if (c > bounds.back() && c < total_frames) {
            bounds.push_back(c);
        }
    }
    bounds.push_back(std::max(total_frames, 0));
    std::vector<FrameRange> out;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        int begin = bounds[s];
        const int end = bounds[s + 1];
        while (end - begin >= rules.min_frames) {
            const int len = std::min(rules.max_frames, end - begin);
            out.push_back({begin, begin + len});
            begin += len;
        }
    }
    return out;
}

FilterRules filter_rules_from(const KeyValues& kv) {
    FilterRules r;
    r.upper_body_conf = kv.get_double("upper_body_conf", r.upper_body_conf);
    r.upper_body_frame_fraction = kv.get_double("upper_body_frame_fraction", r.upper_body_frame_fraction);
    r.frontal_ratio = kv.get_double("frontal_ratio", r.frontal_ratio);
    r.nose_conf = kv.get_double("nose_conf", r.nose_conf);
    r.min_height = kv.get_double("min_height", r.min_height);
    r.min_motion = kv.get_double("min_motion", r.min_motion);
    r.bbox_conf = kv.get_double("bbox_conf", r.bbox_conf);
    r.enable_upper_body = kv.get_bool("enable_upper_body", r.enable_upper_body);
    r.enable_frontal = kv.get_bool("enable_frontal", r.enable_frontal);
    r.enable_size = kv.get_bool("enable_size", r.enable_size);
    r.enable_motion = kv.get_bool("enable_motion", r.enable_motion);
    const auto unused = kv.unused_keys();
    if (!unused.empty()) {
        throw std::invalid_argument("filter rules: unknown key '" + unused.front() + "'");
    }
    return r;
}

bool ClipVerdict::accepted() const {
    return std::all_of(rules.begin(), rules.end(), [](const auto& kv) { return kv.second.pass; });
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

double bbox_height(const SkeletonSequence& seq, int f, double min_conf) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int j = 0; j < seq.num_keypoints(); ++j) {
        if (seq.confidence(f, j) < min_conf) {
            continue;
        }
        const double y = seq.coords(f, 2 * j + 1);
        lo = any ? std::min(lo, y) : y;
        hi = any ? std::max(hi, y) : y;
        any = true;
    }
    return any ? hi - lo : 0.0;
}

}  // namespace

ClipVerdict filter_clip(const SkeletonSequence& seq, const FilterRules& rules) {
    validate(seq);
    using namespace wholebody;
    const int frames = seq.num_frames();
    ClipVerdict v;

    std::vector<double> heights(frames);
    for (int f = 0; f < frames; ++f) {
        heights[f] = bbox_height(seq, f, rules.bbox_conf);
    }

    if (rules.enable_upper_body) {
        static constexpr int upper[] = {kNose, kLeftShoulder, kRightShoulder, kLeftElbow, kRightElbow, kLeftWrist,
                                        kRightWrist};
        int good = 0;
        for (int f = 0; f < frames; ++f) {
            double c = 0.0;
            for (int j : upper) {
                c += seq.confidence(f, j);
            }
            good += c / 7.0 >= rules.upper_body_conf ? 1 : 0;
        }
        const double frac = static_cast<double>(good) / frames;
        v.rules["upper_body"] = {frac >= rules.upper_body_frame_fraction, frac};
    }
    if (rules.enable_frontal) {
        std::vector<double> ratio(frames), nose(frames);
        for (int f = 0; f < frames; ++f) {
            const double dx = seq.coords(f, 2 * kLeftShoulder) - seq.coords(f, 2 * kRightShoulder);
            const double dy = seq.coords(f, 2 * kLeftShoulder + 1) - seq.coords(f, 2 * kRightShoulder + 1);
            ratio[f] = heights[f] > 0.0 ? std::hypot(dx, dy) / heights[f] : 0.0;
            nose[f] = seq.confidence(f, kNose);
        }
        const double r = median(ratio);
        v.rules["frontal"] = {r >= rules.frontal_ratio && median(nose) >= rules.nose_conf, r};
    }
    if (rules.enable_size) {
        const double h = median(heights);
        v.rules["size"] = {h >= rules.min_height, h};
    }
    if (rules.enable_motion) {
        double total = 0.0;
        for (int f = 1; f < frames; ++f) {
            for (int j : {kLeftWrist, kRightWrist}) {
                total += 0.5 * std::hypot(seq.coords(f, 2 * j) - seq.coords(f - 1, 2 * j),
                                          seq.coords(f, 2 * j + 1) - seq.coords(f - 1, 2 * j + 1));
            }
        }
        const double m = frames > 1 ? total / (frames - 1) : 0.0;
        v.rules["motion"] = {m >= rules.min_motion, m};
    }
    return v;
}

CropTransform crop_and_resize(const std::vector<BoundingBox>& track, double margin, int frame_width,
                              int frame_height) {
    if (track.empty()) {
        throw std::invalid_argument("crop_and_resize: empty bounding-box track");
    }
    if (!(margin >= 0.0) || frame_width < 1 || frame_height < 1) {
        throw std::invalid_argument("crop_and_resize: margin must be >= 0 and the frame non-empty");
    }
    BoundingBox u = track.front();
    for (const auto& b : track) {
        if (!std::isfinite(b.x0) || !std::isfinite(b.y0) || !std::isfinite(b.x1) || !std::isfinite(b.y1) ||
            !(b.x1 > b.x0) || !(b.y1 > b.y0)) {
            throw std::invalid_argument("crop_and_resize: degenerate bounding box");
        }
        u.x0 = std::min(u.x0, b.x0);
        u.y0 = std::min(u.y0, b.y0);
        u.x1 = std::max(u.x1, b.x1);
        u.y1 = std::max(u.y1, b.y1);
    }
    const double longest = std::max(u.x1 - u.x0, u.y1 - u.y0);
    double side = longest * (1.0 + 2.0 * margin);
    side = std::min(side, static_cast<double>(std::min(frame_width, frame_height)));
    const double cx = 0.5 * (u.x0 + u.x1), cy = 0.5 * (u.y0 + u.y1);
    CropTransform t;
    t.side = side;
    t.origin_x = std::clamp(cx - side / 2.0, 0.0, frame_width - side);
    t.origin_y = std::clamp(cy - side / 2.0, 0.0, frame_height - side);
    return t;
}

SkeletonSequence transform_keypoints(const SkeletonSequence& seq, const CropTransform& t) {
    if (!(t.side > 0.0)) {
        throw std::invalid_argument("transform_keypoints: crop side must be positive");
    }
    SkeletonSequence out = seq;
    for (Eigen::Index j = 0; j < seq.coords.cols(); j += 2) {
        out.coords.col(j) = (seq.coords.col(j).array() - t.origin_x) / t.side;
        out.coords.col(j + 1) = (seq.coords.col(j + 1).array() - t.origin_y) / t.side;
    }
    return out;
}

SkeletonSequence inverse_transform_keypoints(const SkeletonSequence& seq, const CropTransform& t) {
    if (!(t.side > 0.0)) {
        throw std::invalid_argument("inverse_transform_keypoints: crop side must be positive");
    }
    SkeletonSequence out = seq;
    for (Eigen::Index j = 0; j < seq.coords.cols(); j += 2) {
        out.coords.col(j) = seq.coords.col(j).array() * t.side + t.origin_x;
        out.coords.col(j + 1) = seq.coords.col(j + 1).array() * t.side + t.origin_y;
    }
    return out;
}

// ---- manifest ----

std::string to_manifest_line(const ClipManifestEntry& e) {
    for (const auto* s : {&e.clip_id, &e.source_id}) {
        if (s->empty() || s->find_first_of("\t\n") != std::string::npos) {
            throw std::invalid_argument("manifest: ids must be non-empty and free of tabs and newlines");
        }
    }
    std::ostringstream os;
    os << std::setprecision(17);
    os << e.clip_id << '\t' << e.source_id << '\t' << e.range.begin << '\t' << e.range.end << '\t' << e.fps << '\t'
       << (e.verdict.accepted() ? "accepted" : "rejected") << '\t';
    if (e.verdict.rules.empty()) {
        os << '-';
    }
    bool first = true;
    for (const auto& [name, r] : e.verdict.rules) {
        os << (first ? "" : ",") << name << '=' << (r.pass ? "pass" : "fail") << ':' << r.value;
        first = false;
    }
    os << '\t' << e.crop.origin_x << ',' << e.crop.origin_y << ',' << e.crop.side << ',' << e.crop.target;
    return os.str();
}

ClipManifestEntry parse_manifest_line(const std::string& line) {
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) {
            break;
        }
        start = tab + 1;
    }
    if (f.size() != 8) {
        throw std::invalid_argument("manifest line: expected 8 tab-separated fields, got " + std::to_string(f.size()));
    }
    ClipManifestEntry e;
    try {
        e.clip_id = f[0];
        e.source_id = f[1];
        e.range.begin = std::stoi(f[2]);
        e.range.end = std::stoi(f[3]);
        e.fps = std::stod(f[4]);
        if (f[6] != "-") {
            std::istringstream vs(f[6]);
            std::string item;
            while (std::getline(vs, item, ',')) {
                const auto eq = item.find('=');
                const auto colon = item.find(':', eq);
                if (eq == std::string::npos || colon == std::string::npos) {
                    throw std::invalid_argument("bad verdict '" + item + "'");
                }
                const auto status = item.substr(eq + 1, colon - eq - 1);
                if (status != "pass" && status != "fail") {
                    throw std::invalid_argument("bad verdict status '" + status + "'");
                }
                e.verdict.rules[item.substr(0, eq)] = {status == "pass", std::stod(item.substr(colon + 1))};
            }
        }
        std::istringstream cs(f[7]);
        std::string part;
        std::vector<std::string> c;
        while (std::getline(cs, part, ',')) {
            c.push_back(part);
        }
        if (c.size() != 4) {
            throw std::invalid_argument("crop field needs 4 values");
        }
        e.crop = {std::stod(c[0]), std::stod(c[1]), std::stod(c[2]), std::stoi(c[3])};
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(std::string("manifest line: ") + ex.what());
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("manifest line: numeric field out of range");
    }
    if ((f[5] == "accepted") != e.verdict.accepted()) {
        throw std::invalid_argument("manifest line: status disagrees with the rule verdicts");
    }
    return e;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ClipManifestEntry>& entries) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    for (const auto& e : entries) {
        os << to_manifest_line(e) << '\n';
    }
    if (!os) {
        throw std::runtime_error("I/O error writing " + path.string());
    }
}

std::vector<ClipManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<ClipManifestEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(parse_manifest_line(line));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_histograms(const std::filesystem::path& path, const std::vector<ColorHistogram>& frames) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    os << std::setprecision(17);
    for (const auto& h : frames) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            os << (i ? " " : "") << h[i];
        }
        os << '\n';
    }
}

std::vector<ColorHistogram> read_histograms(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<ColorHistogram> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream ls(line);
        ColorHistogram h{};
        for (auto& v : h) {
            if (!(ls >> v) || !(v >= 0.0)) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                         std::to_string(h.size()) + " non-negative values");
            }
        }
        std::string extra;
        if (ls >> extra) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": trailing values");
        }
        out.push_back(h);
    }
    return out;
}

}  // namespace skelgen
