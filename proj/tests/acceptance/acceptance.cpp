// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "skelgen/dataset_tools.hpp"
#include "skelgen/diffusion.hpp"
#include "skelgen/generation.hpp"
#include "skelgen/metrics.hpp"
#include "skelgen/skeleton.hpp"
#include "skelgen/synthetic.hpp"
#include "skelgen/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace skelgen;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = n(rng);
    }
    return m;
}

SkeletonSequence random_frames(int frames, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(-0.2, 1.2);
    auto s = SkeletonSequence::zeros(frames);
    for (Eigen::Index i = 0; i < s.coords.size(); ++i) {
        s.coords.data()[i] = coord(rng);
    }
    s.confidence.setOnes();
    return s;
}

// ------------------------------------------------------------------ 1
Outcome representation_roundtrip() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    const auto seq = random_frames(1000, rng);
    const auto back = from_local(to_local(seq));
    const double err = (back.coords - seq.coords).cwiseAbs().maxCoeff();
    const double secs = seconds_since(t0);
    return {err < 1e-6 && secs < 5.0, "max err " + fmt("%.3g", err) + ", " + fmt("%.3f", secs) + " s"};
}

// ------------------------------------------------------------------ 2
Outcome smoothing_contract() {
    std::mt19937_64 rng(202);
    const auto seq = random_frames(60, rng);
    const int window = 5, half = 2;
    const auto out = smooth(seq, window);
    const auto mouth = mouth_indices();
    const std::set<int> mouth_set(mouth.begin(), mouth.end());
    bool mouth_ok = mouth.size() == 20 && *mouth_set.begin() == 71 && *mouth_set.rbegin() == 90;
    for (int k : mouth) {
        for (int f = 0; f < seq.num_frames(); ++f) {
            for (int c = 0; c < 2; ++c) {
                // Bitwise comparison, not a tolerance.
                mouth_ok = mouth_ok && std::memcmp(&out.coords(f, 2 * k + c), &seq.coords(f, 2 * k + c),
                                                   sizeof(double)) == 0;
            }
        }
    }
    double worst = 0.0;
    for (int k = 0; k < kNumKeypoints; ++k) {
        if (mouth_set.count(k)) {
            continue;
        }
        for (int f = half; f < seq.num_frames() - half; ++f) {
            for (int c = 0; c < 2; ++c) {
                const double expect = seq.coords.block(f - half, 2 * k + c, window, 1).mean();
                worst = std::max(worst, std::abs(out.coords(f, 2 * k + c) - expect));
            }
        }
    }
    return {mouth_ok && worst < 1e-9,
            std::string("mouth ") + (mouth_ok ? "bit-identical" : "CHANGED") + ", interior err " + fmt("%.3g", worst)};
}

// ------------------------------------------------------------------ 3
Outcome schedule_and_forward() {
    const auto t0 = Clock::now();
    const auto sched = make_schedule(ScheduleKind::Cosine, 1000);
    bool mono = true;
    for (int t = 1; t < sched.steps(); ++t) {
        mono = mono && sched.alpha_bar[t] < sched.alpha_bar[t - 1];
    }
    const bool bounds = sched.alpha_bar.front() > 0.99 && sched.alpha_bar.back() < 0.01 && satisfies_endpoint_bounds(sched);
    std::mt19937_64 rng(303);
    const Matrix eps = normal_matrix(10000, 1, rng);
    const Matrix xt = q_sample(Matrix::Zero(10000, 1), sched.steps() - 1, eps, sched);
    const double mean = xt.mean();
    const double sd = std::sqrt((xt.array() - mean).square().mean());
    const double secs = seconds_since(t0);
    const bool ok = mono && bounds && std::abs(mean) < 0.05 && sd >= 0.95 && sd <= 1.05 && secs < 10.0;
    return {ok, std::string(mono ? "monotone" : "NOT monotone") + ", bounds " + (bounds ? "ok" : "violated") +
                    ", mean " + fmt("%.4f", mean) + ", std " + fmt("%.4f", sd) + ", " + fmt("%.2f", secs) + " s"};
}

// ------------------------------------------------------------------ 4
bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

Outcome cfg_identities() {
    std::mt19937_64 rng(404);
    const Matrix u = normal_matrix(7, 11, rng), c = normal_matrix(7, 11, rng);
    bool ok = bitwise_equal(cfg_combine(u, c, 1.0), c) && bitwise_equal(cfg_combine(u, c, 0.0), u);

    // Through the full sampler: two branches that disagree.
    const auto sched = make_schedule(ScheduleKind::Cosine, 50);
    const Matrix a = normal_matrix(6, 4, rng), b = normal_matrix(6, 4, rng);
    X0Predictor both = [&](const Matrix& x, int t, bool uncond) {
        return (uncond ? b : a) + 0.01 * std::sin(t) * x;
    };
    X0Predictor cond_only = [&](const Matrix& x, int t, bool) { return a + 0.01 * std::sin(t) * x; };
    X0Predictor uncond_only = [&](const Matrix& x, int t, bool) { return b + 0.01 * std::sin(t) * x; };
    GuidanceConfig g1{1.0}, g0{0.0};
    ok = ok && bitwise_equal(sample(both, 6, 4, sched, g1, 9), sample(cond_only, 6, 4, sched, g1, 9));
    ok = ok && bitwise_equal(sample(both, 6, 4, sched, g0, 9), sample(uncond_only, 6, 4, sched, g0, 9));
    return {ok, ok ? "alpha=1 and alpha=0 reproduce the branches bitwise" : "branch mismatch"};
}

// ------------------------------------------------------------------ 5
Outcome condition_dropout() {
    std::mt19937_64 rng(505);
    TrainingExample ex;
    Batch batch;
    batch.examples.assign(10000, &ex);
    drop_condition(batch, 0.10, rng);
    const double frac = std::count(batch.null_condition.begin(), batch.null_condition.end(), 1) / 10000.0;
    return {frac >= 0.09 && frac <= 0.11, "flagged fraction " + fmt("%.4f", frac)};
}

// ------------------------------------------------------------------ 6
Outcome gradient_check() {
    DenoiserConfig cfg;
    cfg.d_model = 32;
    cfg.n_layers = 2;
    cfg.n_heads = 4;
    cfg.time_embed_dim = 32;
    cfg.ff_mult = 2;
    cfg.max_frames = 8;
    auto params = init_params(cfg, 606);
    std::mt19937_64 rng(606);
    // Move away from the near-zero output initialization so every path carries gradient.
    params.for_each([&](const std::string&, Matrix& m) { m += 0.05 * normal_matrix(m.rows(), m.cols(), rng); });
    const int frames = 5;
    const Matrix x_t = normal_matrix(frames, kMotionDim, rng);
    const Matrix ref = normal_matrix(1, kMotionDim, rng);
    const Matrix audio = normal_matrix(frames, kAudioDim, rng);
    const Matrix weight = normal_matrix(frames, kMotionDim, rng);

    // Scalar objective: <denoise(params), weight>.
    auto objective = [&](const DenoiserParams& p) {
        return denoise(p, make_input(p, x_t, &ref, &audio, 321)).cwiseProduct(weight).sum();
    };
    ForwardCache cache;
    const auto input = make_input(params, x_t, &ref, &audio, 321);
    denoise(params, input, cache);
    auto grads = zeros_like(params);
    backward(params, input, cache, weight, grads);

    std::vector<std::pair<std::string, Eigen::Index>> picks;
    std::vector<std::string> names;
    params.for_each([&](const std::string& n, const Matrix&) { names.push_back(n); });
    while (picks.size() < 5) {
        const auto& name = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
        if (name == "null_condition") {
            continue;  // unused on the conditional branch
        }
        Eigen::Index size = 0;
        params.for_each([&](const std::string& n, const Matrix& m) { size = n == name ? m.size() : size; });
        picks.emplace_back(name, std::uniform_int_distribution<Eigen::Index>(0, size - 1)(rng));
    }
    double worst = 0.0;
    std::string detail;
    for (const auto& [name, idx] : picks) {
        double analytic = 0.0;
        grads.for_each([&](const std::string& n, const Matrix& m) {
            if (n == name) analytic = m.data()[idx];
        });
        const double h = 1e-5;
        auto shifted = [&](double delta) {
            auto p = params;
            p.for_each([&](const std::string& n, Matrix& m) {
                if (n == name) m.data()[idx] += delta;
            });
            return objective(p);
        };
        const double numeric = (shifted(h) - shifted(-h)) / (2 * h);
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, rel);
        detail += (detail.empty() ? "" : ", ") + name;
    }
    return {worst < 1e-3, "max rel err " + fmt("%.2e", worst) + " over " + detail};
}

// ------------------------------------------------------------------ 7
Outcome oracle_sampling() {
    std::mt19937_64 rng(707);
    const Matrix x0 = normal_matrix(16, kMotionDim, rng);
    const auto sched = make_schedule(ScheduleKind::Cosine, 1000);
    X0Predictor oracle = [&](const Matrix&, int, bool) { return x0; };
    const Matrix out = sample(oracle, 16, kMotionDim, sched, GuidanceConfig{}, 77);
    const double err = (out - x0).cwiseAbs().maxCoeff();
    return {err < 1e-5, "max err " + fmt("%.3g", err)};
}

// ------------------------------------------------------------------ 8
TrainConfig toy_config(double lr, long long steps, int diffusion_steps) {
    TrainConfig c;
    c.learning_rate = lr;
    c.batch_size = 8;
    c.total_steps = steps;
    c.window_frames = 32;
    c.window_stride = 32;
    c.diffusion_steps = diffusion_steps;
    c.model.d_model = 64;
    c.model.n_layers = 2;
    c.model.n_heads = 4;
    c.model.max_frames = 32;
    return c;
}

Outcome overfit_convergence() {
    const auto t0 = Clock::now();
    SyntheticCorpusOptions o;
    o.clips = 8;
    o.frames = 32;
    const auto c = toy_config(5e-5, 3000, 1000);
    Trainer trainer(c, build_training_set(synthetic_corpus(o), c));
    // Per-step losses are noisy (t is resampled every step), so progress is
    // tracked with an exponential moving average of decay 0.98.
    double first10 = 0.0, ema = 0.0;
    for (long long s = 1; s <= c.total_steps; ++s) {
        const double loss = trainer.step();
        ema = s == 1 ? loss : 0.98 * ema + 0.02 * loss;
        if (s <= 10) {
            first10 += loss / 10.0;
            continue;
        }
        if (ema < 0.05 * first10) {
            const double secs = seconds_since(t0);
            return {secs < 600.0, "smoothed loss " + fmt("%.3g", ema) + " < 5% of step-10 average " +
                                      fmt("%.3g", first10) + " at step " + std::to_string(s) + ", " +
                                      fmt("%.0f", secs) + " s"};
        }
    }
    return {false, "smoothed loss " + fmt("%.3g", ema) + " vs step-10 average " + fmt("%.3g", first10) +
                       " after 3000 steps"};
}

// ------------------------------------------------------------------ 9, 10
struct ShapeRun {
    double accuracy = 0.0;
    double correlation = 0.0;
    double seconds = 0.0;
};

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Two speakers (shoulder widths 0.20 and 0.30) share every audio track, so
// only the reference skeleton says who is speaking. Audio column 0 drives the
// right wrist vertically.
ShapeRun two_speaker_run(bool use_reference) {
    const auto t0 = Clock::now();
    const std::vector<SpeakerShape> speakers{SpeakerShape{0.20}, SpeakerShape{0.30}};
    SyntheticCorpusOptions o;
    o.clips = 8;
    o.frames = 32;
    o.speakers = speakers;
    const auto clips = synthetic_corpus(o);
    auto c = toy_config(1e-3, 2000, 100);
    c.model.use_reference = use_reference;
    Trainer trainer(c, build_training_set(clips, c));
    for (long long s = 0; s < c.total_steps; ++s) {
        trainer.step();
    }
    const auto ckpt = trainer.checkpoint();

    ShapeRun run;
    int correct = 0;
    std::vector<double> signal, offset;
    for (int i = 0; i < 50; ++i) {
        const int sp = i % 2;
        const auto& clip = clips[static_cast<std::size_t>(sp * o.clips + (i / 2) % o.clips)];
        GenerationRequest req;
        req.reference = clip.skeleton.frame(0);
        req.audio = clip.audio;
        req.frames = o.frames;
        req.seed = 1000 + static_cast<std::uint64_t>(i);
        const auto gen = generate(ckpt, req);
        double width = 0.0;
        for (int f = 0; f < gen.num_frames(); ++f) {
            width += shoulder_width(gen.frame(f)) / gen.num_frames();
        }
        const int predicted = std::abs(width - 0.20) < std::abs(width - 0.30) ? 0 : 1;
        correct += predicted == sp ? 1 : 0;
        const auto off = right_wrist_offset(gen, speakers[static_cast<std::size_t>(sp)]);
        for (int f = 0; f < gen.num_frames(); ++f) {
            signal.push_back(clip.audio.values(f, o.rig.signal_dim));
            offset.push_back(off[static_cast<std::size_t>(f)]);
        }
    }
    run.accuracy = correct / 50.0;
    run.correlation = pearson(signal, offset);
    run.seconds = seconds_since(t0);
    return run;
}

// ------------------------------------------------------------------ 11
Outcome shot_detector() {
    std::mt19937_64 rng(1111);
    std::set<int> picked;
    std::uniform_int_distribution<int> pos(20, 1980);
    std::vector<int> truth;
    while (truth.size() < 20) {
        const int c = pos(rng);
        if (std::all_of(truth.begin(), truth.end(), [&](int t) { return std::abs(t - c) >= 10; })) {
            truth.push_back(c);
        }
    }
    std::sort(truth.begin(), truth.end());
    const auto found = detect_shots(synthetic_shot_video(2000, truth, 1112));
    // One-to-one matching within +-1 frame.
    std::vector<bool> used(found.size(), false);
    int tp = 0;
    for (int c : truth) {
        for (std::size_t i = 0; i < found.size(); ++i) {
            if (!used[i] && std::abs(found[i] - c) <= 1) {
                used[i] = true;
                ++tp;
                break;
            }
        }
    }
    const double precision = found.empty() ? 0.0 : static_cast<double>(tp) / found.size();
    const double recall = tp / 20.0;
    return {precision == 1.0 && recall == 1.0,
            "precision " + fmt("%.3f", precision) + ", recall " + fmt("%.3f", recall)};
}

// ------------------------------------------------------------------ 12
// Direct windowed SSIM: 11x11 Gaussian (sigma 1.5) evaluated at every fully
// contained window position, population statistics, unit dynamic range.
double brute_force_ssim(const Matrix& a, const Matrix& b) {
    const int r = 5;
    double w[11][11], total = 0.0;
    for (int i = -r; i <= r; ++i) {
        for (int j = -r; j <= r; ++j) {
            w[i + r][j + r] = std::exp(-(i * i + j * j) / (2 * 1.5 * 1.5));
            total += w[i + r][j + r];
        }
    }
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double sum = 0.0;
    int count = 0;
    for (int y = r; y < a.rows() - r; ++y) {
        for (int x = r; x < a.cols() - r; ++x) {
            double ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
            for (int i = -r; i <= r; ++i) {
                for (int j = -r; j <= r; ++j) {
                    const double k = w[i + r][j + r] / total;
                    const double va = a(y + i, x + j), vb = b(y + i, x + j);
                    ma += k * va;
                    mb += k * vb;
                    aa += k * va * va;
                    bb += k * vb * vb;
                    ab += k * va * vb;
                }
            }
            const double va = aa - ma * ma, vb = bb - mb * mb, cov = ab - ma * mb;
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return sum / count;
}

Outcome image_metrics() {
    std::mt19937_64 rng(1212);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix x(40, 48);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x.data()[i] = u(rng);
    }
    const double self = ssim(x, x);
    const double p = psnr_from_mse(0.01);
    const double p_img = psnr(Matrix::Zero(10, 10), Matrix::Constant(10, 10, 0.1));
    double worst = 0.0;
    for (int pair = 0; pair < 3; ++pair) {
        Matrix a(32 + 4 * pair, 40), b(32 + 4 * pair, 40);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a.data()[i] = u(rng);
            // Partially correlated partner so the score is away from zero.
            b.data()[i] = std::clamp(0.6 * a.data()[i] + 0.4 * u(rng) + 0.05 * pair, 0.0, 1.0);
        }
        worst = std::max(worst, std::abs(ssim(a, b) - brute_force_ssim(a, b)));
    }
    const bool ok = std::abs(self - 1.0) < 1e-12 && p == 20.0 && std::abs(p_img - 20.0) < 1e-9 && worst < 1e-4;
    return {ok, "ssim(x,x) " + fmt("%.12f", self) + ", psnr(mse=0.01) " + fmt("%.15g", p) +
                    " dB, max |ssim - reference| " + fmt("%.2e", worst)};
}

// ------------------------------------------------------------------ 13
Outcome generation_determinism() {
    TrainConfig c;
    c.batch_size = 4;
    c.total_steps = 30;
    c.window_frames = 16;
    c.window_stride = 16;
    c.diffusion_steps = 50;
    c.learning_rate = 1e-3;
    c.model.d_model = 32;
    c.model.n_layers = 2;
    c.model.n_heads = 4;
    c.model.time_embed_dim = 32;
    c.model.max_frames = 16;
    SyntheticCorpusOptions o;
    o.clips = 4;
    o.frames = 32;
    Trainer trainer(c, build_training_set(synthetic_corpus(o), c));
    for (int i = 0; i < c.total_steps; ++i) {
        trainer.step();
    }
    const auto dir = std::filesystem::temp_directory_path() / "skelgen_acceptance_13";
    std::filesystem::create_directories(dir);
    save_checkpoint(dir / "model.bin", trainer.checkpoint());

    std::vector<std::string> exports;
    for (int run = 0; run < 2; ++run) {
        GenerationRequest req;
        req.checkpoint = dir / "model.bin";
        req.reference = template_pose(SpeakerShape{});
        req.audio = synthetic_features(30, 5);
        req.seed = 1313;
        const auto path = dir / ("run" + std::to_string(run) + ".pose.txt");
        export_pose(generate(req), path);
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        exports.push_back(ss.str());
    }
    std::filesystem::remove_all(dir);
    const bool ok = exports[0] == exports[1] && !exports[0].empty();
    return {ok, std::to_string(exports[0].size()) + " bytes, " + (ok ? "identical" : "DIFFERENT")};
}

// ------------------------------------------------------------------ 14
Outcome clip_segmentation() {
    std::mt19937_64 rng(1414);
    int emitted = 0, min_len = 1 << 30, max_len = 0;
    bool ok = true;
    for (int trial = 0; trial < 500; ++trial) {
        const int total = std::uniform_int_distribution<int>(1, 6000)(rng);
        const int n = std::uniform_int_distribution<int>(0, 25)(rng);
        std::vector<int> cuts;
        for (int i = 0; i < n; ++i) {
            cuts.push_back(std::uniform_int_distribution<int>(1, std::max(1, total - 1))(rng));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (const auto& r : segment_clips(cuts, total)) {
            ++emitted;
            min_len = std::min(min_len, r.length());
            max_len = std::max(max_len, r.length());
            ok = ok && r.length() >= 125 && r.length() <= 375 && r.begin >= 0 && r.end <= total;
            for (int cut : cuts) {
                ok = ok && !(cut > r.begin && cut < r.end);
            }
        }
    }
    ok = ok && emitted > 0;
    return {ok, std::to_string(emitted) + " clips, lengths " + std::to_string(min_len) + ".." +
                    std::to_string(max_len) + " frames"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run just these criteria (1-14)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    int failures = 0;
    auto report = [&](int id, const std::string& name, const Outcome& o, double secs) {
        std::printf("%s criterion %2d: %s -- %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };
    auto run = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
        if (!wanted(id)) {
            return;
        }
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        report(id, name, o, seconds_since(t0));
    };

    run(1, "representation round trip", representation_roundtrip);
    run(2, "smoothing contract", smoothing_contract);
    run(3, "schedule and forward process", schedule_and_forward);
    run(4, "guidance identities", cfg_identities);
    run(5, "condition dropout", condition_dropout);
    run(6, "gradient correctness", gradient_check);
    run(7, "oracle-denoiser sampling", oracle_sampling);
    run(8, "overfit convergence", overfit_convergence);

    if (wanted(9) || wanted(10)) {
        ShapeRun with_ref, without_ref;
        std::string error;
        try {
            with_ref = two_speaker_run(true);
            if (wanted(9)) {
                without_ref = two_speaker_run(false);
            }
        } catch (const std::exception& e) {
            error = e.what();
        }
        if (wanted(9)) {
            Outcome o{error.empty() && with_ref.accuracy >= 0.9 && without_ref.accuracy < 0.7,
                      error.empty() ? "accuracy " + fmt("%.2f", with_ref.accuracy) + " with reference, " +
                                          fmt("%.2f", without_ref.accuracy) + " without"
                                    : "exception: " + error};
            report(9, "reference-shape conditioning", o, with_ref.seconds + without_ref.seconds);
        }
        if (wanted(10)) {
            Outcome o{error.empty() && with_ref.correlation > 0.9,
                      error.empty() ? "wrist/signal correlation " + fmt("%.3f", with_ref.correlation)
                                    : "exception: " + error};
            report(10, "audio-sync conditioning", o, 0.0);
        }
    }

    run(11, "shot detector", shot_detector);
    run(12, "image metrics", image_metrics);
    run(13, "generation determinism", generation_determinism);
    run(14, "clip segmentation", clip_segmentation);

    std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED" : (std::to_string(failures) + " CRITERIA FAILED").c_str());
    return failures == 0 ? 0 : 1;
}
