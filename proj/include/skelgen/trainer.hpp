#pragma once

#include "skelgen/audio_features.hpp"
#include "skelgen/config.hpp"
#include "skelgen/denoiser.hpp"
#include "skelgen/diffusion.hpp"
#include "skelgen/skeleton.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace skelgen {

// Training hyper-parameters. Defaults are desk-scale; the published run used
// batch_size 128 for 2,000,000 steps at the same learning rate.
struct TrainConfig {
    double learning_rate = 5e-5;
    int batch_size = 16;
    long long total_steps = 100000;
    double dropout_prob = 0.10;
    int window_frames = 80;
    int window_stride = 40;
    std::uint64_t seed = 0;
    ScheduleKind schedule = ScheduleKind::Cosine;
    int diffusion_steps = 1000;
    MotionEncoding encoding = MotionEncoding::Local;
    DenoiserConfig model;  // model.max_frames follows window_frames unless set explicitly
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    long long checkpoint_every = 10000;
    long long log_every = 100;
    bool ema = false;
    double ema_decay = 0.9999;
    int threads = 0;  // 0: GESTURE_SKEL_THREADS or hardware concurrency
};

// Throws std::invalid_argument on out-of-range fields.
void validate(const TrainConfig& config);

// Every field is a key; unknown keys are rejected.
TrainConfig train_config_from(const KeyValues& kv);
KeyValues to_key_values(const TrainConfig& config);

// One clip ready for windowing: encoded, normalized motion and frame-aligned audio.
struct TrainingClip {
    std::string id;
    Matrix motion;  // F x 2K, normalized
    Matrix audio;   // F x 768
};

// (x0, audio, reference) triple over one frame range of one clip.
struct TrainingExample {
    Matrix x0;         // window x 2K
    Matrix audio;      // window x 768
    Matrix reference;  // 1 x 2K, the window's first frame
    std::string clip_id;
    int offset = 0;
};

// Windows of `frames` at `stride`; clips shorter than `frames` yield nothing.
std::vector<TrainingExample> make_windows(const TrainingClip& clip, int frames, int stride);

// Raw clip as it comes off disk.
struct RawClip {
    SkeletonSequence skeleton;
    AudioFeatureSequence audio;  // aligned to the skeleton's frame count on ingest
};

struct TrainingSet {
    std::vector<TrainingExample> examples;
    NormalizationStats stats;
    MotionEncoding encoding = MotionEncoding::Local;
    std::vector<std::string> skipped;  // clips shorter than a window
};

// Encodes, fits (or reuses) normalization stats, and windows every clip.
TrainingSet build_training_set(const std::vector<RawClip>& clips, const TrainConfig& config,
                               const NormalizationStats* stats = nullptr);

struct Batch {
    std::vector<const TrainingExample*> examples;
    std::vector<char> null_condition;  // per example: use the learned null vector
};

// Flags each example independently with probability p.
void drop_condition(Batch& batch, double p, std::mt19937_64& rng);

struct AdamState {
    DenoiserParams m;
    DenoiserParams v;
    long long step = 0;
};

AdamState make_adam_state(const DenoiserParams& params);
void adam_update(DenoiserParams& params, const DenoiserParams& grads, AdamState& state, const TrainConfig& config);

// One optimization step: per-example t ~ U[0, T) and eps ~ N(0, I), forward
// diffusion, x0 prediction, batch-mean MSE, one Adam update.
// Throws std::runtime_error if the loss is not finite.
double train_step(DenoiserParams& params, AdamState& adam, const Batch& batch, const NoiseSchedule& sched,
                  std::mt19937_64& rng, const TrainConfig& config);

struct Checkpoint {
    static constexpr std::uint32_t kFormatVersion = 1;
    TrainConfig config;
    DenoiserParams params;
    NormalizationStats stats;
    long long step = 0;
    std::optional<AdamState> optimizer;
    std::optional<DenoiserParams> ema;
};

// Binary layout: 8-byte magic "SKGCKPT1", u32 format version, config echo as
// length-prefixed "key = value" text, u64 step, u64 optimizer step, u32 tensor
// count, then per tensor: length-prefixed name, u32 rows, u32 cols, rows*cols
// f64 (LE).
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::filesystem::path checkpoint_name(const std::filesystem::path& dir, long long step);

// Owns parameters, optimizer state and the data; one writer.
class Trainer {
public:
    Trainer(TrainConfig config, TrainingSet data);
    // Continues from a checkpoint that carries optimizer state.
    Trainer(const Checkpoint& ckpt, TrainingSet data);

    // Batch sampling and noise come from a generator seeded by (seed, step),
    // so a resumed run continues exactly.
    double step();
    long long steps_done() const { return adam_.step; }

    const DenoiserParams& params() const { return params_; }
    const TrainConfig& config() const { return config_; }
    const NoiseSchedule& schedule() const { return schedule_; }
    const TrainingSet& data() const { return data_; }
    Checkpoint checkpoint() const;

    using StepCallback = std::function<void(long long step, double loss)>;

    // Runs to config.total_steps, writing a checkpoint every checkpoint_every
    // steps and at the end. Returns the files written.
    std::vector<std::filesystem::path> run(const std::filesystem::path& out_dir, const StepCallback& on_step = {});

private:
    TrainConfig config_;
    TrainingSet data_;
    NoiseSchedule schedule_;
    DenoiserParams params_;
    AdamState adam_;
    std::optional<DenoiserParams> ema_;
};

// Worker count: explicit value, else GESTURE_SKEL_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace skelgen
