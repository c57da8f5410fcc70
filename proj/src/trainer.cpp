#include "skelgen/trainer.hpp"

#include "skelgen/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace skelgen {

namespace {

std::vector<Matrix*> tensors(DenoiserParams& p) {
    std::vector<Matrix*> out;
    p.for_each([&](const std::string&, Matrix& m) { out.push_back(&m); });
    return out;
}

std::vector<const Matrix*> tensors(const DenoiserParams& p) {
    std::vector<const Matrix*> out;
    p.for_each([&](const std::string&, const Matrix& m) { out.push_back(&m); });
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::mt19937_64 step_rng(std::uint64_t seed, long long step) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(static_cast<std::uint64_t>(step) >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

void validate(const TrainConfig& c) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("train config: " + msg); };
    if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
        fail("learning_rate must be a finite value >= 0");
    }
    if (c.batch_size < 1) {
        fail("batch_size must be >= 1");
    }
    if (c.total_steps < 0) {
        fail("total_steps must be >= 0");
    }
    if (!(c.dropout_prob >= 0.0 && c.dropout_prob <= 1.0)) {
        fail("dropout_prob must lie in [0, 1]");
    }
    if (c.window_frames < 1) {
        fail("window_frames must be >= 1");
    }
    if (c.window_frames > c.model.max_frames) {
        fail("window_frames (" + std::to_string(c.window_frames) + ") exceeds model.max_frames (" +
             std::to_string(c.model.max_frames) + ")");
    }
    if (c.window_stride < 1) {
        fail("window_stride must be >= 1");
    }
    if (c.diffusion_steps < 2) {
        fail("diffusion_steps must be >= 2");
    }
    if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0) || !(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) {
        fail("adam betas must lie in [0, 1)");
    }
    if (!(c.adam_eps > 0.0)) {
        fail("adam_eps must be > 0");
    }
    if (c.checkpoint_every < 1 || c.log_every < 1) {
        fail("checkpoint_every and log_every must be >= 1");
    }
    if (!(c.ema_decay >= 0.0 && c.ema_decay <= 1.0)) {
        fail("ema_decay must lie in [0, 1]");
    }
    if (c.threads < 0) {
        fail("threads must be >= 0");
    }
    validate(c.model);
}

TrainConfig train_config_from(const KeyValues& kv) {
    TrainConfig c;
    c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
    c.batch_size = static_cast<int>(kv.get_int("batch_size", c.batch_size));
    c.total_steps = kv.get_int("total_steps", c.total_steps);
    c.dropout_prob = kv.get_double("dropout_prob", c.dropout_prob);
    c.window_frames = static_cast<int>(kv.get_int("window_frames", c.window_frames));
    c.window_stride = static_cast<int>(kv.get_int("window_stride", c.window_stride));
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
    c.schedule = parse_schedule_kind(kv.get_string("schedule", to_string(c.schedule)));
    c.diffusion_steps = static_cast<int>(kv.get_int("diffusion_steps", c.diffusion_steps));
    c.encoding = parse_motion_encoding(kv.get_string("encoding", to_string(c.encoding)));
    c.adam_beta1 = kv.get_double("adam_beta1", c.adam_beta1);
    c.adam_beta2 = kv.get_double("adam_beta2", c.adam_beta2);
    c.adam_eps = kv.get_double("adam_eps", c.adam_eps);
    c.checkpoint_every = kv.get_int("checkpoint_every", c.checkpoint_every);
    c.log_every = kv.get_int("log_every", c.log_every);
    c.ema = kv.get_bool("ema", c.ema);
    c.ema_decay = kv.get_double("ema_decay", c.ema_decay);
    c.threads = static_cast<int>(kv.get_int("threads", c.threads));

    auto& m = c.model;
    m.d_model = static_cast<int>(kv.get_int("model.d_model", m.d_model));
    m.n_layers = static_cast<int>(kv.get_int("model.n_layers", m.n_layers));
    m.n_heads = static_cast<int>(kv.get_int("model.n_heads", m.n_heads));
    m.max_frames = static_cast<int>(kv.get_int("model.max_frames", c.window_frames));
    m.keypoint_dim = static_cast<int>(kv.get_int("model.keypoint_dim", m.keypoint_dim));
    m.audio_dim = static_cast<int>(kv.get_int("model.audio_dim", m.audio_dim));
    m.time_embed_dim = static_cast<int>(kv.get_int("model.time_embed_dim", m.time_embed_dim));
    m.ff_mult = static_cast<int>(kv.get_int("model.ff_mult", m.ff_mult));
    m.conditioning = parse_conditioning_mode(kv.get_string("model.conditioning", to_string(m.conditioning)));
    m.use_reference = kv.get_bool("model.use_reference", m.use_reference);
    m.identity_attention = kv.get_bool("model.identity_attention", m.identity_attention);

    const auto unused = kv.unused_keys();
    if (!unused.empty()) {
        std::string msg = "train config: unknown key";
        for (const auto& k : unused) {
            msg += " '" + k + "'";
        }
        throw std::invalid_argument(msg);
    }
    validate(c);
    return c;
}

KeyValues to_key_values(const TrainConfig& c) {
    KeyValues kv;
    kv.set("learning_rate", fmt_double(c.learning_rate));
    kv.set("batch_size", std::to_string(c.batch_size));
    kv.set("total_steps", std::to_string(c.total_steps));
    kv.set("dropout_prob", fmt_double(c.dropout_prob));
    kv.set("window_frames", std::to_string(c.window_frames));
    kv.set("window_stride", std::to_string(c.window_stride));
    kv.set("seed", std::to_string(static_cast<long long>(c.seed)));
    kv.set("schedule", to_string(c.schedule));
    kv.set("diffusion_steps", std::to_string(c.diffusion_steps));
    kv.set("encoding", to_string(c.encoding));
    kv.set("adam_beta1", fmt_double(c.adam_beta1));
    kv.set("adam_beta2", fmt_double(c.adam_beta2));
    kv.set("adam_eps", fmt_double(c.adam_eps));
    kv.set("checkpoint_every", std::to_string(c.checkpoint_every));
    kv.set("log_every", std::to_string(c.log_every));
    kv.set("ema", c.ema ? "true" : "false");
    kv.set("ema_decay", fmt_double(c.ema_decay));
    kv.set("threads", std::to_string(c.threads));
    const auto& m = c.model;
    kv.set("model.d_model", std::to_string(m.d_model));
    kv.set("model.n_layers", std::to_string(m.n_layers));
    kv.set("model.n_heads", std::to_string(m.n_heads));
    kv.set("model.max_frames", std::to_string(m.max_frames));
    kv.set("model.keypoint_dim", std::to_string(m.keypoint_dim));
    kv.set("model.audio_dim", std::to_string(m.audio_dim));
    kv.set("model.time_embed_dim", std::to_string(m.time_embed_dim));
    kv.set("model.ff_mult", std::to_string(m.ff_mult));
    kv.set("model.conditioning", to_string(m.conditioning));
    kv.set("model.use_reference", m.use_reference ? "true" : "false");
    kv.set("model.identity_attention", m.identity_attention ? "true" : "false");
    return kv;
}

std::vector<TrainingExample> make_windows(const TrainingClip& clip, int frames, int stride) {
    if (frames < 1 || stride < 1) {
        throw std::invalid_argument("make_windows: frames and stride must be >= 1");
    }
    if (clip.audio.rows() != clip.motion.rows()) {
        throw std::invalid_argument("make_windows: clip '" + clip.id + "' has " + std::to_string(clip.motion.rows()) +
                                    " motion frames but " + std::to_string(clip.audio.rows()) + " audio rows");
    }
    std::vector<TrainingExample> out;
    const auto n = static_cast<int>(clip.motion.rows());
    for (int off = 0; off + frames <= n; off += stride) {
        TrainingExample ex;
        ex.x0 = clip.motion.middleRows(off, frames);
        ex.audio = clip.audio.middleRows(off, frames);
        ex.reference = clip.motion.row(off);
        ex.clip_id = clip.id;
        ex.offset = off;
        out.push_back(std::move(ex));
    }
    return out;
}

TrainingSet build_training_set(const std::vector<RawClip>& clips, const TrainConfig& config,
                               const NormalizationStats* stats) {
    TrainingSet set;
    set.encoding = config.encoding;
    std::vector<Matrix> encoded;
    std::vector<Matrix> audio;
    encoded.reserve(clips.size());
    for (const auto& clip : clips) {
        validate(clip.skeleton);
        const int frames = static_cast<int>(clip.skeleton.coords.rows());
        encoded.push_back(encode_motion(clip.skeleton, config.encoding));
        if (clip.audio.values.rows() == frames) {
            audio.push_back(clip.audio.values);
        } else {
            audio.push_back(align_to_frames(clip.audio, frames).values);
        }
    }
    if (stats != nullptr) {
        set.stats = *stats;
    } else {
        if (encoded.empty()) {
            throw std::invalid_argument("build_training_set: no clips");
        }
        set.stats = fit_normalization(encoded);
    }
    for (std::size_t i = 0; i < clips.size(); ++i) {
        TrainingClip tc{clips[i].skeleton.id, normalize(encoded[i], set.stats), std::move(audio[i])};
        auto windows = make_windows(tc, config.window_frames, config.window_stride);
        if (windows.empty()) {
            set.skipped.push_back(tc.id);
        }
        for (auto& w : windows) {
            set.examples.push_back(std::move(w));
        }
    }
    return set;
}

void drop_condition(Batch& batch, double p, std::mt19937_64& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("drop_condition: p must lie in [0, 1]");
    }
    std::bernoulli_distribution coin(p);
    batch.null_condition.assign(batch.examples.size(), 0);
    for (auto& flag : batch.null_condition) {
        flag = coin(rng) ? 1 : 0;
    }
}

AdamState make_adam_state(const DenoiserParams& params) {
    return AdamState{zeros_like(params), zeros_like(params), 0};
}

void adam_update(DenoiserParams& params, const DenoiserParams& grads, AdamState& state, const TrainConfig& config) {
    state.step += 1;
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const double lr = config.learning_rate;
    auto p = tensors(params);
    auto g = tensors(grads);
    auto m = tensors(state.m);
    auto v = tensors(state.v);
    if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
        throw std::logic_error("adam_update: parameter structure mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto P = p[i]->array();
        const auto G = g[i]->array();
        auto M = m[i]->array();
        auto V = v[i]->array();
        M = b1 * M + (1.0 - b1) * G;
        V = b2 * V + (1.0 - b2) * G.square();
        if (lr != 0.0) {
            P -= lr * (M / c1) / ((V / c2).sqrt() + config.adam_eps);
        }
    }
}

int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("GESTURE_SKEL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double train_step(DenoiserParams& params, AdamState& adam, const Batch& batch, const NoiseSchedule& sched,
                  std::mt19937_64& rng, const TrainConfig& config) {
    const auto n = batch.examples.size();
    if (n == 0) {
        throw std::invalid_argument("train_step: empty batch");
    }
    if (batch.null_condition.size() != n) {
        throw std::invalid_argument("train_step: null_condition flags do not match the batch");
    }
    // All randomness is drawn here, in example order, so the result does not
    // depend on how many workers run the forward/backward passes.
    std::uniform_int_distribution<int> pick_t(0, sched.steps() - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<int> ts(n);
    std::vector<Matrix> eps(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x0 = batch.examples[i]->x0;
        ts[i] = pick_t(rng);
        eps[i].resize(x0.rows(), x0.cols());
        for (Eigen::Index j = 0; j < eps[i].size(); ++j) {
            eps[i].data()[j] = normal(rng);
        }
    }

    std::vector<double> losses(n, 0.0);
    std::vector<DenoiserParams> grads;
    const auto workers = static_cast<std::size_t>(std::min<int>(resolve_threads(config.threads), static_cast<int>(n)));
    grads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        grads.push_back(zeros_like(params));
    }
    DenoiserParams total = zeros_like(params);

    auto run_one = [&](std::size_t i, DenoiserParams& g) {
        const auto& ex = *batch.examples[i];
        const Matrix xt = q_sample(ex.x0, ts[i], eps[i], sched);
        const Matrix* audio = batch.null_condition[i] ? nullptr : &ex.audio;
        const auto input = make_input(params, xt, &ex.reference, audio, ts[i]);
        ForwardCache cache;
        const Matrix pred = denoise(params, input, cache);
        losses[i] = x0_loss(ex.x0, pred);
        const double scale = 2.0 / (static_cast<double>(pred.size()) * static_cast<double>(n));
        const Matrix d_out = scale * (pred - ex.x0);
        backward(params, input, cache, d_out, g);
    };

    for (std::size_t begin = 0; begin < n; begin += workers) {
        const std::size_t count = std::min(workers, n - begin);
        for (auto& g : grads) {
            g.for_each([](const std::string&, Matrix& m) { m.setZero(); });
        }
        if (count == 1) {
            run_one(begin, grads[0]);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(count);
            for (std::size_t w = 0; w < count; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        run_one(begin + w, grads[w]);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) {
                t.join();
            }
            for (auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
        }
        auto dst = tensors(total);
        for (std::size_t w = 0; w < count; ++w) {
            auto src = tensors(static_cast<const DenoiserParams&>(grads[w]));
            for (std::size_t k = 0; k < dst.size(); ++k) {
                *dst[k] += *src[k];
            }
        }
    }

    double loss = 0.0;
    for (double l : losses) {
        loss += l;
    }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) {
        std::string msg = "train_step: non-finite loss at optimizer step " + std::to_string(adam.step + 1) + "; ";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(losses[i])) {
                msg += "clip '" + batch.examples[i]->clip_id + "' offset " + std::to_string(batch.examples[i]->offset) +
                       " t=" + std::to_string(ts[i]) + " ";
            }
        }
        throw std::runtime_error(msg);
    }
    adam_update(params, total, adam, config);
    return loss;
}

// ---- checkpoints ----

using namespace binary;

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'K', 'G', 'C', 'K', 'P', 'T', '1'};

void put_tensor(std::ostream& os, const std::string& name, const Matrix& m) {
    write_string(os, name);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        write_le<double>(os, m.data()[i]);
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::vector<std::pair<std::string, const Matrix*>> out;
    ckpt.params.for_each([&](const std::string& n, const Matrix& m) { out.emplace_back("param." + n, &m); });
    if (ckpt.optimizer) {
        ckpt.optimizer->m.for_each([&](const std::string& n, const Matrix& m) { out.emplace_back("adam.m." + n, &m); });
        ckpt.optimizer->v.for_each([&](const std::string& n, const Matrix& m) { out.emplace_back("adam.v." + n, &m); });
    }
    if (ckpt.ema) {
        ckpt.ema->for_each([&](const std::string& n, const Matrix& m) { out.emplace_back("ema." + n, &m); });
    }
    const Matrix mean = ckpt.stats.mean;
    const Matrix std = ckpt.stats.std;
    out.emplace_back("norm.mean", &mean);
    out.emplace_back("norm.std", &std);

    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot write checkpoint " + tmp);
        }
        os.write(kCheckpointMagic, sizeof kCheckpointMagic);
        write_le<std::uint32_t>(os, Checkpoint::kFormatVersion);
        write_string(os, to_key_values(ckpt.config).to_string());
        write_le<std::uint64_t>(os, static_cast<std::uint64_t>(ckpt.step));
        write_le<std::uint64_t>(os, static_cast<std::uint64_t>(ckpt.optimizer ? ckpt.optimizer->step : 0));
        write_le<std::uint32_t>(os, static_cast<std::uint32_t>(out.size()));
        for (const auto& [name, m] : out) {
            put_tensor(os, name, *m);
        }
        if (!os) {
            throw std::runtime_error("I/O error writing checkpoint " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

Checkpoint read_checkpoint(std::istream& is, const std::filesystem::path& path) {
    const std::string where = "checkpoint " + path.string() + ": ";
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || !std::equal(magic, magic + 8, kCheckpointMagic)) {
        throw std::runtime_error(where + "bad magic");
    }
    const auto version = read_le<std::uint32_t>(is, "format version");
    if (version != Checkpoint::kFormatVersion) {
        throw std::runtime_error(where + "unsupported format version " + std::to_string(version));
    }
    Checkpoint ck;
    ck.config = train_config_from(KeyValues::parse(read_string(is, "config echo"), path.string()));
    ck.step = static_cast<long long>(read_le<std::uint64_t>(is, "step"));
    const auto adam_step = static_cast<long long>(read_le<std::uint64_t>(is, "optimizer step"));
    const auto count = read_le<std::uint32_t>(is, "tensor count");

    std::map<std::string, Matrix> found;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto name = read_string(is, "tensor name", 4096);
        const auto rows = read_le<std::uint32_t>(is, "tensor shape");
        const auto cols = read_le<std::uint32_t>(is, "tensor shape");
        Matrix m(rows, cols);
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            m.data()[k] = read_le<double>(is, "tensor data");
        }
        if (!is) {
            throw std::runtime_error(where + "truncated while reading tensor '" + name + "'");
        }
        found.emplace(std::move(name), std::move(m));
    }

    auto fill = [&](DenoiserParams& dst, const std::string& prefix) {
        dst.for_each([&](const std::string& n, Matrix& m) {
            const auto it = found.find(prefix + n);
            if (it == found.end()) {
                throw std::runtime_error(where + "missing tensor '" + prefix + n + "'");
            }
            if (it->second.rows() != m.rows() || it->second.cols() != m.cols()) {
                throw std::runtime_error(where + "tensor '" + prefix + n + "' has shape " +
                                         std::to_string(it->second.rows()) + "x" + std::to_string(it->second.cols()) +
                                         ", config expects " + std::to_string(m.rows()) + "x" +
                                         std::to_string(m.cols()));
            }
            m = std::move(it->second);
            found.erase(it);
        });
    };
    ck.params = zeros_like(init_params(ck.config.model, 0));
    fill(ck.params, "param.");
    if (found.count("adam.m." + std::string("null_condition"))) {
        AdamState st = make_adam_state(ck.params);
        fill(st.m, "adam.m.");
        fill(st.v, "adam.v.");
        st.step = adam_step;
        ck.optimizer = std::move(st);
    }
    if (found.count("ema.null_condition")) {
        DenoiserParams e = zeros_like(ck.params);
        fill(e, "ema.");
        ck.ema = std::move(e);
    }
    const auto mean = found.find("norm.mean");
    const auto sd = found.find("norm.std");
    if (mean == found.end() || sd == found.end()) {
        throw std::runtime_error(where + "missing normalization stats");
    }
    if (mean->second.rows() != 1 || mean->second.cols() != ck.config.model.keypoint_dim ||
        sd->second.rows() != 1 || sd->second.cols() != ck.config.model.keypoint_dim) {
        throw std::runtime_error(where + "normalization stats do not match keypoint_dim");
    }
    ck.stats.mean = mean->second;
    ck.stats.std = sd->second;
    found.erase("norm.mean");
    found.erase("norm.std");
    if (!found.empty()) {
        throw std::runtime_error(where + "unexpected tensor '" + found.begin()->first + "'");
    }
    return ck;
}

}  // namespace

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open checkpoint " + path.string());
    }
    try {
        return read_checkpoint(is, path);
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        if (msg.rfind("checkpoint ", 0) == 0) {
            throw;
        }
        throw std::runtime_error("checkpoint " + path.string() + ": " + msg);
    }
}

std::filesystem::path checkpoint_name(const std::filesystem::path& dir, long long step) {
    std::ostringstream os;
    os << "ckpt_" << std::setw(8) << std::setfill('0') << step << ".bin";
    return dir / os.str();
}

// ---- Trainer ----

Trainer::Trainer(TrainConfig config, TrainingSet data)
    : config_(std::move(config)), data_(std::move(data)) {
    validate(config_);
    if (data_.examples.empty()) {
        throw std::invalid_argument("trainer: dataset has no training windows");
    }
    schedule_ = make_schedule(config_.schedule, config_.diffusion_steps);
    params_ = init_params(config_.model, config_.seed);
    adam_ = make_adam_state(params_);
    if (config_.ema) {
        ema_ = params_;
    }
}

Trainer::Trainer(const Checkpoint& ckpt, TrainingSet data) : config_(ckpt.config), data_(std::move(data)) {
    validate(config_);
    if (data_.examples.empty()) {
        throw std::invalid_argument("trainer: dataset has no training windows");
    }
    if (!ckpt.optimizer) {
        throw std::invalid_argument("trainer: checkpoint has no optimizer state, cannot resume");
    }
    schedule_ = make_schedule(config_.schedule, config_.diffusion_steps);
    params_ = ckpt.params;
    adam_ = *ckpt.optimizer;
    if (config_.ema) {
        ema_ = ckpt.ema ? *ckpt.ema : params_;
    }
}

double Trainer::step() {
    auto rng = step_rng(config_.seed, adam_.step);
    std::uniform_int_distribution<std::size_t> pick(0, data_.examples.size() - 1);
    Batch batch;
    batch.examples.reserve(static_cast<std::size_t>(config_.batch_size));
    for (int i = 0; i < config_.batch_size; ++i) {
        batch.examples.push_back(&data_.examples[pick(rng)]);
    }
    drop_condition(batch, config_.dropout_prob, rng);
    const double loss = train_step(params_, adam_, batch, schedule_, rng, config_);
    if (ema_) {
        auto e = tensors(*ema_);
        auto p = tensors(static_cast<const DenoiserParams&>(params_));
        const double d = config_.ema_decay;
        for (std::size_t i = 0; i < e.size(); ++i) {
            *e[i] = d * *e[i] + (1.0 - d) * *p[i];
        }
    }
    return loss;
}

Checkpoint Trainer::checkpoint() const {
    Checkpoint ck;
    ck.config = config_;
    ck.params = params_;
    ck.stats = data_.stats;
    ck.step = adam_.step;
    ck.optimizer = adam_;
    ck.ema = ema_;
    return ck;
}

std::vector<std::filesystem::path> Trainer::run(const std::filesystem::path& out_dir, const StepCallback& on_step) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    while (adam_.step < config_.total_steps) {
        const double loss = step();
        if (on_step) {
            on_step(adam_.step, loss);
        }
        if (adam_.step % config_.checkpoint_every == 0 || adam_.step == config_.total_steps) {
            const auto path = checkpoint_name(out_dir, adam_.step);
            try {
                save_checkpoint(path, checkpoint());
            } catch (const std::exception& e) {
                throw std::runtime_error("step " + std::to_string(adam_.step) + ": " + e.what());
            }
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace skelgen
