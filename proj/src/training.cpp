#include "tcpd/training.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>

#include "tcpd/interp.hpp"
#include "tcpd/metrics.hpp"
#include "tcpd/polarization.hpp"

namespace fs = std::filesystem;

namespace tcpd {

void TrainConfig::validate() const {
    arch.validate();
    if (patch_size % 4 != 0) throw ConfigError("patch_size must be a multiple of 4");
    if (patch_size < (1 << arch.levels) * 4)
        throw ConfigError("patch_size must be >= 2^levels * 4");
    if (patch_size % (1 << (arch.levels + 1)) != 0)
        throw ConfigError("patch_size/2 must be divisible by 2^levels");
    if (images_per_batch < 1 || patches_per_image < 1)
        throw ConfigError("batch composition must be positive");
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(alpha > 0)) throw ConfigError("alpha must be positive");
    if (loss_mode != "cp" && loss_mode != "cp_ycbcr")
        throw ConfigError("loss_mode must be \"cp\" or \"cp_ycbcr\"");
    if (method != "tcpdnet" && method != "single_step")
        throw ConfigError("method must be \"tcpdnet\" or \"single_step\"");
    if (log_every < 1 || val_every < 1) throw ConfigError("intervals must be >= 1");
}

std::string TrainConfig::to_json() const {
    nlohmann::json j;
    j["patch_size"] = patch_size;
    j["images_per_batch"] = images_per_batch;
    j["patches_per_image"] = patches_per_image;
    j["learning_rate"] = learning_rate;
    j["iterations"] = iterations;
    j["alpha"] = alpha;
    j["seed"] = seed;
    j["loss_mode"] = loss_mode;
    j["method"] = method;
    j["arch"] = nlohmann::json::parse(arch.to_json());
    j["log_every"] = log_every;
    j["val_every"] = val_every;
    return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    TrainConfig c;
    c.patch_size = j.value("patch_size", c.patch_size);
    c.images_per_batch = j.value("images_per_batch", c.images_per_batch);
    c.patches_per_image = j.value("patches_per_image", c.patches_per_image);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.iterations = j.value("iterations", c.iterations);
    c.alpha = j.value("alpha", c.alpha);
    c.seed = j.value("seed", c.seed);
    c.loss_mode = j.value("loss_mode", c.loss_mode);
    c.method = j.value("method", c.method);
    if (j.contains("arch")) c.arch = nn::ArchitectureSpec::from_json(j["arch"].dump());
    c.log_every = j.value("log_every", c.log_every);
    c.val_every = j.value("val_every", c.val_every);
    c.validate();
    return c;
}

namespace {

template <typename T>
Image<T> rotate_planes_cw(const Image<T>& img, int k) {
    k &= 3;
    if (k == 0) return img;
    const int h = img.height(), w = img.width();
    const int oh = (k % 2 == 0) ? h : w;
    const int ow = (k % 2 == 0) ? w : h;
    Image<T> out(img.channels(), oh, ow);
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                int sy, sx;
                switch (k) {
                    case 1: sy = h - 1 - x; sx = y; break;
                    case 2: sy = h - 1 - y; sx = w - 1 - x; break;
                    default: sy = x; sx = w - 1 - y; break;
                }
                out.at(c, y, x) = img.at(c, sy, sx);
            }
    return out;
}

}  // namespace

template <typename T>
Image<T> augment_rotation(const Image<T>& cube12, int k) {
    if (cube12.channels() != kCubeChannels)
        throw InvalidInput("augment_rotation: expected 12-channel cube");
    k &= 3;
    Image<T> rotated = rotate_planes_cw(cube12, k);
    if (k == 0) return rotated;
    // orientation permutation: odd k -> [I90, I135, I0, I45], even k -> identity
    static constexpr int kOddPerm[kOrientations] = {2, 3, 0, 1};
    Image<T> out(kCubeChannels, rotated.height(), rotated.width());
    for (int o = 0; o < kOrientations; ++o) {
        const int src_o = (k % 2 == 1) ? kOddPerm[o] : o;
        for (int c = 0; c < kColors; ++c) {
            const T* src = rotated.plane(src_o * kColors + c);
            std::copy(src, src + rotated.plane_size(), out.plane(o * kColors + c));
        }
    }
    return out;
}

template <typename T>
std::vector<TrainSample<T>> sample_batch(const std::vector<const SceneRecord*>& train_scenes,
                                         const TrainConfig& cfg, const CpfaPattern& pattern,
                                         Rng& rng) {
    if (train_scenes.size() < static_cast<size_t>(cfg.images_per_batch))
        throw ConfigError("need at least " + std::to_string(cfg.images_per_batch) +
                          " training scenes, have " + std::to_string(train_scenes.size()));
    // distinct scene draw (partial Fisher-Yates over indices)
    std::vector<size_t> order(train_scenes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int i = 0; i < cfg.images_per_batch; ++i) {
        const size_t j = i + rng.uniform_below(order.size() - i);
        std::swap(order[i], order[j]);
    }

    std::vector<TrainSample<T>> batch;
    batch.reserve(static_cast<size_t>(cfg.images_per_batch) * cfg.patches_per_image);
    const int P = cfg.patch_size;
    for (int s = 0; s < cfg.images_per_batch; ++s) {
        const SceneRecord& scene = *train_scenes[order[s]];
        const int h = scene.cube.height(), w = scene.cube.width();
        if (h < P || w < P)
            throw ConfigError("scene " + scene.id + " smaller than patch size");
        for (int p = 0; p < cfg.patches_per_image; ++p) {
            const int y0 = 4 * static_cast<int>(rng.uniform_below((h - P) / 4 + 1));
            const int x0 = 4 * static_cast<int>(rng.uniform_below((w - P) / 4 + 1));
            Image<T> patch(kCubeChannels, P, P);
            for (int c = 0; c < kCubeChannels; ++c)
                for (int y = 0; y < P; ++y) {
                    const float* src =
                        scene.cube.plane(c) + static_cast<size_t>(y0 + y) * w + x0;
                    T* dst = patch.plane(c) + static_cast<size_t>(y) * P;
                    for (int x = 0; x < P; ++x) dst[x] = static_cast<T>(src[x]);
                }
            const int k = static_cast<int>(rng.uniform_below(4));
            patch = augment_rotation(patch, k);
            CpfaRaw<T> raw = synthesize_cpfa(patch, pattern);
            batch.push_back(TrainSample<T>{std::move(raw), std::move(patch)});
        }
    }
    return batch;
}

template <typename T>
void forward_batch(const DemosaickModel<T>& model, const std::vector<TrainSample<T>>& batch,
                   BatchWork<T>& work) {
    if (batch.empty()) throw InvalidInput("forward_batch: empty batch");
    const int n = static_cast<int>(batch.size());
    const int P = batch[0].truth.height();
    const int hh = P / 2;

    if (model.kind == ModelKind::TwoStep) {
        work.color_in = nn::Tensor<T>(kColors, n * kOrientations, hh, hh);
        work.color_tgt = nn::Tensor<T>(kColors, n * kOrientations, hh, hh);
        for (int i = 0; i < n; ++i) {
            for (Orientation o : kAllOrientations) {
                const int s = i * kOrientations + static_cast<int>(o);
                OrientedRgb<T> base = bayer_bilinear(subsample_orientation(batch[i].raw, o));
                work.color_in.set_sample(s, base.data);
                OrientedRgb<T> tgt =
                    extract_subsampled_rgb(batch[i].truth, o, batch[i].raw.pattern);
                work.color_tgt.set_sample(s, tgt.data);
            }
        }
        work.color_out = model.color_net.forward(work.color_in, work.color_ctx, work.ws);
        if (model.arch.global_residual) nn::add_inplace(work.color_out, work.color_in);

        work.polar_in = nn::Tensor<T>(kOrientations, n * kColors, P, P);
        work.polar_tgt = nn::Tensor<T>(kOrientations, n * kColors, P, P);
        for (int i = 0; i < n; ++i) {
            std::vector<OrientedRgb<T>> rgbs;
            rgbs.reserve(kOrientations);
            for (Orientation o : kAllOrientations)
                rgbs.push_back(OrientedRgb<T>{
                    work.color_out.to_image(i * kOrientations + static_cast<int>(o)), o});
            for (ColorChannel c : kAllColors) {
                const int s = i * kColors + static_cast<int>(c);
                PolarMosaic<T> mosaic =
                    assemble_mosaicked_polarization(rgbs, c, batch[i].raw.pattern);
                work.polar_in.set_sample(s, polarization_bilinear(mosaic));
                work.polar_tgt.set_sample(s, extract_channel(batch[i].truth, c));
            }
        }
        work.polar_out = model.polar_net.forward(work.polar_in, work.polar_ctx, work.ws);
        if (model.arch.global_residual) nn::add_inplace(work.polar_out, work.polar_in);
    } else {
        work.color_in = nn::Tensor<T>(kCubeChannels, n, P, P);
        work.color_tgt = nn::Tensor<T>(kCubeChannels, n, P, P);
        for (int i = 0; i < n; ++i) {
            work.color_in.set_sample(i, bilinear_baseline(batch[i].raw));
            work.color_tgt.set_sample(i, batch[i].truth);
        }
        work.color_out = model.joint_net.forward(work.color_in, work.color_ctx, work.ws);
        if (model.arch.global_residual) nn::add_inplace(work.color_out, work.color_in);
    }
}

namespace {

// The single-step tensor keeps cubes as 12 rows; regroup per orientation
// triple for the YCbCr loss by viewing rows (3o + c).
template <typename T>
T cube_ycbcr_l1(const nn::Tensor<T>& pred, const nn::Tensor<T>& target, T scale,
                nn::Tensor<T>* dpred) {
    const size_t ps = pred.plane_size();
    const T unit = scale / static_cast<T>(pred.size());
    const auto& m = kYcbcrMatrix;
    double sum = 0.0;
    for (int o = 0; o < kOrientations; ++o)
        for (int item = 0; item < pred.samples(); ++item) {
            const T* pr = pred.plane(o * kColors + 0, item);
            const T* pg = pred.plane(o * kColors + 1, item);
            const T* pb = pred.plane(o * kColors + 2, item);
            const T* tr = target.plane(o * kColors + 0, item);
            const T* tg = target.plane(o * kColors + 1, item);
            const T* tb = target.plane(o * kColors + 2, item);
            T* gr = dpred ? dpred->plane(o * kColors + 0, item) : nullptr;
            T* gg = dpred ? dpred->plane(o * kColors + 1, item) : nullptr;
            T* gb = dpred ? dpred->plane(o * kColors + 2, item) : nullptr;
            for (size_t i = 0; i < ps; ++i) {
                double comp[3], sign[3];
                for (int row = 0; row < 3; ++row) {
                    comp[row] = m[row][0] * (double(pr[i]) - double(tr[i])) +
                                m[row][1] * (double(pg[i]) - double(tg[i])) +
                                m[row][2] * (double(pb[i]) - double(tb[i]));
                    sum += std::abs(comp[row]);
                    sign[row] = comp[row] > 0 ? 1.0 : (comp[row] < 0 ? -1.0 : 0.0);
                }
                if (dpred) {
                    gr[i] += static_cast<T>(unit * (m[0][0] * sign[0] + m[1][0] * sign[1] +
                                                    m[2][0] * sign[2]));
                    gg[i] += static_cast<T>(unit * (m[0][1] * sign[0] + m[1][1] * sign[1] +
                                                    m[2][1] * sign[2]));
                    gb[i] += static_cast<T>(unit * (m[0][2] * sign[0] + m[1][2] * sign[1] +
                                                    m[2][2] * sign[2]));
                }
            }
        }
    return static_cast<T>(sum / static_cast<double>(pred.size()));
}

}  // namespace

template <typename T>
LossBreakdown<T> batch_loss_values(const DemosaickModel<T>& model, const BatchWork<T>& work,
                                   T alpha, const std::string& loss_mode) {
    LossBreakdown<T> L;
    L.alpha = alpha;
    if (model.kind == ModelKind::TwoStep) {
        L.l_c = l1_mean(work.color_out, work.color_tgt);
        L.l_cp = l1_mean(work.polar_out, work.polar_tgt);
        L.l_cp_ycbcr = loss_cp_ycbcr_tensor(work.polar_out, work.polar_tgt);
        L.total = L.l_c + alpha * (loss_mode == "cp" ? L.l_cp : L.l_cp_ycbcr);
    } else {
        L.l_c = T(0);
        L.l_cp = l1_mean(work.color_out, work.color_tgt);
        L.l_cp_ycbcr = cube_ycbcr_l1<T>(work.color_out, work.color_tgt, T(0), nullptr);
        L.total = loss_mode == "cp" ? L.l_cp : L.l_cp_ycbcr;
    }
    return L;
}

template <typename T>
LossBreakdown<T> loss_and_gradients(const DemosaickModel<T>& model,
                                    const std::vector<TrainSample<T>>& batch, T alpha,
                                    const std::string& loss_mode, BatchWork<T>& work) {
    forward_batch(model, batch, work);
    for (auto& g : work.color_grads) g.zero();
    for (auto& g : work.polar_grads) g.zero();
    for (auto& g : work.joint_grads) g.zero();

    LossBreakdown<T> L;
    L.alpha = alpha;
    const int n = static_cast<int>(batch.size());

    if (model.kind == ModelKind::TwoStep) {
        nn::Tensor<T> dcolor(work.color_out.channels(), work.color_out.samples(),
                             work.color_out.height(), work.color_out.width());
        nn::Tensor<T> dpolar(work.polar_out.channels(), work.polar_out.samples(),
                             work.polar_out.height(), work.polar_out.width());
        L.l_c = l1_mean_grad(work.color_out, work.color_tgt, T(1), dcolor);
        if (loss_mode == "cp") {
            L.l_cp = l1_mean_grad(work.polar_out, work.polar_tgt, alpha, dpolar);
            L.l_cp_ycbcr = loss_cp_ycbcr_tensor(work.polar_out, work.polar_tgt);
        } else {
            L.l_cp_ycbcr =
                loss_cp_ycbcr_tensor_grad(work.polar_out, work.polar_tgt, alpha, dpolar);
            L.l_cp = l1_mean(work.polar_out, work.polar_tgt);
        }
        L.total = L.l_c + alpha * (loss_mode == "cp" ? L.l_cp : L.l_cp_ycbcr);

        // polarization net; global residual feeds the gradient through both
        // the network and the identity path
        nn::Tensor<T> dpolar_in =
            model.polar_net.backward(dpolar, work.polar_ctx, work.polar_grads, work.ws);
        if (model.arch.global_residual) nn::add_inplace(dpolar_in, dpolar);

        // re-arrangement adjoints back to the color outputs
        const CpfaPattern& pattern = batch[0].raw.pattern;
        for (int i = 0; i < n; ++i) {
            std::array<Image<T>, kOrientations> rgb_grads;
            for (int o = 0; o < kOrientations; ++o)
                rgb_grads[o] = Image<T>(kColors, work.color_out.height(), work.color_out.width());
            for (ColorChannel c : kAllColors) {
                const int s = i * kColors + static_cast<int>(c);
                Image<T> dquad = dpolar_in.to_image(s);
                Image<T> dmosaic = polarization_bilinear_adjoint(dquad, pattern);
                assemble_adjoint_accumulate(dmosaic, c, pattern, rgb_grads);
            }
            for (int o = 0; o < kOrientations; ++o) {
                const int s = i * kOrientations + o;
                // add on top of the L_C contribution already in dcolor
                Image<T> cur = dcolor.to_image(s);
                for (size_t idx = 0; idx < cur.size(); ++idx)
                    cur.data()[idx] += rgb_grads[o].data()[idx];
                dcolor.set_sample(s, cur);
            }
        }

        nn::Tensor<T> dcolor_in =
            model.color_net.backward(dcolor, work.color_ctx, work.color_grads, work.ws);
        (void)dcolor_in;  // no parameters upstream of the bilinear input
    } else {
        nn::Tensor<T> dout(work.color_out.channels(), work.color_out.samples(),
                           work.color_out.height(), work.color_out.width());
        if (loss_mode == "cp") {
            L.l_cp = l1_mean_grad(work.color_out, work.color_tgt, T(1), dout);
            L.l_cp_ycbcr = cube_ycbcr_l1<T>(work.color_out, work.color_tgt, T(0), nullptr);
            L.total = L.l_cp;
        } else {
            L.l_cp_ycbcr = cube_ycbcr_l1<T>(work.color_out, work.color_tgt, T(1), &dout);
            L.l_cp = l1_mean(work.color_out, work.color_tgt);
            L.total = L.l_cp_ycbcr;
        }
        nn::Tensor<T> din =
            model.joint_net.backward(dout, work.color_ctx, work.joint_grads, work.ws);
        (void)din;
    }
    return L;
}

LossBreakdown<float> train_step(DemosaickModel<float>& model,
                                const std::vector<TrainSample<float>>& batch,
                                nn::Adam<float>& opt, const TrainConfig& cfg,
                                BatchWork<float>& work, uint64_t batch_seed) {
    // make sure grad slots exist so zeroing in loss_and_gradients is aligned
    if (model.kind == ModelKind::TwoStep) {
        work.color_grads.resize(model.color_net.convs().size());
        work.polar_grads.resize(model.polar_net.convs().size());
    } else {
        work.joint_grads.resize(model.joint_net.convs().size());
    }
    LossBreakdown<float> L = loss_and_gradients(model, batch, static_cast<float>(cfg.alpha),
                                                cfg.loss_mode, work);
    if (!std::isfinite(static_cast<double>(L.total)))
        throw NumericError("non-finite loss at batch seed " + std::to_string(batch_seed));

    opt.begin_step();
    size_t slot = 0;
    auto apply = [&](nn::UNet<float>& net, std::vector<nn::ConvGrads<float>>& grads) {
        for (size_t i = 0; i < net.convs().size(); ++i) {
            opt.update(slot++, net.convs()[i].w, grads[i].gw);
            opt.update(slot++, net.convs()[i].b, grads[i].gb);
        }
    };
    if (model.kind == ModelKind::TwoStep) {
        apply(model.color_net, work.color_grads);
        apply(model.polar_net, work.polar_grads);
    } else {
        apply(model.joint_net, work.joint_grads);
    }
    return L;
}

double validation_s0_cpsnr(const DemosaickModel<float>& model,
                           const std::vector<const SceneRecord*>& scenes) {
    if (scenes.empty()) throw InvalidInput("validation_s0_cpsnr: no scenes");
    double sum = 0.0;
    for (const SceneRecord* s : scenes) {
        CpfaRaw<float> raw = synthesize_cpfa(s->cube, model.pattern);
        Image<double> pred = model_forward(raw, model).cast<double>();
        MetricsRecord rec = evaluate_scene(pred, s->cube.cast<double>());
        sum += rec.cpsnr_s0;
    }
    return sum / static_cast<double>(scenes.size());
}

TrainResult train_loop(const TrainConfig& cfg, const std::vector<SceneRecord>& scenes,
                       const std::string& out_dir, std::ostream* log,
                       const std::function<void(long long, const LossBreakdown<float>&)>&
                           progress) {
    cfg.validate();
    std::vector<const SceneRecord*> train, val;
    for (const auto& s : scenes) {
        if (s.split == "train") train.push_back(&s);
        if (s.split == "val") val.push_back(&s);
    }
    if (train.size() < static_cast<size_t>(cfg.images_per_batch))
        throw ConfigError("train split has " + std::to_string(train.size()) +
                          " scenes; need >= " + std::to_string(cfg.images_per_batch));
    if (val.empty()) throw ConfigError("validation split is empty");
    fs::create_directories(out_dir);

    const CpfaPattern pattern = CpfaPattern::standard();
    DemosaickModel<float> model =
        cfg.method == "tcpdnet"
            ? DemosaickModel<float>::two_step(cfg.arch, pattern, cfg.seed)
            : DemosaickModel<float>::single_step(cfg.arch, pattern, cfg.seed);

    nn::Adam<float> opt({cfg.learning_rate, 0.9, 0.999, 1e-8});
    BatchWork<float> work;

    TrainResult result;
    result.best_val_s0_cpsnr = -1.0;
    const std::string final_path = (fs::path(out_dir) / "final.ckpt").string();
    const std::string best_path = (fs::path(out_dir) / "best.ckpt").string();

    for (long long iter = 1; iter <= cfg.iterations; ++iter) {
        Rng rng = Rng::derive(cfg.seed, static_cast<uint64_t>(iter));
        std::vector<TrainSample<float>> batch = sample_batch<float>(train, cfg, pattern, rng);
        LossBreakdown<float> L = train_step(model, batch, opt, cfg, work,
                                            static_cast<uint64_t>(iter));
        if (progress) progress(iter, L);

        if (log && (iter % cfg.log_every == 0 || iter == 1)) {
            nlohmann::json line;
            line["iter"] = iter;
            line["l_c"] = L.l_c;
            line["l_cp"] = L.l_cp;
            line["l_cp_ycbcr"] = L.l_cp_ycbcr;
            line["total"] = L.total;
            (*log) << line.dump() << "\n";
        }
        if (iter % cfg.val_every == 0 || iter == cfg.iterations) {
            const double v = validation_s0_cpsnr(model, val);
            const bool best = v > result.best_val_s0_cpsnr;
            if (best) {
                result.best_val_s0_cpsnr = v;
                result.best_iteration = iter;
                save_checkpoint(model, best_path);
            }
            if (log) {
                nlohmann::json line;
                line["iter"] = iter;
                line["val_s0_cpsnr"] = v;
                line["best"] = best;
                (*log) << line.dump() << "\n";
            }
        }
    }
    save_checkpoint(model, final_path);
    result.final_checkpoint = final_path;
    result.best_checkpoint = best_path;
    return result;
}

#define TCPD_INSTANTIATE_TRAINING(T)                                                      \
    template Image<T> augment_rotation(const Image<T>&, int);                              \
    template std::vector<TrainSample<T>> sample_batch(                                     \
        const std::vector<const SceneRecord*>&, const TrainConfig&, const CpfaPattern&,    \
        Rng&);                                                                             \
    template void forward_batch(const DemosaickModel<T>&,                                  \
                                const std::vector<TrainSample<T>>&, BatchWork<T>&);        \
    template LossBreakdown<T> batch_loss_values(const DemosaickModel<T>&,                  \
                                                const BatchWork<T>&, T, const std::string&); \
    template LossBreakdown<T> loss_and_gradients(const DemosaickModel<T>&,                 \
                                                 const std::vector<TrainSample<T>>&, T,    \
                                                 const std::string&, BatchWork<T>&);

TCPD_INSTANTIATE_TRAINING(float)
TCPD_INSTANTIATE_TRAINING(double)
#undef TCPD_INSTANTIATE_TRAINING

}  // namespace tcpd
