#include "tcpd/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace tcpd {

const char* model_kind_name(ModelKind k) {
    return k == ModelKind::TwoStep ? "two_step" : "single_step";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "two_step") return ModelKind::TwoStep;
    if (name == "single_step") return ModelKind::SingleStep;
    throw InvalidInput("unknown model kind \"" + name + "\"");
}

template <typename T>
DemosaickModel<T> DemosaickModel<T>::two_step(const nn::ArchitectureSpec& arch,
                                              const CpfaPattern& pattern, uint64_t seed,
                                              bool zero_init_final) {
    DemosaickModel<T> m;
    m.kind = ModelKind::TwoStep;
    m.arch = arch;
    m.pattern = pattern;
    m.color_net = nn::UNet<T>(arch, kColors, kColors);
    m.polar_net = nn::UNet<T>(arch, kOrientations, kOrientations);
    Rng rc = Rng::derive(seed, 1);
    Rng rp = Rng::derive(seed, 2);
    m.color_net.init(rc, zero_init_final);
    m.polar_net.init(rp, zero_init_final);
    return m;
}

template <typename T>
DemosaickModel<T> DemosaickModel<T>::single_step(const nn::ArchitectureSpec& arch,
                                                 const CpfaPattern& pattern, uint64_t seed,
                                                 bool zero_init_final) {
    DemosaickModel<T> m;
    m.kind = ModelKind::SingleStep;
    m.arch = arch;
    m.pattern = pattern;
    m.joint_net = nn::UNet<T>(arch, kCubeChannels, kCubeChannels);
    Rng r = Rng::derive(seed, 3);
    m.joint_net.init(r, zero_init_final);
    return m;
}

template <typename T>
size_t DemosaickModel<T>::parameter_count() const {
    if (kind == ModelKind::TwoStep)
        return color_net.parameter_count() + polar_net.parameter_count();
    return joint_net.parameter_count();
}

template <typename T>
std::vector<ParamSlot<T>> model_parameters(DemosaickModel<T>& model) {
    std::vector<ParamSlot<T>> slots;
    auto add_net = [&](const std::string& prefix, nn::UNet<T>& net) {
        for (auto& conv : net.convs()) {
            slots.push_back({prefix + conv.name + ".w", &conv.w,
                             {conv.out_ch, conv.in_ch, conv.k, conv.k}});
            slots.push_back({prefix + conv.name + ".b", &conv.b, {conv.out_ch}});
        }
    };
    if (model.kind == ModelKind::TwoStep) {
        add_net("color.", model.color_net);
        add_net("polar.", model.polar_net);
    } else {
        add_net("joint.", model.joint_net);
    }
    return slots;
}

template <typename T>
Image<T> reflect_pad(const Image<T>& img, int target_h, int target_w) {
    if (target_h == img.height() && target_w == img.width()) return img;
    if (target_h < img.height() || target_w < img.width())
        throw InvalidInput("reflect_pad: target smaller than image");
    Image<T> out(img.channels(), target_h, target_w);
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < target_h; ++y) {
            const int sy = reflect_index(y, img.height());
            for (int x = 0; x < target_w; ++x)
                out.at(c, y, x) = img.at(c, sy, reflect_index(x, img.width()));
        }
    return out;
}

template <typename T>
Image<T> crop_top_left(const Image<T>& img, int h, int w) {
    if (h == img.height() && w == img.width()) return img;
    Image<T> out(img.channels(), h, w);
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < h; ++y)
            std::copy(img.plane(c) + static_cast<size_t>(y) * img.width(),
                      img.plane(c) + static_cast<size_t>(y) * img.width() + w,
                      out.plane(c) + static_cast<size_t>(y) * w);
    return out;
}

template <typename T>
nn::Tensor<T> refine_batch(const nn::UNet<T>& net, const nn::Tensor<T>& x, nn::Workspace<T>& ws) {
    typename nn::UNet<T>::Ctx ctx;
    nn::Tensor<T> y = net.forward(x, ctx, ws);
    if (net.spec().global_residual) nn::add_inplace(y, x);
    return y;
}

template <typename T>
Image<T> refine_image(const nn::UNet<T>& net, const Image<T>& img, nn::Workspace<T>& ws) {
    const int mult = 1 << net.spec().levels;
    const int ph = (img.height() + mult - 1) / mult * mult;
    const int pw = (img.width() + mult - 1) / mult * mult;
    Image<T> padded = reflect_pad(img, ph, pw);
    nn::Tensor<T> x(padded.channels(), 1, ph, pw);
    x.set_sample(0, padded);
    nn::Tensor<T> y = refine_batch(net, x, ws);
    return crop_top_left(y.to_image(0), img.height(), img.width());
}

template <typename T>
OrientedRgb<T> color_demosaick(const BayerMosaic<T>& mosaic, const nn::UNet<T>& net,
                               nn::Workspace<T>& ws) {
    OrientedRgb<T> base = bayer_bilinear(mosaic);
    return OrientedRgb<T>{refine_image(net, base.data, ws), mosaic.orientation};
}

template <typename T>
Image<T> polarization_demosaick(const PolarMosaic<T>& mosaic, const nn::UNet<T>& net,
                                nn::Workspace<T>& ws) {
    return refine_image(net, polarization_bilinear(mosaic), ws);
}

template <typename T>
Image<T> tcpdnet_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model) {
    if (model.kind != ModelKind::TwoStep)
        throw InvalidInput("tcpdnet_forward: model is not two-step");
    nn::Workspace<T> ws;
    std::vector<OrientedRgb<T>> rgbs;
    rgbs.reserve(kOrientations);
    for (Orientation o : kAllOrientations)
        rgbs.push_back(color_demosaick(subsample_orientation(raw, o), model.color_net, ws));
    Image<T> quads[kColors];
    for (ColorChannel c : kAllColors) {
        PolarMosaic<T> m = assemble_mosaicked_polarization(rgbs, c, raw.pattern);
        quads[static_cast<int>(c)] = polarization_demosaick(m, model.polar_net, ws);
    }
    return concat_channels(quads[0], quads[1], quads[2]);
}

template <typename T>
Image<T> single_step_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model) {
    if (model.kind != ModelKind::SingleStep)
        throw InvalidInput("single_step_forward: model is not single-step");
    nn::Workspace<T> ws;
    return refine_image(model.joint_net, bilinear_baseline(raw), ws);
}

template <typename T>
Image<T> model_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model) {
    return model.kind == ModelKind::TwoStep ? tcpdnet_forward(raw, model)
                                            : single_step_forward(raw, model);
}

namespace {

constexpr char kCkptMagic[8] = {'T', 'C', 'P', 'D', 'C', 'K', 'P', 'T'};
constexpr uint32_t kCkptVersion = 1;

void write_u32(std::ostream& os, uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void save_checkpoint(const DemosaickModel<float>& model, const std::string& path) {
    auto& mutable_model = const_cast<DemosaickModel<float>&>(model);
    std::vector<ParamSlot<float>> slots = model_parameters(mutable_model);

    nlohmann::json meta;
    meta["kind"] = model_kind_name(model.kind);
    meta["arch"] = nlohmann::json::parse(model.arch.to_json());
    meta["pattern"] = nlohmann::json::parse(model.pattern.to_json());
    meta["dtype"] = "f32";
    const std::string meta_text = meta.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot create checkpoint " + path);
    os.write(kCkptMagic, sizeof(kCkptMagic));
    write_u32(os, kCkptVersion);
    write_u32(os, static_cast<uint32_t>(meta_text.size()));
    os.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
    write_u32(os, static_cast<uint32_t>(slots.size()));
    for (const auto& s : slots) {
        write_u32(os, static_cast<uint32_t>(s.name.size()));
        os.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
        write_u32(os, static_cast<uint32_t>(s.shape.size()));
        for (int d : s.shape) write_u32(os, static_cast<uint32_t>(d));
        write_u32(os, static_cast<uint32_t>(s.values->size()));
        os.write(reinterpret_cast<const char*>(s.values->data()),
                 static_cast<std::streamsize>(s.values->size() * sizeof(float)));
    }
    if (!os) throw IoError("failed writing checkpoint " + path);
}

DemosaickModel<float> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
        throw IoError(path + ": not a checkpoint file");
    const uint32_t version = read_u32(is);
    if (version != kCkptVersion)
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
    const uint32_t meta_len = read_u32(is);
    std::string meta_text(meta_len, '\0');
    is.read(meta_text.data(), meta_len);
    if (!is) throw IoError(path + ": truncated checkpoint metadata");

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": bad checkpoint metadata: " + e.what());
    }
    const ModelKind kind = model_kind_from_name(meta.at("kind").get<std::string>());
    const nn::ArchitectureSpec arch = nn::ArchitectureSpec::from_json(meta.at("arch").dump());
    const CpfaPattern pattern = CpfaPattern::from_json(meta.at("pattern").dump());

    DemosaickModel<float> model =
        kind == ModelKind::TwoStep
            ? DemosaickModel<float>::two_step(arch, pattern, 0, true)
            : DemosaickModel<float>::single_step(arch, pattern, 0, true);
    std::vector<ParamSlot<float>> slots = model_parameters(model);

    const uint32_t count = read_u32(is);
    if (count != slots.size())
        throw IoError(path + ": checkpoint/architecture mismatch (tensor count " +
                      std::to_string(count) + ", expected " + std::to_string(slots.size()) + ")");
    for (auto& slot : slots) {
        const uint32_t name_len = read_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (name != slot.name)
            throw IoError(path + ": checkpoint/architecture mismatch at tensor \"" + name +
                          "\" (expected \"" + slot.name + "\")");
        const uint32_t ndims = read_u32(is);
        std::vector<int> shape(ndims);
        for (uint32_t i = 0; i < ndims; ++i) shape[i] = static_cast<int>(read_u32(is));
        if (shape != slot.shape)
            throw IoError(path + ": shape mismatch for tensor \"" + name + "\"");
        const uint32_t n = read_u32(is);
        if (n != slot.values->size())
            throw IoError(path + ": element count mismatch for tensor \"" + name + "\"");
        is.read(reinterpret_cast<char*>(slot.values->data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (!is) throw IoError(path + ": truncated tensor data");
    }
    return model;
}

DemosaickModel<float> load_checkpoint(const std::string& path,
                                      const nn::ArchitectureSpec& expected) {
    DemosaickModel<float> model = load_checkpoint(path);
    if (!(model.arch == expected))
        throw IoError(path + ": checkpoint architecture does not match the expected spec");
    return model;
}

#define TCPD_INSTANTIATE_MODEL(T)                                                            \
    template struct DemosaickModel<T>;                                                       \
    template std::vector<ParamSlot<T>> model_parameters(DemosaickModel<T>&);                 \
    template Image<T> reflect_pad(const Image<T>&, int, int);                                \
    template Image<T> crop_top_left(const Image<T>&, int, int);                              \
    template nn::Tensor<T> refine_batch(const nn::UNet<T>&, const nn::Tensor<T>&,            \
                                        nn::Workspace<T>&);                                  \
    template Image<T> refine_image(const nn::UNet<T>&, const Image<T>&, nn::Workspace<T>&);  \
    template OrientedRgb<T> color_demosaick(const BayerMosaic<T>&, const nn::UNet<T>&,       \
                                            nn::Workspace<T>&);                              \
    template Image<T> polarization_demosaick(const PolarMosaic<T>&, const nn::UNet<T>&,      \
                                             nn::Workspace<T>&);                             \
    template Image<T> tcpdnet_forward(const CpfaRaw<T>&, const DemosaickModel<T>&);          \
    template Image<T> single_step_forward(const CpfaRaw<T>&, const DemosaickModel<T>&);      \
    template Image<T> model_forward(const CpfaRaw<T>&, const DemosaickModel<T>&);

TCPD_INSTANTIATE_MODEL(float)
TCPD_INSTANTIATE_MODEL(double)
#undef TCPD_INSTANTIATE_MODEL

}  // namespace tcpd
