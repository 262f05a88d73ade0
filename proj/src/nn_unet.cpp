#include "tcpd/nn/unet.hpp"

#include <json.hpp>

namespace tcpd::nn {

void ArchitectureSpec::validate() const {
    if (levels < 1) throw InvalidInput("arch: levels must be >= 1");
    if (base_channels < 1) throw InvalidInput("arch: base_channels must be >= 1");
    if (kernel_size != 3 && kernel_size != 5)
        throw InvalidInput("arch: kernel_size must be 3 or 5");
    if (activation != "relu" && activation != "leaky_relu")
        throw InvalidInput("arch: unknown activation \"" + activation + "\"");
}

double ArchitectureSpec::negative_slope() const {
    return activation == "leaky_relu" ? 0.2 : 0.0;
}

std::string ArchitectureSpec::to_json() const {
    nlohmann::json j;
    j["levels"] = levels;
    j["base_channels"] = base_channels;
    j["kernel_size"] = kernel_size;
    j["activation"] = activation;
    j["global_residual"] = global_residual;
    return j.dump();
}

ArchitectureSpec ArchitectureSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ArchitectureSpec s;
    s.levels = j.value("levels", s.levels);
    s.base_channels = j.value("base_channels", s.base_channels);
    s.kernel_size = j.value("kernel_size", s.kernel_size);
    s.activation = j.value("activation", s.activation);
    s.global_residual = j.value("global_residual", s.global_residual);
    s.validate();
    return s;
}

template <typename T>
UNet<T>::UNet(const ArchitectureSpec& spec, int in_channels, int out_channels)
    : spec_(spec), in_ch_(in_channels), out_ch_(out_channels) {
    spec_.validate();
    const int L = spec_.levels, k = spec_.kernel_size;
    auto add = [&](const std::string& name, int ci, int co, int kk) {
        ConvParams<T> p;
        p.name = name;
        p.in_ch = ci;
        p.out_ch = co;
        p.k = kk;
        p.init_zero();
        convs_.push_back(std::move(p));
        return static_cast<int>(convs_.size()) - 1;
    };
    int prev = in_channels;
    for (int i = 0; i < L; ++i) {
        enc_a_.push_back(add("enc" + std::to_string(i) + ".a", prev, width(i), k));
        enc_b_.push_back(add("enc" + std::to_string(i) + ".b", width(i), width(i), k));
        prev = width(i);
    }
    bott_a_ = add("bott.a", prev, width(L), k);
    bott_b_ = add("bott.b", width(L), width(L), k);
    up_.resize(L);
    dec_a_.resize(L);
    dec_b_.resize(L);
    for (int i = L - 1; i >= 0; --i) {
        up_[i] = add("dec" + std::to_string(i) + ".up", width(i + 1), width(i), k);
        dec_a_[i] = add("dec" + std::to_string(i) + ".a", 2 * width(i), width(i), k);
        dec_b_[i] = add("dec" + std::to_string(i) + ".b", width(i), width(i), k);
    }
    proj_ = add("proj", spec_.base_channels, out_channels, 1);
}

template <typename T>
void UNet<T>::init(Rng& rng, bool zero_init_final) {
    const double slope = spec_.negative_slope();
    for (auto& c : convs_) c.init_he(rng, slope);
    if (zero_init_final) convs_[proj_].init_zero();
}

template <typename T>
size_t UNet<T>::parameter_count() const {
    size_t n = 0;
    for (const auto& c : convs_) n += c.param_count();
    return n;
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& x, Ctx& ctx, Workspace<T>& ws) const {
    const int L = spec_.levels;
    if (x.height() % (1 << L) != 0 || x.width() % (1 << L) != 0)
        throw InvalidInput("unet: spatial size must be divisible by 2^levels");
    const double slope = spec_.negative_slope();
    ctx.conv_in.assign(convs_.size(), Tensor<T>());
    ctx.skips.assign(L, Tensor<T>());
    ctx.dec_out.assign(L, Tensor<T>());

    Tensor<T> cur = x;
    for (int i = 0; i < L; ++i) {
        ctx.conv_in[enc_a_[i]] = std::move(cur);
        cur = conv2d_forward(convs_[enc_a_[i]], ctx.conv_in[enc_a_[i]], ws);
        activation_forward(cur, slope);
        ctx.conv_in[enc_b_[i]] = std::move(cur);
        cur = conv2d_forward(convs_[enc_b_[i]], ctx.conv_in[enc_b_[i]], ws);
        activation_forward(cur, slope);
        ctx.skips[i] = std::move(cur);
        cur = avgpool2_forward(ctx.skips[i]);
    }
    ctx.conv_in[bott_a_] = std::move(cur);
    cur = conv2d_forward(convs_[bott_a_], ctx.conv_in[bott_a_], ws);
    activation_forward(cur, slope);
    ctx.conv_in[bott_b_] = std::move(cur);
    cur = conv2d_forward(convs_[bott_b_], ctx.conv_in[bott_b_], ws);
    activation_forward(cur, slope);
    ctx.bott_out = std::move(cur);

    const Tensor<T>* below = &ctx.bott_out;
    for (int i = L - 1; i >= 0; --i) {
        Tensor<T> up = upsample2_forward(*below);
        ctx.conv_in[up_[i]] = std::move(up);
        Tensor<T> u = conv2d_forward(convs_[up_[i]], ctx.conv_in[up_[i]], ws);
        activation_forward(u, slope);
        ctx.conv_in[dec_a_[i]] = nn::concat_channels(u, ctx.skips[i]);
        Tensor<T> d = conv2d_forward(convs_[dec_a_[i]], ctx.conv_in[dec_a_[i]], ws);
        activation_forward(d, slope);
        ctx.conv_in[dec_b_[i]] = std::move(d);
        d = conv2d_forward(convs_[dec_b_[i]], ctx.conv_in[dec_b_[i]], ws);
        activation_forward(d, slope);
        ctx.dec_out[i] = std::move(d);
        below = &ctx.dec_out[i];
    }
    return conv2d_forward(convs_[proj_], ctx.dec_out[0], ws);
}

template <typename T>
Tensor<T> UNet<T>::backward(const Tensor<T>& dout, const Ctx& ctx,
                            std::vector<ConvGrads<T>>& grads, Workspace<T>& ws) const {
    const int L = spec_.levels;
    const double slope = spec_.negative_slope();
    if (grads.size() != convs_.size()) grads.resize(convs_.size());

    Tensor<T> d = conv2d_backward(convs_[proj_], ctx.dec_out[0], dout, grads[proj_], ws);

    std::vector<Tensor<T>> dskip(L);
    for (int i = 0; i < L; ++i) {
        activation_backward(d, ctx.dec_out[i].data(), slope);
        d = conv2d_backward(convs_[dec_b_[i]], ctx.conv_in[dec_b_[i]], d, grads[dec_b_[i]], ws);
        activation_backward(d, ctx.conv_in[dec_b_[i]].data(), slope);
        d = conv2d_backward(convs_[dec_a_[i]], ctx.conv_in[dec_a_[i]], d, grads[dec_a_[i]], ws);
        Tensor<T> dup;
        split_channels(d, width(i), dup, dskip[i]);
        // the first width(i) rows of the concat input are the up-conv output
        activation_backward(dup, ctx.conv_in[dec_a_[i]].data(), slope);
        d = conv2d_backward(convs_[up_[i]], ctx.conv_in[up_[i]], dup, grads[up_[i]], ws);
        d = upsample2_backward(d);
    }

    activation_backward(d, ctx.bott_out.data(), slope);
    d = conv2d_backward(convs_[bott_b_], ctx.conv_in[bott_b_], d, grads[bott_b_], ws);
    activation_backward(d, ctx.conv_in[bott_b_].data(), slope);
    d = conv2d_backward(convs_[bott_a_], ctx.conv_in[bott_a_], d, grads[bott_a_], ws);

    for (int i = L - 1; i >= 0; --i) {
        Tensor<T> g = avgpool2_backward(d);
        add_inplace(g, dskip[i]);
        activation_backward(g, ctx.skips[i].data(), slope);
        g = conv2d_backward(convs_[enc_b_[i]], ctx.conv_in[enc_b_[i]], g, grads[enc_b_[i]], ws);
        activation_backward(g, ctx.conv_in[enc_b_[i]].data(), slope);
        d = conv2d_backward(convs_[enc_a_[i]], ctx.conv_in[enc_a_[i]], g, grads[enc_a_[i]], ws);
    }
    return d;
}

template class UNet<float>;
template class UNet<double>;

}  // namespace tcpd::nn
