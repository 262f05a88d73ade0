#include <doctest.h>

#include <cmath>

#include "tcpd/nn/adam.hpp"
#include "tcpd/nn/ops.hpp"
#include "tcpd/nn/unet.hpp"
#include "tcpd/rng.hpp"

using namespace tcpd;
using nn::Tensor;

namespace {

Tensor<double> random_tensor(Rng& rng, int c, int n, int h, int w, double lo = -1.0,
                             double hi = 1.0) {
    Tensor<double> t(c, n, h, w);
    for (size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
    return t;
}

// straight-loop convolution, independent of the im2col/GEMM path
Tensor<double> conv_reference(const nn::ConvParams<double>& p, const Tensor<double>& x) {
    const int pad = p.k / 2;
    Tensor<double> y(p.out_ch, x.samples(), x.height(), x.width());
    for (int co = 0; co < p.out_ch; ++co)
        for (int n = 0; n < x.samples(); ++n)
            for (int yy = 0; yy < x.height(); ++yy)
                for (int xx = 0; xx < x.width(); ++xx) {
                    double acc = p.b[co];
                    for (int ci = 0; ci < p.in_ch; ++ci)
                        for (int ky = 0; ky < p.k; ++ky)
                            for (int kx = 0; kx < p.k; ++kx) {
                                const int sy = yy + ky - pad, sx = xx + kx - pad;
                                if (sy < 0 || sy >= x.height() || sx < 0 || sx >= x.width())
                                    continue;
                                acc += p.w[((static_cast<size_t>(co) * p.in_ch + ci) * p.k + ky) *
                                               p.k +
                                           kx] *
                                       x.plane(ci, n)[static_cast<size_t>(sy) * x.width() + sx];
                            }
                    y.plane(co, n)[static_cast<size_t>(yy) * x.width() + xx] = acc;
                }
    return y;
}

double sum_mul(const Tensor<double>& a, const Tensor<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

}  // namespace

TEST_CASE("conv2d forward matches the reference loop") {
    Rng rng(41);
    for (int k : {1, 3}) {
        nn::ConvParams<double> p;
        p.name = "t";
        p.in_ch = 3;
        p.out_ch = 5;
        p.k = k;
        p.init_he(rng, 0.0);
        for (double& b : p.b) b = rng.uniform(-0.5, 0.5);
        Tensor<double> x = random_tensor(rng, 3, 2, 6, 7);
        nn::Workspace<double> ws;
        Tensor<double> y = conv2d_forward(p, x, ws);
        Tensor<double> ref = conv_reference(p, x);
        for (size_t i = 0; i < y.size(); ++i)
            CHECK(y.data()[i] == doctest::Approx(ref.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("conv2d backward matches finite differences") {
    Rng rng(42);
    nn::ConvParams<double> p;
    p.name = "t";
    p.in_ch = 2;
    p.out_ch = 3;
    p.k = 3;
    p.init_he(rng, 0.0);
    Tensor<double> x = random_tensor(rng, 2, 2, 5, 4);
    Tensor<double> dy = random_tensor(rng, 3, 2, 5, 4);
    nn::Workspace<double> ws;

    nn::ConvGrads<double> g;
    Tensor<double> dx = conv2d_backward(p, x, dy, g, ws);

    const double h = 1e-6;
    // loss = <y, dy>, so dL/dtheta via central differences
    auto loss = [&]() { return sum_mul(conv2d_forward(p, x, ws), dy); };
    for (size_t i = 0; i < p.w.size(); i += 7) {
        const double keep = p.w[i];
        p.w[i] = keep + h;
        const double up = loss();
        p.w[i] = keep - h;
        const double dn = loss();
        p.w[i] = keep;
        CHECK(g.gw[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5));
    }
    for (size_t i = 0; i < p.b.size(); ++i) {
        const double keep = p.b[i];
        p.b[i] = keep + h;
        const double up = loss();
        p.b[i] = keep - h;
        const double dn = loss();
        p.b[i] = keep;
        CHECK(g.gb[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5));
    }
    for (size_t i = 0; i < x.size(); i += 5) {
        const double keep = x.data()[i];
        x.data()[i] = keep + h;
        const double up = loss();
        x.data()[i] = keep - h;
        const double dn = loss();
        x.data()[i] = keep;
        CHECK(dx.data()[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("pool/upsample/activation backward are exact adjoints") {
    Rng rng(43);
    Tensor<double> x = random_tensor(rng, 2, 2, 4, 6);
    Tensor<double> dy_pool = random_tensor(rng, 2, 2, 2, 3);
    // <pool(x), dy> == <x, pool^T(dy)>
    CHECK(sum_mul(nn::avgpool2_forward(x), dy_pool) ==
          doctest::Approx(sum_mul(x, nn::avgpool2_backward(dy_pool))).epsilon(1e-12));

    Tensor<double> dy_up = random_tensor(rng, 2, 2, 8, 12);
    CHECK(sum_mul(nn::upsample2_forward(x), dy_up) ==
          doctest::Approx(sum_mul(x, nn::upsample2_backward(dy_up))).epsilon(1e-12));

    // activation: grad wrt input recovered from the stored output
    for (double slope : {0.0, 0.2}) {
        Tensor<double> z = random_tensor(rng, 1, 1, 4, 4);
        Tensor<double> out = z;
        nn::activation_forward(out, slope);
        Tensor<double> d = random_tensor(rng, 1, 1, 4, 4);
        Tensor<double> dz = d;
        nn::activation_backward(dz, out.data(), slope);
        for (size_t i = 0; i < z.size(); ++i) {
            const double expected = z.data()[i] > 0 ? d.data()[i] : slope * d.data()[i];
            CHECK(dz.data()[i] == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("unet forward shapes, determinism, divisibility guard") {
    nn::ArchitectureSpec spec;
    spec.levels = 2;
    spec.base_channels = 6;
    nn::UNet<double> net(spec, 3, 5);
    Rng rng(44);
    net.init(rng, false);
    Tensor<double> x = random_tensor(rng, 3, 2, 8, 12);
    nn::Workspace<double> ws;
    nn::UNet<double>::Ctx ctx;
    Tensor<double> y1 = net.forward(x, ctx, ws);
    CHECK(y1.channels() == 5);
    CHECK(y1.samples() == 2);
    CHECK(y1.height() == 8);
    CHECK(y1.width() == 12);
    Tensor<double> y2 = net.forward(x, ctx, ws);
    for (size_t i = 0; i < y1.size(); ++i) CHECK(y1.data()[i] == y2.data()[i]);

    Tensor<double> odd(3, 1, 6, 6);
    CHECK_THROWS_AS(net.forward(odd, ctx, ws), InvalidInput);
}

TEST_CASE("unet parameter and input gradients match finite differences") {
    nn::ArchitectureSpec spec;
    spec.levels = 1;
    spec.base_channels = 4;
    nn::UNet<double> net(spec, 2, 3);
    Rng rng(45);
    net.init(rng, false);

    Tensor<double> x = random_tensor(rng, 2, 1, 4, 4);
    Tensor<double> target = random_tensor(rng, 3, 1, 4, 4);
    nn::Workspace<double> ws;

    // L = 0.5 * sum (y - t)^2 keeps the check smooth
    auto loss_value = [&]() {
        nn::UNet<double>::Ctx ctx;
        Tensor<double> y = net.forward(x, ctx, ws);
        double s = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            const double d = y.data()[i] - target.data()[i];
            s += 0.5 * d * d;
        }
        return s;
    };

    nn::UNet<double>::Ctx ctx;
    Tensor<double> y = net.forward(x, ctx, ws);
    Tensor<double> dy(3, 1, 4, 4);
    for (size_t i = 0; i < y.size(); ++i) dy.data()[i] = y.data()[i] - target.data()[i];
    std::vector<nn::ConvGrads<double>> grads;
    Tensor<double> dx = net.backward(dy, ctx, grads, ws);

    const double h = 1e-6;
    size_t checked = 0;
    for (size_t ci = 0; ci < net.convs().size(); ++ci) {
        auto& conv = net.convs()[ci];
        for (size_t i = 0; i < conv.w.size(); i += 11) {
            const double keep = conv.w[i];
            conv.w[i] = keep + h;
            const double up = loss_value();
            conv.w[i] = keep - h;
            const double dn = loss_value();
            conv.w[i] = keep;
            const double fd = (up - dn) / (2 * h);
            CHECK(grads[ci].gw[i] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
            ++checked;
        }
        for (size_t i = 0; i < conv.b.size(); i += 3) {
            const double keep = conv.b[i];
            conv.b[i] = keep + h;
            const double up = loss_value();
            conv.b[i] = keep - h;
            const double dn = loss_value();
            conv.b[i] = keep;
            CHECK(grads[ci].gb[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-4).scale(1.0));
            ++checked;
        }
    }
    CHECK(checked > 100);

    for (size_t i = 0; i < x.size(); i += 3) {
        const double keep = x.data()[i];
        x.data()[i] = keep + h;
        const double up = loss_value();
        x.data()[i] = keep - h;
        const double dn = loss_value();
        x.data()[i] = keep;
        CHECK(dx.data()[i] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("adam: zero gradient with zero moments leaves parameters unchanged") {
    nn::Adam<double> opt({1e-3, 0.9, 0.999, 1e-8});
    std::vector<double> param = {0.5, -0.25, 1.0};
    const std::vector<double> before = param;
    std::vector<double> grad = {0.0, 0.0, 0.0};
    opt.begin_step();
    opt.update(0, param, grad);
    CHECK(param == before);
}

TEST_CASE("adam implements the bias-corrected update") {
    nn::Adam<double> opt({0.01, 0.9, 0.999, 1e-8});
    std::vector<double> param = {1.0};
    std::vector<double> grad = {0.3};
    opt.begin_step();
    opt.update(0, param, grad);
    // first step: mhat = g, vhat = g^2 -> step = lr * g / (|g| + eps)
    const double expected = 1.0 - 0.01 * 0.3 / (0.3 + 1e-8);
    CHECK(param[0] == doctest::Approx(expected).epsilon(1e-12));

    grad[0] = -0.3;
    opt.begin_step();
    opt.update(0, param, grad);
    CHECK(std::isfinite(param[0]));
}
