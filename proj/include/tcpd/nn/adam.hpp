#pragma once

#include <cmath>
#include <vector>

#include "tcpd/common.hpp"

namespace tcpd::nn {

// Adam with bias correction; moments stored per parameter buffer.
template <typename T>
class Adam {
public:
    struct Hyper {
        double lr = 1e-4;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    explicit Adam(Hyper hp = {}) : hp_(hp) {}

    const Hyper& hyper() const { return hp_; }
    long long step_count() const { return t_; }

    // Buffers are identified by registration order; call begin_step once per
    // optimization step, then update each parameter buffer exactly once.
    void begin_step() { ++t_; }

    void update(size_t slot, std::vector<T>& param, const std::vector<T>& grad) {
        if (slot >= m_.size()) {
            m_.resize(slot + 1);
            v_.resize(slot + 1);
        }
        if (m_[slot].size() != param.size()) {
            m_[slot].assign(param.size(), 0.0);
            v_[slot].assign(param.size(), 0.0);
        }
        if (param.size() != grad.size()) throw InvalidInput("adam: grad/param size mismatch");
        const double b1 = hp_.beta1, b2 = hp_.beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        std::vector<double>& m = m_[slot];
        std::vector<double>& v = v_[slot];
        for (size_t i = 0; i < param.size(); ++i) {
            const double g = static_cast<double>(grad[i]);
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            param[i] -= static_cast<T>(hp_.lr * mhat / (std::sqrt(vhat) + hp_.epsilon));
        }
    }

private:
    Hyper hp_;
    long long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace tcpd::nn
