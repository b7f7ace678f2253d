#include "lachesis/neural.hpp"

#include <cmath>
#include <string>

namespace lachesis {

DenseNet DenseNet::create(const std::vector<std::size_t>& dims, Rng& rng) {
    if (dims.size() < 2) {
        throw DimMismatch("a network needs at least input and output dims");
    }
    DenseNet net;
    net.dims = dims;
    net.w.reserve(dims.size() - 1);
    net.b.reserve(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        Matrix m(dims[l + 1], dims[l]);
        for (double& v : m.a) v = rng.uniform(-bound, bound);
        Vec bias(dims[l + 1]);
        for (double& v : bias) v = rng.uniform(-bound, bound);
        net.w.push_back(std::move(m));
        net.b.push_back(std::move(bias));
    }
    return net;
}

std::size_t DenseNet::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < w.size(); ++l) n += w[l].a.size() + b[l].size();
    return n;
}

namespace {

double lrelu(double x, double leak) { return x >= 0.0 ? x : leak * x; }
double lrelu_grad(double x, double leak) { return x >= 0.0 ? 1.0 : leak; }

void affine(const Matrix& w, const Vec& b, const Vec& x, Vec& out) {
    out.assign(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        double acc = b[r];
        const double* row = &w.a[r * w.cols];
        for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

} // namespace

Vec DenseNet::forward(const Vec& x) const {
    if (x.size() != in_dim()) {
        throw DimMismatch("input has dim " + std::to_string(x.size()) + ", expected " +
                          std::to_string(in_dim()));
    }
    Vec cur = x;
    Vec next;
    for (std::size_t l = 0; l < w.size(); ++l) {
        affine(w[l], b[l], cur, next);
        if (l + 1 < w.size()) {
            for (double& v : next) v = lrelu(v, leak);
        }
        cur.swap(next);
    }
    return cur;
}

Vec DenseNet::forward(const Vec& x, GradTape& tape) const {
    if (x.size() != in_dim()) {
        throw DimMismatch("input has dim " + std::to_string(x.size()) + ", expected " +
                          std::to_string(in_dim()));
    }
    tape.inputs.clear();
    tape.pre.clear();
    tape.consumed = false;
    Vec cur = x;
    Vec next;
    for (std::size_t l = 0; l < w.size(); ++l) {
        tape.inputs.push_back(cur);
        affine(w[l], b[l], cur, next);
        tape.pre.push_back(next);
        if (l + 1 < w.size()) {
            for (double& v : next) v = lrelu(v, leak);
        }
        cur.swap(next);
    }
    return cur;
}

NetGrads NetGrads::zeros_like(const DenseNet& net) {
    NetGrads g;
    g.dw.reserve(net.w.size());
    g.db.reserve(net.b.size());
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        g.dw.emplace_back(net.w[l].rows, net.w[l].cols);
        g.db.emplace_back(net.b[l].size(), 0.0);
    }
    return g;
}

void NetGrads::accumulate(const NetGrads& other, double scale) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        for (std::size_t i = 0; i < dw[l].a.size(); ++i) dw[l].a[i] += scale * other.dw[l].a[i];
        for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += scale * other.db[l][i];
    }
}

void NetGrads::scale(double s) {
    for (auto& m : dw)
        for (double& v : m.a) v *= s;
    for (auto& vec : db)
        for (double& v : vec) v *= s;
}

bool NetGrads::finite() const {
    for (const auto& m : dw)
        for (double v : m.a)
            if (!std::isfinite(v)) return false;
    for (const auto& vec : db)
        for (double v : vec)
            if (!std::isfinite(v)) return false;
    return true;
}

Vec backward(const DenseNet& net, GradTape& tape, const Vec& out_grad,
             NetGrads& grads) {
    if (tape.consumed) {
        throw TapeMismatch("tape already consumed by a backward pass");
    }
    if (tape.inputs.size() != net.w.size() || out_grad.size() != net.out_dim()) {
        throw TapeMismatch("tape does not match this network");
    }
    tape.consumed = true;

    Vec delta = out_grad;
    Vec prev;
    for (std::size_t l = net.w.size(); l-- > 0;) {
        if (l + 1 < net.w.size()) {
            for (std::size_t i = 0; i < delta.size(); ++i) {
                delta[i] *= lrelu_grad(tape.pre[l][i], net.leak);
            }
        }
        const Vec& input = tape.inputs[l];
        Matrix& dw = grads.dw[l];
        for (std::size_t r = 0; r < dw.rows; ++r) {
            double* row = &dw.a[r * dw.cols];
            const double d = delta[r];
            for (std::size_t c = 0; c < dw.cols; ++c) row[c] += d * input[c];
            grads.db[l][r] += d;
        }
        prev.assign(net.w[l].cols, 0.0);
        for (std::size_t r = 0; r < net.w[l].rows; ++r) {
            const double* row = &net.w[l].a[r * net.w[l].cols];
            const double d = delta[r];
            for (std::size_t c = 0; c < net.w[l].cols; ++c) prev[c] += row[c] * d;
        }
        delta.swap(prev);
    }
    return delta;
}

void sgd_step(DenseNet& net, const NetGrads& grads, double lr, double sign) {
    if (grads.dw.size() != net.w.size()) {
        throw DimMismatch("gradient shape does not match network");
    }
    const double step = sign * lr;
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        if (grads.dw[l].a.size() != net.w[l].a.size() ||
            grads.db[l].size() != net.b[l].size()) {
            throw DimMismatch("gradient shape does not match network");
        }
        for (std::size_t i = 0; i < net.w[l].a.size(); ++i) {
            net.w[l].a[i] += step * grads.dw[l].a[i];
        }
        for (std::size_t i = 0; i < net.b[l].size(); ++i) {
            net.b[l][i] += step * grads.db[l][i];
        }
    }
}

void RunningNorm::observe(const double* x, std::size_t n) {
    if (n != mean_.size()) {
        throw DimMismatch("running-norm observation dim mismatch");
    }
    if (frozen_) return;
    ++count_;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean_[i];
        mean_[i] += d / static_cast<double>(count_);
        m2_[i] += d * (x[i] - mean_[i]);
    }
}

void RunningNorm::normalize(const double* x, double* out, std::size_t n) const {
    if (n != mean_.size()) {
        throw DimMismatch("running-norm input dim mismatch");
    }
    if (count_ < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i];
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double var = m2_[i] / static_cast<double>(count_);
        out[i] = (x[i] - mean_[i]) / std::sqrt(var + 1e-8);
    }
}

void RunningNorm::restore(std::uint64_t count, Vec mean, Vec m2) {
    if (mean.size() != mean_.size() || m2.size() != m2_.size()) {
        throw DimMismatch("running-norm restore dim mismatch");
    }
    count_ = count;
    mean_ = std::move(mean);
    m2_ = std::move(m2);
}

} // namespace lachesis
