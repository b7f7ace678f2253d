#pragma once

#include <cstddef>
#include <vector>

#include "lachesis/random.hpp"
#include "lachesis/types.hpp"

namespace lachesis {

using Vec = std::vector<double>;

struct Matrix {
    std::size_t rows{};
    std::size_t cols{};
    std::vector<double> a; // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

struct GradTape;

// Fully connected network: affine layers, leaky rectifier (slope 0.01) on
// hidden layers, linear output.
struct DenseNet {
    std::vector<std::size_t> dims;
    std::vector<Matrix> w;
    std::vector<Vec> b;
    double leak = 0.01;

    // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
    static DenseNet create(const std::vector<std::size_t>& dims, Rng& rng);

    std::size_t in_dim() const { return dims.front(); }
    std::size_t out_dim() const { return dims.back(); }
    std::size_t layer_count() const { return w.size(); }
    std::size_t param_count() const;

    Vec forward(const Vec& x) const;
    Vec forward(const Vec& x, GradTape& tape) const;
};

// One recorded forward pass; backward() consumes it exactly once.
struct GradTape {
    std::vector<Vec> inputs;
    std::vector<Vec> pre;
    bool consumed = false;
};

struct NetGrads {
    std::vector<Matrix> dw;
    std::vector<Vec> db;

    static NetGrads zeros_like(const DenseNet& net);
    void accumulate(const NetGrads& other, double scale);
    void scale(double s);
    bool finite() const;
};

// Accumulates parameter gradients into `grads` and returns the gradient with
// respect to the input. Throws TapeMismatch on shape mismatch or reuse.
Vec backward(const DenseNet& net, GradTape& tape, const Vec& out_grad,
             NetGrads& grads);

// params += sign * lr * grads; +1 ascends (policy), -1 descends (critic).
void sgd_step(DenseNet& net, const NetGrads& grads, double lr, double sign);

// Per-dimension running standardization (Welford). Before two observations it
// passes values through unchanged; freeze() pins the statistics for
// evaluation.
class RunningNorm {
public:
    RunningNorm() = default;
    explicit RunningNorm(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

    std::size_t dim() const { return mean_.size(); }
    void observe(const double* x, std::size_t n);
    void normalize(const double* x, double* out, std::size_t n) const;
    void freeze() { frozen_ = true; }
    void thaw() { frozen_ = false; }
    bool frozen() const { return frozen_; }

    std::uint64_t count() const { return count_; }
    const Vec& mean() const { return mean_; }
    const Vec& m2() const { return m2_; }
    void restore(std::uint64_t count, Vec mean, Vec m2);

private:
    std::uint64_t count_ = 0;
    Vec mean_;
    Vec m2_;
    bool frozen_ = false;
};

} // namespace lachesis
