#pragma once

#include <functional>

namespace mkv {

// Velocity field u(x,t) evaluated at bead positions. Implemented by the
// Oseen solver's sampled field and by closed-form test fields; the chain and
// density solvers only see this interface.
struct VelocitySampler {
    virtual ~VelocitySampler() = default;
    virtual int dim() const = 0;
    virtual void eval(const double* x, double t, double* out) const = 0;
};

struct ZeroVelocity final : VelocitySampler {
    explicit ZeroVelocity(int d) : d_(d) {}
    int dim() const override { return d_; }
    void eval(const double*, double, double* out) const override {
        for (int k = 0; k < d_; ++k) out[k] = 0.0;
    }

private:
    int d_;
};

struct CallableVelocity final : VelocitySampler {
    using Fn = std::function<void(const double*, double, double*)>;
    CallableVelocity(int d, Fn fn) : d_(d), fn_(std::move(fn)) {}
    int dim() const override { return d_; }
    void eval(const double* x, double t, double* out) const override {
        fn_(x, t, out);
    }

private:
    int d_;
    Fn fn_;
};

}  // namespace mkv
