#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nfsim/random.hpp"

namespace nfsim {

// Dense row-major tensor of doubles. Double precision throughout: gradient
// checks and physical channel gains near 1e-7 both need the headroom.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }
    static Tensor scalar(double x);

    std::size_t size() const { return v.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    double& at(std::size_t i) { return v[i]; }
    double at(std::size_t i) const { return v[i]; }
    double& at(std::size_t i, std::size_t j) { return v[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * shape[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return v[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return v[(i * shape[1] + j) * shape[2] + k];
    }

    void fill(double x);
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    bool all_finite() const;
};

Tensor uniform_init(std::vector<std::size_t> shape, double bound, RandomStream& rng);
Tensor gaussian_init(std::vector<std::size_t> shape, double sigma, RandomStream& rng);

// Named parameters with matching gradient accumulators. Slot addresses are
// stable for the life of the store, so layers keep raw pointers to them.
class ParamStore {
public:
    struct Slot {
        std::string name;
        Tensor value;
        Tensor grad;
        bool trainable = true;  // non-trainable slots carry normalization constants
    };

    Slot* add(std::string name, Tensor init, bool trainable = true);
    Slot* find(std::string_view name);
    const Slot* find(std::string_view name) const;

    void zero_grads();
    std::size_t count() const { return slots_.size(); }
    Slot& slot(std::size_t i) { return *slots_[i]; }
    const Slot& slot(std::size_t i) const { return *slots_[i]; }

    std::size_t total_parameters() const;
    bool values_finite() const;

    // Copies values by position; shapes must match (used for target networks).
    void copy_values_from(const ParamStore& other);
    // target <- tau * live + (1 - tau) * target, slot by slot.
    void soft_update_from(const ParamStore& live, double tau);

private:
    std::vector<std::unique_ptr<Slot>> slots_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard bias-corrected Adam over the trainable slots of a ParamStore.
class AdamState {
public:
    AdamState(const ParamStore& params, AdamConfig cfg);

    void step(ParamStore& params);
    std::size_t step_count() const { return t_; }
    AdamConfig& config() { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::size_t t_ = 0;
};

// Central-finite-difference verification oracle: compares the analytic
// gradient of a scalar function against (f(x+h e_i) - f(x-h e_i)) / 2h and
// returns the worst relative error over all coordinates.
double grad_check(const std::function<double(const Tensor&)>& f, const Tensor& point,
                  const Tensor& analytic_grad, double h);

} // namespace nfsim
