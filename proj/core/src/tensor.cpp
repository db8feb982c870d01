#include "nfsim/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsim {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), v(shape_product(shape), 0.0) {}

Tensor Tensor::scalar(double x) {
    Tensor t({1});
    t.v[0] = x;
    return t;
}

void Tensor::fill(double x) {
    for (auto& e : v) e = x;
}

bool Tensor::all_finite() const {
    for (double e : v) {
        if (!std::isfinite(e)) return false;
    }
    return true;
}

Tensor uniform_init(std::vector<std::size_t> shape, double bound, RandomStream& rng) {
    Tensor t(std::move(shape));
    for (auto& e : t.v) e = rng.uniform(-bound, bound);
    return t;
}

Tensor gaussian_init(std::vector<std::size_t> shape, double sigma, RandomStream& rng) {
    Tensor t(std::move(shape));
    for (auto& e : t.v) e = sigma * rng.gaussian();
    return t;
}

ParamStore::Slot* ParamStore::add(std::string name, Tensor init, bool trainable) {
    if (index_.count(name)) throw std::invalid_argument("ParamStore: duplicate name " + name);
    auto slot = std::make_unique<Slot>();
    slot->name = std::move(name);
    slot->grad = Tensor(init.shape);
    slot->value = std::move(init);
    slot->trainable = trainable;
    index_[slot->name] = slots_.size();
    slots_.push_back(std::move(slot));
    return slots_.back().get();
}

ParamStore::Slot* ParamStore::find(std::string_view name) {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : slots_[it->second].get();
}

const ParamStore::Slot* ParamStore::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : slots_[it->second].get();
}

void ParamStore::zero_grads() {
    for (auto& s : slots_) s->grad.fill(0.0);
}

std::size_t ParamStore::total_parameters() const {
    std::size_t n = 0;
    for (const auto& s : slots_) n += s->value.size();
    return n;
}

bool ParamStore::values_finite() const {
    for (const auto& s : slots_) {
        if (!s->value.all_finite()) return false;
    }
    return true;
}

void ParamStore::copy_values_from(const ParamStore& other) {
    if (other.count() != count()) throw std::invalid_argument("ParamStore: slot count mismatch");
    for (std::size_t i = 0; i < count(); ++i) {
        if (!slots_[i]->value.same_shape(other.slots_[i]->value)) {
            throw std::invalid_argument("ParamStore: shape mismatch at " + slots_[i]->name);
        }
        slots_[i]->value.v = other.slots_[i]->value.v;
    }
}

void ParamStore::soft_update_from(const ParamStore& live, double tau) {
    if (live.count() != count()) throw std::invalid_argument("ParamStore: slot count mismatch");
    for (std::size_t i = 0; i < count(); ++i) {
        auto& t = slots_[i]->value.v;
        const auto& l = live.slots_[i]->value.v;
        for (std::size_t j = 0; j < t.size(); ++j) {
            t[j] = tau * l[j] + (1.0 - tau) * t[j];
        }
    }
}

AdamState::AdamState(const ParamStore& params, AdamConfig cfg) : cfg_(cfg) {
    m_.reserve(params.count());
    v_.reserve(params.count());
    for (std::size_t i = 0; i < params.count(); ++i) {
        m_.emplace_back(params.slot(i).value.shape);
        v_.emplace_back(params.slot(i).value.shape);
    }
}

void AdamState::step(ParamStore& params) {
    if (params.count() != m_.size()) throw std::invalid_argument("AdamState: store mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.count(); ++i) {
        auto& slot = params.slot(i);
        if (!slot.trainable) continue;
        auto& m = m_[i].v;
        auto& v = v_[i].v;
        const auto& g = slot.grad.v;
        auto& p = slot.value.v;
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            p[j] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    }
}

double grad_check(const std::function<double(const Tensor&)>& f, const Tensor& point,
                  const Tensor& analytic_grad, double h) {
    if (!point.same_shape(analytic_grad)) {
        throw std::invalid_argument("grad_check: gradient shape mismatch");
    }
    Tensor x = point;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x.v[i];
        x.v[i] = keep + h;
        const double fp = f(x);
        x.v[i] = keep - h;
        const double fm = f(x);
        x.v[i] = keep;
        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = analytic_grad.v[i];
        const double denom = std::max(std::abs(numeric) + std::abs(analytic), 1e-5);
        worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
    return worst;
}

} // namespace nfsim
